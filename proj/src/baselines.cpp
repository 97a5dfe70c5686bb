#include "thermoblob/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <set>
#include <string>

namespace thermo {

namespace {

// Portable deterministic RNG: splitmix64 over the seed stream. Avoids the
// implementation-defined behavior of <random> distributions.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double next_unit() { // [0, 1)
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

int nearest_centroid(double v, const std::vector<double>& centroids) {
    int best = 0;
    double best_d = std::abs(v - centroids[0]);
    for (int c = 1; c < static_cast<int>(centroids.size()); ++c) {
        const double d = std::abs(v - centroids[c]);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

// k-means++ seeding: first centroid uniform, then D^2-weighted picks.
std::vector<double> kmeanspp_seed(const std::vector<double>& values, int k,
                                  std::uint64_t seed) {
    SplitMix64 rng(seed);
    const std::size_t n = values.size();
    std::vector<double> centroids;
    centroids.reserve(k);
    centroids.push_back(values[static_cast<std::size_t>(rng.next_unit() * n)]);

    std::vector<double> d2(n);
    while (static_cast<int>(centroids.size()) < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::abs(values[i] - centroids[0]);
            for (std::size_t c = 1; c < centroids.size(); ++c)
                best = std::min(best, std::abs(values[i] - centroids[c]));
            d2[i] = best * best;
            total += d2[i];
        }
        std::size_t pick = 0;
        if (total > 0.0) {
            const double target = rng.next_unit() * total;
            double acc = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc > target) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<std::size_t>(rng.next_unit() * n);
        }
        centroids.push_back(values[pick]);
    }
    return centroids;
}

std::size_t bit_reverse(std::size_t x, int bits) {
    std::size_t r = 0;
    for (int i = 0; i < bits; ++i) {
        r = (r << 1) | (x & 1);
        x >>= 1;
    }
    return r;
}

// In-place iterative radix-2 FFT (forward, e^{-i...}).
void fft_pow2(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    int bits = 0;
    while ((std::size_t{1} << bits) < n)
        ++bits;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = bit_reverse(i, bits);
        if (i < j)
            std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const std::complex<double> u = a[i + j];
                const std::complex<double> v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

// Direct DFT for bins 0..K of a real series; O(N*K), used when N is not a
// power of two.
void dft_direct(const std::vector<double>& x, std::size_t bins,
                std::vector<std::complex<double>>& out) {
    const std::size_t n = x.size();
    out.assign(bins, {0.0, 0.0});
    for (std::size_t k = 0; k < bins; ++k) {
        double re = 0.0, im = 0.0;
        const double w = -2.0 * std::numbers::pi * static_cast<double>(k) /
                         static_cast<double>(n);
        for (std::size_t t = 0; t < n; ++t) {
            const double ang = w * static_cast<double>(t);
            re += x[t] * std::cos(ang);
            im += x[t] * std::sin(ang);
        }
        out[k] = {re, im};
    }
}

// Symmetric Jacobi eigensolver: A (n x n, row-major) is overwritten; columns
// of V hold the eigenvectors. Accurate and deterministic for the modest n
// used here (n = number of frames).
void jacobi_eigen(std::vector<double>& a, std::vector<double>& v, int n) {
    v.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i) * n + i] = 1.0;

    auto at = [&a, n](int r, int c) -> double& {
        return a[static_cast<std::size_t>(r) * n + c];
    };
    auto vt = [&v, n](int r, int c) -> double& {
        return v[static_cast<std::size_t>(r) * n + c];
    };

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q)
                off += at(p, q) * at(p, q);
        if (off < 1e-300)
            break;
        double diag = 0.0;
        for (int p = 0; p < n; ++p)
            diag += at(p, p) * at(p, p);
        if (off <= 1e-30 * (diag + off))
            break;

        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (apq == 0.0)
                    continue;
                const double app = at(p, p);
                const double aqq = at(q, q);
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (int i = 0; i < n; ++i) {
                    const double aip = at(i, p);
                    const double aiq = at(i, q);
                    at(i, p) = c * aip - s * aiq;
                    at(i, q) = s * aip + c * aiq;
                }
                for (int i = 0; i < n; ++i) {
                    const double api = at(p, i);
                    const double aqi = at(q, i);
                    at(p, i) = c * api - s * aqi;
                    at(q, i) = s * api + c * aqi;
                }
                for (int i = 0; i < n; ++i) {
                    const double vip = vt(i, p);
                    const double viq = vt(i, q);
                    vt(i, p) = c * vip - s * viq;
                    vt(i, q) = s * vip + c * viq;
                }
            }
        }
    }
}

} // namespace

BinaryMask hard_threshold(const ThermalFrame& frame, double cutoff_temperature) {
    if (!std::isfinite(cutoff_temperature))
        throw InvalidInput("threshold cutoff must be finite");
    BinaryMask mask;
    mask.width = frame.width();
    mask.height = frame.height();
    mask.data.resize(frame.data().size());
    for (std::size_t i = 0; i < mask.data.size(); ++i)
        mask.data[i] = frame.data()[i] >= cutoff_temperature ? 1 : 0;
    return mask;
}

ThermalFrame contrast_reconstruct(const ThermalFrame& frame,
                                  double sound_temperature, double expected_delta) {
    if (expected_delta == 0.0 || !std::isfinite(expected_delta) ||
        !std::isfinite(sound_temperature))
        throw InvalidInput("contrast reconstruction needs a finite nonzero delta");
    std::vector<double> out(frame.data().size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double v = (frame.data()[i] - sound_temperature) / expected_delta;
        out[i] = std::clamp(v, 0.0, 1.0);
    }
    return ThermalFrame(frame.width(), frame.height(), std::move(out),
                        frame.pixel_pitch());
}

KMeansResult kmeans_cluster(const ThermalFrame& frame, int k, std::uint64_t seed) {
    if (k < 2)
        throw InvalidInput("k must be >= 2");
    const std::vector<double>& values = frame.data();
    {
        std::set<double> distinct(values.begin(), values.end());
        if (static_cast<std::size_t>(k) > distinct.size())
            throw InvalidInput("k exceeds the number of distinct values: clusters "
                               "would degenerate");
    }

    std::vector<double> centroids = kmeanspp_seed(values, k, seed);
    std::vector<int> labels(values.size(), 0);

    double prev_inertia = std::numeric_limits<double>::infinity();
    double inertia = 0.0;
    int iter = 0;
    for (; iter < 300; ++iter) {
        inertia = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            labels[i] = nearest_centroid(values[i], centroids);
            const double d = values[i] - centroids[labels[i]];
            inertia += d * d;
        }
        if (inertia > prev_inertia * (1.0 + 1e-12))
            throw NumericError("k-means inertia increased between iterations");
        prev_inertia = inertia;

        std::vector<double> sums(k, 0.0);
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < values.size(); ++i) {
            sums[labels[i]] += values[i];
            ++counts[labels[i]];
        }
        double max_move = 0.0;
        for (int c = 0; c < k; ++c) {
            if (counts[c] == 0)
                continue; // empty cluster keeps its centroid
            const double updated = sums[c] / static_cast<double>(counts[c]);
            max_move = std::max(max_move, std::abs(updated - centroids[c]));
            centroids[c] = updated;
        }
        if (max_move < 1e-9)
            break;
    }

    // Sort centroids ascending and remap labels so output is reproducible.
    std::vector<int> order(k);
    for (int c = 0; c < k; ++c)
        order[c] = c;
    std::sort(order.begin(), order.end(),
              [&centroids](int l, int r) { return centroids[l] < centroids[r]; });
    std::vector<int> rank(k);
    std::vector<double> sorted(k);
    for (int pos = 0; pos < k; ++pos) {
        rank[order[pos]] = pos;
        sorted[pos] = centroids[order[pos]];
    }
    inertia = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        labels[i] = rank[labels[i]];
        const double d = values[i] - sorted[labels[i]];
        inertia += d * d;
    }
    return KMeansResult{std::move(labels), std::move(sorted), inertia, iter + 1};
}

PhaseStack::PhaseStack(int width, int height, int series_length, double dt,
                       std::vector<std::vector<double>> phase_bins,
                       std::vector<std::vector<double>> amplitude_bins)
    : width_(width), height_(height), series_length_(series_length), dt_(dt),
      phase_bins_(std::move(phase_bins)), amplitude_bins_(std::move(amplitude_bins)) {
    if (phase_bins_.size() != amplitude_bins_.size() || phase_bins_.empty())
        throw InvalidInput("phase stack needs matching phase/amplitude bins");
}

PhaseStack ppt_transform(const ThermalSequence& seq) {
    const std::size_t n = seq.size();
    if (n < 4)
        throw InvalidInput("pulse-phase transform needs at least 4 frames");
    const int w = seq.width();
    const int h = seq.height();
    const std::size_t pixels = static_cast<std::size_t>(w) * h;
    const std::size_t bins = n / 2 + 1;
    const bool pow2 = (n & (n - 1)) == 0;

    std::vector<std::vector<double>> phase(bins, std::vector<double>(pixels));
    std::vector<std::vector<double>> amplitude(bins, std::vector<double>(pixels));

    std::vector<double> series(n);
    std::vector<std::complex<double>> spectrum;
    for (std::size_t p = 0; p < pixels; ++p) {
        double mean = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            series[t] = seq.frame(t).data()[p];
            mean += series[t];
        }
        mean /= static_cast<double>(n);
        for (double& v : series)
            v -= mean;

        if (pow2) {
            std::vector<std::complex<double>> buf(n);
            for (std::size_t t = 0; t < n; ++t)
                buf[t] = {series[t], 0.0};
            fft_pow2(buf);
            spectrum.assign(buf.begin(), buf.begin() + bins);
        } else {
            dft_direct(series, bins, spectrum);
        }

        for (std::size_t k = 0; k < bins; ++k) {
            const double amp = std::abs(spectrum[k]);
            amplitude[k][p] = amp;
            phase[k][p] =
                amp < 1e-12 ? 0.0 : std::atan2(spectrum[k].imag(), spectrum[k].real());
        }
    }
    return PhaseStack(w, h, static_cast<int>(n), seq.dt(), std::move(phase),
                      std::move(amplitude));
}

PhaseSelection ppt_phase_at(const PhaseStack& stack, double target_frequency) {
    if (!(target_frequency > 0.0) || target_frequency > stack.nyquist())
        throw InvalidInput("target frequency must lie in (0, Nyquist]");
    const double exact_bin =
        target_frequency * stack.series_length() * stack.dt();
    // nearest bin; ties break toward the lower bin
    std::size_t k = static_cast<std::size_t>(std::ceil(exact_bin - 0.5));
    k = std::min(std::max<std::size_t>(k, 1), stack.bin_count() - 1);

    return PhaseSelection{ThermalFrame(stack.width(), stack.height(),
                                       stack.phase_bin(k)),
                          k, stack.bin_frequency(k)};
}

ComponentStack pct_transform(const ThermalSequence& seq, int n_components) {
    const int n = static_cast<int>(seq.size());
    if (n < 2)
        throw InvalidInput("principal-component transform needs at least 2 frames");
    const std::size_t pixels =
        static_cast<std::size_t>(seq.width()) * seq.height();
    if (n_components < 1 ||
        static_cast<std::size_t>(n_components) > std::min<std::size_t>(n, pixels))
        throw InvalidInput("n_components must be in [1, min(frames, pixels)]");

    // X: n x pixels, each pixel series centered over time.
    std::vector<double> x(static_cast<std::size_t>(n) * pixels);
    for (std::size_t p = 0; p < pixels; ++p) {
        double mean = 0.0;
        for (int t = 0; t < n; ++t)
            mean += seq.frame(t).data()[p];
        mean /= n;
        for (int t = 0; t < n; ++t)
            x[static_cast<std::size_t>(t) * pixels + p] =
                seq.frame(t).data()[p] - mean;
    }

    // Temporal Gram matrix G = X X^T (n x n), eigen-decomposed by Jacobi.
    std::vector<double> gram(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double dot = 0.0;
            const double* ri = &x[static_cast<std::size_t>(i) * pixels];
            const double* rj = &x[static_cast<std::size_t>(j) * pixels];
            for (std::size_t p = 0; p < pixels; ++p)
                dot += ri[p] * rj[p];
            gram[static_cast<std::size_t>(i) * n + j] = dot;
            gram[static_cast<std::size_t>(j) * n + i] = dot;
        }
    }
    double total_var = 0.0;
    for (int i = 0; i < n; ++i)
        total_var += gram[static_cast<std::size_t>(i) * n + i];

    std::vector<double> vecs;
    jacobi_eigen(gram, vecs, n);

    std::vector<std::pair<double, int>> eig(n);
    for (int i = 0; i < n; ++i)
        eig[i] = {gram[static_cast<std::size_t>(i) * n + i], i};
    std::sort(eig.begin(), eig.end(), [](const auto& l, const auto& r) {
        if (l.first != r.first)
            return l.first > r.first;
        return l.second < r.second;
    });

    ComponentStack out;
    // Numerical-rank cutoff: the Gram route squares the condition number, so
    // sigmas below ~sqrt(n*eps)*sigma_max carry only eigensolver noise.
    const double sv_max = std::sqrt(std::max(eig[0].first, 0.0));
    const double sv_floor =
        2.0 * std::sqrt(static_cast<double>(n) *
                        std::numeric_limits<double>::epsilon()) *
        sv_max;

    std::vector<std::vector<double>> kept;
    for (int c = 0; c < n_components; ++c) {
        const double lambda = std::max(eig[c].first, 0.0);
        const double sv = std::sqrt(lambda);
        out.singular_values.push_back(sv);
        if (sv <= sv_floor)
            continue; // below numerical rank: no meaningful map

        const int col = eig[c].second;
        std::vector<double> comp(pixels, 0.0);
        for (int t = 0; t < n; ++t) {
            const double u = vecs[static_cast<std::size_t>(t) * n + col];
            const double* row = &x[static_cast<std::size_t>(t) * pixels];
            for (std::size_t p = 0; p < pixels; ++p)
                comp[p] += u * row[p];
        }
        for (double& v : comp)
            v /= sv;
        kept.push_back(std::move(comp));
    }

    // One modified Gram-Schmidt pass pins pairwise orthonormality to machine
    // precision (the raw vectors carry eigensolver residue scaled by the
    // singular-value gaps).
    for (std::size_t i = 0; i < kept.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            double dot = 0.0;
            for (std::size_t p = 0; p < pixels; ++p)
                dot += kept[i][p] * kept[j][p];
            for (std::size_t p = 0; p < pixels; ++p)
                kept[i][p] -= dot * kept[j][p];
        }
        double norm = 0.0;
        for (double v : kept[i])
            norm += v * v;
        norm = std::sqrt(norm);
        for (double& v : kept[i])
            v /= norm;
    }

    for (std::vector<double>& comp : kept) {
        // Sign convention: the first maximal-|value| pixel is positive.
        std::size_t arg = 0;
        double best = -1.0;
        for (std::size_t p = 0; p < pixels; ++p) {
            if (std::abs(comp[p]) > best) {
                best = std::abs(comp[p]);
                arg = p;
            }
        }
        if (comp[arg] < 0.0)
            for (double& v : comp)
                v = -v;
        out.components.emplace_back(seq.width(), seq.height(), std::move(comp),
                                    seq.frames().front().pixel_pitch());
    }
    return out;
}

} // namespace thermo
