#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "thermoblob/baselines.hpp"

using namespace thermo;

namespace {

constexpr double kPi = std::numbers::pi;

// Optimal 1-D k-means by dynamic programming over sorted values (exact,
// O(k n^2)); the independent bound Lloyd's result is compared against.
double optimal_1d_kmeans_inertia(std::vector<double> values, int k) {
    std::sort(values.begin(), values.end());
    const int n = static_cast<int>(values.size());
    std::vector<double> prefix(n + 1, 0.0), prefix_sq(n + 1, 0.0);
    for (int i = 0; i < n; ++i) {
        prefix[i + 1] = prefix[i] + values[i];
        prefix_sq[i + 1] = prefix_sq[i] + values[i] * values[i];
    }
    auto sse = [&](int lo, int hi) { // cost of segment [lo, hi)
        const double cnt = hi - lo;
        const double sum = prefix[hi] - prefix[lo];
        return (prefix_sq[hi] - prefix_sq[lo]) - sum * sum / cnt;
    };

    const double inf = 1e300;
    std::vector<double> prev(n + 1, inf), cur(n + 1, inf);
    prev[0] = 0.0;
    for (int m = 1; m <= k; ++m) {
        std::fill(cur.begin(), cur.end(), inf);
        for (int end = m; end <= n; ++end)
            for (int split = m - 1; split < end; ++split)
                cur[end] = std::min(cur[end], prev[split] + sse(split, end));
        std::swap(prev, cur);
    }
    return prev[n];
}

ThermalSequence make_sequence(int w, int h, int n, double dt,
                              const std::function<double(int px, int t)>& value) {
    std::vector<ThermalFrame> frames;
    for (int t = 0; t < n; ++t) {
        std::vector<double> data(static_cast<std::size_t>(w) * h);
        for (int p = 0; p < w * h; ++p)
            data[p] = value(p, t);
        frames.emplace_back(w, h, std::move(data));
    }
    return ThermalSequence(std::move(frames), dt);
}

double wrap_angle(double a) {
    while (a > kPi)
        a -= 2.0 * kPi;
    while (a <= -kPi)
        a += 2.0 * kPi;
    return a;
}

} // namespace

TEST_CASE("hard threshold") {
    const ThermalFrame cold = ThermalFrame::constant(5, 4, 30.0);
    CHECK(hard_threshold(cold, 32.0).count() == 0);

    oracles::Rng rng(10);
    const ThermalFrame f = oracles::random_frame(9, 9, rng);
    const FrameStats s = frame_stats(f);
    CHECK(hard_threshold(f, s.min).count() == f.data().size());

    const BinaryMask m = hard_threshold(f, 25.0);
    for (int y = 0; y < 9; ++y)
        for (int x = 0; x < 9; ++x)
            CHECK(m.at(x, y) == (f.at(x, y) >= 25.0));
}

TEST_CASE("hard threshold is monotone in the cutoff") {
    oracles::Rng rng(11);
    const ThermalFrame f = oracles::random_frame(16, 16, rng);
    std::size_t prev = f.data().size();
    for (double cutoff = 10.0; cutoff <= 40.0; cutoff += 0.5) {
        const std::size_t now = hard_threshold(f, cutoff).count();
        CHECK(now <= prev);
        prev = now;
    }
}

TEST_CASE("contrast reconstruction") {
    const ThermalFrame sound = ThermalFrame::constant(6, 6, 30.0);
    const ThermalFrame zero = contrast_reconstruct(sound, 30.0, 2.0);
    for (double v : zero.data())
        CHECK(v == 0.0);

    const ThermalFrame hot = ThermalFrame::constant(6, 6, 32.0);
    const ThermalFrame one = contrast_reconstruct(hot, 30.0, 2.0);
    for (double v : one.data())
        CHECK(v == 1.0);

    const ThermalFrame mid = ThermalFrame::constant(6, 6, 31.0);
    const ThermalFrame half = contrast_reconstruct(mid, 30.0, 2.0);
    for (double v : half.data())
        CHECK(v == 0.5);

    CHECK_THROWS_AS(contrast_reconstruct(sound, 30.0, 0.0), InvalidInput);
}

TEST_CASE("k-means: two distinct values, k=2") {
    std::vector<double> data;
    for (int i = 0; i < 18; ++i)
        data.push_back(i % 3 == 0 ? 20.0 : 10.0);
    const ThermalFrame f(6, 3, std::move(data));

    const KMeansResult r = kmeans_cluster(f, 2, 7);
    CHECK(r.centroids == std::vector<double>{10.0, 20.0});
    CHECK(r.inertia == doctest::Approx(0.0));
    for (std::size_t i = 0; i < f.data().size(); ++i)
        CHECK(r.labels[i] == (f.data()[i] == 20.0 ? 1 : 0));
}

TEST_CASE("k-means rejects degenerate requests") {
    const ThermalFrame f(2, 2, {1.0, 2.0, 3.0, 4.0});
    CHECK_THROWS_AS(kmeans_cluster(f, 1, 0), InvalidInput);
    CHECK_THROWS_AS(kmeans_cluster(ThermalFrame::constant(4, 4, 5.0), 2, 0),
                    InvalidInput);
    CHECK_THROWS_AS(kmeans_cluster(f, 5, 0), InvalidInput);
}

TEST_CASE("k-means is deterministic in the seed") {
    oracles::Rng rng(12);
    const ThermalFrame f = oracles::random_frame(20, 20, rng);
    const KMeansResult a = kmeans_cluster(f, 4, 99);
    const KMeansResult b = kmeans_cluster(f, 4, 99);
    CHECK(a.labels == b.labels);
    CHECK(a.centroids == b.centroids);
    CHECK(a.inertia == b.inertia);
}

TEST_CASE("k-means: three separated gaussians reach near-optimal inertia") {
    oracles::Rng rng(13);
    std::vector<double> data;
    const double centers[3] = {10.0, 25.0, 40.0};
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < 100; ++i) {
            // Box-Muller from deterministic uniforms
            const double u1 = rng.uniform(1e-12, 1.0);
            const double u2 = rng.uniform(0.0, 1.0);
            const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
            data.push_back(centers[c] + 1.5 * z);
        }
    const double optimal = optimal_1d_kmeans_inertia(data, 3);
    const ThermalFrame f(300, 1, std::move(data));

    const KMeansResult r = kmeans_cluster(f, 3, 5);
    CHECK(r.inertia <= optimal * 1.01);
    CHECK(r.inertia >= optimal * (1.0 - 1e-12)); // optimal is a true lower bound
    CHECK(std::is_sorted(r.centroids.begin(), r.centroids.end()));
}

TEST_CASE("ppt: constant pixels have zero spectrum and zero phase") {
    const ThermalSequence seq =
        make_sequence(3, 2, 16, 5.0, [](int, int) { return 27.5; });
    const PhaseStack stack = ppt_transform(seq);
    REQUIRE(stack.bin_count() == 9);
    for (std::size_t k = 1; k < stack.bin_count(); ++k)
        for (double a : stack.amplitude_bin(k))
            CHECK(a < 1e-12);
    for (std::size_t k = 0; k < stack.bin_count(); ++k)
        for (double p : stack.phase_bin(k))
            CHECK(p == 0.0);
}

TEST_CASE("ppt: cosine and sine land on bin 1 with the right phase") {
    const int n = 64;
    const ThermalSequence seq = make_sequence(2, 1, n, 1.0, [n](int px, int t) {
        const double ang = 2.0 * kPi * t / n;
        return px == 0 ? std::cos(ang) : std::sin(ang);
    });
    const PhaseStack stack = ppt_transform(seq);

    // amplitude peak exactly at bin 1
    for (std::size_t k = 1; k < stack.bin_count(); ++k) {
        if (k == 1) {
            CHECK(stack.amplitude_bin(k)[0] == doctest::Approx(n / 2.0).epsilon(1e-9));
        } else {
            CHECK(stack.amplitude_bin(k)[0] < 1e-9);
        }
    }
    CHECK(std::abs(stack.phase_bin(1)[0] - 0.0) < 1e-9);          // cosine
    CHECK(std::abs(stack.phase_bin(1)[1] - (-kPi / 2.0)) < 1e-9); // sine
}

TEST_CASE("ppt: a time lag shows up as a linear phase difference") {
    const int n = 128;
    const double dt = 2.0, tau = 6.0; // lag = 3 samples
    const double f1 = 1.0 / (n * dt);
    const ThermalSequence seq = make_sequence(2, 1, n, dt, [&](int px, int t) {
        const double time = t * dt - (px == 1 ? tau : 0.0);
        return 25.0 + std::sin(2.0 * kPi * f1 * time) +
               0.4 * std::sin(2.0 * kPi * 3.0 * f1 * time + 0.7);
    });
    const PhaseStack stack = ppt_transform(seq);
    for (std::size_t k : {std::size_t{1}, std::size_t{3}}) {
        const double want = 2.0 * kPi * stack.bin_frequency(k) * tau;
        const double got = stack.phase_bin(k)[0] - stack.phase_bin(k)[1];
        CHECK(std::abs(wrap_angle(got - want)) < 1e-6);
    }
}

TEST_CASE("ppt: Parseval and mean-shift invariance") {
    oracles::Rng rng(14);
    const int n = 48; // not a power of two: exercises the direct path
    std::vector<double> series(n);
    for (double& v : series)
        v = rng.uniform(20.0, 30.0);

    const ThermalSequence seq =
        make_sequence(1, 1, n, 0.5, [&](int, int t) { return series[t]; });
    const PhaseStack stack = ppt_transform(seq);

    double variance = 0.0, mean = 0.0;
    for (double v : series)
        mean += v;
    mean /= n;
    for (double v : series)
        variance += (v - mean) * (v - mean);

    // real-signal folding: bins 1..n/2-1 appear twice, Nyquist once (n even)
    double spectral = stack.amplitude_bin(0)[0] * stack.amplitude_bin(0)[0];
    for (std::size_t k = 1; k < stack.bin_count(); ++k) {
        const double a2 = stack.amplitude_bin(k)[0] * stack.amplitude_bin(k)[0];
        spectral += (k == stack.bin_count() - 1 && n % 2 == 0) ? a2 : 2.0 * a2;
    }
    CHECK(spectral / n == doctest::Approx(variance).epsilon(1e-9));

    // adding a constant to the series leaves every phase untouched
    const ThermalSequence shifted =
        make_sequence(1, 1, n, 0.5, [&](int, int t) { return series[t] + 13.25; });
    const PhaseStack stack2 = ppt_transform(shifted);
    for (std::size_t k = 1; k < stack.bin_count(); ++k)
        CHECK(std::abs(stack.phase_bin(k)[0] - stack2.phase_bin(k)[0]) < 1e-9);
}

TEST_CASE("ppt rejects short sequences") {
    CHECK_THROWS_AS(
        ppt_transform(make_sequence(2, 2, 3, 1.0, [](int, int t) { return t; })),
        InvalidInput);
}

TEST_CASE("ppt_phase_at: bin selection") {
    const int n = 64;
    const ThermalSequence seq = make_sequence(2, 2, n, 1.0, [n](int px, int t) {
        return std::cos(2.0 * kPi * t * (1 + px % 2) / n);
    });
    const PhaseStack stack = ppt_transform(seq);
    const double f1 = stack.bin_frequency(1);

    CHECK(ppt_phase_at(stack, f1).bin == 1);
    CHECK(ppt_phase_at(stack, f1).bin_frequency == doctest::Approx(f1));
    CHECK(ppt_phase_at(stack, 1.4 * f1).bin == 1);  // nearer bin
    CHECK(ppt_phase_at(stack, 1.5 * f1).bin == 1);  // tie breaks downward
    CHECK(ppt_phase_at(stack, 1.51 * f1).bin == 2);

    CHECK_THROWS_AS(ppt_phase_at(stack, 0.0), InvalidInput);
    CHECK_THROWS_AS(ppt_phase_at(stack, stack.nyquist() * 1.01), InvalidInput);
}

TEST_CASE("ppt_phase_at: 0.24 mHz on a dt=5s N=4096 sequence picks bin 5") {
    const int n = 4096;
    const double dt = 5.0;
    const ThermalSequence seq = make_sequence(1, 1, n, dt, [&](int, int t) {
        return 24.0 + std::sin(2.0 * kPi * 5.0 * t / n) +
               0.5 * std::sin(2.0 * kPi * 11.0 * t / n);
    });
    const PhaseStack stack = ppt_transform(seq);
    const PhaseSelection sel = ppt_phase_at(stack, 0.24e-3);
    CHECK(sel.bin == 5); // round(0.24e-3 * 4096 * 5) = round(4.915)
    CHECK(sel.bin_frequency == doctest::Approx(5.0 / (n * dt)).epsilon(1e-12));
}

TEST_CASE("pct: rank-1 sequence is captured by the first component") {
    oracles::Rng rng(15);
    const int w = 8, h = 6, n = 10;
    std::vector<double> pattern(static_cast<std::size_t>(w) * h);
    for (double& v : pattern)
        v = rng.uniform(-1.0, 1.0);

    const ThermalSequence seq = make_sequence(
        w, h, n, 1.0, [&](int px, int t) { return 24.0 + pattern[px] * (t + 1.0); });
    const ComponentStack stack = pct_transform(seq, 3);

    REQUIRE(stack.singular_values.size() == 3);
    double total = 0.0;
    for (double sv : stack.singular_values)
        total += sv * sv;
    CHECK(stack.singular_values[0] * stack.singular_values[0] >= 0.99999 * total);

    // first component proportional to the pattern (zero-mean direction)
    REQUIRE(!stack.components.empty());
    const ThermalFrame& c0 = stack.components[0];
    double dot = 0.0, nc = 0.0, np = 0.0;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        dot += c0.data()[i] * pattern[i];
        nc += c0.data()[i] * c0.data()[i];
        np += pattern[i] * pattern[i];
    }
    CHECK(std::abs(dot) / std::sqrt(nc * np) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("pct: all-constant sequence reports zero singular values") {
    const ThermalSequence seq =
        make_sequence(4, 4, 6, 1.0, [](int, int) { return 19.0; });
    const ComponentStack stack = pct_transform(seq, 4);
    REQUIRE(stack.singular_values.size() == 4);
    for (double sv : stack.singular_values)
        CHECK(sv == 0.0);
    CHECK(stack.components.empty());
}

TEST_CASE("pct: orthonormal components, conserved variance, reconstruction") {
    oracles::Rng rng(16);
    const int w = 6, h = 6, n = 8;
    std::vector<double> data(static_cast<std::size_t>(w) * h * n);
    for (double& v : data)
        v = rng.uniform(15.0, 35.0);
    const ThermalSequence seq = make_sequence(
        w, h, n, 1.0,
        [&](int px, int t) { return data[static_cast<std::size_t>(t) * w * h + px]; });

    const int full = n; // min(n, pixels) = 8
    const ComponentStack stack = pct_transform(seq, full);
    REQUIRE(static_cast<int>(stack.singular_values.size()) == full);

    // centered data and its total variance
    const std::size_t pixels = static_cast<std::size_t>(w) * h;
    std::vector<double> centered(static_cast<std::size_t>(n) * pixels);
    for (std::size_t p = 0; p < pixels; ++p) {
        double mean = 0.0;
        for (int t = 0; t < n; ++t)
            mean += seq.frame(t).data()[p];
        mean /= n;
        for (int t = 0; t < n; ++t)
            centered[static_cast<std::size_t>(t) * pixels + p] =
                seq.frame(t).data()[p] - mean;
    }
    double total_var = 0.0;
    for (double v : centered)
        total_var += v * v;

    double sv_sq = 0.0;
    for (double sv : stack.singular_values)
        sv_sq += sv * sv;
    CHECK(sv_sq == doctest::Approx(total_var).epsilon(1e-9));

    // descending order and orthonormality
    for (std::size_t i = 1; i < stack.singular_values.size(); ++i)
        CHECK(stack.singular_values[i] <= stack.singular_values[i - 1] + 1e-12);
    for (std::size_t i = 0; i < stack.components.size(); ++i) {
        for (std::size_t j = i; j < stack.components.size(); ++j) {
            double dot = 0.0;
            for (std::size_t p = 0; p < pixels; ++p)
                dot += stack.components[i].data()[p] * stack.components[j].data()[p];
            CHECK(std::abs(dot - (i == j ? 1.0 : 0.0)) < 1e-10);
        }
    }

    // reconstruction through test-side temporal scores u_i = X v_i / sv_i
    std::vector<double> rebuilt(centered.size(), 0.0);
    for (std::size_t c = 0; c < stack.components.size(); ++c) {
        const double sv = stack.singular_values[c];
        if (sv <= 0.0)
            continue;
        std::vector<double> u(n, 0.0);
        for (int t = 0; t < n; ++t) {
            for (std::size_t p = 0; p < pixels; ++p)
                u[t] += centered[static_cast<std::size_t>(t) * pixels + p] *
                        stack.components[c].data()[p];
            u[t] /= sv;
        }
        for (int t = 0; t < n; ++t)
            for (std::size_t p = 0; p < pixels; ++p)
                rebuilt[static_cast<std::size_t>(t) * pixels + p] +=
                    sv * u[t] * stack.components[c].data()[p];
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < centered.size(); ++i)
        worst = std::max(worst, std::abs(rebuilt[i] - centered[i]));
    CHECK(worst < 1e-9 * std::max(1.0, std::sqrt(total_var)));

    // sign convention: max-|value| pixel positive
    for (const ThermalFrame& comp : stack.components) {
        double best = 0.0, at = 0.0;
        for (double v : comp.data())
            if (std::abs(v) > best) {
                best = std::abs(v);
                at = v;
            }
        CHECK(at > 0.0);
    }
}

TEST_CASE("pct input validation") {
    const ThermalSequence seq =
        make_sequence(3, 3, 4, 1.0, [](int px, int t) { return px * 0.1 + t; });
    CHECK_THROWS_AS(pct_transform(seq, 0), InvalidInput);
    CHECK_THROWS_AS(pct_transform(seq, 5), InvalidInput); // > min(frames, pixels)
}
