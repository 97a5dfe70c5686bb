#ifndef THERMOBLOB_ERRORS_HPP
#define THERMOBLOB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace thermo {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Violated precondition or domain constraint (bad sizes, bad parameters).
struct InvalidInput : Error {
    using Error::Error;
};

/// Malformed or unreadable file content.
struct DataError : Error {
    using Error::Error;
};

/// Numerical failure: stability bound violated, diverging solution.
struct NumericError : Error {
    using Error::Error;
};

} // namespace thermo

#endif
