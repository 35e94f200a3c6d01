#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

namespace heisflow {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Raised for invalid inputs or configuration (CLI exit code 2).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Raised when a numerical procedure fails (CLI exit code 3).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Non-fatal diagnostics. Default handler prints to stderr.
using WarningHandler = std::function<void(const std::string&)>;
void set_warning_handler(WarningHandler handler);
void warn(const std::string& message);

// Runs body(i) for i in [0, n) on up to `workers` threads (0 or 1 runs inline).
// The first exception thrown by any call is rethrown.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& body);

}  // namespace heisflow
