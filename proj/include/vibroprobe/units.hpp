#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace vp {

using cplx = std::complex<double>;
inline constexpr cplx I{0.0, 1.0};

inline constexpr double c_cm_per_fs = 2.99792458e-5;
inline constexpr double kB_cm1_per_K = 0.6950348;

double cm1_to_radfs(double nu);
double radfs_to_cm1(double w);
// beta*hbar in fs for a temperature in K
double beta_hbar_fs(double kelvin);

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// bad user input; the CLI maps it to exit code 2
struct ConfigError : Error {
    using Error::Error;
};
// quadrature did not settle; exit code 3
struct ConvergenceError : Error {
    using Error::Error;
};

} // namespace vp
