#include "vibroprobe/units.hpp"

#include <cmath>

namespace vp {

double cm1_to_radfs(double nu) { return 2.0 * std::numbers::pi * c_cm_per_fs * nu; }

double radfs_to_cm1(double w) { return w / (2.0 * std::numbers::pi * c_cm_per_fs); }

double beta_hbar_fs(double kelvin)
{
    if (!(kelvin > 0.0)) throw Error("temperature must be positive");
    return 1.0 / cm1_to_radfs(kB_cm1_per_K * kelvin);
}

} // namespace vp
