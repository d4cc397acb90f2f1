#pragma once

#include "vibroprobe/model.hpp"
#include "vibroprobe/quad.hpp"
#include "vibroprobe/signal_grid.hpp"

#include <optional>
#include <vector>

namespace vp {

// trajectories are gaps: omega_ca(t) for c-states, omega_ad(t) for d-states,
// measured from a-state ref_a (other a-states shift by their offset)
struct ScJob {
    LevelScheme scheme;
    std::vector<FrequencyTrajectory> tr_c, tr_d;
    ProbeCoupling coupling;
    PulseSpec pump = PulseSpec::impulsive(1.0);
    std::size_t ref_a = 0;

    void validate() const;
};

enum class LineshapeMode { two_time, stationary };

struct Lineshape {
    BathSpec bath;
    LineshapeMode mode = LineshapeMode::two_time;
    bool real_only = false;
};

struct LineshapeResult {
    cplx g;
    double re() const { return g.real(); }
    double im() const { return g.imag(); }
};

LineshapeResult lineshape_g(const BathSpec& bath, double T, double t);
// classical-stationary form, s = t - tau >= 0
LineshapeResult lineshape_stationary(const BathSpec& bath, double s);

struct SpectralDensity {
    std::vector<double> odd; // C''(w)
    std::vector<double> full; // [1 + coth(beta w / 2)] C''(w)
};
SpectralDensity brownian_spectral_density(const BathSpec& bath, const std::vector<double>& omega);

SignalGrid sc_delta_dispersed(const ScJob& job, const std::vector<double>& omega, const std::vector<double>& delta,
                              double T, const QuadSpec& q = {}, unsigned threads = 1);

SignalGrid sc_cumulant(const ScJob& job, const Lineshape& ls, const std::vector<double>& omega,
                       const std::vector<double>& delta, double T, const QuadSpec& q = {}, unsigned threads = 1);

// Delta-integrated signal, i.e. the slice tau3 = T that an impulsive probe reads;
// its imaginary part is the impulsive-probe spectrum
SignalGrid sc_probe_slice(const ScJob& job, const std::optional<Lineshape>& ls, const std::vector<double>& omega,
                          double T, const QuadSpec& q = {});

struct McResult {
    SignalGrid mean;
    SignalGrid stderr_; // re/im hold the standard errors of re/im
};

enum class McTarget { delta_dispersed, probe_slice };

// job trajectories are the means; every branch gets its own OU noise
McResult mc_ensemble_average(const ScJob& job, const BathSpec& bath, const std::vector<double>& omega,
                             const std::vector<double>& delta, double T, std::size_t n_traj,
                             std::uint64_t master_seed, McTarget target, const QuadSpec& q = {},
                             unsigned threads = 1);

} // namespace vp
