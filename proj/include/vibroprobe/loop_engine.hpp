#pragma once

#include "vibroprobe/model.hpp"
#include "vibroprobe/quad.hpp"
#include "vibroprobe/signal_grid.hpp"

#include <optional>
#include <vector>

namespace vp {

// diagonal generator w - i*gamma per state; c/d energies may follow a
// time-dependent gap measured from a-state ref_a
struct EffectiveHamiltonian {
    LevelScheme scheme;
    std::vector<std::optional<FrequencyTrajectory>> gap_c, gap_d;
    std::size_t ref_a = 0;

    static EffectiveHamiltonian from_scheme(const LevelScheme& s);
    void validate() const;
};

// Delta-dispersed signal on an (omega x Delta) grid by direct propagation
SignalGrid loop_delta_dispersed(const EffectiveHamiltonian& H, const PulseSpec& pump, const ProbeCoupling& pc,
                                const std::vector<double>& omega, const std::vector<double>& delta, double T,
                                const QuadSpec& q = {}, unsigned threads = 1);

SignalGrid resolvent_frequency_gated(const EffectiveHamiltonian& H, const PulseSpec& pump, const PulseSpec& probe,
                                     const ProbeCoupling& pc, const std::vector<double>& omega, double T,
                                     double tol = 1e-4, unsigned threads = 1);

// Im of the probe-weighted Delta quadrature; sd holds one omega row
double assemble_from_delta(const std::vector<double>& delta, const std::vector<cplx>& sd, const PulseSpec& probe,
                           double omega);
// full grid version (axis1 omega, axis2 Delta)
SignalGrid assemble_from_delta(const SignalGrid& sd, const PulseSpec& probe);

// Im of the tau quadrature of E2*(t-T) E2(tau-T) S(t,T;tau), one t row
double assemble_time_gated(const std::vector<double>& tau, const std::vector<cplx>& kernel, const PulseSpec& probe,
                           double t, double T);

} // namespace vp
