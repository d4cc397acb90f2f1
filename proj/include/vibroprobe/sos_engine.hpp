#pragma once

#include "vibroprobe/model.hpp"
#include "vibroprobe/signal_grid.hpp"

#include <vector>

namespace vp {

// one (ket a, bra a', nu) contribution of the prepared-state response
struct SosTerm {
    cplx coef;       // prefactor incl. the diagram's factor of i
    double pole;     // detection resonance (rad/fs)
    double width;    // its dephasing
    double w_beat;   // omega_a' - omega_a
    double g_beat;   // gamma_a + gamma_a'
};

// rho is the (not necessarily normalized) a-manifold matrix
std::vector<SosTerm> sos_terms(const LevelScheme& s, const std::vector<cplx>& rho, const ProbeCoupling& pc);

SignalGrid sos_frequency_gated(const LevelScheme& s, const PulseSpec& pump, const PulseSpec& probe,
                               const ProbeCoupling& pc, const std::vector<double>& omega, double T);

SignalGrid sos_impulsive(const LevelScheme& s, const ProbeCoupling& pc, const std::vector<double>& omega, double T);

SignalGrid sos_delta_dispersed_prepared(const PreparedState& rho, const LevelScheme& s, const ProbeCoupling& pc,
                                        double omega, const std::vector<double>& delta, double T);

// tau-dispersed kernel S(t,T;tau), zero outside 0 <= tau <= t
SignalGrid sos_time_gated(const LevelScheme& s, const PulseSpec& pump, const ProbeCoupling& pc,
                          const std::vector<double>& t, const std::vector<double>& tau, double T);

// impulsive probe: S(t,T) = value * delta(t - T)
double sos_time_gated_impulsive(const LevelScheme& s, const PulseSpec& pump, const ProbeCoupling& pc,
                                const PulseSpec& probe, double T);

} // namespace vp
