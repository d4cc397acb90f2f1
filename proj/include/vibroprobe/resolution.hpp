#pragma once

#include "vibroprobe/fields.hpp"
#include "vibroprobe/model.hpp"
#include "vibroprobe/quad.hpp"
#include "vibroprobe/semiclassical_engine.hpp"
#include "vibroprobe/signal_grid.hpp"

#include <vector>

namespace vp {

struct ChirpClosedForm {
    double delta0;    // rad/fs
    double sigma_eff; // rad/fs
};

// alpha in rad/fs^2; returns the textbook center and width of the dressed Gaussian
ChirpClosedForm chirp_closed_form(double omega0, double omega_ac0, double alpha, double T, double gamma_a,
                                  double sigma_pr);
// sigma_eff * sigma_pr = sqrt(1 + alpha^2 sigma_pr^4)
double uncertainty_product(double sigma_pr, double alpha);

// 2 exp(-gamma_a (t + tau)) cos(int_tau^t w_ac), zero for tau > t
std::vector<cplx> matter_kernel(const FrequencyTrajectory& w_ac, double gamma_a, double t,
                                const std::vector<double>& tau);

// S(Delta) = int dtau E2(tau - T) K(tau) exp(-i (omega + Delta)(tau - T)) on a uniform tau grid
SignalGrid dressed_delta_signal(const std::vector<double>& tau, const std::vector<cplx>& kernel,
                                const PulseSpec& probe, double omega, double T, const std::vector<double>& delta);

// (dDelta / 2pi) sum_j S(omega, Delta_j) exp(+i (omega + Delta_j)(tau - T)); axis1 omega, axis2 Delta
SignalGrid delta_to_tau(const SignalGrid& sd, const std::vector<double>& tau, double T);
// inverse: dtau sum_k S(omega, tau_k) exp(-i (omega + Delta)(tau_k - T))
SignalGrid tau_to_delta(const SignalGrid& st, const std::vector<double>& delta, double T);
// tau grid reciprocal to a uniform Delta grid: N points, step 2pi / (N dDelta), centered on T
std::vector<double> reciprocal_tau_grid(const std::vector<double>& delta, double T);

// standard deviation of x under |v|^2 weights
double spread(const std::vector<double>& x, const std::vector<cplx>& v);
// spread in Delta times spread of the transform in tau (>= 1/2)
double second_moment_product(const std::vector<double>& delta, const std::vector<cplx>& v);

// local maxima after gaussian smoothing (sigma in x units); prominence >= rel * max
std::vector<double> find_peaks(const std::vector<double>& x, const std::vector<double>& y, double smooth_sigma,
                               double rel_prominence = 0.1);
double fwhm(const std::vector<double>& x, const std::vector<double>& y);

// uniform grid helper, inclusive of max within rounding
std::vector<double> linspace_step(double lo, double hi, double step);

struct ErfFit {
    double center, width, rms;
};
// y(x) = lo + (hi - lo) (1 + erf((x - center) / width)) / 2 with lo, hi fixed
ErfFit fit_erf_step(const std::vector<double>& x, const std::vector<double>& y, double lo, double hi);

struct ExpFit {
    double rate, log_amp;
};
// least squares on log(y), points with x in [x0, x1]
ExpFit fit_exp_decay(const std::vector<double>& x, const std::vector<double>& y, double x0, double x1);

struct Fig3Output {
    SignalGrid delta; // omega x Delta
    SignalGrid tau;   // omega x tau
};
Fig3Output fig3_pipeline(const ScJob& job, const std::vector<double>& omega, const std::vector<double>& delta,
                         const std::vector<double>& tau, double T, const QuadSpec& q = {}, unsigned threads = 1);

// omega of the largest |S| in every tau column of an (omega x tau) grid
std::vector<double> argmax_trace(const SignalGrid& st);
// largest |S| over omega in every tau column
std::vector<double> column_max(const SignalGrid& st);

struct Fig4Panel {
    double sigma_pr;
    double sigma_m;
    SignalGrid profile; // axis Delta, complex
};
// one panel per (switch, sigma_pr); switches are erf gap trajectories, resonant probe,
// detection time T + 10 sigma_pr
std::vector<Fig4Panel> fig4_scan(const std::vector<FrequencyTrajectory>& switches, double gamma_a,
                                 const std::vector<double>& sigma_pr, double T, const std::vector<double>& delta,
                                 double tau_step = 0.5, unsigned threads = 1);

} // namespace vp
