#pragma once

#include "vibroprobe/fields.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace vp {

struct AState {
    std::string name;
    double omega = 0.0; // rad/fs
    double gamma = 0.0; // 1/fs
    cplx mu_g{1.0, 0.0};
};

// c (above a) or d (below a); couplings indexed by a-state
struct VibState {
    std::string name;
    double omega = 0.0;
    double gamma = 0.0;
    std::vector<cplx> mu;
    std::vector<double> alpha;
};

struct LevelScheme {
    std::vector<AState> a;
    std::vector<VibState> c;
    std::vector<VibState> d;

    void validate() const;
    // mu -> alpha swap used by the Raman mapping
    LevelScheme with_alpha_as_mu() const;
};

enum class Manifold { g, a, c, d };
struct StateRef {
    Manifold m = Manifold::g;
    std::size_t i = 0;
};

struct PairRates {
    double gamma = 0.0; // gamma_v + gamma_v'
    double omega = 0.0; // omega_v - omega_v'
};
PairRates pair_dephasing(const LevelScheme& s, StateRef v, StateRef vp);

class PreparedState {
public:
    PreparedState() = default;
    static PreparedState from_matrix(std::size_t n, std::vector<cplx> rho);
    static PreparedState pure(std::size_t n, std::size_t k);
    // normalized pump-prepared coherences; weight() keeps the trace
    static PreparedState from_pump(const LevelScheme& s, const PulseSpec& pump);

    std::size_t size() const { return n_; }
    cplx operator()(std::size_t a, std::size_t b) const { return rho_[a * n_ + b]; }
    double weight() const { return weight_; }

private:
    std::size_t n_ = 0;
    std::vector<cplx> rho_;
    double weight_ = 1.0;
};

// rho_aa' = mu_ag mu*_a'g E1(w_a - i g_a) conj(E1(w_a' - i g_a')), not normalized
std::vector<cplx> pump_coherences(const LevelScheme& s, const PulseSpec& pump);

enum class ProbeMode { fdir, srs };

struct ProbeCoupling {
    ProbeMode mode = ProbeMode::fdir;
    cplx e3{1.0, 0.0};
    double omega3 = 0.0;

    static ProbeCoupling fdir() { return {}; }
    static ProbeCoupling srs(cplx e3, double omega3);
    void validate() const;
    double shift() const { return mode == ProbeMode::srs ? omega3 : 0.0; }
    double field_factor() const { return mode == ProbeMode::srs ? std::norm(e3) : 1.0; }
    cplx weight(const VibState& v, std::size_t a) const
    {
        return mode == ProbeMode::srs ? cplx(v.alpha[a], 0.0) : v.mu[a];
    }
};

struct BathSpec {
    double lambda = 0.0; // rad/fs
    double Lambda = 1.0; // 1/fs
    double kelvin = 300.0;

    void validate() const;
    double beta_hbar() const { return beta_hbar_fs(kelvin); }
    // classical variance of the frequency fluctuation, (rad/fs)^2
    double variance() const { return 2.0 * lambda / beta_hbar(); }
};

class FrequencyTrajectory {
public:
    struct Constant {
        double w0;
    };
    struct LinearChirp {
        double w0, rate;
    };
    struct ErfSwitch {
        double w0, jump, t0, width;
    };
    struct Tabulated {
        std::vector<double> t, w;
    };
    struct Sampled {
        std::shared_ptr<const FrequencyTrajectory> mean;
        double t0, dt;
        std::vector<double> dw;
    };
    using Variant = std::variant<Constant, LinearChirp, ErfSwitch, Tabulated, Sampled>;

    FrequencyTrajectory() : v_(Constant{0.0}) {}
    explicit FrequencyTrajectory(Variant v);

    static FrequencyTrajectory constant(double w0) { return FrequencyTrajectory(Constant{w0}); }
    static FrequencyTrajectory linear_chirp(double w0, double rate) { return FrequencyTrajectory(LinearChirp{w0, rate}); }
    static FrequencyTrajectory erf_switch(double w0, double jump, double t0, double width)
    {
        return FrequencyTrajectory(ErfSwitch{w0, jump, t0, width});
    }
    static FrequencyTrajectory tabulated(std::vector<double> t, std::vector<double> w)
    {
        return FrequencyTrajectory(Tabulated{std::move(t), std::move(w)});
    }

    const Variant& variant() const { return v_; }
    const char* kind() const;
    // shortest time scale worth resolving, fs (0 = none)
    double time_scale() const;
    // rough upper bound of |omega| for step selection
    double max_abs() const;

private:
    Variant v_;
};

double frequency_at(const FrequencyTrajectory& tr, double t);
double phase_integral(const FrequencyTrajectory& tr, double t1, double t2);

struct TimeGrid {
    double t0 = 0.0;
    double dt = 1.0;
    std::size_t n = 0;
    double at(std::size_t k) const { return t0 + dt * static_cast<double>(k); }
};

FrequencyTrajectory sample_ou_trajectory(const BathSpec& bath, const FrequencyTrajectory& mean,
                                         std::uint64_t seed, const TimeGrid& grid);

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

} // namespace vp
