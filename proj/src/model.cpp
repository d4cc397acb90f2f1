#include "vibroprobe/model.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>

namespace vp {

namespace {

void check_rate(double g, const std::string& who)
{
    if (!(g >= 0.0) || !std::isfinite(g)) throw ConfigError("dephasing rate of " + who + " must be finite and >= 0");
}

void check_vib(const VibState& v, std::size_t na, bool upper, const std::vector<AState>& a)
{
    check_rate(v.gamma, v.name);
    if (!std::isfinite(v.omega)) throw ConfigError("energy of " + v.name + " not finite");
    if (v.mu.size() != na || v.alpha.size() != na)
        throw ConfigError(v.name + ": need one mu and one alpha per a-state");
    for (std::size_t k = 0; k < na; ++k) {
        if (!std::isfinite(v.alpha[k])) throw ConfigError(v.name + ": alpha not finite");
        bool linked = std::abs(v.mu[k]) > 0.0 || v.alpha[k] != 0.0;
        if (!linked) continue;
        if (upper && !(v.omega > a[k].omega))
            throw ConfigError(v.name + " must lie above " + a[k].name);
        if (!upper && !(v.omega < a[k].omega))
            throw ConfigError(v.name + " must lie below " + a[k].name);
    }
}

const double* state_energy(const LevelScheme& s, StateRef r, double* gamma)
{
    static const double zero = 0.0;
    switch (r.m) {
    case Manifold::g: *gamma = 0.0; return &zero;
    case Manifold::a: *gamma = s.a.at(r.i).gamma; return &s.a.at(r.i).omega;
    case Manifold::c: *gamma = s.c.at(r.i).gamma; return &s.c.at(r.i).omega;
    case Manifold::d: *gamma = s.d.at(r.i).gamma; return &s.d.at(r.i).omega;
    }
    return &zero;
}

} // namespace

void LevelScheme::validate() const
{
    if (a.empty()) throw ConfigError("level scheme needs at least one a-state");
    for (const auto& s : a) {
        check_rate(s.gamma, s.name);
        if (!std::isfinite(s.omega)) throw ConfigError("energy of " + s.name + " not finite");
    }
    for (const auto& v : c) check_vib(v, a.size(), true, a);
    for (const auto& v : d) check_vib(v, a.size(), false, a);
}

LevelScheme LevelScheme::with_alpha_as_mu() const
{
    LevelScheme out = *this;
    for (auto* m : {&out.c, &out.d})
        for (auto& v : *m)
            for (std::size_t k = 0; k < v.mu.size(); ++k) v.mu[k] = v.alpha[k];
    return out;
}

PairRates pair_dephasing(const LevelScheme& s, StateRef v, StateRef w)
{
    double g1 = 0.0, g2 = 0.0;
    double e1 = *state_energy(s, v, &g1);
    double e2 = *state_energy(s, w, &g2);
    return {g1 + g2, e1 - e2};
}

PreparedState PreparedState::from_matrix(std::size_t n, std::vector<cplx> rho)
{
    if (n == 0 || rho.size() != n * n) throw ConfigError("prepared state: matrix shape mismatch");
    Eigen::MatrixXcd m(n, n);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            m(i, j) = rho[i * n + j];
            scale = std::max(scale, std::abs(rho[i * n + j]));
        }
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1.0))
        throw ConfigError("prepared state not Hermitian");
    if (std::abs(m.trace() - cplx(1.0)) > 1e-10) throw ConfigError("prepared state trace != 1");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-12) throw ConfigError("prepared state not positive semidefinite");
    PreparedState p;
    p.n_ = n;
    p.rho_ = std::move(rho);
    return p;
}

PreparedState PreparedState::pure(std::size_t n, std::size_t k)
{
    std::vector<cplx> r(n * n, 0.0);
    r.at(k * n + k) = 1.0;
    return from_matrix(n, std::move(r));
}

std::vector<cplx> pump_coherences(const LevelScheme& s, const PulseSpec& pump)
{
    if (pump.kind == PulseKind::cw) throw Error("use prepared-state path for CW pump");
    std::size_t n = s.a.size();
    std::vector<cplx> amp(n);
    for (std::size_t k = 0; k < n; ++k)
        amp[k] = s.a[k].mu_g * envelope_freq(pump, cplx(s.a[k].omega, -s.a[k].gamma));
    std::vector<cplx> r(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) r[i * n + j] = amp[i] * std::conj(amp[j]);
    return r;
}

PreparedState PreparedState::from_pump(const LevelScheme& s, const PulseSpec& pump)
{
    auto r = pump_coherences(s, pump);
    std::size_t n = s.a.size();
    double tr = 0.0;
    for (std::size_t k = 0; k < n; ++k) tr += r[k * n + k].real();
    if (!(tr > 0.0)) throw Error("pump does not populate any a-state");
    for (auto& x : r) x /= tr;
    // exact Hermitian symmetry before the checks
    for (std::size_t i = 0; i < n; ++i) {
        r[i * n + i] = r[i * n + i].real();
        for (std::size_t j = i + 1; j < n; ++j) r[j * n + i] = std::conj(r[i * n + j]);
    }
    PreparedState p = from_matrix(n, std::move(r));
    p.weight_ = tr;
    return p;
}

ProbeCoupling ProbeCoupling::srs(cplx e3, double omega3)
{
    ProbeCoupling c{ProbeMode::srs, e3, omega3};
    c.validate();
    return c;
}

void ProbeCoupling::validate() const
{
    if (mode == ProbeMode::srs && !(omega3 > 0.0)) throw ConfigError("SRS needs omega3 > 0");
}

void BathSpec::validate() const
{
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("bath lambda must be >= 0");
    if (!(Lambda > 0.0) || !std::isfinite(Lambda)) throw ConfigError("bath Lambda must be > 0");
    if (!(kelvin > 0.0) || !std::isfinite(kelvin)) throw ConfigError("bath temperature must be > 0");
}

// ---- trajectories

FrequencyTrajectory::FrequencyTrajectory(Variant v) : v_(std::move(v))
{
    if (auto* e = std::get_if<ErfSwitch>(&v_)) {
        if (!(e->width > 0.0)) throw ConfigError("erf switch width must be > 0");
    } else if (auto* tb = std::get_if<Tabulated>(&v_)) {
        if (tb->t.size() < 2 || tb->t.size() != tb->w.size()) throw ConfigError("tabulated trajectory needs >= 2 matching points");
        for (std::size_t k = 1; k < tb->t.size(); ++k)
            if (!(tb->t[k] > tb->t[k - 1])) throw ConfigError("tabulated time grid must be strictly increasing");
        for (double w : tb->w)
            if (!std::isfinite(w)) throw ConfigError("tabulated trajectory value not finite");
    } else if (auto* sm = std::get_if<Sampled>(&v_)) {
        if (!sm->mean || sm->dw.size() < 2 || !(sm->dt > 0.0)) throw ConfigError("bad sampled trajectory");
    }
}

const char* FrequencyTrajectory::kind() const
{
    static const char* names[] = {"constant", "linear_chirp", "erf_switch", "tabulated", "ou_stochastic"};
    return names[v_.index()];
}

double FrequencyTrajectory::time_scale() const
{
    if (auto* e = std::get_if<ErfSwitch>(&v_)) return e->width;
    if (auto* tb = std::get_if<Tabulated>(&v_)) {
        double m = tb->t[1] - tb->t[0];
        for (std::size_t k = 2; k < tb->t.size(); ++k) m = std::min(m, tb->t[k] - tb->t[k - 1]);
        return m;
    }
    if (auto* sm = std::get_if<Sampled>(&v_)) {
        double s = sm->mean->time_scale();
        return s > 0.0 ? std::min(s, sm->dt) : sm->dt;
    }
    return 0.0;
}

double FrequencyTrajectory::max_abs() const
{
    return std::visit(
        [](const auto& x) -> double {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Constant>) return std::abs(x.w0);
            else if constexpr (std::is_same_v<T, LinearChirp>) return std::abs(x.w0);
            else if constexpr (std::is_same_v<T, ErfSwitch>) return std::abs(x.w0) + std::abs(x.jump);
            else if constexpr (std::is_same_v<T, Tabulated>) {
                double m = 0.0;
                for (double w : x.w) m = std::max(m, std::abs(w));
                return m;
            } else {
                double m = 0.0;
                for (double w : x.dw) m = std::max(m, std::abs(w));
                return x.mean->max_abs() + m;
            }
        },
        v_);
}

namespace {

double erf_antideriv(double u) { return u * std::erf(u) + std::exp(-u * u) / std::sqrt(std::numbers::pi); }

// exact integral of the piecewise-linear interpolant through (t[k], w[k])
double pl_integral(const std::vector<double>& t, const std::vector<double>& w, double t1, double t2)
{
    if (t1 < t.front() || t2 > t.back()) throw Error("trajectory domain exceeded");
    auto value = [&](std::size_t k, double x) {
        double f = (x - t[k]) / (t[k + 1] - t[k]);
        return w[k] + f * (w[k + 1] - w[k]);
    };
    std::size_t k = std::upper_bound(t.begin(), t.end(), t1) - t.begin();
    k = k == 0 ? 0 : k - 1;
    k = std::min(k, t.size() - 2);
    double acc = 0.0, lo = t1;
    while (lo < t2) {
        double hi = std::min(t2, t[k + 1]);
        acc += 0.5 * (value(k, lo) + value(k, hi)) * (hi - lo);
        lo = hi;
        if (k + 2 < t.size()) ++k;
        else break;
    }
    return acc;
}

double pl_value(const std::vector<double>& t, const std::vector<double>& w, double x)
{
    if (x < t.front() || x > t.back()) throw Error("trajectory domain exceeded");
    std::size_t k = std::upper_bound(t.begin(), t.end(), x) - t.begin();
    k = k == 0 ? 0 : k - 1;
    k = std::min(k, t.size() - 2);
    double f = (x - t[k]) / (t[k + 1] - t[k]);
    return w[k] + f * (w[k + 1] - w[k]);
}

// uniform-grid versions for sampled noise
double uniform_value(const FrequencyTrajectory::Sampled& s, double x)
{
    double u = (x - s.t0) / s.dt;
    double last = static_cast<double>(s.dw.size() - 1);
    if (u < -1e-9 || u > last + 1e-9) throw Error("trajectory domain exceeded");
    u = std::clamp(u, 0.0, last);
    std::size_t k = std::min(static_cast<std::size_t>(u), s.dw.size() - 2);
    double f = u - static_cast<double>(k);
    return s.dw[k] + f * (s.dw[k + 1] - s.dw[k]);
}

double uniform_integral(const FrequencyTrajectory::Sampled& s, double t1, double t2)
{
    double last = static_cast<double>(s.dw.size() - 1);
    double u1 = (t1 - s.t0) / s.dt, u2 = (t2 - s.t0) / s.dt;
    if (u1 < -1e-9 || u2 > last + 1e-9) throw Error("trajectory domain exceeded");
    u1 = std::clamp(u1, 0.0, last);
    u2 = std::clamp(u2, 0.0, last);
    double acc = 0.0, lo = u1;
    while (lo < u2) {
        std::size_t k = std::min(static_cast<std::size_t>(lo), s.dw.size() - 2);
        double hi = std::min(u2, static_cast<double>(k + 1));
        auto val = [&](double u) { return s.dw[k] + (u - static_cast<double>(k)) * (s.dw[k + 1] - s.dw[k]); };
        acc += 0.5 * (val(lo) + val(hi)) * (hi - lo);
        if (hi == lo) break;
        lo = hi;
    }
    return acc * s.dt;
}

} // namespace

double frequency_at(const FrequencyTrajectory& tr, double t)
{
    return std::visit(
        [t](const auto& x) -> double {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, FrequencyTrajectory::Constant>) return x.w0;
            else if constexpr (std::is_same_v<T, FrequencyTrajectory::LinearChirp>) return x.w0 + x.rate * t;
            else if constexpr (std::is_same_v<T, FrequencyTrajectory::ErfSwitch>)
                return x.w0 + 0.5 * x.jump * (std::erf(x.t0 / x.width) - std::erf((x.t0 - t) / x.width));
            else if constexpr (std::is_same_v<T, FrequencyTrajectory::Tabulated>) return pl_value(x.t, x.w, t);
            else return frequency_at(*x.mean, t) + uniform_value(x, t);
        },
        tr.variant());
}

double phase_integral(const FrequencyTrajectory& tr, double t1, double t2)
{
    if (t1 > t2) throw Error("phase_integral needs t1 <= t2");
    return std::visit(
        [t1, t2](const auto& x) -> double {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, FrequencyTrajectory::Constant>) return x.w0 * (t2 - t1);
            else if constexpr (std::is_same_v<T, FrequencyTrajectory::LinearChirp>)
                return x.w0 * (t2 - t1) + 0.5 * x.rate * (t2 * t2 - t1 * t1);
            else if constexpr (std::is_same_v<T, FrequencyTrajectory::ErfSwitch>) {
                double s = x.width;
                double u1 = (x.t0 - t1) / s, u2 = (x.t0 - t2) / s;
                double inner = s * (erf_antideriv(u1) - erf_antideriv(u2));
                return (x.w0 + 0.5 * x.jump * std::erf(x.t0 / s)) * (t2 - t1) - 0.5 * x.jump * inner;
            } else if constexpr (std::is_same_v<T, FrequencyTrajectory::Tabulated>)
                return pl_integral(x.t, x.w, t1, t2);
            else
                return phase_integral(*x.mean, t1, t2) + uniform_integral(x, t1, t2);
        },
        tr.variant());
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index)
{
    // splitmix64 of the pair
    std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

FrequencyTrajectory sample_ou_trajectory(const BathSpec& bath, const FrequencyTrajectory& mean,
                                         std::uint64_t seed, const TimeGrid& grid)
{
    bath.validate();
    if (grid.n < 2 || !(grid.dt > 0.0)) throw ConfigError("OU grid needs >= 2 points and dt > 0");
    if (grid.dt > 0.1 / bath.Lambda * (1.0 + 1e-12)) throw ConfigError("OU discretization too coarse");
    FrequencyTrajectory::Sampled s{std::make_shared<const FrequencyTrajectory>(mean), grid.t0, grid.dt,
                                   std::vector<double>(grid.n, 0.0)};
    double var = bath.variance();
    if (var > 0.0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> nd(0.0, 1.0);
        double decay = std::exp(-bath.Lambda * grid.dt);
        double kick = std::sqrt(var * (1.0 - decay * decay));
        s.dw[0] = std::sqrt(var) * nd(rng);
        for (std::size_t k = 1; k < grid.n; ++k) s.dw[k] = decay * s.dw[k - 1] + kick * nd(rng);
    }
    return FrequencyTrajectory(std::move(s));
}

} // namespace vp
