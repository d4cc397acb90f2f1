#include "vibroprobe/semiclassical_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <type_traits>
#include <variant>

namespace vp {

namespace {

constexpr double kWindowLog = 13.815510557964274;

struct Branch {
    cplx pref;                       // +-i times couplings and populations
    double gamma_a, gamma_nu;
    const FrequencyTrajectory* tr;
    double offset;                   // gap shift for this a-state
    bool absorption;
};

std::vector<Branch> branches(const ScJob& job)
{
    const auto& s = job.scheme;
    const auto& pc = job.coupling;
    const double amp = std::norm(job.pump.amplitude) * pc.field_factor();
    const double ref = s.a[job.ref_a].omega;
    std::vector<Branch> out;
    for (std::size_t a = 0; a < s.a.size(); ++a) {
        const double pop = amp * std::norm(s.a[a].mu_g);
        for (std::size_t i = 0; i < s.c.size(); ++i) {
            double w = std::norm(pc.weight(s.c[i], a));
            if (w == 0.0 || pop == 0.0) continue;
            out.push_back({-I * pop * w, s.a[a].gamma, s.c[i].gamma, &job.tr_c[i], ref - s.a[a].omega, true});
        }
        for (std::size_t i = 0; i < s.d.size(); ++i) {
            double w = std::norm(pc.weight(s.d[i], a));
            if (w == 0.0 || pop == 0.0) continue;
            out.push_back({I * pop * w, s.a[a].gamma, s.d[i].gamma, &job.tr_d[i], s.a[a].omega - ref, false});
        }
    }
    return out;
}

double window_of(const ScJob& job, const QuadSpec& q)
{
    if (q.window > 0.0) return q.window;
    double gmin = 1e300;
    for (const auto& a : job.scheme.a) gmin = std::min(gmin, a.gamma);
    if (!(gmin > 0.0)) throw Error("divergent window: every a-state needs gamma > 0");
    return kWindowLog / (2.0 * gmin);
}

// [lo, hi] of a gap trajectory over [0, W]
std::pair<double, double> gap_range(const FrequencyTrajectory& tr, double W)
{
    return std::visit(
        [&](const auto& x) -> std::pair<double, double> {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, FrequencyTrajectory::Constant>) return {x.w0, x.w0};
            else if constexpr (std::is_same_v<T, FrequencyTrajectory::LinearChirp>)
                return std::minmax(x.w0, x.w0 + x.rate * W);
            else if constexpr (std::is_same_v<T, FrequencyTrajectory::ErfSwitch>)
                return std::minmax(x.w0, x.w0 + x.jump);
            else if constexpr (std::is_same_v<T, FrequencyTrajectory::Tabulated>) {
                auto [lo, hi] = std::minmax_element(x.w.begin(), x.w.end());
                return {*lo, *hi};
            } else {
                auto r = gap_range(*x.mean, W);
                double m = 0.0;
                for (double w : x.dw) m = std::max(m, std::abs(w));
                return {r.first - m, r.second + m};
            }
        },
        tr.variant());
}

double auto_step(const ScJob& job, const std::vector<double>& omega, const std::vector<double>& delta,
                 const std::optional<Lineshape>& ls, double window)
{
    double wmax = 1e-6, slow = window / 64.0;
    const double sh = job.coupling.shift();
    const auto& s = job.scheme;
    const double ref = s.a[job.ref_a].omega;
    auto visit = [&](const FrequencyTrajectory& tr, bool absorption) {
        auto [lo, hi] = gap_range(tr, window);
        for (const auto& a : s.a) {
            double off = absorption ? ref - a.omega : a.omega - ref;
            for (double w : omega)
                wmax = std::max({wmax, std::abs(w - sh - lo - off), std::abs(w - sh - hi - off)});
        }
        if (tr.time_scale() > 0.0) slow = std::min(slow, tr.time_scale() / 3.0);
    };
    for (const auto& tr : job.tr_c) visit(tr, true);
    for (const auto& tr : job.tr_d) visit(tr, false);
    for (double d : delta) wmax = std::max(wmax, std::abs(d));
    if (ls) slow = std::min(slow, 1.0 / (3.0 * ls->bath.Lambda));
    return std::min(2.0 * std::numbers::pi / (10.0 * wmax), slow);
}

// cumulative phase of a trajectory on the grid t0 + k h
std::vector<double> cum_phase(const FrequencyTrajectory& tr, double offset, double t0, double h, std::size_t n)
{
    std::vector<double> P(n, 0.0);
    for (std::size_t k = 1; k < n; ++k) {
        double t = t0 + h * static_cast<double>(k - 1);
        P[k] = P[k - 1] + phase_integral(tr, t, t + h) + offset * h;
    }
    return P;
}

cplx damping(const Lineshape& ls, double tau, double t, bool absorption)
{
    cplx g = ls.mode == LineshapeMode::two_time ? lineshape_g(ls.bath, tau, t).g
                                                : lineshape_stationary(ls.bath, t - tau).g;
    if (ls.real_only) g = g.real();
    // c-branch e^{-g}, d-branch e^{-g*}
    return absorption ? std::exp(-g) : std::exp(-std::conj(g));
}

// outer integrand (with trapezoid weights) for one omega row
using Phases = std::vector<std::vector<double>>;

Phases all_phases(const std::vector<Branch>& br, double t0, double h, std::size_t n)
{
    Phases P;
    for (const auto& b : br) P.push_back(cum_phase(*b.tr, b.offset, t0, h, n));
    return P;
}

std::vector<cplx> sc_outer(const ScJob& job, const std::vector<Branch>& br, const Phases& PP,
                           const std::optional<Lineshape>& ls, double omega, double T, double h, std::size_t n)
{
    const double wd = omega - job.coupling.shift();
    std::vector<cplx> outer(n, 0.0), G(n), J(n);
    std::vector<cplx> det(n);
    for (std::size_t k = 0; k < n; ++k) det[k] = std::exp(I * (wd * (h * static_cast<double>(k) - T)));
    for (std::size_t ib = 0; ib < br.size(); ++ib) {
        const auto& b = br[ib];
        const auto& P = PP[ib];
        for (std::size_t k = 0; k < n; ++k) G[k] = det[k] * std::exp(-b.gamma_a * h * static_cast<double>(k));
        if (!ls) {
            J[n - 1] = 0.0;
            for (std::size_t k = n - 1; k-- > 0;) {
                cplx u = std::exp(cplx(-b.gamma_nu * h, -(P[k + 1] - P[k])));
                J[k] = 0.5 * h * (G[k] + u * G[k + 1]) + u * J[k + 1];
            }
        } else {
            const double L = ls->bath.Lambda, bh = ls->bath.beta_hbar(), lam = ls->bath.lambda;
            cplx c(2.0 * lam / (bh * L * L), -lam / L);
            if (ls->real_only) c = c.real();
            if (!b.absorption) c = std::conj(c);
            std::vector<cplx> u(n), B(n), E;
            for (std::size_t k = 0; k + 1 < n; ++k) u[k] = std::exp(cplx(-b.gamma_nu * h, -(P[k + 1] - P[k])));
            const bool two = ls->mode == LineshapeMode::two_time;
            if (two) {
                for (std::size_t m = 0; m < n; ++m) B[m] = G[m] * std::exp(-c * std::exp(-L * h * double(m)));
            } else {
                E.resize(n);
                for (std::size_t m = 0; m < n; ++m) E[m] = std::exp(-c * (std::expm1(-L * h * double(m)) + L * h * double(m)));
            }
            for (std::size_t k = 0; k < n; ++k) {
                double tau = h * static_cast<double>(k);
                cplx r = 1.0, pre = 1.0;
                if (two) {
                    double e = std::exp(-L * tau);
                    r = std::exp(-c * L * e * h);
                    pre = std::exp(-4.0 * lam * tau / (bh * L) + c * e);
                }
                cplx z = 1.0, acc = 0.0;
                for (std::size_t m = k; m < n; ++m) {
                    double w = (m == k || m + 1 == n) ? 0.5 * h : h;
                    acc += w * z * (two ? B[m] : G[m] * E[m - k]);
                    if (m + 1 == n) break;
                    z *= u[m] * r;
                    if (std::norm(z) < 1e-34) break;
                }
                J[k] = pre * acc;
            }
        }
        for (std::size_t k = 0; k < n; ++k)
            outer[k] += b.pref * std::conj(det[k]) * std::exp(-b.gamma_a * h * static_cast<double>(k)) * J[k] *
                        trap_w(k, n, h);
    }
    return outer;
}

cplx sc_slice_value(const ScJob& job, const std::vector<Branch>& br, const Phases& PP,
                    const std::optional<Lineshape>& ls, double omega, double T, double h, std::size_t n)
{
    const double wd = omega - job.coupling.shift();
    cplx acc = 0.0;
    for (std::size_t ib = 0; ib < br.size(); ++ib) {
        const auto& b = br[ib];
        const auto& P = PP[ib];
        cplx part = 0.0;
        for (std::size_t m = 0; m < n; ++m) {
            double s = h * static_cast<double>(m);
            cplx v = std::exp(cplx(-b.gamma_a * (2.0 * T + s) - b.gamma_nu * s, wd * s - P[m]));
            if (ls) v *= damping(*ls, T, T + s, b.absorption);
            part += trap_w(m, n, h) * v;
        }
        acc += b.pref * part;
    }
    return acc;
}

SignalGrid run_sc(const ScJob& job, const std::optional<Lineshape>& ls, const std::vector<double>& omega,
                  const std::vector<double>& delta, double T, const QuadSpec& q, unsigned threads, const char* name)
{
    job.validate();
    if (ls) ls->bath.validate();
    const double W = window_of(job, q);
    const auto br = branches(job);
    const std::size_t nd = delta.size();
    auto eval = [&](double h) {
        std::size_t n = static_cast<std::size_t>(std::ceil(W / h)) + 1;
        std::vector<cplx> out(omega.size() * nd);
        const auto PP = all_phases(br, 0.0, h, n);
        parallel_for(omega.size(), threads, [&](std::size_t i) {
            auto row = delta_sum(sc_outer(job, br, PP, ls, omega[i], T, h, n), 0.0, h, delta, T);
            std::copy(row.begin(), row.end(), out.begin() + static_cast<std::ptrdiff_t>(i * nd));
        });
        return out;
    };
    double h0 = q.step > 0.0 ? 2.0 * q.step : auto_step(job, omega, delta, ls, W);
    SignalGrid g(Axis{"omega", "radfs", omega}, Axis{"delta", "radfs", delta}, true);
    if (q.max_halvings == 0) {
        g.data = eval(0.5 * h0);
        g.set_meta("step_fs", 0.5 * h0);
    } else {
        auto r = richardson(eval, h0, q, name);
        g.data = std::move(r.value);
        g.set_meta("step_fs", r.step);
        g.set_meta("rel_error", r.error);
    }
    g.set_meta("engine", name);
    g.set_meta("mode", job.coupling.mode == ProbeMode::srs ? "srs" : "fdir");
    g.set_meta("T_fs", T);
    g.set_meta("window_fs", W);
    return g;
}

} // namespace

void ScJob::validate() const
{
    scheme.validate();
    coupling.validate();
    if (pump.kind != PulseKind::impulsive) throw Error("semiclassical engine assumes an impulsive pump");
    if (tr_c.size() != scheme.c.size() || tr_d.size() != scheme.d.size())
        throw ConfigError("need one trajectory per c- and d-state");
    if (ref_a >= scheme.a.size()) throw ConfigError("gap reference a-state out of range");
}

LineshapeResult lineshape_g(const BathSpec& bath, double T, double t)
{
    if (t < T) throw Error("lineshape_g needs t >= T");
    const double bh = bath.beta_hbar(), L = bath.Lambda, lam = bath.lambda;
    cplx pre(2.0 * lam / (bh * L * L), -lam / L);
    cplx g = 4.0 * lam * T / (bh * L) + pre * (std::exp(-L * t) + (L * (t - T) - 1.0) * std::exp(-L * T));
    return {g};
}

LineshapeResult lineshape_stationary(const BathSpec& bath, double s)
{
    if (s < 0.0) throw Error("stationary lineshape needs s >= 0");
    const double bh = bath.beta_hbar(), L = bath.Lambda, lam = bath.lambda;
    cplx pre(2.0 * lam / (bh * L * L), -lam / L);
    // expm1 keeps small-s accuracy
    return {pre * (std::expm1(-L * s) + L * s)};
}

SpectralDensity brownian_spectral_density(const BathSpec& bath, const std::vector<double>& omega)
{
    bath.validate();
    const double bh = bath.beta_hbar(), L = bath.Lambda, lam = bath.lambda;
    SpectralDensity out;
    for (double w : omega) {
        double odd = 2.0 * lam * w * L / (w * w + L * L);
        double full;
        if (w == 0.0) full = 4.0 * lam / (bh * L);
        else full = -2.0 / std::expm1(-bh * w) * odd; // 1 + coth(x/2)
        out.odd.push_back(odd);
        out.full.push_back(full);
    }
    return out;
}

SignalGrid sc_delta_dispersed(const ScJob& job, const std::vector<double>& omega, const std::vector<double>& delta,
                              double T, const QuadSpec& q, unsigned threads)
{
    return run_sc(job, std::nullopt, omega, delta, T, q, threads, "semiclassical");
}

SignalGrid sc_cumulant(const ScJob& job, const Lineshape& ls, const std::vector<double>& omega,
                       const std::vector<double>& delta, double T, const QuadSpec& q, unsigned threads)
{
    auto g = run_sc(job, ls, omega, delta, T, q, threads, "cumulant");
    g.set_meta("lineshape", ls.mode == LineshapeMode::two_time ? "two_time" : "stationary");
    return g;
}

SignalGrid sc_probe_slice(const ScJob& job, const std::optional<Lineshape>& ls, const std::vector<double>& omega,
                          double T, const QuadSpec& q)
{
    job.validate();
    if (T < 0.0) throw Error("probe slice needs T >= 0");
    const double W = window_of(job, q);
    const auto br = branches(job);
    auto eval = [&](double h) {
        std::size_t n = static_cast<std::size_t>(std::ceil(W / h)) + 1;
        std::vector<cplx> out(omega.size());
        const auto PP = all_phases(br, T, h, n);
        for (std::size_t i = 0; i < omega.size(); ++i) out[i] = sc_slice_value(job, br, PP, ls, omega[i], T, h, n);
        return out;
    };
    double h0 = q.step > 0.0 ? 2.0 * q.step : auto_step(job, omega, {}, ls, W);
    SignalGrid g(Axis{"omega", "radfs", omega}, true);
    if (q.max_halvings == 0) {
        g.data = eval(0.5 * h0);
    } else {
        auto r = richardson(eval, h0, q, "sc_probe_slice");
        g.data = std::move(r.value);
        g.set_meta("rel_error", r.error);
    }
    g.set_meta("engine", ls ? "cumulant_slice" : "semiclassical_slice");
    g.set_meta("T_fs", T);
    return g;
}

McResult mc_ensemble_average(const ScJob& job, const BathSpec& bath, const std::vector<double>& omega,
                             const std::vector<double>& delta, double T, std::size_t n_traj,
                             std::uint64_t master_seed, McTarget target, const QuadSpec& q, unsigned threads)
{
    if (n_traj < 2) throw ConfigError("mc needs n_traj >= 2");
    job.validate();
    bath.validate();
    const double W = window_of(job, q) + (target == McTarget::probe_slice ? T : 0.0);
    const double dt = 0.05 / bath.Lambda;
    TimeGrid grid{0.0, dt, static_cast<std::size_t>(std::ceil(W / dt)) + 3};
    // steps nest in the OU grid so the kinks sit on nodes and one
    // Richardson pass still removes the h^2 term
    const double want = q.step > 0.0 ? q.step : 0.5 * auto_step(job, omega, delta, std::nullopt, W);
    double step = dt;
    while (step > want) step *= 0.5;
    QuadSpec fixed = q;
    fixed.step = step;
    fixed.max_halvings = 0;
    fixed.window = window_of(job, q);
    QuadSpec half = fixed;
    half.step = 0.5 * step;

    const std::size_t m = target == McTarget::probe_slice ? omega.size() : omega.size() * delta.size();
    const std::size_t nchunks = std::min<std::size_t>(64, n_traj);
    // per-chunk running mean and (re, im) sums of squared deviations
    std::vector<std::vector<cplx>> mean(nchunks, std::vector<cplx>(m, 0.0));
    std::vector<std::vector<cplx>> m2(nchunks, std::vector<cplx>(m, 0.0));
    const std::size_t nb = job.tr_c.size() + job.tr_d.size();

    parallel_for(nchunks, threads, [&](std::size_t c) {
        std::size_t lo = c * n_traj / nchunks, hi = (c + 1) * n_traj / nchunks;
        for (std::size_t k = lo; k < hi; ++k) {
            ScJob jk = job;
            std::size_t b = 0;
            for (auto* v : {&jk.tr_c, &jk.tr_d})
                for (auto& tr : *v) tr = sample_ou_trajectory(bath, tr, derive_seed(master_seed, k * nb + b++), grid);
            auto run = [&](const QuadSpec& qq) {
                return target == McTarget::probe_slice ? sc_probe_slice(jk, std::nullopt, omega, T, qq)
                                                       : sc_delta_dispersed(jk, omega, delta, T, qq, 1);
            };
            SignalGrid one = run(half);
            SignalGrid coarse = run(fixed);
            for (std::size_t i = 0; i < m; ++i) one.data[i] = (4.0 * one.data[i] - coarse.data[i]) / 3.0;
            const double cnt = static_cast<double>(k - lo + 1);
            for (std::size_t i = 0; i < m; ++i) {
                cplx v = one.data[i];
                cplx d = v - mean[c][i];
                mean[c][i] += d / cnt;
                cplx e = v - mean[c][i];
                m2[c][i] += cplx(d.real() * e.real(), d.imag() * e.imag());
            }
        }
    });
    // merge chunks in fixed order
    std::vector<cplx> mu = mean[0], M2 = m2[0];
    double na = static_cast<double>(n_traj / nchunks);
    for (std::size_t c = 1; c < nchunks; ++c) {
        const double nb = static_cast<double>((c + 1) * n_traj / nchunks - c * n_traj / nchunks);
        const double nt = na + nb;
        for (std::size_t i = 0; i < m; ++i) {
            cplx d = mean[c][i] - mu[i];
            mu[i] += d * (nb / nt);
            M2[i] += m2[c][i] + cplx(d.real() * d.real(), d.imag() * d.imag()) * (na * nb / nt);
        }
        na = nt;
    }
    const double n = static_cast<double>(n_traj);
    McResult r;
    if (target == McTarget::probe_slice) {
        r.mean = SignalGrid(Axis{"omega", "radfs", omega}, true);
        r.stderr_ = SignalGrid(Axis{"omega", "radfs", omega}, true);
    } else {
        r.mean = SignalGrid(Axis{"omega", "radfs", omega}, Axis{"delta", "radfs", delta}, true);
        r.stderr_ = SignalGrid(Axis{"omega", "radfs", omega}, Axis{"delta", "radfs", delta}, true);
    }
    for (std::size_t i = 0; i < m; ++i) {
        double vr = M2[i].real() / (n - 1.0);
        double vi = M2[i].imag() / (n - 1.0);
        r.mean.data[i] = mu[i];
        r.stderr_.data[i] = cplx(std::sqrt(vr / n), std::sqrt(vi / n));
    }
    for (auto* g : {&r.mean, &r.stderr_}) {
        g->set_meta("engine", "mc");
        g->set_meta("n_traj", static_cast<double>(n_traj));
        g->set_meta("seed", std::to_string(master_seed));
        g->set_meta("T_fs", T);
        g->set_meta("step_fs", step);
    }
    r.stderr_.set_meta("payload", "standard_error");
    return r;
}

} // namespace vp
