#include "vibroprobe/resolution.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace vp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double uniform_step(const std::vector<double>& x, const char* what)
{
    if (x.size() < 2) throw Error(std::string(what) + " grid needs at least 2 points");
    const double d = x[1] - x[0];
    if (!(d > 0.0)) throw Error(std::string(what) + " grid must be increasing");
    for (std::size_t i = 2; i < x.size(); ++i)
        if (std::abs(x[i] - x[i - 1] - d) > 1e-9 * d) throw Error(std::string(what) + " grid must be uniform");
    return d;
}

std::vector<cplx> row(const SignalGrid& g, std::size_t i)
{
    auto b = g.data.begin() + static_cast<std::ptrdiff_t>(i * g.n2());
    return {b, b + static_cast<std::ptrdiff_t>(g.n2())};
}

} // namespace

ChirpClosedForm chirp_closed_form(double omega0, double omega_ac0, double alpha, double T, double gamma_a,
                                  double sigma_pr)
{
    if (!(sigma_pr > 0.0)) throw Error("sigma_pr must be > 0");
    const double s2 = sigma_pr * sigma_pr;
    return {omega0 - omega_ac0 + alpha * (T - s2 * gamma_a), std::sqrt(1.0 / s2 + alpha * alpha * s2)};
}

double uncertainty_product(double sigma_pr, double alpha)
{
    if (!(sigma_pr > 0.0)) throw Error("sigma_pr must be > 0");
    const double s2 = sigma_pr * sigma_pr;
    return std::sqrt(1.0 + alpha * alpha * s2 * s2);
}

std::vector<cplx> matter_kernel(const FrequencyTrajectory& w_ac, double gamma_a, double t,
                                const std::vector<double>& tau)
{
    std::vector<cplx> k(tau.size(), 0.0);
    for (std::size_t i = 0; i < tau.size(); ++i) {
        if (tau[i] > t || tau[i] < 0.0) continue;
        k[i] = 2.0 * std::exp(-gamma_a * (t + tau[i])) * std::cos(phase_integral(w_ac, tau[i], t));
    }
    return k;
}

SignalGrid dressed_delta_signal(const std::vector<double>& tau, const std::vector<cplx>& kernel,
                                const PulseSpec& probe, double omega, double T, const std::vector<double>& delta)
{
    probe.validate();
    if (probe.kind != PulseKind::gaussian) throw Error("dressing needs a gaussian probe");
    if (kernel.size() != tau.size()) throw Error("kernel and tau grid differ in length");
    const double h = uniform_step(tau, "tau");
    if (h > probe.sigma / 4.0) throw ConvergenceError("tau grid does not resolve the probe envelope");
    const std::size_t n = tau.size();
    std::vector<cplx> g(n), gc((n + 1) / 2, 0.0);
    for (std::size_t k = 0; k < n; ++k) g[k] = envelope_time(probe, tau[k] - T) * kernel[k] * std::exp(-I * (omega * (tau[k] - T)));
    std::vector<cplx> fine(g), coarse;
    for (std::size_t k = 0; k < n; ++k) fine[k] *= trap_w(k, n, h);
    // every other point, same endpoints when n is odd
    const std::size_t nc = (n + 1) / 2;
    for (std::size_t k = 0; k < nc; ++k) gc[k] = g[2 * k] * trap_w(k, nc, 2.0 * h);
    auto s = delta_sum(fine, tau[0], h, delta, T);
    auto sc = delta_sum(gc, tau[0], 2.0 * h, delta, T);
    // floor keeps a vanishing result from failing on roundoff
    double mass = 0.0;
    for (const auto& v : kernel) mass += std::abs(v) * h;
    mass *= std::abs(probe.amplitude);
    const double peak = std::max({max_abs(s), 1e-9 * mass, 1e-300});
    double diff = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) diff = std::max(diff, std::abs(s[j] - sc[j]));
    if (n % 2 == 1 && diff > 1e-3 * peak) throw ConvergenceError("tau grid does not resolve the dressed kernel");
    SignalGrid out(Axis{"delta", "radfs", delta}, true);
    out.data = std::move(s);
    out.set_meta("omega_radfs", omega);
    out.set_meta("T_fs", T);
    out.set_meta("probe_sigma_fs", probe.sigma);
    return out;
}

std::vector<double> reciprocal_tau_grid(const std::vector<double>& delta, double T)
{
    const double dd = uniform_step(delta, "delta");
    const std::size_t N = delta.size();
    const double dt = kTwoPi / (static_cast<double>(N) * dd);
    std::vector<double> tau(N);
    for (std::size_t k = 0; k < N; ++k)
        tau[k] = T + dt * (static_cast<double>(k) - static_cast<double>(N / 2));
    return tau;
}

SignalGrid delta_to_tau(const SignalGrid& sd, const std::vector<double>& tau, double T)
{
    if (!sd.axis2) throw Error("delta_to_tau needs an (omega x Delta) grid");
    const auto& delta = sd.axis2->values;
    const double dd = uniform_step(delta, "delta");
    const double lim = std::numbers::pi / dd * (1.0 + 1e-9);
    for (double t : tau)
        if (std::abs(t - T) > lim)
            throw Error("aliasing: |tau - T| exceeds pi / dDelta; refine the Delta grid");
    std::vector<double> neg(tau.size());
    for (std::size_t i = 0; i < tau.size(); ++i) neg[i] = T - tau[i];
    const auto& om = sd.axis1.values;
    SignalGrid out(sd.axis1, Axis{"tau", "fs", tau}, true);
    for (std::size_t i = 0; i < om.size(); ++i) {
        auto r = delta_sum(row(sd, i), delta[0], dd, neg, 0.0);
        for (std::size_t k = 0; k < tau.size(); ++k)
            out.at(i, k) = dd / kTwoPi * r[k] * std::exp(I * (om[i] * (tau[k] - T)));
    }
    out.meta = sd.meta;
    out.set_meta("transform", "delta_to_tau");
    return out;
}

SignalGrid tau_to_delta(const SignalGrid& st, const std::vector<double>& delta, double T)
{
    if (!st.axis2) throw Error("tau_to_delta needs an (omega x tau) grid");
    const auto& tau = st.axis2->values;
    const double dt = uniform_step(tau, "tau");
    if (delta.size() > 1 && delta.back() - delta.front() > kTwoPi / dt)
        throw Error("aliasing: Delta span exceeds 2 pi / dtau");
    const auto& om = st.axis1.values;
    SignalGrid out(st.axis1, Axis{"delta", "radfs", delta}, true);
    for (std::size_t i = 0; i < om.size(); ++i) {
        auto g = row(st, i);
        for (std::size_t k = 0; k < g.size(); ++k) g[k] *= dt * std::exp(-I * (om[i] * (tau[k] - T)));
        auto r = delta_sum(g, tau[0], dt, delta, T);
        for (std::size_t j = 0; j < delta.size(); ++j) out.at(i, j) = r[j];
    }
    out.meta = st.meta;
    out.set_meta("transform", "tau_to_delta");
    return out;
}

double spread(const std::vector<double>& x, const std::vector<cplx>& v)
{
    double w = 0.0, m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double p = std::norm(v[i]);
        w += p;
        m += p * x[i];
    }
    if (!(w > 0.0)) throw Error("spread of a zero profile");
    m /= w;
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += std::norm(v[i]) * (x[i] - m) * (x[i] - m);
    return std::sqrt(s / w);
}

double second_moment_product(const std::vector<double>& delta, const std::vector<cplx>& v)
{
    SignalGrid sd(Axis{"omega", "radfs", {0.0}}, Axis{"delta", "radfs", delta}, true);
    sd.data = v;
    auto tau = reciprocal_tau_grid(delta, 0.0);
    auto st = delta_to_tau(sd, tau, 0.0);
    return spread(delta, v) * spread(tau, st.data);
}

std::vector<double> find_peaks(const std::vector<double>& x, const std::vector<double>& y, double smooth_sigma,
                               double rel_prominence)
{
    const std::size_t n = y.size();
    if (x.size() != n || n < 3) throw Error("find_peaks needs matching grids of >= 3 points");
    std::vector<double> ys = y;
    if (smooth_sigma > 0.0) {
        const double s = smooth_sigma / std::abs(x[1] - x[0]);
        const long half = static_cast<long>(5.0 * s) + 1;
        std::vector<double> ker(static_cast<std::size_t>(2 * half + 1));
        for (long m = -half; m <= half; ++m)
            ker[static_cast<std::size_t>(m + half)] = std::exp(-0.5 * double(m * m) / (s * s));
        double tot = std::accumulate(ker.begin(), ker.end(), 0.0);
        for (auto& v : ker) v /= tot;
        // zero-padded, same-length output
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (long m = -half; m <= half; ++m) {
                long j = static_cast<long>(i) + m;
                if (j >= 0 && j < static_cast<long>(n)) acc += ker[static_cast<std::size_t>(m + half)] * y[std::size_t(j)];
            }
            ys[i] = acc;
        }
    }
    const double top = *std::max_element(ys.begin(), ys.end());
    std::vector<double> out;
    std::size_t i = 1;
    while (i + 1 < n) {
        if (ys[i] > ys[i - 1]) {
            std::size_t j = i;
            while (j + 1 < n && ys[j + 1] == ys[i]) ++j;
            if (j + 1 < n && ys[j + 1] < ys[i]) {
                std::size_t p = (i + j) / 2;
                double lmin = ys[p], rmin = ys[p];
                for (std::size_t k = p; k-- > 0;) {
                    if (ys[k] > ys[p]) break;
                    lmin = std::min(lmin, ys[k]);
                }
                for (std::size_t k = p + 1; k < n; ++k) {
                    if (ys[k] > ys[p]) break;
                    rmin = std::min(rmin, ys[k]);
                }
                if (ys[p] - std::max(lmin, rmin) >= rel_prominence * top) out.push_back(x[p]);
            }
            i = j + 1;
        } else {
            ++i;
        }
    }
    return out;
}

double fwhm(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || y.empty()) throw Error("fwhm needs matching grids");
    const double half = 0.5 * *std::max_element(y.begin(), y.end());
    std::size_t lo = 0, hi = y.size() - 1;
    while (y[lo] < half) ++lo;
    while (y[hi] < half) --hi;
    return x[hi] - x[lo];
}

std::vector<double> linspace_step(double lo, double hi, double step)
{
    if (!(step > 0.0) || !(hi >= lo)) throw ConfigError("grid needs min <= max and step > 0");
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step * (1.0 + 1e-12) + 1e-9)) + 1;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = lo + step * static_cast<double>(i);
    return v;
}

ErfFit fit_erf_step(const std::vector<double>& x, const std::vector<double>& y, double lo, double hi)
{
    if (x.size() != y.size() || x.size() < 4) throw Error("erf fit needs >= 4 matching points");
    auto cost = [&](double c, double w) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double m = lo + 0.5 * (hi - lo) * (1.0 + std::erf((x[i] - c) / w));
            s += (y[i] - m) * (y[i] - m);
        }
        return s;
    };
    const double x0 = x.front(), x1 = x.back(), span = x1 - x0;
    const double wlo = span / 2000.0, whi = span;
    double best = 1e300, bc = x0, bw = wlo;
    const int nc = 200, nw = 60;
    for (int i = 0; i <= nc; ++i)
        for (int j = 0; j <= nw; ++j) {
            double c = x0 + span * i / nc, w = wlo * std::pow(whi / wlo, double(j) / nw);
            double v = cost(c, w);
            if (v < best) best = v, bc = c, bw = w;
        }
    const double dc = span / nc, fw = std::pow(whi / wlo, 1.0 / nw);
    auto inner = [&](double w) {
        auto r = boost::math::tools::brent_find_minima([&](double c) { return cost(c, w); }, bc - dc, bc + dc, 40);
        return r;
    };
    auto rw = boost::math::tools::brent_find_minima([&](double lw) { return inner(std::exp(lw)).second; },
                                                    std::log(bw / fw), std::log(bw * fw), 40);
    double w = std::exp(rw.first);
    auto rc = inner(w);
    return {rc.first, w, std::sqrt(rc.second / static_cast<double>(x.size()))};
}

ExpFit fit_exp_decay(const std::vector<double>& x, const std::vector<double>& y, double x0, double x1)
{
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < x0 || x[i] > x1) continue;
        if (!(y[i] > 0.0)) throw Error("exp fit needs positive samples");
        double ly = std::log(y[i]);
        sx += x[i], sy += ly, sxx += x[i] * x[i], sxy += x[i] * ly;
        ++n;
    }
    if (n < 2) throw Error("exp fit needs >= 2 points in range");
    const double dn = static_cast<double>(n);
    const double slope = (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
    return {-slope, (sy - slope * sx) / dn};
}

Fig3Output fig3_pipeline(const ScJob& job, const std::vector<double>& omega, const std::vector<double>& delta,
                         const std::vector<double>& tau, double T, const QuadSpec& q, unsigned threads)
{
    Fig3Output out;
    out.delta = sc_delta_dispersed(job, omega, delta, T, q, threads);
    out.tau = delta_to_tau(out.delta, tau, T);
    return out;
}

std::vector<double> argmax_trace(const SignalGrid& st)
{
    std::vector<double> tr(st.n2());
    for (std::size_t k = 0; k < st.n2(); ++k) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < st.n1(); ++i)
            if (std::abs(st.at(i, k)) > std::abs(st.at(best, k))) best = i;
        tr[k] = st.axis1.values[best];
    }
    return tr;
}

std::vector<double> column_max(const SignalGrid& st)
{
    std::vector<double> m(st.n2(), 0.0);
    for (std::size_t k = 0; k < st.n2(); ++k)
        for (std::size_t i = 0; i < st.n1(); ++i) m[k] = std::max(m[k], std::abs(st.at(i, k)));
    return m;
}

std::vector<Fig4Panel> fig4_scan(const std::vector<FrequencyTrajectory>& switches, double gamma_a,
                                 const std::vector<double>& sigma_pr, double T, const std::vector<double>& delta,
                                 double tau_step, unsigned threads)
{
    struct Job {
        std::size_t sw, sp;
    };
    std::vector<Job> jobs;
    for (std::size_t sp = 0; sp < sigma_pr.size(); ++sp)
        for (std::size_t sw = 0; sw < switches.size(); ++sw) jobs.push_back({sw, sp});
    std::vector<Fig4Panel> out(jobs.size());
    parallel_for(jobs.size(), threads, [&](std::size_t j) {
        const auto& tr = switches[jobs[j].sw];
        const auto* e = std::get_if<FrequencyTrajectory::ErfSwitch>(&tr.variant());
        if (!e) throw ConfigError("fig4 scan needs erf switch trajectories");
        const double spr = sigma_pr[jobs[j].sp];
        const double t = T + 10.0 * spr;
        auto tau = linspace_step(0.0, t, tau_step);
        auto K = matter_kernel(tr, gamma_a, t, tau);
        // resonant with the initial frequency
        auto probe = PulseSpec::gaussian(1.0, e->w0, spr);
        auto g = dressed_delta_signal(tau, K, probe, 0.0, T, delta);
        g.set_meta("sigma_m_fs", e->width);
        g.set_meta("detect_t_fs", t);
        out[j] = {spr, e->width, std::move(g)};
    });
    return out;
}

} // namespace vp
