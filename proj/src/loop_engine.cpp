#include "vibroprobe/loop_engine.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace vp {

namespace {

constexpr double kWindowLog = 13.815510557964274; // ln(1e6)

// per-step propagator phase of a c/d level
struct Level {
    double omega, gamma;
    const FrequencyTrajectory* gap = nullptr; // energy = ref +/- gap(t)
    double ref = 0.0;
    double sign = 1.0;

    double phase(double t1, double t2) const
    {
        if (!gap) return omega * (t2 - t1);
        return ref * (t2 - t1) + sign * phase_integral(*gap, t1, t2);
    }
};

struct Setup {
    std::vector<Level> c, d;
    double t_start, t_end;
    double h0;
};

Setup make_setup(const EffectiveHamiltonian& H, const PulseSpec& pump, const std::vector<double>& omega,
                 const std::vector<double>& delta, const ProbeCoupling& pc, const QuadSpec& q)
{
    const auto& s = H.scheme;
    Setup st;
    double ref = s.a[H.ref_a].omega;
    for (std::size_t i = 0; i < s.c.size(); ++i) {
        Level L{s.c[i].omega, s.c[i].gamma};
        if (H.gap_c[i]) L = {s.c[i].omega, s.c[i].gamma, &*H.gap_c[i], ref, 1.0};
        st.c.push_back(L);
    }
    for (std::size_t i = 0; i < s.d.size(); ++i) {
        Level L{s.d[i].omega, s.d[i].gamma};
        if (H.gap_d[i]) L = {s.d[i].omega, s.d[i].gamma, &*H.gap_d[i], ref, -1.0};
        st.d.push_back(L);
    }

    double gmin = 1e300;
    for (const auto& a : s.a) gmin = std::min(gmin, a.gamma);
    if (!(gmin > 0.0) && q.window <= 0.0) throw Error("divergent window: every a-state needs gamma > 0");
    double window = q.window > 0.0 ? q.window : kWindowLog / (2.0 * gmin);

    double pump_half = 0.0;
    double slow = 1e300; // shortest time scale to resolve
    if (pump.kind == PulseKind::gaussian) {
        pump_half = 8.0 * pump.sigma;
        slow = std::min(slow, pump.sigma / 3.0);
    } else if (pump.kind != PulseKind::impulsive) {
        throw Error("loop engine needs a gaussian or impulsive pump");
    }
    st.t_start = pump.center - pump_half;
    st.t_end = pump.center + pump_half + window;

    // oscillation bound of every separated factor
    double wmax = 0.0;
    double shift = pc.shift();
    double amax = 0.0;
    for (const auto& a : s.a) {
        for (const auto& b : s.a) amax = std::max(amax, std::abs(a.omega - b.omega));
        if (pump.kind == PulseKind::gaussian) wmax = std::max(wmax, std::abs(a.omega - pump.carrier));
    }
    for (double w : omega) {
        double wd = w - shift;
        for (const auto& a : s.a) {
            for (const auto& L : st.d)
                wmax = std::max(wmax, L.gap ? std::abs(wd) + L.gap->max_abs() : std::abs(wd - (a.omega - L.omega)));
            for (const auto& L : st.c)
                wmax = std::max(wmax, L.gap ? std::abs(wd) + L.gap->max_abs() : std::abs(wd - (L.omega - a.omega)));
        }
    }
    for (double dl : delta) wmax = std::max(wmax, std::abs(dl) + amax);
    for (const auto& v : {&H.gap_c, &H.gap_d})
        for (const auto& g : *v)
            if (g && g->time_scale() > 0.0) slow = std::min(slow, g->time_scale() / 3.0);
    double h = 2.0 * std::numbers::pi / (10.0 * std::max(wmax, 1e-6));
    h = std::min(h, slow);
    h = std::min(h, window / 64.0);
    if (q.step > 0.0) h = q.step * 2.0;
    st.h0 = h;
    return st;
}

// ket amplitudes of every a-state on the grid
std::vector<std::vector<cplx>> ket_amplitudes(const LevelScheme& s, const PulseSpec& pump, double t0, double h,
                                              std::size_t n)
{
    std::vector<std::vector<cplx>> psi(s.a.size(), std::vector<cplx>(n));
    for (std::size_t a = 0; a < s.a.size(); ++a) {
        const cplx gen(s.a[a].gamma, s.a[a].omega); // d/dt psi = -gen psi + mu E1
        const cplx step = std::exp(-gen * h);
        auto& p = psi[a];
        if (pump.kind == PulseKind::impulsive) {
            cplx p0 = s.a[a].mu_g * pump.amplitude;
            for (std::size_t k = 0; k < n; ++k) {
                if (k % 256 == 0) p0 = s.a[a].mu_g * pump.amplitude * std::exp(-gen * (h * static_cast<double>(k)));
                p[k] = p0;
                p0 *= step;
            }
        } else {
            cplx prev_e = s.a[a].mu_g * envelope_time(pump, t0);
            p[0] = 0.0;
            for (std::size_t k = 1; k < n; ++k) {
                cplx e = s.a[a].mu_g * envelope_time(pump, t0 + h * static_cast<double>(k));
                p[k] = step * p[k - 1] + 0.5 * h * (step * prev_e + e);
                prev_e = e;
            }
        }
    }
    return psi;
}

// one omega row of the Delta-dispersed signal at step h
std::vector<cplx> loop_row(const EffectiveHamiltonian& H, const Setup& st, const std::vector<std::vector<cplx>>& psi,
                           const ProbeCoupling& pc, double omega, const std::vector<double>& delta, double T,
                           double h, std::size_t n)
{
    const auto& s = H.scheme;
    const std::size_t na = s.a.size();
    const double wd = omega - pc.shift();
    const double t0 = st.t_start;
    std::vector<cplx> det(n), det_c(n);
    for (std::size_t k = 0; k < n; ++k) {
        double t = t0 + h * static_cast<double>(k);
        det[k] = std::exp(I * (wd * t));
    }
    std::vector<cplx> outer(n, 0.0), G(n), J(n);

    auto run_branch = [&](const VibState& v, const Level& L, bool emission) {
        // inner tail integral, propagated backwards one step at a time
        for (std::size_t k = 0; k < n; ++k) {
            cplx sum = 0.0;
            for (std::size_t a = 0; a < na; ++a)
                sum += emission ? pc.weight(v, a) * psi[a][k] : pc.weight(v, a) * std::conj(psi[a][k]);
            G[k] = det[k] * sum;
        }
        J[n - 1] = 0.0;
        for (std::size_t k = n - 1; k-- > 0;) {
            double t1 = t0 + h * static_cast<double>(k);
            double ph = L.phase(t1, t1 + h);
            cplx u = emission ? std::exp(cplx(-L.gamma * h, ph)) : std::exp(cplx(-L.gamma * h, -ph));
            J[k] = 0.5 * h * (G[k] + u * G[k + 1]) + u * J[k + 1];
        }
        for (std::size_t k = 0; k < n; ++k) {
            cplx sum = 0.0;
            for (std::size_t a = 0; a < na; ++a)
                sum += emission ? std::conj(pc.weight(v, a) * psi[a][k]) : std::conj(pc.weight(v, a)) * psi[a][k];
            cplx b = std::conj(det[k]) * sum * J[k] * trap_w(k, n, h);
            outer[k] += emission ? I * b : -I * b;
        }
    };
    for (std::size_t i = 0; i < s.d.size(); ++i) run_branch(s.d[i], st.d[i], true);
    for (std::size_t i = 0; i < s.c.size(); ++i) run_branch(s.c[i], st.c[i], false);

    auto row = delta_sum(outer, t0, h, delta, T);
    const double f = pc.field_factor();
    for (auto& x : row) x *= f;
    return row;
}

} // namespace

EffectiveHamiltonian EffectiveHamiltonian::from_scheme(const LevelScheme& s)
{
    EffectiveHamiltonian H;
    H.scheme = s;
    H.gap_c.assign(s.c.size(), std::nullopt);
    H.gap_d.assign(s.d.size(), std::nullopt);
    return H;
}

void EffectiveHamiltonian::validate() const
{
    scheme.validate();
    if (ref_a >= scheme.a.size()) throw ConfigError("gap reference a-state out of range");
    if (gap_c.size() != scheme.c.size() || gap_d.size() != scheme.d.size())
        throw ConfigError("gap overrides do not match the level scheme");
    for (const auto& v : {&scheme.a})
        for (const auto& x : *v)
            if (x.gamma < 0.0) throw Error("non-contractive generator");
}

SignalGrid loop_delta_dispersed(const EffectiveHamiltonian& H, const PulseSpec& pump, const ProbeCoupling& pc,
                                const std::vector<double>& omega, const std::vector<double>& delta, double T,
                                const QuadSpec& q, unsigned threads)
{
    H.validate();
    pc.validate();
    pump.validate();
    Setup st = make_setup(H, pump, omega, delta, pc, q);
    const std::size_t nd = delta.size();

    auto eval = [&](double h) {
        std::size_t n = static_cast<std::size_t>(std::ceil((st.t_end - st.t_start) / h)) + 1;
        auto psi = ket_amplitudes(H.scheme, pump, st.t_start, h, n);
        std::vector<cplx> out(omega.size() * nd);
        parallel_for(omega.size(), threads, [&](std::size_t i) {
            auto row = loop_row(H, st, psi, pc, omega[i], delta, T, h, n);
            std::copy(row.begin(), row.end(), out.begin() + static_cast<std::ptrdiff_t>(i * nd));
        });
        return out;
    };
    auto r = richardson(eval, st.h0, q, "loop_delta_dispersed");

    SignalGrid g(Axis{"omega", "radfs", omega}, Axis{"delta", "radfs", delta}, true);
    g.data = std::move(r.value);
    g.set_meta("engine", "loop");
    g.set_meta("mode", pc.mode == ProbeMode::srs ? "srs" : "fdir");
    g.set_meta("T_fs", T);
    g.set_meta("pump", to_string(pump.kind));
    g.set_meta("step_fs", r.step);
    g.set_meta("window_fs", st.t_end - st.t_start);
    g.set_meta("rel_error", r.error);
    return g;
}

// ---- resolvent route

SignalGrid resolvent_frequency_gated(const EffectiveHamiltonian& H, const PulseSpec& pump, const PulseSpec& probe,
                                     const ProbeCoupling& pc, const std::vector<double>& omega, double T, double tol,
                                     unsigned threads)
{
    H.validate();
    pc.validate();
    if (pump.kind != PulseKind::gaussian || probe.kind != PulseKind::gaussian)
        throw Error("resolvent route needs gaussian pump and probe");
    for (const auto& g : H.gap_c)
        if (g) throw Error("resolvent route needs a constant-gap Hamiltonian");
    for (const auto& g : H.gap_d)
        if (g) throw Error("resolvent route needs a constant-gap Hamiltonian");
    const auto& s = H.scheme;
    for (const auto& a : s.a)
        if (!(a.gamma > 0.0)) throw Error("resolvent route rejects gamma = 0 states");
    for (const auto* m : {&s.c, &s.d})
        for (const auto& v : *m)
            if (!(v.gamma > 0.0)) throw Error("resolvent route rejects gamma = 0 states");

    const std::size_t na = s.a.size();
    using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
    const double span1 = 9.0 / pump.sigma;
    const double span2 = 9.0 / probe.sigma;
    const double f = pc.field_factor();

    // pump-dressed ket amplitude of every a-state at frequency x
    auto kets = [&](double x, std::vector<cplx>& out) {
        cplx e = envelope_freq(pump, x);
        for (std::size_t a = 0; a < na; ++a)
            out[a] = s.a[a].mu_g * e * I / cplx(x - s.a[a].omega, s.a[a].gamma);
    };

    auto integrate = [&](auto&& fn, std::vector<double> cuts, double lo, double hi, double rtol) {
        cuts.push_back(lo);
        cuts.push_back(hi);
        std::sort(cuts.begin(), cuts.end());
        cplx acc = 0.0;
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            double a = std::max(lo, cuts[k]), b = std::min(hi, cuts[k + 1]);
            if (!(b > a)) continue;
            acc += GK::integrate(fn, a, b, 10, rtol);
        }
        return acc;
    };

    SignalGrid g(Axis{"omega", "radfs", omega}, false);
    parallel_for(omega.size(), threads, [&](std::size_t i) {
        const double w = omega[i];
        const double wd = w - pc.shift();
        std::vector<cplx> k1(na), k2(na);
        auto inner = [&](double dl) {
            // emission: ket at x, bra at x + dl
            auto fi = [&](double x) {
                kets(x, k1);
                kets(x + dl, k2);
                cplx acc = 0.0;
                for (const auto& d : s.d) {
                    cplx kk = 0.0, bb = 0.0;
                    for (std::size_t a = 0; a < na; ++a) {
                        kk += pc.weight(d, a) * k1[a];
                        bb += std::conj(pc.weight(d, a) * k2[a]);
                    }
                    acc += I * kk * bb * I / cplx(wd - x + d.omega, d.gamma);
                }
                return acc;
            };
            // absorption: ket at x - dl, bra at x
            auto fii = [&](double x) {
                kets(x - dl, k1);
                kets(x, k2);
                cplx acc = 0.0;
                for (const auto& c : s.c) {
                    cplx kk = 0.0, bb = 0.0;
                    for (std::size_t a = 0; a < na; ++a) {
                        kk += std::conj(pc.weight(c, a)) * k1[a];
                        bb += pc.weight(c, a) * std::conj(k2[a]);
                    }
                    acc += -I * kk * bb * I / cplx(wd + x - c.omega, c.gamma);
                }
                return acc;
            };
            std::vector<double> cuts_i, cuts_ii;
            for (const auto& a : s.a) {
                cuts_i.push_back(a.omega);
                cuts_i.push_back(a.omega - dl);
                cuts_ii.push_back(a.omega);
                cuts_ii.push_back(a.omega + dl);
            }
            for (const auto& d : s.d) cuts_i.push_back(wd + d.omega);
            for (const auto& c : s.c) cuts_ii.push_back(c.omega - wd);
            const double wp = pump.carrier;
            cplx r = 0.0;
            if (!s.d.empty())
                r += integrate(fi, cuts_i, std::max(wp - span1, wp - dl - span1), std::min(wp + span1, wp - dl + span1),
                               0.1 * tol);
            if (!s.c.empty())
                r += integrate(fii, cuts_ii, std::max(wp - span1, wp + dl - span1),
                               std::min(wp + span1, wp + dl + span1), 0.1 * tol);
            return r / (2.0 * std::numbers::pi);
        };
        auto outer = [&](double dl) { return envelope_freq(probe, w + dl) * std::exp(I * (dl * T)) * inner(dl); };
        std::vector<double> cuts;
        for (const auto& a : s.a)
            for (const auto& b : s.a) cuts.push_back(b.omega - a.omega);
        const double c0 = probe.carrier - w;
        cplx tot = integrate(outer, cuts, c0 - span2, c0 + span2, tol) / (2.0 * std::numbers::pi);
        g.at(i) = f * (std::conj(envelope_freq(probe, w)) * tot).imag();
    });
    g.set_meta("engine", "resolvent");
    g.set_meta("mode", pc.mode == ProbeMode::srs ? "srs" : "fdir");
    g.set_meta("T_fs", T);
    return g;
}

// ---- assembly

namespace {

bool uniform(const std::vector<double>& x)
{
    if (x.size() < 3) return false;
    double h = x[1] - x[0];
    for (std::size_t k = 2; k < x.size(); ++k)
        if (std::abs((x[k] - x[k - 1]) - h) > 1e-9 * std::abs(h)) return false;
    return true;
}

// trapezoid on the full grid and on every other point
void trap_pair(const std::vector<double>& x, const std::vector<cplx>& y, cplx& fine, cplx& coarse, double& l1)
{
    fine = 0.0;
    l1 = 0.0;
    for (std::size_t k = 0; k + 1 < x.size(); ++k) {
        double h = x[k + 1] - x[k];
        fine += 0.5 * h * (y[k] + y[k + 1]);
        l1 += 0.5 * h * (std::abs(y[k]) + std::abs(y[k + 1]));
    }
    coarse = fine;
    if (!uniform(x) || x.size() < 5) return;
    coarse = 0.0;
    std::size_t k = 0;
    for (; k + 2 < x.size(); k += 2) coarse += (x[k + 2] - x[k]) * 0.5 * (y[k] + y[k + 2]);
    if (k + 1 < x.size()) coarse += 0.5 * (x[k + 1] - x[k]) * (y[k] + y[k + 1]);
}

} // namespace

double assemble_from_delta(const std::vector<double>& delta, const std::vector<cplx>& sd, const PulseSpec& probe,
                           double omega)
{
    if (delta.size() != sd.size() || delta.size() < 2) throw Error("assembly: grid/payload mismatch");
    std::vector<cplx> y(sd.size());
    for (std::size_t j = 0; j < sd.size(); ++j) y[j] = envelope_freq(probe, omega + delta[j]) * sd[j];
    cplx fine, coarse;
    double l1;
    trap_pair(delta, y, fine, coarse, l1);
    if (std::abs(fine - coarse) > 1e-3 * std::max(l1, 1e-300))
        throw ConvergenceError("Delta grid does not resolve the probe/matter bandwidths");
    return (std::conj(envelope_freq(probe, omega)) * fine).imag() / (2.0 * std::numbers::pi);
}

SignalGrid assemble_from_delta(const SignalGrid& sd, const PulseSpec& probe)
{
    if (!sd.axis2) throw Error("assembly needs an (omega x Delta) grid");
    SignalGrid g(sd.axis1, false);
    std::vector<cplx> row(sd.n2());
    for (std::size_t i = 0; i < sd.n1(); ++i) {
        for (std::size_t j = 0; j < sd.n2(); ++j) row[j] = sd.at(i, j);
        g.at(i) = assemble_from_delta(sd.axis2->values, row, probe, sd.axis1.values[i]);
    }
    g.meta = sd.meta;
    g.set_meta("assembled", "delta");
    return g;
}

double assemble_time_gated(const std::vector<double>& tau, const std::vector<cplx>& kernel, const PulseSpec& probe,
                           double t, double T)
{
    if (tau.size() != kernel.size() || tau.size() < 2) throw Error("assembly: grid/payload mismatch");
    if (probe.kind == PulseKind::impulsive) throw Error("impulsive probe: use the delta(t-T) fast path");
    std::vector<cplx> y(tau.size());
    for (std::size_t j = 0; j < tau.size(); ++j)
        y[j] = tau[j] <= t ? envelope_time(probe, tau[j] - T) * kernel[j] : cplx(0.0);
    cplx fine, coarse;
    double l1;
    trap_pair(tau, y, fine, coarse, l1);
    if (std::abs(fine - coarse) > 1e-3 * std::max(l1, 1e-300))
        throw ConvergenceError("tau grid does not resolve the probe/matter time scales");
    return (std::conj(envelope_time(probe, t - T)) * fine).imag();
}

} // namespace vp
