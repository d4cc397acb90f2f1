#include "vibroprobe/sos_engine.hpp"

#include <algorithm>
#include <cmath>

namespace vp {

namespace {

std::vector<cplx> raw_rho(const LevelScheme& s, const PulseSpec& pump)
{
    if (pump.kind == PulseKind::cw) throw Error("use prepared-state path for CW pump");
    return pump_coherences(s, pump);
}

std::vector<cplx> rho_matrix(const PreparedState& p)
{
    std::size_t n = p.size();
    std::vector<cplx> r(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) r[i * n + j] = p(i, j);
    return r;
}

cplx resonance(double w, const SosTerm& t)
{
    cplx den(w - t.pole, t.width);
    if (den == cplx(0.0)) throw Error("degenerate resonance denominator (gamma = 0 on resonance)");
    return 1.0 / den;
}

void stamp(SignalGrid& g, const LevelScheme& s, const ProbeCoupling& pc, double T, const char* engine)
{
    g.set_meta("engine", engine);
    g.set_meta("mode", pc.mode == ProbeMode::srs ? "srs" : "fdir");
    g.set_meta("T_fs", T);
    g.set_meta("n_a", static_cast<double>(s.a.size()));
    g.set_meta("n_c", static_cast<double>(s.c.size()));
    g.set_meta("n_d", static_cast<double>(s.d.size()));
    if (pc.mode == ProbeMode::srs) g.set_meta("omega3_radfs", pc.omega3);
}

} // namespace

std::vector<SosTerm> sos_terms(const LevelScheme& s, const std::vector<cplx>& rho, const ProbeCoupling& pc)
{
    s.validate();
    pc.validate();
    const std::size_t n = s.a.size();
    if (rho.size() != n * n) throw Error("prepared state does not match the level scheme");
    const double f = pc.field_factor();
    std::vector<SosTerm> out;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            cplx r = rho[a * n + b];
            if (r == cplx(0.0)) continue;
            double wb = s.a[b].omega - s.a[a].omega;
            double gb = s.a[a].gamma + s.a[b].gamma;
            // emission: ket a -> d at t, bra a' -> d at tau3
            for (const auto& d : s.d) {
                cplx L = r * pc.weight(d, a) * std::conj(pc.weight(d, b));
                if (L == cplx(0.0)) continue;
                out.push_back({-I * f * L, s.a[a].omega - d.omega, s.a[a].gamma + d.gamma, wb, gb});
            }
            // absorption: ket a -> c at tau3, back to a' at t
            for (const auto& c : s.c) {
                cplx L = r * std::conj(pc.weight(c, a)) * pc.weight(c, b);
                if (L == cplx(0.0)) continue;
                out.push_back({I * f * L, c.omega - s.a[b].omega, c.gamma + s.a[b].gamma, wb, gb});
            }
        }
    return out;
}

SignalGrid sos_frequency_gated(const LevelScheme& s, const PulseSpec& pump, const PulseSpec& probe,
                               const ProbeCoupling& pc, const std::vector<double>& omega, double T)
{
    if (probe.kind == PulseKind::cw) throw Error("cw probe has no frequency-gated SOS form");
    auto terms = sos_terms(s, raw_rho(s, pump), pc);
    SignalGrid g(Axis{"omega", "radfs", omega}, false);
    for (std::size_t i = 0; i < omega.size(); ++i) {
        const double w = omega[i];
        const double wd = w - pc.shift();
        cplx acc = 0.0;
        for (const auto& t : terms) {
            cplx e2 = envelope_freq(probe, cplx(w + t.w_beat, t.g_beat));
            acc += -I * t.coef * e2 * std::exp(cplx(-t.g_beat, t.w_beat) * T) * resonance(wd, t);
        }
        g.at(i) = (std::conj(envelope_freq(probe, w)) * acc).imag();
    }
    stamp(g, s, pc, T, "sos");
    g.set_meta("gating", "frequency");
    g.set_meta("pump", to_string(pump.kind));
    g.set_meta("probe", to_string(probe.kind));
    return g;
}

SignalGrid sos_impulsive(const LevelScheme& s, const ProbeCoupling& pc, const std::vector<double>& omega, double T)
{
    if (T < 0.0) throw Error("impulsive SOS form needs T >= 0");
    auto p = PulseSpec::impulsive(1.0);
    auto g = sos_frequency_gated(s, p, p, pc, omega, T);
    g.set_meta("engine", "sos_impulsive");
    return g;
}

SignalGrid sos_delta_dispersed_prepared(const PreparedState& rho, const LevelScheme& s, const ProbeCoupling& pc,
                                        double omega, const std::vector<double>& delta, double T)
{
    auto terms = sos_terms(s, rho_matrix(rho), pc);
    SignalGrid g(Axis{"delta", "radfs", delta}, true);
    const double wd = omega - pc.shift();
    double need_lo = 0.0, need_hi = 0.0, gmax = 0.0;
    for (const auto& t : terms) {
        need_lo = std::min(need_lo, t.w_beat);
        need_hi = std::max(need_hi, t.w_beat);
        gmax = std::max(gmax, t.g_beat);
    }
    for (std::size_t j = 0; j < delta.size(); ++j) {
        const double d = delta[j];
        cplx acc = 0.0;
        for (const auto& t : terms) {
            cplx beat(t.w_beat - d, t.g_beat);
            if (beat == cplx(0.0)) throw Error("degenerate beat denominator (gamma_aa' = 0 at the pole)");
            acc += t.coef * resonance(wd, t) / beat;
        }
        g.at(j) = acc * std::exp(I * (d * T));
    }
    stamp(g, s, pc, T, "sos_prepared");
    g.set_meta("omega_radfs", omega);
    if (!delta.empty()) {
        auto [lo, hi] = std::minmax_element(delta.begin(), delta.end());
        if (*lo > need_lo - 5.0 * gmax || *hi < need_hi + 5.0 * gmax)
            g.set_meta("warning", "delta grid narrower than beat frequencies +- 5 gamma");
    }
    return g;
}

SignalGrid sos_time_gated(const LevelScheme& s, const PulseSpec& pump, const ProbeCoupling& pc,
                          const std::vector<double>& t, const std::vector<double>& tau, double T)
{
    auto rho = raw_rho(s, pump);
    s.validate();
    const std::size_t n = s.a.size();
    const double f = pc.field_factor();
    const double w3 = pc.shift();
    SignalGrid g(Axis{"t", "fs", t}, Axis{"tau", "fs", tau}, true);
    for (std::size_t i = 0; i < t.size(); ++i)
        for (std::size_t j = 0; j < tau.size(); ++j) {
            const double ti = t[i], tj = tau[j];
            if (tj < 0.0 || tj > ti) continue;
            cplx acc = 0.0;
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < n; ++b) {
                    cplx r = rho[a * n + b];
                    const auto &A = s.a[a], &B = s.a[b];
                    for (const auto& d : s.d) {
                        cplx L = r * pc.weight(d, a) * std::conj(pc.weight(d, b));
                        acc += I * L *
                               std::exp(-cplx(A.gamma + d.gamma, A.omega - d.omega) * ti +
                                        cplx(d.gamma - B.gamma, B.omega - d.omega) * tj);
                    }
                    for (const auto& c : s.c) {
                        cplx L = r * std::conj(pc.weight(c, a)) * pc.weight(c, b);
                        acc -= I * L *
                               std::exp(-cplx(c.gamma + B.gamma, c.omega - B.omega) * ti +
                                        cplx(c.gamma - A.gamma, c.omega - A.omega) * tj);
                    }
                }
            g.at(i, j) = f * acc * std::exp(-I * (w3 * (ti - tj)));
        }
    stamp(g, s, pc, T, "sos");
    g.set_meta("gating", "time");
    return g;
}

double sos_time_gated_impulsive(const LevelScheme& s, const PulseSpec& pump, const ProbeCoupling& pc,
                                const PulseSpec& probe, double T)
{
    if (probe.kind != PulseKind::impulsive) throw Error("fast path needs an impulsive probe");
    if (T < 0.0) return 0.0;
    auto rho = raw_rho(s, pump);
    s.validate();
    const std::size_t n = s.a.size();
    cplx acc = 0.0;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            cplx r = rho[a * n + b];
            cplx beat = std::exp(cplx(-(s.a[a].gamma + s.a[b].gamma), s.a[b].omega - s.a[a].omega) * T);
            cplx dsum = 0.0, csum = 0.0;
            for (const auto& d : s.d) dsum += pc.weight(d, a) * std::conj(pc.weight(d, b));
            for (const auto& c : s.c) csum += std::conj(pc.weight(c, a)) * pc.weight(c, b);
            acc += r * beat * (I * dsum - I * csum);
        }
    return pc.field_factor() * std::norm(probe.amplitude) * acc.imag();
}

} // namespace vp
