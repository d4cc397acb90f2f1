// one PASS/FAIL line per acceptance criterion; exit status 1 if any fails
#include "vibroprobe/config.hpp"
#include "vibroprobe/loop_engine.hpp"
#include "vibroprobe/resolution.hpp"
#include "vibroprobe/runner.hpp"
#include "vibroprobe/semiclassical_engine.hpp"
#include "vibroprobe/sos_engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

using namespace vp;

namespace {

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail)
{
    std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, double a)
{
    char b[128];
    std::snprintf(b, sizeof b, f, a);
    return b;
}

std::string fmt(const char* f, double a, double b_)
{
    char b[256];
    std::snprintf(b, sizeof b, f, a, b_);
    return b;
}

template <class F>
double seconds(F&& fn)
{
    auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

RunConfig preset(const std::string& name, const std::vector<std::string>& sets = {})
{
    auto raw = parse_config_file(preset_dir() + "/" + name + ".toml");
    for (const auto& s : sets) apply_override(raw, s);
    return build_run_config(raw);
}

double rel_max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b)
{
    double e = 0.0, p = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        e = std::max(e, std::abs(a[i] - b[i]));
        p = std::max(p, std::abs(b[i]));
    }
    return e / p;
}

std::vector<double> magnitude(const std::vector<cplx>& v)
{
    std::vector<double> m;
    for (auto x : v) m.push_back(std::abs(x));
    return m;
}

std::vector<cplx> row_of(const SignalGrid& g, std::size_t i)
{
    return {g.data.begin() + static_cast<std::ptrdiff_t>(i * g.n2()),
            g.data.begin() + static_cast<std::ptrdiff_t>((i + 1) * g.n2())};
}

std::mt19937_64 rng(314159);
double uni(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

LevelScheme random_scheme(std::size_t na, std::size_t nc, std::size_t nd)
{
    LevelScheme s;
    for (std::size_t a = 0; a < na; ++a)
        s.a.push_back({"a" + std::to_string(a), cm1_to_radfs(uni(15800, 16400)), uni(0.006, 0.02), uni(0.5, 1.2)});
    for (std::size_t c = 0; c < nc; ++c) {
        VibState v{"c" + std::to_string(c), cm1_to_radfs(uni(17400, 18000)), uni(0.01, 0.03), {}, {}};
        for (std::size_t a = 0; a < na; ++a) v.mu.push_back(uni(0.1, 1.0)), v.alpha.push_back(uni(-0.6, 0.6));
        s.c.push_back(v);
    }
    for (std::size_t d = 0; d < nd; ++d) {
        VibState v{"d" + std::to_string(d), cm1_to_radfs(uni(14200, 14800)), uni(0.01, 0.03), {}, {}};
        for (std::size_t a = 0; a < na; ++a) v.mu.push_back(uni(0.1, 1.0)), v.alpha.push_back(uni(-0.6, 0.6));
        s.d.push_back(v);
    }
    return s;
}

ScJob constant_job(const LevelScheme& s)
{
    ScJob j;
    j.scheme = s;
    for (const auto& c : s.c) j.tr_c.push_back(FrequencyTrajectory::constant(c.omega - s.a[0].omega));
    for (const auto& d : s.d) j.tr_d.push_back(FrequencyTrajectory::constant(s.a[0].omega - d.omega));
    return j;
}

std::vector<double> cm1_range(double lo, double hi, double step)
{
    auto v = linspace_step(lo, hi, step);
    for (auto& x : v) x = cm1_to_radfs(x);
    return v;
}

// ---------------------------------------------------------------------------

struct Fig3Run {
    Fig3Output out;
    double secs = 0.0;
};

Fig3Run run_fig3(double width_fs)
{
    auto rc = preset("fig3", {"trajectory.d.width_fs=" + format_double(width_fs)});
    Fig3Run r;
    r.secs = seconds([&] {
        r.out = fig3_pipeline(rc.sc_job(), rc.grid("omega"), rc.grid("delta"), rc.grid("tau"), rc.grid("T").front(),
                              rc.quad, default_threads());
    });
    return r;
}

void fig3(std::vector<std::pair<std::vector<double>, std::vector<cplx>>>& spectra)
{
    auto fast = run_fig3(20.0);
    auto slow = run_fig3(200.0);
    const auto& tau = fast.out.tau.axis2->values;

    auto trace = argmax_trace(fast.out.tau);
    double early = 0.0, late = 0.0;
    for (std::size_t k = 0; k < tau.size(); ++k) {
        const double w = radfs_to_cm1(trace[k]);
        if (tau[k] <= 400.0) early = std::max(early, std::abs(w - 2000.0));
        if (tau[k] >= 700.0) late = std::max(late, std::abs(w - 2200.0));
    }
    report(early <= 15.0 && late <= 15.0, "fig3_peak_positions",
           fmt("max |peak-2000| for tau<=400: %.2f cm-1, ", early) +
               fmt("max |peak-2200| for tau>=700: %.2f cm-1 (tol 15)", late));

    auto fit = fit_exp_decay(tau, column_max(fast.out.tau), 800.0, tau.back());
    report(std::abs(fit.rate / 1e-3 - 1.0) < 0.02, "fig3_decay_rate",
           fmt("fitted %.6e 1/fs vs 1e-3 (tol 2%%), rel dev %.3e", fit.rate, std::abs(fit.rate / 1e-3 - 1.0)));

    auto cm = [](std::vector<double> v) {
        for (auto& x : v) x = radfs_to_cm1(x);
        return v;
    };
    auto wf = fit_erf_step(tau, cm(trace), 2000.0, 2200.0);
    auto ws = fit_erf_step(tau, cm(argmax_trace(slow.out.tau)), 2000.0, 2200.0);
    const double ratio = ws.width / wf.width;
    report(ratio >= 5.0 && ratio <= 20.0, "fig3_transition_stretch",
           fmt("erf widths %.2f fs (sigma_m=20) ", wf.width) + fmt("vs %.2f fs (sigma_m=200), ", ws.width) +
               fmt("ratio %.2f (accepted 5..20, nominal 10)", ratio));

    report(fast.secs + slow.secs < 120.0, "fig3_runtime",
           fmt("%.1f s for both sigma_m runs", fast.secs + slow.secs) +
               fmt(" on %g threads (target < 120 s)", double(default_threads())));

    const auto& d = fast.out.delta.axis2->values;
    for (const auto* g : {&fast.out.delta, &slow.out.delta})
        for (std::size_t i = 0; i < g->n1(); i += 10) spectra.push_back({d, row_of(*g, i)});
}

// ---------------------------------------------------------------------------

void fig4(std::vector<std::pair<std::vector<double>, std::vector<cplx>>>& spectra)
{
    auto rc = preset("fig4");
    const auto& tr = rc.tr_c.front();
    const auto& e = std::get<FrequencyTrajectory::ErfSwitch>(tr.variant());
    std::vector<FrequencyTrajectory> sw;
    for (double w : rc.sigma_m) sw.push_back(FrequencyTrajectory::erf_switch(e.w0, e.jump, e.t0, w));
    const auto d = rc.grid("delta");
    const double T = rc.grid("T").front();
    std::vector<Fig4Panel> panels;
    double secs = seconds([&] {
        panels = fig4_scan(sw, rc.scheme.a[0].gamma, rc.probe_sigmas, T, d, rc.tau_step, default_threads());
    });
    auto find = [&](double spr, double sm) -> const Fig4Panel& {
        for (const auto& p : panels)
            if (p.sigma_pr == spr && p.sigma_m == sm) return p;
        throw Error("missing fig4 panel");
    };
    auto count = [&](const Fig4Panel& p) {
        return find_peaks(d, magnitude(p.profile.data), (1.0 / p.sigma_pr) / 5.0, 0.1).size();
    };
    {
        std::size_t f = count(find(400, 20)), s = count(find(400, 200));
        report(f == 2 && s == 1, "fig4_peaks_sigma400", fmt("fast %g / slow %g peaks (want 2/1)", double(f), double(s)));
    }
    {
        const auto &pf = find(200, 20), &ps = find(200, 200);
        std::size_t f = count(pf), s = count(ps);
        const double wf = radfs_to_cm1(fwhm(d, magnitude(pf.profile.data)));
        const double ws = radfs_to_cm1(fwhm(d, magnitude(ps.profile.data)));
        report(f == 1 && s == 1 && wf > ws, "fig4_sigma200_single_peak_fwhm",
               fmt("fast %g / slow %g peaks (want 1/1); ", double(f), double(s)) +
                   fmt("FWHM fast %.2f vs slow %.2f cm-1 (want fast > slow)", wf, ws));
    }
    {
        auto f = magnitude(find(20, 20).profile.data), s = magnitude(find(20, 200).profile.data);
        double num = 0.0, den = 0.0;
        for (std::size_t j = 0; j < f.size(); ++j) num += (f[j] - s[j]) * (f[j] - s[j]), den += s[j] * s[j];
        const double rel = std::sqrt(num / den);
        report(rel < 0.05, "fig4_sigma20_traces_agree", fmt("relative L2 difference %.4f (tol 0.05)", rel));
    }
    report(secs < 120.0, "fig4_runtime", fmt("%.1f s for 8 panels (target < 120 s)", secs));
    for (const auto& p : panels) spectra.push_back({d, p.profile.data});
}

// ---------------------------------------------------------------------------

void closed_form()
{
    const double w0 = cm1_to_radfs(2000);
    double worst = 0.0;
    std::string detail;
    for (int r = 0; r < 5; ++r) {
        const double sigma = uni(30.0, 150.0);
        const double alpha = (r % 2 ? 1.0 : -1.0) * uni(2e-6, 3e-5);
        const double gamma = uni(2e-4, 2e-3);
        const double T = 8.0 * sigma + uni(0.0, 500.0);
        const double t = T + 10.0 * sigma;
        auto tau = linspace_step(0.0, t, std::min(0.5, sigma / 8.0));
        auto K = matter_kernel(FrequencyTrajectory::linear_chirp(w0, alpha), gamma, t, tau);
        auto cf = chirp_closed_form(w0, w0, alpha, T, gamma, sigma);
        std::vector<double> d;
        for (int k = -150; k <= 150; ++k) d.push_back(cf.delta0 + 3.0 * cf.sigma_eff * k / 150.0);
        auto s = dressed_delta_signal(tau, K, PulseSpec::gaussian(1.0, w0, sigma), 0.0, T, d);
        const double amp = std::abs(s.at(150));
        double err = 0.0;
        for (std::size_t j = 0; j < d.size(); ++j) {
            const double x = (d[j] - cf.delta0) / cf.sigma_eff;
            err = std::max(err, std::abs(std::abs(s.at(j)) / amp - std::exp(-0.5 * x * x)));
        }
        worst = std::max(worst, err);
        char b[160];
        std::snprintf(b, sizeof b, " (alpha %.2e, sigma %.0f, gamma %.1e, T %.0f): %.2e;", alpha, sigma, gamma, T, err);
        detail += b;
    }
    report(worst < 0.01, "closed_form_chirp", fmt("max rel deviation %.3e over Delta0 +- 3 sigma_eff (tol 1e-2);", worst) + detail);
}

void uncertainty(const std::vector<std::pair<std::vector<double>, std::vector<cplx>>>& spectra)
{
    double minp = 1e300, maxdev = 0.0;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) {
            const double alpha = -1e-4 + 2e-4 * i / 9.0;
            const double s = 5.0 * std::pow(100.0, j / 9.0);
            const double p = uncertainty_product(s, alpha);
            minp = std::min(minp, p);
            maxdev = std::max(maxdev, std::abs(p - std::sqrt(1.0 + alpha * alpha * s * s * s * s)) / p);
            maxdev = std::max(maxdev, std::abs(chirp_closed_form(0.3, 0.3, alpha, 500.0, 1e-3, s).sigma_eff * s - p) / p);
        }
    report(minp >= 1.0 && maxdev < 1e-12, "uncertainty_lattice",
           fmt("100-point lattice: min product %.6f (>= 1), max formula deviation %.1e", minp, maxdev));

    double minsm = 1e300;
    for (const auto& [d, v] : spectra) minsm = std::min(minsm, second_moment_product(d, v));
    report(minsm >= 0.5, "uncertainty_second_moments",
           fmt("%g Fig.3/4 spectra, ", double(spectra.size())) + fmt("min Delta-tau second-moment product %.4f (>= 0.5)", minsm));
}

// ---------------------------------------------------------------------------

void cross_protocol()
{
    double worst = 0.0;
    std::string detail;
    for (int r = 0; r < 5; ++r) {
        auto s = random_scheme(1 + r % 3, 1 + r % 2, 1 + (r + 1) % 2);
        double lo = s.a[0].omega, hi = s.a[0].omega;
        for (const auto& a : s.a) lo = std::min(lo, a.omega), hi = std::max(hi, a.omega);
        const double s1 = uni(10, 20), s2 = uni(15, 30);
        auto pump = PulseSpec::gaussian(cplx(uni(0.5, 1.5), uni(-0.5, 0.5)), 0.5 * (lo + hi), s1);
        auto probe = PulseSpec::gaussian(1.0, cm1_to_radfs(uni(1500, 1800)), s2);
        const double T = 6.0 * (s1 + s2) + uni(0, 100);
        auto om = cm1_range(1200, 2000, 50);
        auto d = cm1_range(-1800, 1800, 5);
        auto H = EffectiveHamiltonian::from_scheme(s);
        auto L = assemble_from_delta(loop_delta_dispersed(H, pump, ProbeCoupling::fdir(), om, d, T, {}, default_threads()),
                                     probe);
        auto S = sos_frequency_gated(s, pump, probe, ProbeCoupling::fdir(), om, T);
        const double e = rel_max_diff(L.data, S.data);
        worst = std::max(worst, e);
        char b[96];
        std::snprintf(b, sizeof b, " %zua/%zuc/%zud T=%.0f: %.1e;", s.a.size(), s.c.size(), s.d.size(), T, e);
        detail += b;
    }
    report(worst < 1e-3, "cross_protocol_loop_sos", fmt("5 random constant-gap schemes, max rel diff %.2e (tol 1e-3);", worst) + detail);

    worst = 0.0;
    detail.clear();
    for (int r = 0; r < 3; ++r) {
        LevelScheme s;
        s.a = {{"a", cm1_to_radfs(18000), uni(0.002, 0.006), 1.0}};
        s.c = {{"c", cm1_to_radfs(20000), uni(0.015, 0.04), {uni(0.3, 1)}, {0.0}}};
        s.d = {{"d", cm1_to_radfs(16000), uni(0.015, 0.04), {uni(0.3, 1)}, {0.0}}};
        ScJob job;
        job.scheme = s;
        job.tr_c = {FrequencyTrajectory::erf_switch(cm1_to_radfs(2000), cm1_to_radfs(uni(-200, 200)), uni(80, 300),
                                                    uni(10, 60))};
        job.tr_d = {FrequencyTrajectory::erf_switch(cm1_to_radfs(2000), cm1_to_radfs(uni(-200, 200)), uni(80, 300),
                                                    uni(10, 60))};
        auto H = EffectiveHamiltonian::from_scheme(s);
        H.gap_c[0] = job.tr_c[0];
        H.gap_d[0] = job.tr_d[0];
        auto om = cm1_range(1700, 2300, 50);
        auto d = cm1_range(-500, 500, 10);
        const double T = uni(50, 300);
        QuadSpec q;
        q.window = 1500.0;
        auto a = sc_delta_dispersed(job, om, d, T, q, default_threads());
        auto b = loop_delta_dispersed(H, PulseSpec::impulsive(1.0), ProbeCoupling::fdir(), om, d, T, q, default_threads());
        const double e = rel_max_diff(a.data, b.data);
        worst = std::max(worst, e);
        detail += fmt(" T=%.0f: %.1e;", T, e);
    }
    report(worst < 1e-3, "cross_protocol_loop_semiclassical",
           fmt("3 random erf-gap schemes, no bath, max rel diff %.2e (tol 1e-3);", worst) + detail);
}

// ---------------------------------------------------------------------------

void monte_carlo()
{
    auto rc = preset("mc_vs_cumulant");
    const auto job = rc.sc_job();
    const auto om = rc.grid("omega");
    const double T = rc.grid("T").front();
    auto cu = sc_probe_slice(job, *rc.lineshape, om, T, rc.quad);
    McResult big, small;
    double secs = seconds([&] {
        big = mc_ensemble_average(job, *rc.bath, om, {}, T, 10000, rc.seed, McTarget::probe_slice, rc.quad,
                                  default_threads());
    });
    small = mc_ensemble_average(job, *rc.bath, om, {}, T, 2500, rc.seed + 1, McTarget::probe_slice, rc.quad,
                                default_threads());
    double zmax = 0.0, zsum = 0.0;
    for (std::size_t i = 0; i < om.size(); ++i) {
        const cplx m = big.mean.at(i), c = cu.at(i), se = big.stderr_.at(i);
        const double zr = (m.real() - c.real()) / se.real(), zi = (m.imag() - c.imag()) / se.imag();
        zmax = std::max({zmax, std::abs(zr), std::abs(zi)});
        zsum += zr + zi;
    }
    report(zmax <= 2.0, "mc_vs_cumulant_mean",
           fmt("n=1e4, %g omega points, ", double(om.size())) + fmt("max |z| = %.2f over re and im (tol 2), %.1f s", zmax, secs) +
               fmt(", mean z %.2f", zsum / (2.0 * double(om.size()))));
    double rlo = 1e300, rhi = 0.0;
    for (std::size_t i = 0; i < om.size(); ++i)
        for (double r : {small.stderr_.at(i).real() / big.stderr_.at(i).real(),
                         small.stderr_.at(i).imag() / big.stderr_.at(i).imag()}) {
            rlo = std::min(rlo, r);
            rhi = std::max(rhi, r);
        }
    report(rlo >= 1.6 && rhi <= 2.4, "mc_stderr_scaling",
           fmt("SE(n=2500)/SE(n=1e4) in [%.3f, %.3f] (want 2 +- 20%%)", rlo, rhi));
}

// ---------------------------------------------------------------------------

void srs_mapping()
{
    std::vector<LevelScheme> corpus;
    for (const char* p : {"crosscheck_sos_loop", "fig3", "fig4", "mc_vs_cumulant"}) {
        auto s = preset(p).scheme;
        // presets carry dipoles only; give the Raman mapping something to map
        for (auto* m : {&s.c, &s.d})
            for (auto& v : *m)
                for (std::size_t a = 0; a < v.alpha.size(); ++a) v.alpha[a] = 0.3 + 0.1 * double(a);
        corpus.push_back(s);
    }
    for (int r = 0; r < 5; ++r) corpus.push_back(random_scheme(1 + r % 3, 1 + r % 2, 1 + (r + 1) % 2));

    double worst = 0.0;
    const double w3 = cm1_to_radfs(12000);
    const cplx e3(0.7, -0.4);
    const double f = std::norm(e3);
    auto pc_srs = ProbeCoupling::srs(e3, w3);
    for (const auto& s : corpus) {
        const auto m = s.with_alpha_as_mu();
        double lo = s.a[0].omega, hi = s.a[0].omega;
        for (const auto& a : s.a) lo = std::min(lo, a.omega), hi = std::max(hi, a.omega);
        auto pump = PulseSpec::gaussian(1.0, 0.5 * (lo + hi), 15.0);
        const double pc = cm1_to_radfs(1800);
        auto om = cm1_range(1200, 2400, 100);
        std::vector<double> om_srs;
        for (double w : om) om_srs.push_back(w + w3);
        auto cmp = [&](const std::vector<cplx>& a, const std::vector<cplx>& b) {
            std::vector<cplx> bf;
            for (auto x : b) bf.push_back(f * x);
            worst = std::max(worst, rel_max_diff(a, bf));
        };
        // frequency-gated SOS
        cmp(sos_frequency_gated(s, pump, PulseSpec::gaussian(1.0, pc + w3, 25.0), pc_srs, om_srs, 200.0).data,
            sos_frequency_gated(m, pump, PulseSpec::gaussian(1.0, pc, 25.0), ProbeCoupling::fdir(), om, 200.0).data);
        // prepared-state Delta spectrum
        auto rho = PreparedState::from_pump(s, pump);
        auto d = cm1_range(-600, 600, 50);
        cmp(sos_delta_dispersed_prepared(rho, s, pc_srs, om_srs[3], d, 200.0).data,
            sos_delta_dispersed_prepared(rho, m, ProbeCoupling::fdir(), om[3], d, 200.0).data);
        // direct propagation and semiclassical Delta spectra, fixed grids
        QuadSpec q;
        q.step = 0.5;
        q.max_halvings = 0;
        q.window = 400.0;
        std::vector<double> o3(om_srs.begin(), om_srs.begin() + 4), o(om.begin(), om.begin() + 4);
        cmp(loop_delta_dispersed(EffectiveHamiltonian::from_scheme(s), pump, pc_srs, o3, d, 200.0, q).data,
            loop_delta_dispersed(EffectiveHamiltonian::from_scheme(m), pump, ProbeCoupling::fdir(), o, d, 200.0, q).data);
        auto js = constant_job(s);
        js.coupling = pc_srs;
        auto jm = constant_job(m);
        cmp(sc_delta_dispersed(js, o3, d, 100.0, q).data, sc_delta_dispersed(jm, o, d, 100.0, q).data);
    }
    report(worst < 1e-12, "fdir_srs_mapping",
           fmt("%g schemes x {sos, sos prepared, loop, semiclassical}, ", double(corpus.size())) +
               fmt("max rel diff %.2e (tol 1e-12)", worst));
}

// ---------------------------------------------------------------------------

void bath_identities()
{
    double e1 = 0.0, e2 = 0.0, e3 = 0.0;
    bool peak_is_max = true;
    for (double lam_cm : {1.0, 50.0, 300.0})
        for (double L : {1e-3, 1e-2, 0.1})
            for (double K : {77.0, 300.0}) {
                BathSpec b{cm1_to_radfs(lam_cm), L, K};
                const double bh = b.beta_hbar();
                for (double T : {0.0, 10.0, 500.0, 3000.0}) {
                    auto g = lineshape_g(b, T, T);
                    const double want = 4.0 * b.lambda * T / (bh * L);
                    e1 = std::max(e1, std::abs(g.g - want) / std::max(want, 1e-300));
                }
                std::vector<double> w;
                for (int k = 1; k <= 40; ++k) w.push_back(0.25 * L * k), w.push_back(-0.25 * L * k);
                auto sd = brownian_spectral_density(b, w);
                for (std::size_t k = 0; k < w.size(); k += 2)
                    e2 = std::max(e2, std::abs(sd.full[k] / sd.full[k + 1] / std::exp(bh * w[k]) - 1.0));
                auto pk = brownian_spectral_density(b, {L});
                e3 = std::max(e3, std::abs(pk.odd[0] / b.lambda - 1.0));
                for (double v : sd.odd) peak_is_max = peak_is_max && v <= pk.odd[0] * (1 + 1e-15);
            }
    report(e1 < 1e-14, "bath_g_equal_times", fmt("g(T,T) vs 4 lambda T/(beta hbar Lambda), Im included: max rel dev %.1e (tol 1e-14)", e1));
    report(e2 < 1e-10, "bath_detailed_balance", fmt("C(w)/C(-w) vs exp(beta hbar w): max rel dev %.1e (tol 1e-10)", e2));
    report(e3 < 1e-14 && peak_is_max, "bath_spectral_peak",
           fmt("C''(Lambda)/lambda - 1 = %.1e, peak is the maximum: ", e3) + (peak_is_max ? "yes" : "no"));
}

} // namespace

int main()
{
    std::vector<std::pair<std::vector<double>, std::vector<cplx>>> spectra;
    const std::vector<std::pair<const char*, std::function<void()>>> steps{
        {"fig3", [&] { fig3(spectra); }},
        {"fig4", [&] { fig4(spectra); }},
        {"closed_form", closed_form},
        {"uncertainty", [&] { uncertainty(spectra); }},
        {"cross_protocol", cross_protocol},
        {"monte_carlo", monte_carlo},
        {"srs_mapping", srs_mapping},
        {"bath", bath_identities},
    };
    for (const auto& [name, fn] : steps) {
        try {
            fn();
        } catch (const std::exception& e) {
            report(false, name, std::string("threw: ") + e.what());
        }
    }
    std::printf("%d acceptance check(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
