#include "vibroprobe/runner.hpp"

#include "vibroprobe/loop_engine.hpp"
#include "vibroprobe/resolution.hpp"
#include "vibroprobe/semiclassical_engine.hpp"
#include "vibroprobe/sos_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <ostream>

namespace vp {

namespace fs = std::filesystem;

namespace {

double single(const RunConfig& rc, const std::string& g)
{
    auto v = rc.grid(g);
    if (v.size() != 1) throw ConfigError("[grid." + g + "] must be a single value (value_*) for this observable");
    return v.front();
}

const PulseSpec& need(const std::optional<PulseSpec>& p, const char* name)
{
    if (!p) throw ConfigError(std::string("missing section [") + name + "]");
    return *p;
}

// stack 1D omega rows into an omega x T grid
SignalGrid stack_T(const std::vector<SignalGrid>& rows, const std::vector<double>& T)
{
    SignalGrid g(rows.front().axis1, Axis{"T", "fs", T}, rows.front().is_complex);
    for (std::size_t k = 0; k < T.size(); ++k)
        for (std::size_t i = 0; i < g.n1(); ++i) g.at(i, k) = rows[k].at(i);
    g.meta = rows.front().meta;
    g.meta.erase(std::remove_if(g.meta.begin(), g.meta.end(), [](auto& m) { return m.first == "T_fs"; }),
                 g.meta.end());
    return g;
}

EffectiveHamiltonian hamiltonian(const RunConfig& rc)
{
    auto H = EffectiveHamiltonian::from_scheme(rc.scheme);
    H.ref_a = rc.ref_a;
    for (std::size_t i = 0; i < rc.scheme.c.size(); ++i)
        if (rc.raw.find("trajectory." + rc.scheme.c[i].name)) H.gap_c[i] = rc.tr_c[i];
    for (std::size_t i = 0; i < rc.scheme.d.size(); ++i)
        if (rc.raw.find("trajectory." + rc.scheme.d[i].name)) H.gap_d[i] = rc.tr_d[i];
    H.validate();
    return H;
}

// trajectory of the only c- or d-level, for the single-transition drivers
const FrequencyTrajectory& only_transition(const RunConfig& rc)
{
    if (rc.tr_c.size() + rc.tr_d.size() != 1) throw ConfigError("this driver needs exactly one c- or d-level");
    return rc.tr_c.empty() ? rc.tr_d.front() : rc.tr_c.front();
}

std::string tag(double x)
{
    return (x == std::floor(x)) ? std::to_string(static_cast<long long>(x)) : format_double(x);
}

std::vector<NamedGrid> run_sos(const RunConfig& rc)
{
    const auto& pump = need(rc.pump, "pump");
    const auto om = rc.grid("omega");
    if (rc.observable == "frequency_gated") {
        const auto& probe = need(rc.probe, "probe");
        auto T = rc.grid("T");
        std::vector<SignalGrid> rows;
        for (double t : T) rows.push_back(sos_frequency_gated(rc.scheme, pump, probe, rc.coupling, om, t));
        return {{"", stack_T(rows, T)}};
    }
    if (rc.observable == "delta_dispersed") {
        const double T = single(rc, "T");
        const auto d = rc.grid("delta");
        auto rho = PreparedState::from_pump(rc.scheme, pump);
        SignalGrid g(Axis{"omega", "radfs", om}, Axis{"delta", "radfs", d}, true);
        for (std::size_t i = 0; i < om.size(); ++i) {
            auto r = sos_delta_dispersed_prepared(rho, rc.scheme, rc.coupling, om[i], d, T);
            for (std::size_t j = 0; j < d.size(); ++j) g.at(i, j) = rho.weight() * r.at(j);
            if (i == 0)
                for (auto& m : r.meta)
                    if (m.first != "omega_radfs") g.meta.push_back(m);
        }
        return {{"", g}};
    }
    if (rc.observable == "time_gated")
        return {{"", sos_time_gated(rc.scheme, pump, rc.coupling, rc.grid("t"), rc.grid("tau"), single(rc, "T"))}};
    throw ConfigError("engine sos does not provide observable '" + rc.observable + "'");
}

std::vector<NamedGrid> run_loop(const RunConfig& rc)
{
    const auto& pump = need(rc.pump, "pump");
    const auto H = hamiltonian(rc);
    const auto om = rc.grid("omega"), d = rc.grid("delta");
    if (rc.observable == "delta_dispersed")
        return {{"", loop_delta_dispersed(H, pump, rc.coupling, om, d, single(rc, "T"), rc.quad, rc.threads)}};
    if (rc.observable == "frequency_gated") {
        const auto& probe = need(rc.probe, "probe");
        auto T = rc.grid("T");
        std::vector<SignalGrid> rows;
        for (double t : T)
            rows.push_back(assemble_from_delta(loop_delta_dispersed(H, pump, rc.coupling, om, d, t, rc.quad, rc.threads),
                                               probe));
        return {{"", stack_T(rows, T)}};
    }
    throw ConfigError("engine loop does not provide observable '" + rc.observable + "'");
}

std::vector<NamedGrid> run_sc(const RunConfig& rc, bool cumulant)
{
    const auto job = rc.sc_job();
    const auto om = rc.grid("omega");
    std::optional<Lineshape> ls;
    if (cumulant) {
        if (!rc.lineshape) throw ConfigError("engine cumulant needs [bath]");
        ls = rc.lineshape;
    }
    std::vector<NamedGrid> out;
    if (rc.observable == "delta_dispersed") {
        const double T = single(rc, "T");
        const auto d = rc.grid("delta");
        out.push_back({"", cumulant ? sc_cumulant(job, *ls, om, d, T, rc.quad, rc.threads)
                                    : sc_delta_dispersed(job, om, d, T, rc.quad, rc.threads)});
    } else if (rc.observable == "probe_slice") {
        auto T = rc.grid("T");
        std::vector<SignalGrid> rows;
        for (double t : T) rows.push_back(sc_probe_slice(job, ls, om, t, rc.quad));
        out.push_back({"", stack_T(rows, T)});
    } else {
        throw ConfigError("engine " + rc.engine + " does not provide observable '" + rc.observable + "'");
    }
    if (cumulant && rc.n_traj > 0) {
        const double T = rc.grid("T").front();
        const bool slice = rc.mc_target == "slice";
        std::vector<double> d = slice ? std::vector<double>{} : rc.grid("delta");
        auto mc = mc_ensemble_average(job, *rc.bath, om, d, T, rc.n_traj, rc.seed,
                                      slice ? McTarget::probe_slice : McTarget::delta_dispersed, rc.quad, rc.threads);
        out.push_back({"mc", std::move(mc.mean)});
        out.push_back({"mc_stderr", std::move(mc.stderr_)});
    }
    return out;
}

std::vector<NamedGrid> run_resolution(const RunConfig& rc)
{
    if (rc.driver == "fig3") {
        auto r = fig3_pipeline(rc.sc_job(), rc.grid("omega"), rc.grid("delta"), rc.grid("tau"), single(rc, "T"),
                               rc.quad, rc.threads);
        return {{"delta", std::move(r.delta)}, {"tau", std::move(r.tau)}};
    }
    const auto& probe = need(rc.probe, "probe");
    const auto d = rc.grid("delta");
    const double T = single(rc, "T");
    const double gamma_a = rc.scheme.a[rc.ref_a].gamma;
    const auto& tr = only_transition(rc);
    if (rc.driver == "fig4") {
        const auto* e = std::get_if<FrequencyTrajectory::ErfSwitch>(&tr.variant());
        if (!e) throw ConfigError("driver fig4 needs an erf trajectory");
        std::vector<FrequencyTrajectory> sw;
        std::vector<double> widths = rc.sigma_m.empty() ? std::vector<double>{e->width} : rc.sigma_m;
        for (double w : widths) sw.push_back(FrequencyTrajectory::erf_switch(e->w0, e->jump, e->t0, w));
        auto panels = fig4_scan(sw, gamma_a, rc.probe_sigmas, T, d, rc.tau_step, rc.threads);
        std::vector<NamedGrid> out;
        for (std::size_t p = 0; p < rc.probe_sigmas.size(); ++p) {
            SignalGrid g(Axis{"delta", "radfs", d}, Axis{"sigma_m", "fs", widths}, true);
            for (std::size_t k = 0; k < widths.size(); ++k) {
                const auto& pr = panels[p * widths.size() + k].profile;
                for (std::size_t j = 0; j < d.size(); ++j) g.at(j, k) = pr.at(j);
            }
            g.set_meta("engine", "resolution");
            g.set_meta("driver", "fig4");
            g.set_meta("T_fs", T);
            g.set_meta("sigma_pr_fs", rc.probe_sigmas[p]);
            g.set_meta("detect_t_fs", T + 10.0 * rc.probe_sigmas[p]);
            out.push_back({"spr" + tag(rc.probe_sigmas[p]), std::move(g)});
        }
        return out;
    }
    // chirp: numerically dressed kernel plus the closed-form parameters
    const double t = single(rc, "t");
    auto tau = linspace_step(0.0, t, rc.tau_step);
    auto K = matter_kernel(tr, gamma_a, t, tau);
    auto g = dressed_delta_signal(tau, K, probe, 0.0, T, d);
    if (const auto* c = std::get_if<FrequencyTrajectory::LinearChirp>(&tr.variant())) {
        auto cf = chirp_closed_form(probe.carrier, c->w0, c->rate, T, gamma_a, probe.sigma);
        g.set_meta("closed_form_delta0_cm1", radfs_to_cm1(cf.delta0));
        g.set_meta("closed_form_sigma_eff_cm1", radfs_to_cm1(cf.sigma_eff));
    }
    g.set_meta("engine", "resolution");
    g.set_meta("driver", "chirp");
    return {{"", std::move(g)}};
}

} // namespace

std::vector<NamedGrid> compute(const RunConfig& rc)
{
    if (rc.engine == "sos") return run_sos(rc);
    if (rc.engine == "loop") return run_loop(rc);
    if (rc.engine == "semiclassical") return run_sc(rc, false);
    if (rc.engine == "cumulant") return run_sc(rc, true);
    return run_resolution(rc);
}

SignalGrid for_output(SignalGrid g, const RawConfig& raw)
{
    auto conv = [](Axis& a) {
        if (a.unit != "radfs") return;
        for (auto& v : a.values) v = radfs_to_cm1(v);
        a.unit = "cm1";
    };
    conv(g.axis1);
    if (g.axis2) conv(*g.axis2);
    for (auto& m : config_meta(raw)) g.meta.push_back(m);
    return g;
}

std::vector<std::string> run_config(const RawConfig& raw, const std::string& out_dir, std::optional<unsigned> threads,
                                    std::ostream& log)
{
    RunConfig rc = build_run_config(raw);
    if (threads) rc.threads = std::max(1u, *threads);
    auto grids = compute(rc);
    fs::create_directories(out_dir);
    std::vector<std::string> files;
    for (auto& ng : grids) {
        std::string stem = rc.output + (ng.name.empty() ? "" : "_" + ng.name);
        auto path = (fs::path(out_dir) / (stem + ".csv")).string();
        write_csv_file(for_output(std::move(ng.grid), raw), path);
        log << "wrote " << path << "\n";
        files.push_back(path);
    }
    return files;
}

std::string preset_dir()
{
    if (const char* e = std::getenv("VIBROPROBE_PRESETS")) return e;
    return VIBROPROBE_PRESET_DIR;
}

std::vector<std::string> list_presets()
{
    std::vector<std::string> out;
    std::error_code ec;
    for (const auto& e : fs::directory_iterator(preset_dir(), ec))
        if (e.path().extension() == ".toml") out.push_back(e.path().stem().string());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace vp
