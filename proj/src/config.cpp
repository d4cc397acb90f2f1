#include "vibroprobe/config.hpp"

#include "vibroprobe/resolution.hpp"
#include "vibroprobe/signal_grid.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace vp {

namespace {

std::string trim(const std::string& s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// cut a trailing comment that is not inside a string
std::string strip_comment(const std::string& s)
{
    bool in = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\\' && in) {
            ++i;
            continue;
        }
        if (s[i] == '"') in = !in;
        if (s[i] == '#' && !in) return s.substr(0, i);
    }
    return s;
}

bool parse_number(const std::string& t, double& out)
{
    if (t.empty()) return false;
    const char* b = t.data();
    const char* e = b + t.size();
    if (*b == '+') ++b;
    auto r = std::from_chars(b, e, out);
    return r.ec == std::errc() && r.ptr == e;
}

bool valid_name(const std::string& s, bool dots)
{
    if (s.empty()) return false;
    for (char ch : s)
        if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || (dots && ch == '.')))
            return false;
    return s.front() != '.' && s.back() != '.';
}

// allowed keys by section family
const std::map<std::string, std::set<std::string>>& schema()
{
    static const std::map<std::string, std::set<std::string>> s = {
        {"run", {"engine", "mode", "observable", "output", "threads", "ref_a"}},
        {"level", {"kind", "omega_cm1", "gamma_per_fs", "mu", "alpha"}},
        {"pump", {"kind", "amplitude", "carrier_cm1", "sigma_fs", "center_fs"}},
        {"probe", {"kind", "amplitude", "carrier_cm1", "sigma_fs", "center_fs"}},
        {"narrowband", {"e3", "omega3_cm1"}},
        {"bath", {"lambda_cm1", "Lambda_per_fs", "kelvin"}},
        {"lineshape", {"mode", "real_only"}},
        {"trajectory", {"kind", "w0_cm1", "rate_cm1_per_fs", "jump_cm1", "t0_fs", "width_fs", "t_fs", "w_cm1"}},
        {"grid.omega", {"min_cm1", "max_cm1", "step_cm1", "value_cm1"}},
        {"grid.delta", {"min_cm1", "max_cm1", "step_cm1", "value_cm1"}},
        {"grid.tau", {"min_fs", "max_fs", "step_fs", "value_fs"}},
        {"grid.t", {"min_fs", "max_fs", "step_fs", "value_fs"}},
        {"grid.T", {"min_fs", "max_fs", "step_fs", "value_fs"}},
        {"mc", {"n_traj", "seed", "target"}},
        {"quad", {"step_fs", "window_fs", "tol", "max_halvings"}},
        {"resolution", {"driver", "sigma_m_fs", "tau_step_fs"}},
    };
    return s;
}

std::string family(const std::string& section)
{
    if (section.rfind("level.", 0) == 0) return "level";
    if (section.rfind("trajectory.", 0) == 0) return "trajectory";
    return section;
}

std::vector<std::string> schema_errors(const RawConfig& raw)
{
    std::vector<std::string> out;
    for (const auto& s : raw.sections) {
        auto it = schema().find(family(s.name));
        if (it == schema().end()) {
            out.push_back("unknown section [" + s.name + "] (line " + std::to_string(s.line) + ")");
            continue;
        }
        for (const auto& [k, v] : s.entries)
            if (!it->second.count(k)) out.push_back("unknown key '" + k + "' in [" + s.name + "]");
    }
    return out;
}

double cm1(double x) { return cm1_to_radfs(x); }

struct Reader {
    const Section* s;
    std::string where() const { return "[" + s->name + "]"; }

    bool has(const std::string& k) const { return s && s->find(k); }
    double num(const std::string& k, std::optional<double> def = std::nullopt) const
    {
        const Value* v = s ? s->find(k) : nullptr;
        if (!v) {
            if (def) return *def;
            throw ConfigError(where() + " missing key '" + k + "'");
        }
        if (auto* d = std::get_if<double>(v)) return *d;
        throw ConfigError(where() + " key '" + k + "' must be a number");
    }
    std::string str(const std::string& k, std::optional<std::string> def = std::nullopt) const
    {
        const Value* v = s ? s->find(k) : nullptr;
        if (!v) {
            if (def) return *def;
            throw ConfigError(where() + " missing key '" + k + "'");
        }
        if (auto* d = std::get_if<std::string>(v)) return *d;
        throw ConfigError(where() + " key '" + k + "' must be a string");
    }
    bool flag(const std::string& k, bool def) const
    {
        const Value* v = s ? s->find(k) : nullptr;
        if (!v) return def;
        if (auto* d = std::get_if<bool>(v)) return *d;
        throw ConfigError(where() + " key '" + k + "' must be true or false");
    }
    // number or list
    std::vector<double> list(const std::string& k) const
    {
        const Value* v = s ? s->find(k) : nullptr;
        if (!v) return {};
        if (auto* d = std::get_if<double>(v)) return {*d};
        if (auto* l = std::get_if<std::vector<double>>(v)) return *l;
        throw ConfigError(where() + " key '" + k + "' must be a number or a list");
    }
    std::size_t count(const std::string& k, std::size_t def) const
    {
        double x = num(k, static_cast<double>(def));
        if (x < 0 || x != std::floor(x)) throw ConfigError(where() + " key '" + k + "' must be a non-negative integer");
        return static_cast<std::size_t>(x);
    }
};

PulseSpec read_pulse(const Section& s, bool allow_sigma_list)
{
    Reader r{&s};
    std::string kind = r.str("kind", "gaussian");
    double amp = r.num("amplitude", 1.0);
    double center = r.num("center_fs", 0.0);
    PulseSpec p;
    if (kind == "gaussian") {
        auto sig = r.list("sigma_fs");
        if (sig.empty()) throw ConfigError(r.where() + " missing key 'sigma_fs'");
        if (sig.size() > 1 && !allow_sigma_list) throw ConfigError(r.where() + " sigma_fs must be a single number");
        p = PulseSpec::gaussian(amp, cm1(r.num("carrier_cm1")), sig.front(), center);
    } else if (kind == "impulsive") {
        p = PulseSpec::impulsive(amp, center);
    } else if (kind == "cw") {
        p = PulseSpec::cw(amp, cm1(r.num("carrier_cm1")), center);
    } else {
        throw ConfigError(r.where() + " unknown pulse kind '" + kind + "'");
    }
    p.validate();
    return p;
}

FrequencyTrajectory read_trajectory(const Section& s)
{
    Reader r{&s};
    std::string kind = r.str("kind");
    FrequencyTrajectory tr;
    if (kind == "constant") tr = FrequencyTrajectory::constant(cm1(r.num("w0_cm1")));
    else if (kind == "chirp") tr = FrequencyTrajectory::linear_chirp(cm1(r.num("w0_cm1")), cm1(r.num("rate_cm1_per_fs")));
    else if (kind == "erf")
        tr = FrequencyTrajectory::erf_switch(cm1(r.num("w0_cm1")), cm1(r.num("jump_cm1")), r.num("t0_fs"),
                                             r.num("width_fs"));
    else if (kind == "tabulated") {
        auto t = r.list("t_fs"), w = r.list("w_cm1");
        for (auto& x : w) x = cm1(x);
        tr = FrequencyTrajectory::tabulated(t, w);
    } else
        throw ConfigError(r.where() + " unknown trajectory kind '" + kind + "'");
    return tr;
}

GridSpec read_grid(const Section& s, const std::string& unit, bool freq)
{
    Reader r{&s};
    double f = freq ? cm1_to_radfs(1.0) : 1.0;
    if (r.has("value_" + unit)) {
        double v = r.num("value_" + unit) * f;
        return {v, v, 1.0};
    }
    GridSpec g{r.num("min_" + unit) * f, r.num("max_" + unit) * f, r.num("step_" + unit) * f};
    if (!(g.min < g.max)) throw ConfigError(r.where() + " needs min < max");
    if (!(g.step > 0.0)) throw ConfigError(r.where() + " needs step > 0");
    return g;
}

std::string default_observable(const std::string& engine)
{
    if (engine == "sos" || engine == "loop") return "frequency_gated";
    if (engine == "resolution") return "";
    return "delta_dispersed";
}

// sections an engine/observable/driver combination needs
std::vector<std::string> required_sections(const RawConfig& raw)
{
    std::vector<std::string> req;
    const Section* run = raw.find("run");
    if (!run) return {"run"};
    Reader r{run};
    std::string engine, obs, mode, driver;
    try {
        engine = r.str("engine");
        obs = r.str("observable", default_observable(engine));
        mode = r.str("mode", "fdir");
        if (const Section* res = raw.find("resolution")) driver = Reader{res}.str("driver", "fig3");
    } catch (const ConfigError&) {
        return {};
    }
    if (engine == "sos") {
        req = {"pump", "grid.omega", "grid.T"};
        if (obs == "frequency_gated") req.push_back("probe");
        if (obs == "delta_dispersed") req.push_back("grid.delta");
        if (obs == "time_gated") req.insert(req.end(), {"grid.t", "grid.tau"});
    } else if (engine == "loop") {
        req = {"pump", "grid.omega", "grid.T", "grid.delta"};
        if (obs == "frequency_gated") req.push_back("probe");
    } else if (engine == "semiclassical" || engine == "cumulant") {
        req = {"grid.omega", "grid.T"};
        if (obs == "delta_dispersed") req.push_back("grid.delta");
        if (engine == "cumulant") req.push_back("bath");
    } else if (engine == "resolution") {
        req.push_back("resolution");
        if (driver == "fig3") req.insert(req.end(), {"grid.omega", "grid.delta", "grid.tau", "grid.T"});
        else if (driver == "fig4") req.insert(req.end(), {"probe", "grid.delta", "grid.T"});
        else if (driver == "chirp") req.insert(req.end(), {"probe", "grid.delta", "grid.T", "grid.t"});
    }
    if (mode == "srs") req.push_back("narrowband");
    return req;
}

} // namespace

std::string format_value(const Value& v)
{
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, double>) return format_double(x);
            else if constexpr (std::is_same_v<T, bool>) return x ? "true" : "false";
            else if constexpr (std::is_same_v<T, std::string>) {
                std::string o = "\"";
                for (char ch : x) {
                    if (ch == '"' || ch == '\\') o += '\\';
                    o += ch;
                }
                return o + "\"";
            } else {
                std::string o = "[";
                for (std::size_t i = 0; i < x.size(); ++i) o += (i ? ", " : "") + format_double(x[i]);
                return o + "]";
            }
        },
        v);
}

Value parse_value(const std::string& text)
{
    std::string t = trim(text);
    if (t.empty()) throw ConfigError("missing value");
    if (t == "true") return true;
    if (t == "false") return false;
    if (t.front() == '"') {
        std::string o;
        std::size_t i = 1;
        for (; i < t.size(); ++i) {
            if (t[i] == '\\' && i + 1 < t.size()) {
                o += t[++i];
                continue;
            }
            if (t[i] == '"') break;
            o += t[i];
        }
        if (i >= t.size()) throw ConfigError("unterminated string");
        if (i + 1 != t.size()) throw ConfigError("trailing characters after string");
        return o;
    }
    if (t.front() == '[') {
        if (t.back() != ']') throw ConfigError("unterminated array");
        std::vector<double> out;
        std::string body = trim(t.substr(1, t.size() - 2));
        if (body.empty()) return out;
        std::stringstream ss(body);
        std::string item;
        while (std::getline(ss, item, ',')) {
            double d;
            if (!parse_number(trim(item), d)) throw ConfigError("array elements must be numbers: '" + trim(item) + "'");
            out.push_back(d);
        }
        return out;
    }
    double d;
    if (parse_number(t, d)) return d;
    throw ConfigError("cannot parse value '" + t + "' (strings need quotes)");
}

const Value* Section::find(const std::string& key) const
{
    for (const auto& [k, v] : entries)
        if (k == key) return &v;
    return nullptr;
}

void Section::set(const std::string& key, Value v)
{
    for (auto& [k, old] : entries)
        if (k == key) {
            old = std::move(v);
            return;
        }
    entries.emplace_back(key, std::move(v));
}

Section* RawConfig::find(const std::string& name)
{
    for (auto& s : sections)
        if (s.name == name) return &s;
    return nullptr;
}

const Section* RawConfig::find(const std::string& name) const
{
    for (const auto& s : sections)
        if (s.name == name) return &s;
    return nullptr;
}

Section& RawConfig::ensure(const std::string& name)
{
    if (auto* s = find(name)) return *s;
    sections.push_back({name, {}, 0});
    return sections.back();
}

bool RawConfig::operator==(const RawConfig& o) const
{
    if (sections.size() != o.sections.size()) return false;
    for (std::size_t i = 0; i < sections.size(); ++i)
        if (sections[i].name != o.sections[i].name || sections[i].entries != o.sections[i].entries) return false;
    return true;
}

RawConfig parse_config(const std::string& text, const std::string& source)
{
    RawConfig c;
    std::istringstream is(text);
    std::string line;
    int no = 0;
    Section* cur = nullptr;
    auto fail = [&](const std::string& msg) { throw ConfigError(source + ":" + std::to_string(no) + ": " + msg); };
    while (std::getline(is, line)) {
        ++no;
        std::string t = trim(strip_comment(line));
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']') fail("unterminated section header");
            std::string name = trim(t.substr(1, t.size() - 2));
            if (!valid_name(name, true)) fail("bad section name '" + name + "'");
            if (c.find(name)) fail("duplicate section [" + name + "]");
            c.sections.push_back({name, {}, no});
            cur = &c.sections.back();
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos) fail("expected 'key = value'");
        std::string key = trim(t.substr(0, eq));
        if (!valid_name(key, false)) fail("bad key '" + key + "'");
        if (!cur) fail("key '" + key + "' outside any section");
        if (cur->find(key)) fail("duplicate key '" + key + "'");
        try {
            cur->entries.emplace_back(key, parse_value(t.substr(eq + 1)));
        } catch (const ConfigError& e) {
            fail(e.what());
        }
    }
    return c;
}

RawConfig parse_config_file(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), path);
}

std::string to_toml(const RawConfig& c)
{
    std::string o;
    for (const auto& s : c.sections) {
        if (!o.empty()) o += "\n";
        o += "[" + s.name + "]\n";
        for (const auto& [k, v] : s.entries) o += k + " = " + format_value(v) + "\n";
    }
    return o;
}

void apply_override(RawConfig& c, const std::string& assignment)
{
    auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' needs key=value");
    std::string path = trim(assignment.substr(0, eq));
    auto dot = path.rfind('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == path.size())
        throw ConfigError("override key '" + path + "' needs section.key");
    std::string sec = path.substr(0, dot), key = path.substr(dot + 1);
    if (!valid_name(sec, true) || !valid_name(key, false)) throw ConfigError("bad override key '" + path + "'");
    std::string vt = trim(assignment.substr(eq + 1));
    Value v;
    try {
        v = parse_value(vt);
    } catch (const ConfigError&) {
        // bare words are taken as strings on the command line
        if (vt.empty() || vt.find_first_of("\"[],") != std::string::npos) throw;
        v = vt;
    }
    c.ensure(sec).set(key, std::move(v));
}

std::vector<std::pair<std::string, std::string>> config_meta(const RawConfig& c)
{
    std::vector<std::pair<std::string, std::string>> m;
    for (const auto& s : c.sections) {
        if (s.entries.empty()) m.emplace_back("cfg." + s.name, "{}");
        for (const auto& [k, v] : s.entries) m.emplace_back("cfg." + s.name + "." + k, format_value(v));
    }
    return m;
}

RawConfig config_from_meta(const std::vector<std::pair<std::string, std::string>>& meta)
{
    RawConfig c;
    for (const auto& [k, v] : meta) {
        if (k.rfind("cfg.", 0) != 0) continue;
        std::string path = k.substr(4);
        if (v == "{}") {
            c.ensure(path);
            continue;
        }
        auto dot = path.rfind('.');
        if (dot == std::string::npos) throw ConfigError("bad config echo key '" + k + "'");
        c.ensure(path.substr(0, dot)).set(path.substr(dot + 1), parse_value(v));
    }
    return c;
}

std::vector<double> GridSpec::values() const
{
    if (min == max) return {min};
    return linspace_step(min, max, step);
}

std::vector<double> RunConfig::grid(const std::string& g) const
{
    auto it = grids.find(g);
    if (it == grids.end()) throw ConfigError("missing section [grid." + g + "]");
    return it->second.values();
}

ScJob RunConfig::sc_job() const
{
    ScJob j;
    j.scheme = scheme;
    j.tr_c = tr_c;
    j.tr_d = tr_d;
    j.coupling = coupling;
    if (pump) j.pump = *pump;
    j.ref_a = ref_a;
    return j;
}

RunConfig build_run_config(const RawConfig& raw)
{
    auto errs = schema_errors(raw);
    if (!errs.empty()) throw ConfigError(errs.front());
    for (const auto& s : required_sections(raw))
        if (!raw.find(s)) throw ConfigError("missing section [" + s + "]");

    RunConfig rc;
    rc.raw = raw;
    Reader run{raw.find("run")};
    rc.engine = run.str("engine");
    static const std::set<std::string> engines = {"sos", "loop", "semiclassical", "cumulant", "resolution"};
    if (!engines.count(rc.engine)) throw ConfigError("[run] unknown engine '" + rc.engine + "'");
    rc.mode = run.str("mode", "fdir");
    if (rc.mode != "fdir" && rc.mode != "srs") throw ConfigError("[run] mode must be fdir or srs");
    rc.observable = run.str("observable", default_observable(rc.engine));
    rc.output = run.str("output", "out");
    rc.threads = static_cast<unsigned>(std::max<std::size_t>(1, run.count("threads", 1)));

    // levels: a-states first so c/d couplings can be sized
    std::vector<const Section*> lv;
    for (const auto& s : raw.sections)
        if (family(s.name) == "level") lv.push_back(&s);
    for (const auto* s : lv) {
        Reader r{s};
        if (r.str("kind") != "a") continue;
        AState a;
        a.name = s->name.substr(6);
        a.omega = cm1(r.num("omega_cm1"));
        a.gamma = r.num("gamma_per_fs", 0.0);
        a.mu_g = r.num("mu", 1.0);
        rc.scheme.a.push_back(a);
    }
    const std::size_t na = rc.scheme.a.size();
    if (na == 0) throw ConfigError("need at least one [level.*] with kind = \"a\"");
    for (const auto* s : lv) {
        Reader r{s};
        std::string kind = r.str("kind");
        if (kind == "a") continue;
        if (kind != "c" && kind != "d") throw ConfigError(r.where() + " kind must be a, c or d");
        VibState v;
        v.name = s->name.substr(6);
        v.omega = cm1(r.num("omega_cm1"));
        v.gamma = r.num("gamma_per_fs", 0.0);
        auto mu = r.list("mu"), al = r.list("alpha");
        if (mu.empty()) mu = {1.0};
        if (al.empty()) al = {0.0};
        if (mu.size() == 1) mu.assign(na, mu[0]);
        if (al.size() == 1) al.assign(na, al[0]);
        if (mu.size() != na || al.size() != na)
            throw ConfigError(r.where() + " mu/alpha need one entry per a-state");
        v.mu.assign(mu.begin(), mu.end());
        v.alpha = al;
        (kind == "c" ? rc.scheme.c : rc.scheme.d).push_back(v);
    }
    rc.scheme.validate();

    std::string ref = run.str("ref_a", rc.scheme.a.front().name);
    auto it = std::find_if(rc.scheme.a.begin(), rc.scheme.a.end(), [&](const AState& a) { return a.name == ref; });
    if (it == rc.scheme.a.end()) throw ConfigError("[run] ref_a names no a-state");
    rc.ref_a = static_cast<std::size_t>(it - rc.scheme.a.begin());
    const double wref = rc.scheme.a[rc.ref_a].omega;

    for (const auto& v : rc.scheme.c) {
        const Section* s = raw.find("trajectory." + v.name);
        rc.tr_c.push_back(s ? read_trajectory(*s) : FrequencyTrajectory::constant(v.omega - wref));
    }
    for (const auto& v : rc.scheme.d) {
        const Section* s = raw.find("trajectory." + v.name);
        rc.tr_d.push_back(s ? read_trajectory(*s) : FrequencyTrajectory::constant(wref - v.omega));
    }
    for (const auto& s : raw.sections)
        if (family(s.name) == "trajectory") {
            std::string n = s.name.substr(11);
            bool known = std::any_of(rc.scheme.c.begin(), rc.scheme.c.end(), [&](auto& v) { return v.name == n; }) ||
                         std::any_of(rc.scheme.d.begin(), rc.scheme.d.end(), [&](auto& v) { return v.name == n; });
            if (!known) throw ConfigError("[" + s.name + "] names no c- or d-level");
        }

    if (const Section* s = raw.find("pump")) rc.pump = read_pulse(*s, false);
    if (const Section* s = raw.find("probe")) {
        rc.probe = read_pulse(*s, true);
        rc.probe_sigmas = Reader{s}.list("sigma_fs");
        for (double x : rc.probe_sigmas)
            if (!(x > 0.0)) throw ConfigError("[probe] sigma_fs must be > 0");
    }
    if (rc.mode == "srs") {
        Reader r{raw.find("narrowband")};
        rc.coupling = ProbeCoupling::srs(r.num("e3", 1.0), cm1(r.num("omega3_cm1")));
    }
    rc.coupling.validate();
    if (const Section* s = raw.find("bath")) {
        Reader r{s};
        BathSpec b{cm1(r.num("lambda_cm1")), r.num("Lambda_per_fs"), r.num("kelvin", 300.0)};
        b.validate();
        rc.bath = b;
    }
    if (rc.bath) {
        Lineshape ls{*rc.bath};
        if (const Section* s = raw.find("lineshape")) {
            Reader r{s};
            std::string m = r.str("mode", "two_time");
            if (m == "stationary") ls.mode = LineshapeMode::stationary;
            else if (m != "two_time") throw ConfigError("[lineshape] mode must be two_time or stationary");
            ls.real_only = r.flag("real_only", false);
        }
        rc.lineshape = ls;
    }
    for (const char* g : {"omega", "delta"})
        if (const Section* s = raw.find(std::string("grid.") + g)) rc.grids[g] = read_grid(*s, "cm1", true);
    for (const char* g : {"tau", "t", "T"})
        if (const Section* s = raw.find(std::string("grid.") + g)) rc.grids[g] = read_grid(*s, "fs", false);
    if (const Section* s = raw.find("mc")) {
        Reader r{s};
        rc.n_traj = r.count("n_traj", 0);
        rc.seed = static_cast<std::uint64_t>(r.count("seed", 1));
        rc.mc_target = r.str("target", "delta");
        if (rc.mc_target != "delta" && rc.mc_target != "slice") throw ConfigError("[mc] target must be delta or slice");
    }
    if (const Section* s = raw.find("quad")) {
        Reader r{s};
        rc.quad.step = r.num("step_fs", 0.0);
        rc.quad.window = r.num("window_fs", 0.0);
        rc.quad.tol = r.num("tol", rc.quad.tol);
        rc.quad.max_halvings = static_cast<int>(r.count("max_halvings", static_cast<std::size_t>(rc.quad.max_halvings)));
        if (!(rc.quad.tol > 0.0)) throw ConfigError("[quad] tol must be > 0");
    }
    if (const Section* s = raw.find("resolution")) {
        Reader r{s};
        rc.driver = r.str("driver", "fig3");
        if (rc.driver != "fig3" && rc.driver != "fig4" && rc.driver != "chirp")
            throw ConfigError("[resolution] driver must be fig3, fig4 or chirp");
        rc.sigma_m = r.list("sigma_m_fs");
        rc.tau_step = r.num("tau_step_fs", 0.5);
    }
    if (rc.engine == "resolution" && rc.driver.empty()) throw ConfigError("engine resolution needs [resolution]");
    static const std::set<std::string> obs = {"frequency_gated", "delta_dispersed", "time_gated", "probe_slice", ""};
    if (!obs.count(rc.observable)) throw ConfigError("[run] unknown observable '" + rc.observable + "'");
    return rc;
}

std::vector<Finding> validate_config(const RawConfig& raw)
{
    std::vector<Finding> out;
    for (auto& e : schema_errors(raw)) out.push_back({"error", e});
    for (const auto& s : required_sections(raw))
        if (!raw.find(s)) out.push_back({"error", "missing section [" + s + "]"});
    if (!out.empty()) return out;
    RunConfig rc;
    try {
        rc = build_run_config(raw);
    } catch (const std::exception& e) {
        out.push_back({"error", e.what()});
        return out;
    }
    // unit sanity
    for (const auto& a : rc.scheme.a)
        if (!(a.omega > 0.0)) out.push_back({"error", "a-level '" + a.name + "' needs omega_cm1 > 0"});
    for (const auto* m : {&rc.scheme.c, &rc.scheme.d})
        for (const auto& v : *m)
            if (v.omega < 0.0) out.push_back({"error", "level '" + v.name + "' has negative omega_cm1"});
    for (const auto& g : {"omega", "delta"})
        if (rc.has_grid(g) && std::string(g) == "omega" && rc.grids.at(g).min < 0.0 && rc.mode == "fdir")
            out.push_back({"warning", "grid.omega reaches negative frequencies"});

    double gmin = 1e300, wmax = 0.0;
    for (const auto& a : rc.scheme.a)
        if (a.gamma > 0.0) gmin = std::min(gmin, a.gamma);
    for (const auto* m : {&rc.scheme.c, &rc.scheme.d})
        for (const auto& v : *m) {
            if (v.gamma > 0.0) gmin = std::min(gmin, v.gamma);
            for (const auto& a : rc.scheme.a) wmax = std::max(wmax, std::abs(v.omega - a.omega));
        }
    for (const auto* l : {&rc.tr_c, &rc.tr_d})
        for (const auto& tr : *l) wmax = std::max(wmax, tr.max_abs());
    if (rc.has_grid("delta") && gmin < 1e300 && rc.grids.at("delta").step > gmin / 5.0 &&
        rc.grids.at("delta").min < rc.grids.at("delta").max)
        out.push_back({"warning", "grid.delta step " + format_double(radfs_to_cm1(rc.grids.at("delta").step)) +
                                      " cm-1 exceeds gamma_min/5 = " + format_double(radfs_to_cm1(gmin / 5.0)) +
                                      " cm-1"});
    for (const char* g : {"tau", "t"}) {
        if (!rc.has_grid(g) || !(wmax > 0.0)) continue;
        const auto& gs = rc.grids.at(g);
        if (gs.min < gs.max && gs.step > std::numbers::pi / wmax)
            out.push_back({"warning", std::string("grid.") + g + " step " + format_double(gs.step) +
                                          " fs exceeds the Nyquist limit " + format_double(std::numbers::pi / wmax) +
                                          " fs of the fastest transition"});
    }
    return out;
}

} // namespace vp
