#pragma once

#include "vibroprobe/model.hpp"
#include "vibroprobe/quad.hpp"
#include "vibroprobe/semiclassical_engine.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace vp {

using Value = std::variant<double, bool, std::string, std::vector<double>>;

std::string format_value(const Value& v);
// parses one literal; throws ConfigError with the bare message
Value parse_value(const std::string& text);

struct Section {
    std::string name;
    std::vector<std::pair<std::string, Value>> entries;
    int line = 0;

    const Value* find(const std::string& key) const;
    void set(const std::string& key, Value v);
};

// sections and keys in file order
struct RawConfig {
    std::vector<Section> sections;

    Section* find(const std::string& name);
    const Section* find(const std::string& name) const;
    Section& ensure(const std::string& name);
    bool operator==(const RawConfig& o) const;
};

RawConfig parse_config(const std::string& text, const std::string& source = "config");
RawConfig parse_config_file(const std::string& path);
std::string to_toml(const RawConfig& c);

// "section.key=value"; the section is everything before the last dot
void apply_override(RawConfig& c, const std::string& assignment);

// config echo for CSV headers, keys prefixed "cfg."
std::vector<std::pair<std::string, std::string>> config_meta(const RawConfig& c);
RawConfig config_from_meta(const std::vector<std::pair<std::string, std::string>>& meta);

struct GridSpec {
    double min = 0.0, max = 0.0, step = 0.0;
    std::vector<double> values() const;
};

struct RunConfig {
    std::string engine;     // sos | loop | semiclassical | cumulant | resolution
    std::string mode = "fdir";
    std::string observable; // frequency_gated | delta_dispersed | time_gated | probe_slice
    std::string driver;     // resolution: fig3 | fig4 | chirp
    std::string output = "out";
    unsigned threads = 1;

    LevelScheme scheme;
    std::size_t ref_a = 0;
    std::optional<PulseSpec> pump, probe;
    std::vector<double> probe_sigmas; // probe.sigma_fs given as a list
    ProbeCoupling coupling;
    std::optional<BathSpec> bath;
    std::optional<Lineshape> lineshape;
    std::vector<FrequencyTrajectory> tr_c, tr_d; // gap trajectories (defaults: constant gaps)
    std::map<std::string, GridSpec> grids;       // omega/delta in rad/fs, tau/t/T in fs
    std::size_t n_traj = 0;
    std::uint64_t seed = 1;
    std::string mc_target = "delta";
    QuadSpec quad;
    std::vector<double> sigma_m;
    double tau_step = 0.5;

    RawConfig raw;

    bool has_grid(const std::string& g) const { return grids.count(g) != 0; }
    std::vector<double> grid(const std::string& g) const;
    ScJob sc_job() const;
};

// schema check + unit conversion; throws ConfigError
RunConfig build_run_config(const RawConfig& raw);

struct Finding {
    std::string severity; // error | warning
    std::string message;
};
std::vector<Finding> validate_config(const RawConfig& raw);

} // namespace vp
