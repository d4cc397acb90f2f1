#pragma once

#include "vibroprobe/config.hpp"
#include "vibroprobe/signal_grid.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace vp {

struct NamedGrid {
    std::string name; // file stem suffix, may be empty
    SignalGrid grid;
};

// computes every grid a config asks for (axes still in rad/fs)
std::vector<NamedGrid> compute(const RunConfig& rc);

// rad/fs axes to cm-1, config echo appended
SignalGrid for_output(SignalGrid g, const RawConfig& raw);

// writes <out_dir>/<output>[_name].csv; returns the paths
std::vector<std::string> run_config(const RawConfig& raw, const std::string& out_dir,
                                    std::optional<unsigned> threads, std::ostream& log);

std::string preset_dir();
std::vector<std::string> list_presets();

} // namespace vp
