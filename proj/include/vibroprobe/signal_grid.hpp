#pragma once

#include "vibroprobe/units.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace vp {

struct Axis {
    std::string name;
    std::string unit;
    std::vector<double> values;
    std::string column() const { return unit.empty() ? name : name + "_" + unit; }
};

struct SignalGrid {
    Axis axis1;
    std::optional<Axis> axis2;
    std::vector<cplx> data; // axis1-major
    bool is_complex = true;
    std::vector<std::pair<std::string, std::string>> meta;

    SignalGrid() = default;
    SignalGrid(Axis a1, bool complex_payload);
    SignalGrid(Axis a1, Axis a2, bool complex_payload);

    std::size_t n1() const { return axis1.values.size(); }
    std::size_t n2() const { return axis2 ? axis2->values.size() : 1; }
    cplx& at(std::size_t i, std::size_t j = 0) { return data[i * n2() + j]; }
    cplx at(std::size_t i, std::size_t j = 0) const { return data[i * n2() + j]; }

    void set_meta(const std::string& key, const std::string& value);
    void set_meta(const std::string& key, double value);
    std::optional<std::string> get_meta(const std::string& key) const;
    void check() const;
};

std::string format_double(double x);
void write_csv(const SignalGrid& g, std::ostream& os);
SignalGrid read_csv(std::istream& is);
void write_csv_file(const SignalGrid& g, const std::string& path);
SignalGrid read_csv_file(const std::string& path);

} // namespace vp
