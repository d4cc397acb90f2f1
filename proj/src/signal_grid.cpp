#include "vibroprobe/signal_grid.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace vp {

SignalGrid::SignalGrid(Axis a1, bool complex_payload) : axis1(std::move(a1)), is_complex(complex_payload)
{
    data.assign(n1(), cplx(0.0));
}

SignalGrid::SignalGrid(Axis a1, Axis a2, bool complex_payload)
    : axis1(std::move(a1)), axis2(std::move(a2)), is_complex(complex_payload)
{
    data.assign(n1() * n2(), cplx(0.0));
}

void SignalGrid::set_meta(const std::string& key, const std::string& value)
{
    for (auto& kv : meta)
        if (kv.first == key) {
            kv.second = value;
            return;
        }
    meta.emplace_back(key, value);
}

void SignalGrid::set_meta(const std::string& key, double value) { set_meta(key, format_double(value)); }

std::optional<std::string> SignalGrid::get_meta(const std::string& key) const
{
    for (const auto& kv : meta)
        if (kv.first == key) return kv.second;
    return std::nullopt;
}

void SignalGrid::check() const
{
    if (data.size() != n1() * n2()) throw Error("signal grid payload does not match its axes");
}

std::string format_double(double x)
{
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, r.ptr);
}

void write_csv(const SignalGrid& g, std::ostream& os)
{
    g.check();
    for (const auto& [k, v] : g.meta) os << "# " << k << " = " << v << '\n';
    os << g.axis1.column();
    if (g.axis2) os << ", " << g.axis2->column();
    os << (g.is_complex ? ", re, im\n" : ", value\n");
    for (std::size_t i = 0; i < g.n1(); ++i)
        for (std::size_t j = 0; j < g.n2(); ++j) {
            os << format_double(g.axis1.values[i]);
            if (g.axis2) os << ", " << format_double(g.axis2->values[j]);
            cplx v = g.at(i, j);
            os << ", " << format_double(v.real());
            if (g.is_complex) os << ", " << format_double(v.imag());
            os << '\n';
        }
}

namespace {

std::string trim(const std::string& s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    return out;
}

double parse_num(const std::string& s)
{
    double x = 0.0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), x);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw Error("bad number in CSV: '" + s + "'");
    return x;
}

Axis axis_from_column(const std::string& col)
{
    auto p = col.rfind('_');
    if (p == std::string::npos) return {col, "", {}};
    return {col.substr(0, p), col.substr(p + 1), {}};
}

} // namespace

SignalGrid read_csv(std::istream& is)
{
    SignalGrid g;
    std::string line;
    std::vector<std::string> cols;
    while (std::getline(is, line)) {
        if (line.rfind("# ", 0) == 0) {
            auto eq = line.find(" = ");
            if (eq == std::string::npos) throw Error("bad CSV header line: " + line);
            g.meta.emplace_back(line.substr(2, eq - 2), line.substr(eq + 3));
            continue;
        }
        cols = split(line);
        break;
    }
    if (cols.size() < 2) throw Error("CSV: missing column row");
    g.is_complex = cols.back() == "im";
    std::size_t nax = cols.size() - (g.is_complex ? 2 : 1);
    if (nax < 1 || nax > 2) throw Error("CSV: unsupported column layout");
    g.axis1 = axis_from_column(cols[0]);
    if (nax == 2) g.axis2 = axis_from_column(cols[1]);

    std::vector<std::vector<double>> rows;
    while (std::getline(is, line)) {
        if (trim(line).empty()) continue;
        auto cells = split(line);
        if (cells.size() != cols.size()) throw Error("CSV: ragged row");
        std::vector<double> r;
        for (auto& c : cells) r.push_back(parse_num(c));
        rows.push_back(std::move(r));
    }
    // axis values from the row order (axis1 outer, axis2 inner)
    if (nax == 1) {
        for (auto& r : rows) {
            g.axis1.values.push_back(r[0]);
            g.data.emplace_back(r[1], g.is_complex ? r[2] : 0.0);
        }
    } else {
        std::size_t n2 = 0;
        while (n2 < rows.size() && rows[n2][0] == rows[0][0]) ++n2;
        if (n2 == 0 || rows.size() % n2) throw Error("CSV: 2D grid is not rectangular");
        for (std::size_t j = 0; j < n2; ++j) g.axis2->values.push_back(rows[j][1]);
        for (std::size_t i = 0; i < rows.size() / n2; ++i) g.axis1.values.push_back(rows[i * n2][0]);
        for (auto& r : rows) g.data.emplace_back(r[2], g.is_complex ? r[3] : 0.0);
    }
    g.check();
    return g;
}

void write_csv_file(const SignalGrid& g, const std::string& path)
{
    std::ofstream f(path);
    if (!f) throw Error("cannot write " + path);
    write_csv(g, f);
}

SignalGrid read_csv_file(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw Error("cannot read " + path);
    return read_csv(f);
}

} // namespace vp
