#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "vibroprobe/signal_grid.hpp"

#include <sstream>

using namespace vp;

TEST_CASE("17 significant digits")
{
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(2000) == "2000");
    CHECK(format_double(-1.5e-300) == "-1.5000000000000001e-300");
}

TEST_CASE("2D complex grid round trip is bit exact")
{
    SignalGrid g(Axis{"omega", "cm1", {1800.0, 1800.5, 1801.0 / 3.0}}, Axis{"T", "fs", {0.1, 7.0}}, true);
    for (std::size_t i = 0; i < g.data.size(); ++i) g.data[i] = cplx(1.0 / (i + 3.0), -std::sqrt(i + 0.7));
    g.set_meta("engine", "sos");
    g.set_meta("T_fs", 1.0 / 7.0);
    std::stringstream ss;
    write_csv(g, ss);
    auto text = ss.str();
    CHECK(text.find("omega_cm1, T_fs, re, im") != std::string::npos);
    CHECK(text.find("# engine = sos") == 0);
    auto r = read_csv(ss);
    CHECK(r.axis1.values == g.axis1.values);
    CHECK(r.axis2->values == g.axis2->values);
    CHECK(r.data == g.data);
    CHECK(r.get_meta("T_fs") == format_double(1.0 / 7.0));
    CHECK(r.axis1.column() == "omega_cm1");
}

TEST_CASE("1D real grid")
{
    SignalGrid g(Axis{"omega", "cm1", {1.0, 2.0}}, false);
    g.data = {0.25, -3.0};
    std::stringstream ss;
    write_csv(g, ss);
    CHECK(ss.str().find("omega_cm1, value") != std::string::npos);
    auto r = read_csv(ss);
    CHECK_FALSE(r.is_complex);
    CHECK(r.data[1].real() == -3.0);
    CHECK_FALSE(r.axis2.has_value());
}

TEST_CASE("shape check")
{
    SignalGrid g(Axis{"omega", "cm1", {1.0, 2.0}}, true);
    g.data.push_back(0.0);
    CHECK_THROWS(g.check());
}
