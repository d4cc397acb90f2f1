#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "vibroprobe/loop_engine.hpp"
#include "vibroprobe/sos_engine.hpp"

#include <algorithm>
#include <cmath>

using namespace vp;

namespace {

LevelScheme pair_scheme()
{
    LevelScheme s;
    s.a = {{"a1", cm1_to_radfs(16000), 0.01, 1.0}, {"a2", cm1_to_radfs(16300), 0.012, 0.8}};
    s.c = {{"c", cm1_to_radfs(17600), 0.02, {0.6, 0.5}, {0.2, 0.1}}};
    s.d = {{"d", cm1_to_radfs(14400), 0.015, {0.7, 0.4}, {0.3, 0.25}}};
    return s;
}

std::vector<double> cm1_grid(double lo, double hi, double step)
{
    std::vector<double> v;
    const int n = static_cast<int>(std::lround((hi - lo) / step));
    for (int k = 0; k <= n; ++k) v.push_back(cm1_to_radfs(lo + step * k));
    return v;
}

double peak(const std::vector<cplx>& v)
{
    double m = 0.0;
    for (auto x : v) m = std::max(m, std::abs(x));
    return m;
}

const auto pump = PulseSpec::gaussian(1.0, cm1_to_radfs(16150), 15.0);
const auto probe = PulseSpec::gaussian(1.0, cm1_to_radfs(1600), 25.0);

} // namespace

TEST_CASE("impulsive pump: direct propagation reproduces the prepared-state Delta spectrum")
{
    auto s = pair_scheme();
    auto H = EffectiveHamiltonian::from_scheme(s);
    const auto pump = PulseSpec::impulsive(1.0);
    auto om = cm1_grid(1300, 1900, 150);
    auto d = cm1_grid(-900, 900, 30);
    const double T = 200.0;
    auto L = loop_delta_dispersed(H, pump, ProbeCoupling::fdir(), om, d, T);
    auto rho = PreparedState::from_pump(s, pump);
    double err = 0.0, pk = peak(L.data);
    for (std::size_t i = 0; i < om.size(); ++i) {
        auto r = sos_delta_dispersed_prepared(rho, s, ProbeCoupling::fdir(), om[i], d, T);
        for (std::size_t j = 0; j < d.size(); ++j) err = std::max(err, std::abs(L.at(i, j) - rho.weight() * r.at(j)));
    }
    CHECK(err < 1e-4 * pk);
}

TEST_CASE("loop frequency-gated equals SOS for separated pulses")
{
    auto s = pair_scheme();
    auto H = EffectiveHamiltonian::from_scheme(s);
    auto om = cm1_grid(1200, 2000, 100);
    auto d = cm1_grid(-1800, 1800, 5);
    for (double T : {150.0, 300.0}) {
        auto L = assemble_from_delta(loop_delta_dispersed(H, pump, ProbeCoupling::fdir(), om, d, T, {}, 2), probe);
        auto S = sos_frequency_gated(s, pump, probe, ProbeCoupling::fdir(), om, T);
        double err = 0.0;
        for (std::size_t i = 0; i < om.size(); ++i) err = std::max(err, std::abs(L.at(i) - S.at(i)));
        CHECK(err < 1e-3 * peak(S.data));
    }
}

TEST_CASE("resolvent route agrees with SOS")
{
    auto s = pair_scheme();
    auto H = EffectiveHamiltonian::from_scheme(s);
    auto om = cm1_grid(1300, 1900, 200);
    const double T = 250.0;
    auto R = resolvent_frequency_gated(H, pump, probe, ProbeCoupling::fdir(), om, T, 1e-6, 2);
    auto S = sos_frequency_gated(s, pump, probe, ProbeCoupling::fdir(), om, T);
    double err = 0.0;
    for (std::size_t i = 0; i < om.size(); ++i) err = std::max(err, std::abs(R.at(i) - S.at(i)));
    CHECK(err < 1e-6 * peak(S.data));
}

TEST_CASE("thread count does not change results")
{
    auto H = EffectiveHamiltonian::from_scheme(pair_scheme());
    auto om = cm1_grid(1300, 1900, 100);
    auto d = cm1_grid(-600, 600, 40);
    auto a = loop_delta_dispersed(H, pump, ProbeCoupling::fdir(), om, d, 200.0, {}, 1);
    auto b = loop_delta_dispersed(H, pump, ProbeCoupling::fdir(), om, d, 200.0, {}, 3);
    CHECK(a.data == b.data);
}

TEST_CASE("unsettled quadrature raises a convergence error")
{
    auto H = EffectiveHamiltonian::from_scheme(pair_scheme());
    QuadSpec q;
    q.tol = 1e-15;
    q.max_halvings = 1;
    q.step = 2.0;
    CHECK_THROWS_AS(loop_delta_dispersed(H, pump, ProbeCoupling::fdir(), {cm1_to_radfs(1600)},
                                         {0.0, cm1_to_radfs(300)}, 200.0, q),
                    ConvergenceError);
}

TEST_CASE("coarse Delta grid is refused by the assembly")
{
    auto H = EffectiveHamiltonian::from_scheme(pair_scheme());
    auto d = cm1_grid(-1800, 1800, 200);
    auto sd = loop_delta_dispersed(H, pump, ProbeCoupling::fdir(), {cm1_to_radfs(1600)}, d, 200.0);
    CHECK_THROWS_AS(assemble_from_delta(sd, probe), ConvergenceError);
}

TEST_CASE("resolvent preconditions")
{
    auto s = pair_scheme();
    s.a[0].gamma = 0.0;
    auto H = EffectiveHamiltonian::from_scheme(s);
    CHECK_THROWS(resolvent_frequency_gated(H, pump, probe, ProbeCoupling::fdir(), {0.3}, 200.0));
    auto H2 = EffectiveHamiltonian::from_scheme(pair_scheme());
    H2.gap_d[0] = FrequencyTrajectory::constant(cm1_to_radfs(1600));
    CHECK_THROWS(resolvent_frequency_gated(H2, pump, probe, ProbeCoupling::fdir(), {0.3}, 200.0));
}
