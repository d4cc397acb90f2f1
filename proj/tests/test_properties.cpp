#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "vibroprobe/loop_engine.hpp"
#include "vibroprobe/resolution.hpp"
#include "vibroprobe/semiclassical_engine.hpp"
#include "vibroprobe/sos_engine.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <cstring>
#include <sstream>

using namespace vp;

namespace {

std::mt19937_64 rng(20241015);

double uni(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

LevelScheme random_scheme(std::size_t na, std::size_t nc, std::size_t nd)
{
    LevelScheme s;
    for (std::size_t a = 0; a < na; ++a)
        s.a.push_back({"a" + std::to_string(a), cm1_to_radfs(uni(15800, 16400)), uni(0.005, 0.02), uni(0.5, 1.2)});
    for (std::size_t c = 0; c < nc; ++c) {
        VibState v{"c" + std::to_string(c), cm1_to_radfs(uni(17200, 18000)), uni(0.01, 0.03), {}, {}};
        for (std::size_t a = 0; a < na; ++a) v.mu.push_back(uni(0.1, 1.0)), v.alpha.push_back(uni(-0.5, 0.5));
        s.c.push_back(v);
    }
    for (std::size_t d = 0; d < nd; ++d) {
        VibState v{"d" + std::to_string(d), cm1_to_radfs(uni(14000, 14800)), uni(0.01, 0.03), {}, {}};
        for (std::size_t a = 0; a < na; ++a) v.mu.push_back(uni(0.1, 1.0)), v.alpha.push_back(uni(-0.5, 0.5));
        s.d.push_back(v);
    }
    return s;
}

std::vector<double> grid(double lo, double hi, std::size_t n)
{
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

} // namespace

TEST_CASE("pump-prepared states are valid density matrices")
{
    for (int r = 0; r < 30; ++r) {
        auto s = random_scheme(1 + r % 4, 1, 1);
        auto pump = PulseSpec::gaussian(cplx(uni(0.1, 2), uni(-1, 1)), cm1_to_radfs(uni(15500, 16700)), uni(5, 80));
        CHECK_NOTHROW(PreparedState::from_pump(s, pump));
    }
}

TEST_CASE("frequency-gated SOS scales with both field intensities")
{
    for (int r = 0; r < 10; ++r) {
        auto s = random_scheme(2, 1, 1);
        const double a1 = uni(0.2, 3), a2 = uni(0.2, 3);
        auto pump = PulseSpec::gaussian(1.0, cm1_to_radfs(16100), 15);
        auto probe = PulseSpec::gaussian(1.0, cm1_to_radfs(1700), 25);
        auto pump2 = PulseSpec::gaussian(a1, cm1_to_radfs(16100), 15);
        auto probe2 = PulseSpec::gaussian(a2, cm1_to_radfs(1700), 25);
        auto om = grid(cm1_to_radfs(1200), cm1_to_radfs(2200), 11);
        auto x = sos_frequency_gated(s, pump, probe, ProbeCoupling::fdir(), om, 200);
        auto y = sos_frequency_gated(s, pump2, probe2, ProbeCoupling::fdir(), om, 200);
        for (std::size_t i = 0; i < om.size(); ++i)
            CHECK(y.at(i).real() == doctest::Approx(a1 * a1 * a2 * a2 * x.at(i).real()).epsilon(1e-12));
    }
}

TEST_CASE("prepared-state Delta spectrum carries exp(i Delta T)")
{
    for (int r = 0; r < 10; ++r) {
        auto s = random_scheme(3, 1, 2);
        auto rho = PreparedState::from_pump(s, PulseSpec::gaussian(1.0, cm1_to_radfs(16100), 12));
        auto d = grid(-0.1, 0.1, 41);
        const double T = uni(0, 500);
        auto x = sos_delta_dispersed_prepared(rho, s, ProbeCoupling::fdir(), 0.3, d, 0.0);
        auto y = sos_delta_dispersed_prepared(rho, s, ProbeCoupling::fdir(), 0.3, d, T);
        for (std::size_t j = 0; j < d.size(); ++j)
            CHECK(std::abs(y.at(j) - x.at(j) * std::exp(I * (d[j] * T))) < 1e-12 * std::abs(x.at(j)));
    }
}

TEST_CASE("Raman mapping holds for random schemes")
{
    for (int r = 0; r < 10; ++r) {
        auto s = random_scheme(2, 2, 1);
        const double w3 = cm1_to_radfs(uni(9000, 14000));
        const cplx e3(uni(0.1, 2), uni(-1, 1));
        const double pc = cm1_to_radfs(uni(1300, 2000));
        auto pump = PulseSpec::gaussian(1.0, cm1_to_radfs(16100), 15);
        auto om = grid(pc - 0.05, pc + 0.05, 9);
        std::vector<double> omf;
        for (double w : om) omf.push_back(w);
        for (auto& w : om) w += w3;
        auto a = sos_frequency_gated(s, pump, PulseSpec::gaussian(1.0, pc + w3, 25), ProbeCoupling::srs(e3, w3), om, 150);
        auto b = sos_frequency_gated(s.with_alpha_as_mu(), pump, PulseSpec::gaussian(1.0, pc, 25), ProbeCoupling::fdir(),
                                     omf, 150);
        double pk = 0.0;
        for (auto v : b.data) pk = std::max(pk, std::abs(v));
        for (std::size_t i = 0; i < om.size(); ++i)
            CHECK(std::abs(a.at(i) - std::norm(e3) * b.at(i)) <= 1e-12 * std::norm(e3) * pk);
    }
}

TEST_CASE("phase integrals are additive")
{
    std::vector<FrequencyTrajectory> trs{
        FrequencyTrajectory::constant(uni(0.1, 0.5)), FrequencyTrajectory::linear_chirp(0.3, uni(-1e-4, 1e-4)),
        FrequencyTrajectory::erf_switch(0.37, uni(-0.05, 0.05), uni(100, 400), uni(5, 100)),
        FrequencyTrajectory::tabulated(grid(0, 1000, 17), grid(0.2, 0.5, 17))};
    BathSpec b{cm1_to_radfs(40), 0.02, 300};
    trs.push_back(sample_ou_trajectory(b, trs[2], 77, {0.0, 2.5, 401}));
    for (const auto& tr : trs)
        for (int r = 0; r < 20; ++r) {
            double x = uni(0, 900), y = uni(0, 900), z = uni(0, 900);
            double p[3] = {x, y, z};
            std::sort(p, p + 3);
            double lhs = phase_integral(tr, p[0], p[1]) + phase_integral(tr, p[1], p[2]);
            CHECK(lhs == doctest::Approx(phase_integral(tr, p[0], p[2])).epsilon(1e-12));
        }
}

TEST_CASE("linewidth function: positive damping and monotone real part")
{
    for (int r = 0; r < 20; ++r) {
        BathSpec b{cm1_to_radfs(uni(1, 200)), uni(1e-3, 0.1), uni(50, 400)};
        const double T = uni(0, 300);
        double prev = -1.0;
        for (double t = T; t < T + 1000; t += 37.0) {
            auto g = lineshape_g(b, T, t);
            CHECK(g.re() >= 0.0);
            CHECK(g.re() >= prev - 1e-12);
            prev = g.re();
            auto gs = lineshape_stationary(b, t - T);
            CHECK(gs.re() >= 0.0);
        }
    }
}

TEST_CASE("chirp-z and direct sums agree")
{
    std::normal_distribution<double> nd;
    for (std::size_t n : {std::size_t(3001), std::size_t(4096)}) {
        std::vector<cplx> g(n);
        for (auto& v : g) v = cplx(nd(rng), nd(rng));
        auto d = grid(-0.7, 0.9, 1601);
        auto fast = delta_sum(g, 12.0, 0.37, d, 250.0);
        // spot check against the plain sum
        for (std::size_t j = 0; j < d.size(); j += 160) {
            cplx acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) acc += g[k] * std::exp(-I * (d[j] * (12.0 + 0.37 * double(k) - 250.0)));
            CHECK(std::abs(fast[j] - acc) < 1e-9 * std::sqrt(double(n)));
        }
    }
}

TEST_CASE("Delta/tau transforms are exact inverses on reciprocal grids")
{
    std::normal_distribution<double> nd;
    for (int r = 0; r < 5; ++r) {
        auto d = grid(-uni(0.2, 0.6), uni(0.2, 0.6), 200 + 37 * r);
        SignalGrid sd(Axis{"omega", "radfs", {uni(0, 0.4)}}, Axis{"delta", "radfs", d}, true);
        for (auto& v : sd.data) v = cplx(nd(rng), nd(rng));
        const double T = uni(-100, 900);
        auto tau = reciprocal_tau_grid(d, T);
        auto back = tau_to_delta(delta_to_tau(sd, tau, T), d, T);
        for (std::size_t j = 0; j < d.size(); ++j) CHECK(std::abs(back.data[j] - sd.data[j]) < 1e-9);
        CHECK(second_moment_product(d, sd.data) >= 0.5 * (1 - 1e-9));
    }
}

TEST_CASE("CSV round trip is exact for arbitrary doubles")
{
    std::uniform_int_distribution<std::uint64_t> bits;
    SignalGrid g(Axis{"a", "fs", grid(0, 1, 7)}, Axis{"b", "", grid(-3, 3, 5)}, true);
    for (auto& v : g.data) {
        double re, im;
        do {
            std::uint64_t u = bits(rng), w = bits(rng);
            std::memcpy(&re, &u, 8);
            std::memcpy(&im, &w, 8);
        } while (!std::isfinite(re) || !std::isfinite(im));
        v = cplx(re, im);
    }
    std::stringstream ss;
    write_csv(g, ss);
    CHECK(read_csv(ss).data == g.data);
}

TEST_CASE("seeds never collide in practice")
{
    std::set<std::uint64_t> seen;
    for (std::uint64_t m : {1ull, 2ull, 20240611ull})
        for (std::uint64_t i = 0; i < 20000; ++i) seen.insert(derive_seed(m, i));
    CHECK(seen.size() == 60000);
}

TEST_CASE("semiclassical signal is linear in the couplings and the pump intensity")
{
    for (int r = 0; r < 5; ++r) {
        auto s = random_scheme(1, 1, 1);
        ScJob j;
        j.scheme = s;
        j.tr_c = {FrequencyTrajectory::constant(s.c[0].omega - s.a[0].omega)};
        j.tr_d = {FrequencyTrajectory::erf_switch(s.a[0].omega - s.d[0].omega, uni(-0.04, 0.04), 100, 30)};
        QuadSpec q;
        q.step = 0.4;
        q.max_halvings = 0;
        q.window = 600;
        auto om = grid(0.25, 0.45, 5);
        auto d = grid(-0.05, 0.05, 5);
        auto x = sc_delta_dispersed(j, om, d, 80.0, q);
        auto j2 = j;
        const double k = uni(0.5, 2.0);
        j2.pump = PulseSpec::impulsive(k);
        auto y = sc_delta_dispersed(j2, om, d, 80.0, q);
        for (std::size_t i = 0; i < x.data.size(); ++i) CHECK(std::abs(y.data[i] - k * k * x.data[i]) < 1e-12 * std::abs(k * k * x.data[i]) + 1e-14);
    }
}
