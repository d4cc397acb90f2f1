#pragma once

#include "vibroprobe/units.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace vp {

// static partition, so results never depend on the thread count
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& fn)
{
    unsigned nt = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
    if (nt <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errs(nt);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < nt; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += nt) fn(i);
            } catch (...) {
                errs[w] = std::current_exception();
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

unsigned default_threads();

// sum_k g[k] exp(-i delta_j (t0 + k h - tref)) for every delta_j
std::vector<cplx> delta_sum(const std::vector<cplx>& g, double t0, double h, const std::vector<double>& delta,
                            double tref);

struct QuadSpec {
    double step = 0.0;   // 0 = automatic
    double window = 0.0; // 0 = automatic
    double tol = 1e-5;   // relative to the largest value on the grid
    int max_halvings = 6;
};

struct Richardson {
    std::vector<cplx> value;
    double error = 0.0;
    double step = 0.0;
};

// eval(h) must return a trapezoid-type O(h^2) result; halves h until the
// extrapolated estimate settles
Richardson richardson(const std::function<std::vector<cplx>(double)>& eval, double h0, const QuadSpec& q,
                      const std::string& what);

// trapezoid weight of point k out of n
inline double trap_w(std::size_t k, std::size_t n, double h) { return (k == 0 || k + 1 == n) ? 0.5 * h : h; }

double max_abs(const std::vector<cplx>& v);

} // namespace vp
