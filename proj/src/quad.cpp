#include "vibroprobe/quad.hpp"

#include <fftw3.h>

#include <mutex>

namespace vp {

unsigned default_threads()
{
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

namespace {

std::mutex plan_mutex;

bool uniform(const std::vector<double>& x)
{
    if (x.size() < 3) return false;
    const double d = x[1] - x[0];
    if (d == 0.0) return false;
    for (std::size_t j = 2; j < x.size(); ++j)
        if (std::abs(x[j] - x[j - 1] - d) > 1e-9 * std::abs(d)) return false;
    return true;
}

// in-place complex FFT of length n
void fft(std::vector<cplx>& v, int sign)
{
    auto* p = reinterpret_cast<fftw_complex*>(v.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lk(plan_mutex);
        plan = fftw_plan_dft_1d(static_cast<int>(v.size()), p, p, sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard<std::mutex> lk(plan_mutex);
    fftw_destroy_plan(plan);
}

std::vector<cplx> direct_sum(const std::vector<cplx>& g, double t0, double h, const std::vector<double>& delta,
                             double tref)
{
    std::vector<cplx> out(delta.size());
    const std::size_t n = g.size();
    for (std::size_t j = 0; j < delta.size(); ++j) {
        const double d = delta[j];
        const cplx rot = std::exp(-I * (d * h));
        cplx acc = 0.0;
        std::size_t k = 0;
        while (k < n) {
            // re-anchor the rotation every block to keep rounding flat
            cplx z = std::exp(-I * (d * (t0 + h * static_cast<double>(k) - tref)));
            std::size_t end = std::min(n, k + 256);
            for (; k < end; ++k) {
                acc += g[k] * z;
                z *= rot;
            }
        }
        out[j] = acc;
    }
    return out;
}

// chirp-z: jk = (j^2 + k^2 - (k-j)^2)/2
std::vector<cplx> czt_sum(const std::vector<cplx>& g, double t0, double h, const std::vector<double>& delta,
                          double tref)
{
    const std::size_t N = g.size(), M = delta.size();
    const double d0 = delta[0], dd = (delta[M - 1] - delta[0]) / static_cast<double>(M - 1);
    const double th = dd * h;
    std::size_t L = 1;
    while (L < N + M - 1) L <<= 1;
    auto chirp = [th](double m) { return std::exp(I * (0.5 * th * m * m)); };
    std::vector<cplx> a(L, 0.0), b(L, 0.0);
    for (std::size_t k = 0; k < N; ++k) {
        double kk = static_cast<double>(k);
        a[k] = g[k] * std::exp(-I * (d0 * h * kk)) * std::conj(chirp(kk));
    }
    for (std::size_t m = 0; m < M; ++m) b[m] = chirp(static_cast<double>(m));
    for (std::size_t m = 1; m < N; ++m) b[L - m] = chirp(static_cast<double>(m));
    fft(a, FFTW_FORWARD);
    fft(b, FFTW_FORWARD);
    for (std::size_t i = 0; i < L; ++i) a[i] *= b[i];
    fft(a, FFTW_BACKWARD);
    std::vector<cplx> out(M);
    for (std::size_t j = 0; j < M; ++j) {
        double jj = static_cast<double>(j);
        out[j] = a[j] / static_cast<double>(L) * std::conj(chirp(jj)) * std::exp(-I * (delta[j] * (t0 - tref)));
    }
    return out;
}

} // namespace

std::vector<cplx> delta_sum(const std::vector<cplx>& g, double t0, double h, const std::vector<double>& delta,
                            double tref)
{
    if (g.size() * delta.size() > 4'000'000 && uniform(delta)) return czt_sum(g, t0, h, delta, tref);
    return direct_sum(g, t0, h, delta, tref);
}

double max_abs(const std::vector<cplx>& v)
{
    double m = 0.0;
    for (auto& x : v) m = std::max(m, std::abs(x));
    return m;
}

Richardson richardson(const std::function<std::vector<cplx>(double)>& eval, double h0, const QuadSpec& q,
                      const std::string& what)
{
    double h = h0;
    std::vector<cplx> coarse = eval(h);
    if (q.max_halvings <= 0) return {std::move(coarse), 0.0, h};
    std::vector<cplx> prev_x;
    for (int level = 0; level < q.max_halvings; ++level) {
        h *= 0.5;
        std::vector<cplx> fine = eval(h);
        std::vector<cplx> x(fine.size());
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = (4.0 * fine[i] - coarse[i]) / 3.0;
        double scale = std::max(max_abs(x), 1e-300);
        double err = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) err = std::max(err, std::abs(fine[i] - coarse[i]) / 3.0);
        // the extrapolated value is a step better than the plain estimate
        if (!prev_x.empty()) {
            double e2 = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) e2 = std::max(e2, std::abs(x[i] - prev_x[i]));
            err = std::min(err, e2);
        }
        if (err <= q.tol * scale) return {std::move(x), err / scale, h};
        prev_x = std::move(x);
        coarse = std::move(fine);
    }
    throw ConvergenceError(what + ": quadrature did not converge after step halving");
}

} // namespace vp
