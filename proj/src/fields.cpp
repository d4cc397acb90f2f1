#include "vibroprobe/fields.hpp"

#include <cmath>

namespace vp {

PulseSpec PulseSpec::gaussian(cplx amp, double carrier, double sigma, double center)
{
    PulseSpec p{PulseKind::gaussian, amp, carrier, sigma, center};
    p.validate();
    return p;
}

PulseSpec PulseSpec::impulsive(cplx amp, double center)
{
    PulseSpec p{PulseKind::impulsive, amp, 0.0, 0.0, center};
    p.validate();
    return p;
}

PulseSpec PulseSpec::cw(cplx amp, double carrier, double center)
{
    PulseSpec p{PulseKind::cw, amp, carrier, 0.0, center};
    p.validate();
    return p;
}

void PulseSpec::validate() const
{
    if (!std::isfinite(amplitude.real()) || !std::isfinite(amplitude.imag()) || std::abs(amplitude) == 0.0)
        throw ConfigError("pulse amplitude must be finite and nonzero");
    if (!std::isfinite(carrier) || !std::isfinite(center)) throw ConfigError("pulse carrier/center not finite");
    if (kind == PulseKind::gaussian) {
        if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("gaussian pulse needs sigma > 0");
    } else if (sigma != 0.0) {
        throw ConfigError("impulsive/cw pulses carry no duration");
    }
}

PulseSpec PulseSpec::shifted(double dt) const
{
    PulseSpec p = *this;
    p.center += dt;
    return p;
}

cplx envelope_time(const PulseSpec& p, double t)
{
    switch (p.kind) {
    case PulseKind::gaussian: {
        double x = (t - p.center) / p.sigma;
        return p.amplitude * std::exp(-0.5 * x * x) * std::exp(-I * (p.carrier * t));
    }
    case PulseKind::cw:
        return p.amplitude * std::exp(-I * (p.carrier * (t - p.center)));
    case PulseKind::impulsive:
        break;
    }
    throw Error("distributional envelope; use the engine's impulsive path");
}

cplx envelope_freq(const PulseSpec& p, cplx z)
{
    switch (p.kind) {
    case PulseKind::gaussian: {
        cplx dz = z - p.carrier;
        return p.amplitude * p.sigma * std::sqrt(2.0 * std::numbers::pi) *
               std::exp(-0.5 * p.sigma * p.sigma * dz * dz + I * dz * p.center);
    }
    case PulseKind::impulsive:
        return p.amplitude * std::exp(I * z * p.center);
    case PulseKind::cw:
        break;
    }
    throw Error("delta-distribution spectrum; handled inside engines");
}

const char* to_string(PulseKind k)
{
    switch (k) {
    case PulseKind::gaussian: return "gaussian";
    case PulseKind::impulsive: return "impulsive";
    case PulseKind::cw: return "cw";
    }
    return "?";
}

} // namespace vp
