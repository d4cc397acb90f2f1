#pragma once

#include "vibroprobe/units.hpp"

namespace vp {

enum class PulseKind { gaussian, impulsive, cw };

struct PulseSpec {
    PulseKind kind = PulseKind::gaussian;
    cplx amplitude{1.0, 0.0};
    double carrier = 0.0; // rad/fs
    double sigma = 0.0;   // fs, gaussian only
    double center = 0.0;  // fs

    static PulseSpec gaussian(cplx amp, double carrier, double sigma, double center = 0.0);
    static PulseSpec impulsive(cplx amp, double center = 0.0);
    static PulseSpec cw(cplx amp, double carrier, double center = 0.0);

    void validate() const;
    PulseSpec shifted(double dt) const;
};

cplx envelope_time(const PulseSpec& p, double t);
cplx envelope_freq(const PulseSpec& p, cplx z);

const char* to_string(PulseKind k);

} // namespace vp
