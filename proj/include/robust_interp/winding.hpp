#pragma once

#include <complex>
#include <vector>

#include "robust_interp/rational.hpp"

namespace robust_interp {

// Samples of a closed oriented curve; the last sample connects back to the first.
struct ClosedCurve {
    std::vector<cplx> samples;
};

// Signed number of counter-clockwise turns of the curve about `center`,
// accumulated from argument increments between consecutive samples.
// Throws CurveTooCoarse if one step turns by more than pi/2 and CenterOnCurve
// if a sample lies within intersect_tol of the center.
int winding_number(const ClosedCurve& curve, cplx center, double intersect_tol = 1e-12);

struct NyquistOptions {
    int initial_samples = 512;
    // refine an interval while its argument change about the center exceeds this
    double max_step_angle = 0.7853981633974483;  // pi/4
    int max_depth = 48;
};

// Image of the imaginary axis (omega from -inf to +inf) under a proper f,
// closed through f(infinity). Frequencies are refined adaptively so every step
// turns by at most max_step_angle about `center`.
ClosedCurve nyquist_curve(const RationalFunction& f, cplx center, const NyquistOptions& opts = {});

// Counter-clockwise encirclements of `center` by the Nyquist image of f.
// For f without imaginary-axis poles or zeros of f - center this equals
// (#poles of f in C+) - (#zeros of f - center in C+).
int nyquist_winding(const RationalFunction& f, cplx center, const NyquistOptions& opts = {});

}  // namespace robust_interp
