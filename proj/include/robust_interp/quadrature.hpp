#pragma once

#include <complex>
#include <functional>
#include <span>

namespace robust_interp {

using cplx = std::complex<double>;

struct QuadratureConfig {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    int max_subdivisions = 2000;
    bool operator==(const QuadratureConfig&) const = default;
};

struct QuadratureResult {
    cplx value;
    double error = 0.0;
    int intervals = 0;
};

// Globally adaptive 7/15-point Gauss-Kronrod integration of f over [a, b].
// Interior breakpoints (sorted or not) start the subdivision so known
// discontinuities fall on interval ends. Throws QuadratureFailure when
// max_subdivisions intervals cannot meet max(abs_tol, rel_tol * |I|).
QuadratureResult integrate(const std::function<cplx(double)>& f, double a, double b,
                           std::span<const double> breakpoints, const QuadratureConfig& cfg);

}  // namespace robust_interp
