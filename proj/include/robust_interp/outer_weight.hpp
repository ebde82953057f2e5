#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "robust_interp/quadrature.hpp"
#include "robust_interp/rational.hpp"
#include "robust_interp/uncertainty.hpp"

namespace robust_interp {

// Floored boundary modulus phi_eps(iw) = max(phi(iw), eps) of an outer
// function. Copies share one memo of boundary values; the memo is safe for
// concurrent readers and writers.
class WeightFunction {
public:
    // phi from the family, or phi_T0 = 1/dist(Lambda, T0) when t0 is given.
    // Throws FloorNotPositive for eps <= 0.
    WeightFunction(const DisturbanceFamily& family, std::optional<RationalFunction> t0, double epsilon);
    // Arbitrary even boundary modulus; used for oracles and tests.
    WeightFunction(std::function<double(double)> modulus, double epsilon);

    [[nodiscard]] double epsilon() const;
    // Unfloored phi(iw).
    [[nodiscard]] double raw(double omega) const;
    // phi_eps(iw), memoized.
    [[nodiscard]] double operator()(double omega) const;

    // Upper bound on the unshifted weight (N + 1), or +inf when unknown.
    [[nodiscard]] double upper_bound() const;

    // Frequencies >= 0 where the scan found a jump of more than 10% between
    // neighbouring samples, localized by bisection. Computed once.
    [[nodiscard]] const std::vector<double>& jump_frequencies() const;

    [[nodiscard]] std::size_t cache_size() const;

private:
    struct State;
    std::shared_ptr<State> state_;
};

// 1e-3 * max(1, max over the grid of phi).
double default_epsilon(const DisturbanceFamily& family, std::span<const double> omega_grid);
double default_epsilon(const DisturbanceFamily& family, const RationalFunction& t0, std::span<const double> omega_grid);

// W_eps(s) for Re s > 0 from the boundary modulus, after substituting w = tan(u).
cplx outer_eval(const WeightFunction& w, cplx s, const QuadratureConfig& q = {});

// Max relative deviation of |W(iw)| (extrapolated from sigma = 1e-2, 1e-3, 1e-4)
// from phi_eps(iw), skipping frequencies next to a jump of phi_eps.
double boundary_modulus_check(const WeightFunction& w, std::span<const double> omega_grid,
                              const QuadratureConfig& q = {});

struct RationalWeightApprox {
    RationalFunction w_rat;
    int relative_degree_offset = 0;
    // degree of the even fit that was used (may be below the requested one)
    int degree = 0;
    // relative scale-up (1 + overshoot) applied to meet the over-approximation
    double overshoot = 0.0;
    // max over the validation grid of (|W_rat| - phi_eps)/phi_eps
    double fit_report = 0.0;

    // Fitted even rational: |spectral_factor(iw)|^2 ~ fit_num(x)/fit_den(x),
    // x = (w/freq_scale)^2.
    RationalFunction spectral_factor;
    Polynomial fit_num;
    Polynomial fit_den;
    double freq_scale = 1.0;
    [[nodiscard]] double fitted_square(double omega) const;
};

struct WeightFitOptions {
    int degree = 4;
    int rel_deg_offset = 0;
    double overshoot_cap = 1.0;
    int iterations = 40;
    // on FitInfeasible, retry with degree - 1, ..., 0 instead of throwing
    bool reduce_degree_on_failure = false;
};

// Least-squares (relative, Sanathanan-Koerner) fit of phi_eps^2 on the grid by
// an even rational of the given degree, spectral factorization to a stable
// minimum-phase W, scale-up to dominate phi_eps on a 10x denser grid, and
// rel_deg_offset extra factors (1 + s/w_c)^{-offset} with w_c = 2 * max grid.
// Throws FitInfeasible (unless reduce_degree_on_failure) and OvershootExcessive.
RationalWeightApprox rational_over_approx(const WeightFunction& w, std::span<const double> omega_grid,
                                          const WeightFitOptions& opts);

}  // namespace robust_interp
