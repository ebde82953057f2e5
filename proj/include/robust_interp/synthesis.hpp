#pragma once

#include <optional>
#include <string>
#include <vector>

#include "robust_interp/nevanlinna_pick.hpp"
#include "robust_interp/outer_weight.hpp"
#include "robust_interp/rational.hpp"
#include "robust_interp/uncertainty.hpp"

namespace robust_interp {

struct FrequencyGridSpec {
    double omega_min = 1e-4;
    double omega_max = 1e4;
    int points = 4096;
    bool logarithmic = true;

    [[nodiscard]] std::vector<double> build() const;
    bool operator==(const FrequencyGridSpec&) const = default;
};

struct VerificationReport {
    int winding = 0;
    int plant_unstable_poles = 0;       // n
    int controller_unstable_poles = 0;  // n_K
    int expected_winding = 0;           // n + n_K
    bool stabilizes_nominal = false;

    // min over the grid of dist(Gamma(iw), P(iw)K(iw))
    double nyquist_margin = 0.0;
    double nyquist_margin_omega = 0.0;
    double margin_threshold = 0.0;  // 1e-4 * (1 + max |PK|)
    double max_open_loop = 0.0;
    std::size_t grid_size = 0;

    // sup over the grid of phi_T0 |T - T0|
    double small_gain_sup = 0.0;
    // min over the grid of dist(Lambda(iw), T(iw))
    double lambda_distance = 0.0;
    // T(p) - 1 at unstable poles, T(z) at nonminimum-phase zeros
    std::vector<cplx> interp_residuals;

    double t_inf = 0.0;
    bool t_inf_ok = false;
    bool t_inf_exact = true;

    bool passed = false;
    std::string note;
};

// Nominal and robust checks of K on P: Nyquist winding of PK about -1 against
// n + n_K, the Gamma-avoidance margin on the refined grid, and T(inf) against
// Lambda(inf). Throws GridTooNarrow when |PK(i w_max)| >= 0.1 / N.
VerificationReport verify(const RationalFunction& plant, const RationalFunction& controller,
                          const DisturbanceFamily& family, const FrequencyGridSpec& grid,
                          const RationalFunction& t0 = RationalFunction::zero());

// Verification frequencies for open loop L: the grid, w = 0, and 7 extra
// points in every interval where |L| touches the annulus 0.2 <= |L| <= 5.
std::vector<double> verification_frequencies(const RationalFunction& open_loop, const FrequencyGridSpec& grid);

// sup over the grid of |T_hat(iw)| phi_T0(iw) (phi when T0 is zero).
double small_gain_margin(const RationalFunction& t_hat, const DisturbanceFamily& family,
                         const RationalFunction& t0, std::span<const double> omega_grid);

struct DistanceCheck {
    double min_distance = 0.0;  // +inf when Lambda is empty on the whole grid
    double min_distance_omega = 0.0;
    // min over grid and sampled family values of |1 + T(iw)(Delta(iw) - 1)|
    double min_return_difference = 0.0;
};

DistanceCheck distance_condition_check(const RationalFunction& t, const DisturbanceFamily& family,
                                       std::span<const double> omega_grid, int samples_per_axis = 8);

struct SynthesisProblem {
    RationalFunction plant;
    DisturbanceFamily family = DisturbanceFamily::identity();
    RationalFunction t0 = RationalFunction::zero();
    std::optional<double> epsilon;
    int weight_degree = 4;
    // defaults to -relative_degree(plant), which makes K proper
    std::optional<int> rel_deg_offset;
    double overshoot_cap = 1.0;
    double pick_margin = kPickMargin;
    QuadratureConfig quadrature;
    FrequencyGridSpec grid;
    int fit_points = 400;
};

// Everything up to and including the Pick tests.
struct WeightedData {
    PoleZeroData pz;
    AssumptionReport assumptions;
    double epsilon = 0.0;
    RationalWeightApprox fit;
    // data from the outer function W_eps (the sufficient-condition test) and
    // from its rational over-approximation (the data actually interpolated)
    InterpolationData data_eps;
    InterpolationData data_rat;
    PickMatrix pick_eps;
    PickMatrix pick_rat;
    bool feasible_eps = false;
    bool feasible_rat = false;
};

// Throws AssumptionViolation when the family fails check_assumptions.
WeightedData prepare(const SynthesisProblem& prob);

struct SynthesisResult {
    RationalFunction controller;
    RationalFunction t;        // PK/(1 + PK)
    RationalFunction t_tilde;  // central interpolant
    VerificationReport report;
};

// K = (T~ + T0 W) / (P ((1 - T0) W - T~)) with the factors that vanish at the
// plant's unstable poles and nonminimum-phase zeros deflated exactly.
// Throws CancellationFailure when a deflation leaves a large remainder.
RationalFunction controller_from_interpolant(const RationalFunction& plant, const PoleZeroData& pz,
                                             const RationalFunction& t_tilde, const RationalFunction& w_rat,
                                             const RationalFunction& t0);

// Throws Infeasible when the Pick matrix of the interpolated data is not
// positive definite: the sufficient condition cannot certify this setup.
SynthesisResult synthesize(const SynthesisProblem& prob, const WeightedData& prepared);
SynthesisResult synthesize(const SynthesisProblem& prob);

// T = L/(1 + L) for L = PK, as a reduced rational function.
RationalFunction complementary_sensitivity(const RationalFunction& plant, const RationalFunction& controller);

}  // namespace robust_interp
