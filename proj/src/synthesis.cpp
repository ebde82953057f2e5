#include "robust_interp/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "robust_interp/errors.hpp"
#include "robust_interp/grid_kernels.hpp"
#include "robust_interp/winding.hpp"

namespace robust_interp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Frequencies of the verification grid plus w = 0 and extra points inside
// intervals where |L| touches the annulus 0.2 <= |L| <= 5.
std::vector<double> refined_grid(const RationalFunction& open_loop, const std::vector<double>& base) {
    std::vector<double> grid;
    grid.reserve(base.size() * 2);
    if (base.front() > 0.0) grid.push_back(0.0);
    const auto mag = frequency_response(open_loop, base);
    auto in_annulus = [](cplx v) { return std::abs(v) >= 0.2 && std::abs(v) <= 5.0; };
    for (std::size_t i = 0; i < base.size(); ++i) {
        grid.push_back(base[i]);
        if (i + 1 == base.size()) break;
        if (!in_annulus(mag[i]) && !in_annulus(mag[i + 1])) continue;
        for (int k = 1; k < 8; ++k) grid.push_back(base[i] + (base[i + 1] - base[i]) * k / 8.0);
    }
    return grid;
}

Polynomial deflate(const Polynomial& p, const Polynomial& factor, const char* what) {
    if (p.is_zero() || factor.degree() < 1) return p;
    const auto div = p.divide(factor);
    const double rem = div.remainder.is_zero() ? 0.0 : div.remainder.scale();
    if (rem > 1e-8 * p.scale()) {
        std::ostringstream msg;
        msg << what << " does not vanish at the interpolation nodes (relative remainder " << rem / p.scale() << ")";
        throw Error(ErrorCode::CancellationFailure, msg.str());
    }
    return div.quotient;
}

}  // namespace

std::vector<double> verification_frequencies(const RationalFunction& open_loop, const FrequencyGridSpec& grid) {
    return refined_grid(open_loop, grid.build());
}

std::vector<double> FrequencyGridSpec::build() const {
    return logarithmic ? log_grid(omega_min, omega_max, points) : linear_grid(omega_min, omega_max, points);
}

RationalFunction complementary_sensitivity(const RationalFunction& plant, const RationalFunction& controller) {
    const RationalFunction l = plant * controller;
    return {l.num(), l.num() + l.den()};
}

VerificationReport verify(const RationalFunction& plant, const RationalFunction& controller,
                          const DisturbanceFamily& family, const FrequencyGridSpec& grid_spec,
                          const RationalFunction& t0) {
    VerificationReport rep;
    const RationalFunction l = plant * controller;
    const auto base = grid_spec.build();

    const double edge = std::abs(l.at_frequency(base.back()));
    if (edge >= 0.1 / family.norm_bound()) {
        std::ostringstream msg;
        msg << "|PK| = " << edge << " at the top grid frequency " << base.back()
            << " has not decayed below 0.1/N = " << 0.1 / family.norm_bound();
        throw Error(ErrorCode::GridTooNarrow, msg.str());
    }

    const PoleZeroData pz = classify(plant);
    rep.plant_unstable_poles = static_cast<int>(pz.unstable_poles.size());
    rep.controller_unstable_poles = count_rhp_poles(controller);
    rep.expected_winding = rep.plant_unstable_poles + rep.controller_unstable_poles;
    bool crosses = false;
    try {
        rep.winding = nyquist_winding(l, -1.0);
        rep.stabilizes_nominal = rep.winding == rep.expected_winding;
        if (!rep.stabilizes_nominal) rep.note = "winding of PK about -1 differs from n + n_K";
    } catch (const Error& e) {
        if (e.code() != ErrorCode::CenterOnCurve) throw;
        crosses = true;
        rep.stabilizes_nominal = false;
        rep.note = "Nyquist curve of PK passes through -1";
    }

    const auto omega = refined_grid(l, base);
    rep.grid_size = omega.size();
    const auto lw = frequency_response(l, omega);
    const auto dist = region_distance_grid(family, Region::Gamma, omega, lw);
    rep.nyquist_margin = kInf;
    for (std::size_t i = 0; i < omega.size(); ++i) {
        rep.max_open_loop = std::max(rep.max_open_loop, std::abs(lw[i]));
        if (dist[i] < rep.nyquist_margin) {
            rep.nyquist_margin = dist[i];
            rep.nyquist_margin_omega = omega[i];
        }
    }
    rep.margin_threshold = 1e-4 * (1.0 + rep.max_open_loop);

    const RationalFunction t = complementary_sensitivity(plant, controller);
    for (const cplx& p : pz.unstable_poles) rep.interp_residuals.push_back(t(p) - 1.0);
    for (const cplx& z : pz.nonmin_phase_zeros) rep.interp_residuals.push_back(t(z));

    if (crosses) {
        // T has an imaginary-axis pole; the robust quantities are undefined
        rep.nyquist_margin = 0.0;
        rep.small_gain_sup = kInf;
        rep.lambda_distance = 0.0;
        rep.t_inf = t.is_proper() ? t.value_at_infinity() : kInf;
        return rep;
    }

    rep.small_gain_sup = small_gain_margin(t - t0, family, t0, omega);
    const auto dc = distance_condition_check(t, family, omega, 4);
    rep.lambda_distance = dc.min_distance;

    rep.t_inf = t.value_at_infinity();
    const auto inf = family.lambda_infinity_contains(rep.t_inf);
    rep.t_inf_ok = !inf.contains;
    rep.t_inf_exact = inf.exact;

    const bool margin_ok = rep.nyquist_margin > rep.margin_threshold;
    if (rep.stabilizes_nominal && !margin_ok) rep.note = "Nyquist curve comes within the margin threshold of Gamma";
    if (rep.stabilizes_nominal && margin_ok && !rep.t_inf_ok) rep.note = "T(inf) lies in Lambda(inf)";
    rep.passed = rep.stabilizes_nominal && margin_ok && rep.t_inf_ok;
    return rep;
}

double small_gain_margin(const RationalFunction& t_hat, const DisturbanceFamily& family, const RationalFunction& t0,
                         std::span<const double> omega_grid) {
    if (omega_grid.empty()) throw Error(ErrorCode::DegenerateInput, "empty frequency grid");
    if (t_hat.is_zero()) return 0.0;
    std::vector<double> v(omega_grid.size());
    const bool shifted = !t0.is_zero();
    parallel_for(v.size(), [&](std::size_t i) {
        const double w = omega_grid[i];
        const double weight = shifted ? phi_shifted(family, w, t0) : family.phi(w);
        v[i] = weight == 0.0 ? 0.0 : std::abs(t_hat.at_frequency(w)) * weight;
    });
    return *std::max_element(v.begin(), v.end());
}

DistanceCheck distance_condition_check(const RationalFunction& t, const DisturbanceFamily& family,
                                       std::span<const double> omega_grid, int samples_per_axis) {
    if (omega_grid.empty()) throw Error(ErrorCode::DegenerateInput, "empty frequency grid");
    const auto tw = frequency_response(t, omega_grid);
    const auto dist = region_distance_grid(family, Region::Lambda, omega_grid, tw);
    std::vector<double> ret(omega_grid.size());
    parallel_for(omega_grid.size(), [&](std::size_t i) {
        double best = kInf;
        for (const cplx& d : family.sample_values(omega_grid[i], samples_per_axis))
            best = std::min(best, std::abs(1.0 + tw[i] * (d - 1.0)));
        ret[i] = best;
    });
    DistanceCheck out;
    out.min_distance = kInf;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        if (dist[i] < out.min_distance) {
            out.min_distance = dist[i];
            out.min_distance_omega = omega_grid[i];
        }
    }
    out.min_return_difference = *std::min_element(ret.begin(), ret.end());
    return out;
}

WeightedData prepare(const SynthesisProblem& prob) {
    WeightedData wd;
    wd.pz = classify(prob.plant);
    wd.assumptions = check_assumptions(prob.family, wd.pz);
    if (!wd.assumptions.passed) {
        std::string msg = "disturbance family violates the standing assumptions";
        for (const auto& v : wd.assumptions.violations) msg += "; " + v;
        throw Error(ErrorCode::AssumptionViolation, msg);
    }
    const auto fit_grid = log_grid(prob.grid.omega_min > 0.0 ? prob.grid.omega_min : 1e-4, prob.grid.omega_max,
                                   prob.fit_points);
    const bool shifted = !prob.t0.is_zero();
    wd.epsilon = prob.epsilon ? *prob.epsilon
                              : (shifted ? default_epsilon(prob.family, prob.t0, fit_grid)
                                         : default_epsilon(prob.family, fit_grid));
    const WeightFunction weight(prob.family, shifted ? std::optional(prob.t0) : std::nullopt, wd.epsilon);

    wd.data_eps = build_data(wd.pz, [&](cplx s) { return outer_eval(weight, s, prob.quadrature); }, prob.t0);
    wd.pick_eps = pick_matrix(wd.data_eps);
    wd.feasible_eps = is_feasible(wd.pick_eps, prob.pick_margin);

    WeightFitOptions opts;
    opts.degree = prob.weight_degree;
    opts.rel_deg_offset = prob.rel_deg_offset ? *prob.rel_deg_offset : -wd.pz.relative_degree;
    opts.overshoot_cap = prob.overshoot_cap;
    opts.reduce_degree_on_failure = true;
    wd.fit = rational_over_approx(weight, fit_grid, opts);
    wd.data_rat = build_data(wd.pz, [&](cplx s) { return wd.fit.w_rat(s); }, prob.t0);
    wd.pick_rat = pick_matrix(wd.data_rat);
    wd.feasible_rat = is_feasible(wd.pick_rat, prob.pick_margin);
    return wd;
}

RationalFunction controller_from_interpolant(const RationalFunction& plant, const PoleZeroData& pz,
                                             const RationalFunction& t_tilde, const RationalFunction& w_rat,
                                             const RationalFunction& t0) {
    const Polynomial& a = t_tilde.num();
    const Polynomial& b = t_tilde.den();
    const Polynomial& c = w_rat.num();
    const Polynomial& d = w_rat.den();
    const Polynomial& e = t0.num();
    const Polynomial& f = t0.den();
    Polynomial x = a * f * d + e * c * b;
    Polynomial y = (f - e) * c * b - a * f * d;
    Polynomial np = plant.num();
    Polynomial dp = plant.den();

    const Polynomial qp = Polynomial::from_roots(pz.unstable_poles);
    const Polynomial qz = Polynomial::from_roots(pz.nonmin_phase_zeros);
    y = deflate(y, qp, "(1 - T0) W - T~");
    dp = deflate(dp, qp, "plant denominator");
    x = deflate(x, qz, "T~ + T0 W");
    np = deflate(np, qz, "plant numerator");

    const Polynomial knum = (x * dp).trimmed(1e-12);
    const Polynomial kden = (np * y).trimmed(1e-12);
    if (kden.is_zero()) throw Error(ErrorCode::CancellationFailure, "controller denominator vanishes identically");
    return {knum, kden};
}

SynthesisResult synthesize(const SynthesisProblem& prob, const WeightedData& wd) {
    if (!wd.feasible_rat) {
        std::ostringstream msg;
        msg << "Pick matrix not positive definite (min eigenvalue " << wd.pick_rat.min_eigenvalue
            << " with the rational weight, " << wd.pick_eps.min_eigenvalue
            << " with the outer weight); the sufficient condition cannot certify this setup";
        throw Error(ErrorCode::Infeasible, msg.str());
    }
    SynthesisResult out;
    out.t_tilde = central_solution(wd.data_rat, prob.pick_margin);
    out.controller = controller_from_interpolant(prob.plant, wd.pz, out.t_tilde, wd.fit.w_rat, prob.t0);
    out.t = complementary_sensitivity(prob.plant, out.controller);
    out.report = verify(prob.plant, out.controller, prob.family, prob.grid, prob.t0);
    return out;
}

SynthesisResult synthesize(const SynthesisProblem& prob) { return synthesize(prob, prepare(prob)); }

}  // namespace robust_interp
