#pragma once

#include <complex>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "robust_interp/rational.hpp"

namespace robust_interp {

// Delta(s) = kappa e^{-i theta} e^{-s tau}, kappa in [1,k], theta in [-phi_max, phi_max], tau in [0, t_max].
struct GainPhaseDelayBox {
    double k = 1.0;
    double phi_max = 0.0;
    double t_max = 0.0;
};

// Delta_y(s) = (s + y)/(s + z), y in [a,b].
struct UncertainZero {
    double z = 1.0;
    double a = 1.0;
    double b = 1.0;
};

// Delta_y(s) = (s + q)/(s + y), y in [a,b].
struct UncertainPole {
    double q = 1.0;
    double a = 1.0;
    double b = 1.0;
};

// Finite set of stable rational disturbances.
struct SampledFamily {
    std::vector<RationalFunction> members;
};

class DisturbanceFamily;

// Products Delta_1 Delta_2 ... with independent members.
struct CompositeFamily {
    std::vector<DisturbanceFamily> members;
};

// One coordinate of a parameter box. Discrete axes take the integer values lo..hi.
struct ParamAxis {
    double lo = 0.0;
    double hi = 0.0;
    bool discrete = false;
};

enum class Region { Gamma, Lambda };

struct RegionSample {
    double omega = 0.0;
    std::vector<cplx> boundary_points;
    std::vector<int> segment_ids;  // parallel to boundary_points
    bool is_empty = false;
};

struct LambdaInfinityResult {
    bool contains = false;
    // false when decided by the large-|s| sweep instead of a closed form
    bool exact = true;
};

struct AssumptionReport {
    bool passed = true;
    bool identity_member = true;
    bool norm_bound_ok = true;
    std::vector<std::string> violations;
};

class DisturbanceFamily {
public:
    using Variant = std::variant<GainPhaseDelayBox, UncertainZero, UncertainPole, CompositeFamily, SampledFamily>;

    // Throws InvalidFamily for k < 1, phi_max < 0, t_max < 0, a <= 0, b < a,
    // nonpositive nominal zero/pole, empty or unstable sampled members.
    explicit DisturbanceFamily(Variant v);

    static DisturbanceFamily box(double k, double phi_max, double t_max) {
        return DisturbanceFamily(GainPhaseDelayBox{k, phi_max, t_max});
    }
    static DisturbanceFamily uncertain_zero(double z, double a, double b) {
        return DisturbanceFamily(UncertainZero{z, a, b});
    }
    static DisturbanceFamily uncertain_pole(double q, double a, double b) {
        return DisturbanceFamily(UncertainPole{q, a, b});
    }
    static DisturbanceFamily sampled(std::vector<RationalFunction> members) {
        return DisturbanceFamily(SampledFamily{std::move(members)});
    }
    static DisturbanceFamily composite(std::vector<DisturbanceFamily> members) {
        return DisturbanceFamily(CompositeFamily{std::move(members)});
    }
    // The singleton {I}.
    static DisturbanceFamily identity() { return sampled({RationalFunction::constant(1.0)}); }

    [[nodiscard]] const Variant& variant() const { return v_; }
    [[nodiscard]] std::string name() const;

    // sup over the family of the H-infinity norm
    [[nodiscard]] double norm_bound() const { return norm_bound_; }

    // Natural parameters: box (kappa, theta, tau); zero/pole (y); sampled (index);
    // composite concatenates its members.
    [[nodiscard]] std::vector<ParamAxis> natural_axes() const;
    [[nodiscard]] std::vector<double> identity_params() const;
    // Value of the selected member at s (Re s >= 0). Throws ParamsOutOfBox.
    [[nodiscard]] cplx delta(std::span<const double> params, cplx s) const;

    // Parameters of the value set D(w) = { Delta(iw) }: box (kappa, psi) with
    // Delta(iw) = kappa e^{i psi}; other families as natural_axes().
    [[nodiscard]] std::vector<ParamAxis> value_axes(double omega) const;
    [[nodiscard]] cplx value(std::span<const double> params, double omega) const;

    // D(w) sampled on a grid with n points per continuous axis.
    [[nodiscard]] std::vector<cplx> sample_values(double omega, int n_per_axis) const;

    // Distance from z to Gamma(iw) or Lambda(iw); +inf when the region is empty.
    [[nodiscard]] double region_distance(Region region, double omega, cplx z) const;
    [[nodiscard]] bool region_contains(Region region, double omega, cplx z, double tol) const {
        return region_distance(region, omega, z) <= tol;
    }
    [[nodiscard]] RegionSample region_boundary(Region region, double omega, int n_points) const;

    // sup over the family of |Delta(iw) - 1|
    [[nodiscard]] double phi(double omega) const;

    [[nodiscard]] LambdaInfinityResult lambda_infinity_contains(cplx z, double tol = 1e-9) const;

    // Grid resolution for the brute-force path used by composite families.
    int grid_points = 64;

private:
    [[nodiscard]] double compute_norm_bound() const;

    Variant v_;
    double norm_bound_ = 1.0;
};

// Free-function surface mirroring the member API.
cplx delta_eval(const DisturbanceFamily& f, std::span<const double> params, cplx s);

bool gamma_contains(const DisturbanceFamily& f, double omega, cplx z, double tol);
RegionSample gamma_boundary(const DisturbanceFamily& f, double omega, int n_points);
double dist_to_gamma(const DisturbanceFamily& f, double omega, cplx z);

bool lambda_contains(const DisturbanceFamily& f, double omega, cplx z, double tol);
RegionSample lambda_boundary(const DisturbanceFamily& f, double omega, int n_points);
double dist_to_lambda(const DisturbanceFamily& f, double omega, cplx z);

double phi(const DisturbanceFamily& f, double omega);

inline constexpr double kDistFloor = 1e-9;
// 1/dist(Lambda(iw), T0(iw)); 0 when Lambda(iw) is empty.
// Throws ShiftTouchesRegion when the distance is at most kDistFloor.
double phi_shifted(const DisturbanceFamily& f, double omega, const RationalFunction& t0);

LambdaInfinityResult lambda_infinity_contains(const DisturbanceFamily& f, cplx z);

AssumptionReport check_assumptions(const DisturbanceFamily& f, const PoleZeroData& pz);

}  // namespace robust_interp
