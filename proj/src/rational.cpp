#include "robust_interp/rational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "robust_interp/errors.hpp"

namespace robust_interp {

namespace {

// Common roots of num and den, as a conjugate-closed list taken from num.
std::vector<cplx> common_roots(const std::vector<cplx>& num_roots, std::vector<cplx> den_roots) {
    std::vector<cplx> common;
    for (const cplx& r : num_roots) {
        // each conjugate pair is handled through its upper member
        if (r.imag() < 0.0) continue;
        const double tol = Tolerances::cancel * std::max(1.0, std::abs(r));
        auto best = den_roots.end();
        double best_dist = std::numeric_limits<double>::infinity();
        for (auto it = den_roots.begin(); it != den_roots.end(); ++it) {
            const double d = std::abs(*it - r);
            if (d < best_dist) {
                best_dist = d;
                best = it;
            }
        }
        if (best == den_roots.end() || best_dist > tol) continue;
        const cplx matched = *best;
        den_roots.erase(best);
        if (r.imag() > 0.0) {
            // drop the partner conjugate from the pool as well
            auto partner = std::min_element(den_roots.begin(), den_roots.end(), [&](cplx a, cplx b) {
                return std::abs(a - std::conj(matched)) < std::abs(b - std::conj(matched));
            });
            if (partner != den_roots.end()) den_roots.erase(partner);
            common.push_back(r);
            common.push_back(std::conj(r));
        } else {
            common.push_back(r);
        }
    }
    return common;
}

}  // namespace

RationalFunction::RationalFunction(Polynomial num, Polynomial den)
    : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw Error(ErrorCode::DegenerateInput, "rational function with zero denominator");
    if (num_.is_zero()) {
        den_ = Polynomial::constant(1.0);
        return;
    }
    if (num_.degree() < 1 || den_.degree() < 1) return;
    const auto common = common_roots(find_roots(num_), find_roots(den_));
    if (common.empty()) return;
    const Polynomial factor = Polynomial::from_roots(common);
    num_ = num_.divide(factor).quotient;
    den_ = den_.divide(factor).quotient;
}

int RationalFunction::relative_degree() const {
    if (num_.is_zero()) return std::numeric_limits<int>::max();
    return den_.degree() - num_.degree();
}

double RationalFunction::value_at_infinity() const {
    const int rd = relative_degree();
    if (rd < 0) throw Error(ErrorCode::DegenerateInput, "improper function has no finite limit at infinity");
    if (rd > 0) return 0.0;
    return num_.leading() / den_.leading();
}

cplx RationalFunction::operator()(cplx s) const {
    const cplx d = den_(s);
    if (std::abs(d) <= Tolerances::pole * den_.magnitude_bound(std::abs(s)))
        throw Error(ErrorCode::EvaluationAtPole, "denominator vanishes at the evaluation point");
    return num_(s) / d;
}

std::vector<cplx> RationalFunction::poles() const {
    if (den_.degree() < 1) return {};
    return find_roots(den_);
}

std::vector<cplx> RationalFunction::zeros() const {
    if (num_.degree() < 1) return {};
    return find_roots(num_);
}

RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
    if (a.den_ == b.den_) return {a.num_ + b.num_, a.den_};
    return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
}

RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) { return a + (-b); }

RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
    return {a.num_ * b.num_, a.den_ * b.den_};
}

RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) {
    if (b.is_zero()) throw Error(ErrorCode::DegenerateInput, "division by the zero function");
    return {a.num_ * b.den_, a.den_ * b.num_};
}

RationalFunction operator-(const RationalFunction& a) { return {-a.num_, a.den_}; }

namespace {

std::vector<cplx> rhp_roots(const std::vector<cplx>& roots, const char* what) {
    std::vector<cplx> out;
    for (const cplx& r : roots) {
        if (std::abs(r.real()) < Tolerances::boundary)
            throw Error(ErrorCode::BoundaryRoot, std::string(what) + " on the imaginary axis");
        if (r.real() > 0.0) out.push_back(r);
    }
    for (std::size_t i = 0; i < out.size(); ++i)
        for (std::size_t j = i + 1; j < out.size(); ++j)
            if (std::abs(out[i] - out[j]) <= Tolerances::distinct * std::max(1.0, std::abs(out[i])))
                throw Error(ErrorCode::RepeatedRoot, std::string("repeated right-half-plane ") + what);
    return out;
}

int count_positive(const std::vector<cplx>& roots) {
    return static_cast<int>(std::count_if(roots.begin(), roots.end(), [](cplx r) { return r.real() > 0.0; }));
}

}  // namespace

PoleZeroData classify(const RationalFunction& plant) {
    PoleZeroData out;
    out.unstable_poles = rhp_roots(plant.poles(), "pole");
    out.nonmin_phase_zeros = rhp_roots(plant.zeros(), "zero");
    out.relative_degree = plant.is_zero() ? 0 : plant.relative_degree();
    return out;
}

int count_rhp_poles(const RationalFunction& f) { return count_positive(f.poles()); }

int count_rhp_zeros(const RationalFunction& f) { return count_positive(f.zeros()); }

cplx mobius_rho(cplx s) {
    const cplx d = 1.0 + s;
    if (std::abs(d) < 1e-300) throw Error(ErrorCode::SingularPoint, "rho is singular at s = -1");
    return s / d;
}

cplx mobius_rho_inv(cplx s) {
    const cplx d = 1.0 - s;
    if (std::abs(d) < 1e-300) throw Error(ErrorCode::SingularPoint, "rho inverse is singular at s = 1");
    return s / d;
}

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::DegenerateInput: return "DegenerateInput";
        case ErrorCode::EvaluationAtPole: return "EvaluationAtPole";
        case ErrorCode::BoundaryRoot: return "BoundaryRoot";
        case ErrorCode::RepeatedRoot: return "RepeatedRoot";
        case ErrorCode::SingularPoint: return "SingularPoint";
        case ErrorCode::CurveTooCoarse: return "CurveTooCoarse";
        case ErrorCode::CenterOnCurve: return "CenterOnCurve";
        case ErrorCode::UnsupportedCurve: return "UnsupportedCurve";
        case ErrorCode::ParamsOutOfBox: return "ParamsOutOfBox";
        case ErrorCode::InvalidFamily: return "InvalidFamily";
        case ErrorCode::ShiftTouchesRegion: return "ShiftTouchesRegion";
        case ErrorCode::QuadratureFailure: return "QuadratureFailure";
        case ErrorCode::FloorNotPositive: return "FloorNotPositive";
        case ErrorCode::FitInfeasible: return "FitInfeasible";
        case ErrorCode::OvershootExcessive: return "OvershootExcessive";
        case ErrorCode::NodeCollision: return "NodeCollision";
        case ErrorCode::InfeasibleData: return "InfeasibleData";
        case ErrorCode::IllConditioned: return "IllConditioned";
        case ErrorCode::AssumptionViolation: return "AssumptionViolation";
        case ErrorCode::Infeasible: return "Infeasible";
        case ErrorCode::CancellationFailure: return "CancellationFailure";
        case ErrorCode::GridTooNarrow: return "GridTooNarrow";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

}  // namespace robust_interp
