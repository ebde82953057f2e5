#pragma once

#include <complex>
#include <vector>

#include "robust_interp/polynomial.hpp"

namespace robust_interp {

struct Tolerances {
    // relative (scaled by root magnitude) distance under which a numerator and
    // denominator root are treated as a common factor
    static constexpr double cancel = 1e-8;
    // |Re r| below this counts as an imaginary-axis root
    static constexpr double boundary = 1e-9;
    // |den(s)| below pole * sum|c_k||s|^k counts as evaluation at a pole
    static constexpr double pole = 1e-14;
    // relative separation below which two right-half-plane roots coincide
    static constexpr double distinct = 1e-7;
};

// Real-coefficient rational function num/den. Construction cancels common
// roots (within Tolerances::cancel) so every instance is reduced.
class RationalFunction {
public:
    RationalFunction() : RationalFunction(Polynomial{}, Polynomial::constant(1.0)) {}
    RationalFunction(Polynomial num, Polynomial den);

    static RationalFunction constant(double c) {
        return {Polynomial::constant(c), Polynomial::constant(1.0)};
    }
    static RationalFunction zero() { return constant(0.0); }

    [[nodiscard]] const Polynomial& num() const { return num_; }
    [[nodiscard]] const Polynomial& den() const { return den_; }
    [[nodiscard]] bool is_zero() const { return num_.is_zero(); }

    // deg(den) - deg(num); the zero function is treated as infinitely strictly proper
    [[nodiscard]] int relative_degree() const;
    [[nodiscard]] bool is_proper() const { return relative_degree() >= 0; }
    [[nodiscard]] bool is_strictly_proper() const { return relative_degree() > 0; }
    // Limit as |s| -> infinity; requires a proper function.
    [[nodiscard]] double value_at_infinity() const;

    [[nodiscard]] cplx operator()(cplx s) const;
    [[nodiscard]] cplx at_frequency(double omega) const { return (*this)(cplx(0.0, omega)); }

    [[nodiscard]] std::vector<cplx> poles() const;
    [[nodiscard]] std::vector<cplx> zeros() const;

    friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b);
    friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b);
    friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b);
    friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b);
    friend RationalFunction operator-(const RationalFunction& a);

private:
    Polynomial num_;
    Polynomial den_;
};

// Right-half-plane structure of a plant.
struct PoleZeroData {
    std::vector<cplx> unstable_poles;
    std::vector<cplx> nonmin_phase_zeros;
    int relative_degree = 0;
};

// Throws BoundaryRoot for roots on the imaginary axis and RepeatedRoot for
// coincident right-half-plane roots.
PoleZeroData classify(const RationalFunction& plant);

// Number of denominator roots with positive real part (no distinctness checks).
int count_rhp_poles(const RationalFunction& f);
int count_rhp_zeros(const RationalFunction& f);

// s / (1 + s), mapping an open loop to its complementary sensitivity.
cplx mobius_rho(cplx s);
// s / (1 - s)
cplx mobius_rho_inv(cplx s);

}  // namespace robust_interp
