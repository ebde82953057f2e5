#pragma once

#include <complex>
#include <span>
#include <vector>

namespace robust_interp {

using cplx = std::complex<double>;

// Real-coefficient polynomial, coefficients stored highest degree first.
// The zero polynomial is stored as an empty coefficient list and has degree -1.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<double> coefficients);
    Polynomial(std::initializer_list<double> coefficients)
        : Polynomial(std::vector<double>(coefficients)) {}

    static Polynomial constant(double c) { return Polynomial(std::vector<double>{c}); }
    static Polynomial monomial(int degree, double c = 1.0);

    // Product of (s - r) over the roots, times `leading`. Complex roots must come
    // in conjugate pairs; each pair becomes one real quadratic factor.
    static Polynomial from_roots(std::span<const cplx> roots, double leading = 1.0);

    [[nodiscard]] int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    [[nodiscard]] bool is_zero() const { return coeffs_.empty(); }
    [[nodiscard]] const std::vector<double>& coefficients() const { return coeffs_; }
    [[nodiscard]] double leading() const { return coeffs_.empty() ? 0.0 : coeffs_.front(); }
    // Coefficient of s^k.
    [[nodiscard]] double coeff(int k) const;
    // Largest coefficient magnitude.
    [[nodiscard]] double scale() const;

    [[nodiscard]] cplx operator()(cplx s) const;
    [[nodiscard]] double operator()(double s) const;
    // sum |c_k| |s|^k, the natural magnitude against which p(s) is compared.
    [[nodiscard]] double magnitude_bound(double abs_s) const;

    [[nodiscard]] Polynomial derivative() const;
    // Drops leading coefficients below rel_tol * scale().
    [[nodiscard]] Polynomial trimmed(double rel_tol) const;

    struct Division;
    [[nodiscard]] Division divide(const Polynomial& divisor) const;

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(double c, const Polynomial& p);
    friend Polynomial operator-(const Polynomial& p) { return -1.0 * p; }
    friend bool operator==(const Polynomial&, const Polynomial&) = default;

private:
    std::vector<double> coeffs_;
};

struct Polynomial::Division {
    Polynomial quotient;
    Polynomial remainder;
};

// All roots with multiplicity, from companion-matrix eigenvalues polished by a
// few Newton steps. Conjugate pairs are returned exactly conjugate.
std::vector<cplx> find_roots(const Polynomial& p);

// Roots of a polynomial with complex coefficients (highest degree first).
std::vector<cplx> find_roots(std::span<const cplx> coefficients);

}  // namespace robust_interp
