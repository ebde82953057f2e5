#include "robust_interp/polynomial.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "robust_interp/errors.hpp"

namespace robust_interp {

namespace {

std::vector<double> strip_leading_zeros(std::vector<double> c) {
    auto first = std::find_if(c.begin(), c.end(), [](double v) { return v != 0.0; });
    c.erase(c.begin(), first);
    return c;
}

template <typename T>
T horner(const std::vector<double>& c, T s) {
    T acc{0.0};
    for (double v : c) acc = acc * s + v;
    return acc;
}

// Parlett-Reinsch balancing; improves eigenvalue accuracy for companion
// matrices whose coefficients span many decades.
template <typename Matrix>
void balance(Matrix& a) {
    const Eigen::Index n = a.rows();
    constexpr double radix = 2.0;
    bool done = false;
    while (!done) {
        done = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            double c = 0.0;
            double r = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix;
            double f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= radix * radix;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= radix * radix;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                a.row(i) /= f;
                a.col(i) *= f;
            }
        }
    }
}

template <typename Coeff>
cplx newton_polish(const std::vector<Coeff>& c, cplx root) {
    auto eval = [&](cplx s, cplx& dp) {
        cplx p{0.0};
        dp = 0.0;
        for (const auto& v : c) {
            dp = dp * s + p;
            p = p * s + cplx(v);
        }
        return p;
    };
    cplx dp;
    cplx p = eval(root, dp);
    for (int it = 0; it < 4; ++it) {
        if (dp == cplx(0.0)) break;
        const cplx candidate = root - p / dp;
        cplx dq;
        const cplx q = eval(candidate, dq);
        if (!(std::abs(q) < std::abs(p))) break;
        root = candidate;
        p = q;
        dp = dq;
    }
    return root;
}

}  // namespace

Polynomial::Polynomial(std::vector<double> coefficients)
    : coeffs_(strip_leading_zeros(std::move(coefficients))) {}

Polynomial Polynomial::monomial(int degree, double c) {
    if (c == 0.0) return {};
    std::vector<double> v(static_cast<std::size_t>(degree) + 1, 0.0);
    v.front() = c;
    return Polynomial(std::move(v));
}

Polynomial Polynomial::from_roots(std::span<const cplx> roots, double leading) {
    Polynomial result = constant(leading);
    for (const cplx& r : roots) {
        const double tiny = 1e-12 * std::max(1.0, std::abs(r));
        if (std::abs(r.imag()) <= tiny) {
            result = result * Polynomial{1.0, -r.real()};
        } else if (r.imag() > 0.0) {
            result = result * Polynomial{1.0, -2.0 * r.real(), std::norm(r)};
        }
    }
    return result;
}

double Polynomial::coeff(int k) const {
    const int d = degree();
    if (k < 0 || k > d) return 0.0;
    return coeffs_[static_cast<std::size_t>(d - k)];
}

double Polynomial::scale() const {
    double m = 0.0;
    for (double v : coeffs_) m = std::max(m, std::abs(v));
    return m;
}

cplx Polynomial::operator()(cplx s) const { return horner(coeffs_, s); }

double Polynomial::operator()(double s) const { return horner(coeffs_, s); }

double Polynomial::magnitude_bound(double abs_s) const {
    double acc = 0.0;
    for (double v : coeffs_) acc = acc * abs_s + std::abs(v);
    return acc;
}

Polynomial Polynomial::derivative() const {
    const int d = degree();
    if (d <= 0) return {};
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) out.push_back(coeffs_[static_cast<std::size_t>(i)] * (d - i));
    return Polynomial(std::move(out));
}

Polynomial Polynomial::trimmed(double rel_tol) const {
    const double cutoff = rel_tol * scale();
    auto first = std::find_if(coeffs_.begin(), coeffs_.end(),
                              [cutoff](double v) { return std::abs(v) > cutoff; });
    return Polynomial(std::vector<double>(first, coeffs_.end()));
}

Polynomial::Division Polynomial::divide(const Polynomial& divisor) const {
    if (divisor.is_zero()) throw Error(ErrorCode::DegenerateInput, "division by the zero polynomial");
    const int n = degree();
    const int m = divisor.degree();
    if (n < m) return {Polynomial{}, *this};
    std::vector<double> rem = coeffs_;
    std::vector<double> quot(static_cast<std::size_t>(n - m + 1), 0.0);
    const auto& d = divisor.coeffs_;
    for (int i = 0; i <= n - m; ++i) {
        const double q = rem[static_cast<std::size_t>(i)] / d.front();
        quot[static_cast<std::size_t>(i)] = q;
        for (int j = 0; j <= m; ++j) rem[static_cast<std::size_t>(i + j)] -= q * d[static_cast<std::size_t>(j)];
    }
    std::vector<double> r(rem.begin() + (n - m + 1), rem.end());
    return {Polynomial(std::move(quot)), Polynomial(std::move(r))};
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    const auto& x = a.coeffs_;
    const auto& y = b.coeffs_;
    std::vector<double> out(std::max(x.size(), y.size()), 0.0);
    const std::size_t ox = out.size() - x.size();
    const std::size_t oy = out.size() - y.size();
    for (std::size_t i = 0; i < x.size(); ++i) out[ox + i] += x[i];
    for (std::size_t i = 0; i < y.size(); ++i) out[oy + i] += y[i];
    return Polynomial(std::move(out));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-1.0 * b); }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<double> out(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
        for (std::size_t j = 0; j < b.coeffs_.size(); ++j) out[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return Polynomial(std::move(out));
}

Polynomial operator*(double c, const Polynomial& p) {
    std::vector<double> out = p.coeffs_;
    for (double& v : out) v *= c;
    return Polynomial(std::move(out));
}

std::vector<cplx> find_roots(const Polynomial& p) {
    if (p.is_zero()) throw Error(ErrorCode::DegenerateInput, "roots of the zero polynomial");
    std::vector<double> c = p.coefficients();
    std::vector<cplx> roots;
    // exact zero roots
    while (c.size() > 1 && c.back() == 0.0) {
        c.pop_back();
        roots.emplace_back(0.0, 0.0);
    }
    const auto n = static_cast<Eigen::Index>(c.size()) - 1;
    if (n == 0) return roots;
    if (n == 1) {
        roots.emplace_back(-c[1] / c[0], 0.0);
        return roots;
    }
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) companion(0, j) = -c[static_cast<std::size_t>(j + 1)] / c[0];
    for (Eigen::Index i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    balance(companion);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorCode::DegenerateInput, "companion eigenvalue iteration failed");
    const auto& ev = solver.eigenvalues();
    for (Eigen::Index i = 0; i < n; ++i) {
        const cplx r = ev(i);
        if (r.imag() == 0.0) {
            const cplx polished = newton_polish(c, r);
            roots.emplace_back(polished.real(), 0.0);
        } else if (r.imag() > 0.0) {
            const cplx polished = newton_polish(c, r);
            roots.push_back(polished);
            roots.push_back(std::conj(polished));
        }
    }
    return roots;
}

std::vector<cplx> find_roots(std::span<const cplx> coefficients) {
    std::vector<cplx> c(coefficients.begin(), coefficients.end());
    while (!c.empty() && c.front() == cplx(0.0)) c.erase(c.begin());
    if (c.empty()) throw Error(ErrorCode::DegenerateInput, "roots of the zero polynomial");
    std::vector<cplx> roots;
    while (c.size() > 1 && c.back() == cplx(0.0)) {
        c.pop_back();
        roots.emplace_back(0.0, 0.0);
    }
    const auto n = static_cast<Eigen::Index>(c.size()) - 1;
    if (n == 0) return roots;
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) companion(0, j) = -c[static_cast<std::size_t>(j + 1)] / c[0];
    for (Eigen::Index i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    balance(companion);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorCode::DegenerateInput, "companion eigenvalue iteration failed");
    for (Eigen::Index i = 0; i < n; ++i) roots.push_back(newton_polish(c, solver.eigenvalues()(i)));
    return roots;
}

}  // namespace robust_interp
