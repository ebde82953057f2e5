#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "robust_interp/polynomial.hpp"
#include "test_util.hpp"

using namespace robust_interp;

namespace {

// Greedy matching of computed roots against the true ones.
double max_root_error(std::vector<cplx> got, const std::vector<cplx>& want) {
    REQUIRE(got.size() == want.size());
    double worst = 0.0;
    for (const cplx& w : want) {
        auto it = std::min_element(got.begin(), got.end(),
                                   [&](cplx a, cplx b) { return std::abs(a - w) < std::abs(b - w); });
        worst = std::max(worst, std::abs(*it - w) / std::max(1.0, std::abs(w)));
        got.erase(it);
    }
    return worst;
}

}  // namespace

TEST_CASE("polynomial arithmetic") {
    const Polynomial p{1.0, 2.0, 3.0};
    const Polynomial q{1.0, -1.0};
    CHECK((p + q) == Polynomial{1.0, 3.0, 2.0});
    CHECK((p - p).is_zero());
    CHECK((p * q) == Polynomial{1.0, 1.0, 1.0, -3.0});
    CHECK(p.degree() == 2);
    CHECK(Polynomial{}.degree() == -1);
    CHECK(Polynomial{0.0, 0.0, 1.0}.degree() == 0);
    CHECK(p.coeff(0) == 3.0);
    CHECK(p.coeff(2) == 1.0);
    CHECK(p.derivative() == Polynomial{2.0, 2.0});
    CHECK(p(2.0) == doctest::Approx(11.0));
    CHECK(std::abs(p(cplx(0.0, 1.0)) - cplx(2.0, 2.0)) < 1e-15);
}

TEST_CASE("polynomial division") {
    const Polynomial p{1.0, 0.0, -1.0};
    auto d = p.divide(Polynomial{1.0, -1.0});
    CHECK(d.quotient == Polynomial{1.0, 1.0});
    CHECK(d.remainder.is_zero());

    auto e = Polynomial{1.0, 0.0, 1.0}.divide(Polynomial{1.0, 1.0});
    CHECK(e.quotient == Polynomial{1.0, -1.0});
    CHECK(e.remainder == Polynomial{2.0});

    CHECK_ERROR_CODE(p.divide(Polynomial{}), ErrorCode::DegenerateInput);
}

TEST_CASE("find_roots examples") {
    SUBCASE("s^2 + 1") {
        auto r = find_roots(Polynomial{1.0, 0.0, 1.0});
        CHECK(max_root_error(r, {cplx(0, 1), cplx(0, -1)}) < 1e-12);
    }
    SUBCASE("s + 1") {
        auto r = find_roots(Polynomial{1.0, 1.0});
        REQUIRE(r.size() == 1);
        CHECK(std::abs(r[0] + 1.0) < 1e-14);
    }
    SUBCASE("plant denominator has one real unstable root") {
        auto r = find_roots(Polynomial{1.0, 0.19, 0.03058539, -0.006789761});
        REQUIRE(r.size() == 3);
        int rhp = 0;
        for (const cplx& z : r) {
            if (z.real() > 0) {
                ++rhp;
                CHECK(std::abs(z.imag()) < 1e-12);
            }
            CHECK(std::abs(Polynomial{1.0, 0.19, 0.03058539, -0.006789761}(z)) < 1e-12);
        }
        CHECK(rhp == 1);
    }
    SUBCASE("conjugate pairs are exact") {
        auto r = find_roots(Polynomial{1.0, 2.0, 5.0});
        REQUIRE(r.size() == 2);
        CHECK(r[0] == std::conj(r[1]));
    }
    SUBCASE("zero polynomial") { CHECK_ERROR_CODE(find_roots(Polynomial{}), ErrorCode::DegenerateInput); }
    SUBCASE("constant has no roots") { CHECK(find_roots(Polynomial{3.0}).empty()); }
}

TEST_CASE("find_roots reconstructs random polynomials up to degree 12") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::uniform_int_distribution<int> deg(1, 12);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = deg(rng);
        std::vector<cplx> roots;
        while (static_cast<int>(roots.size()) < n) {
            if (n - static_cast<int>(roots.size()) >= 2 && u(rng) > 0) {
                const cplx z(u(rng), std::abs(u(rng)) + 0.1);
                roots.push_back(z);
                roots.push_back(std::conj(z));
            } else {
                roots.push_back(u(rng));
            }
        }
        // keep roots apart so conditioning stays reasonable
        bool clustered = false;
        for (std::size_t i = 0; i < roots.size(); ++i)
            for (std::size_t j = i + 1; j < roots.size(); ++j)
                clustered |= std::abs(roots[i] - roots[j]) < 0.05;
        if (clustered) continue;

        const auto c = oracle::poly_from_roots(roots, 1.5);
        std::vector<double> re;
        for (const cplx& v : c) re.push_back(v.real());
        const Polynomial p(re);
        const auto got = find_roots(p);
        REQUIRE(got.size() == roots.size());

        // reconstruct coefficients from the computed roots and compare
        const auto rebuilt = oracle::poly_from_roots(got, 1.5);
        double scale = 0.0, err = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) {
            scale = std::max(scale, std::abs(c[i]));
            err = std::max(err, std::abs(c[i] - rebuilt[i]));
        }
        CHECK(err / scale <= 1e-8);
    }
}

TEST_CASE("from_roots matches the oracle") {
    const std::vector<cplx> roots{cplx(1, 2), cplx(1, -2), -3.0};
    const Polynomial p = Polynomial::from_roots(roots, 2.0);
    const auto c = oracle::poly_from_roots(roots, 2.0);
    REQUIRE(p.degree() == 3);
    for (int i = 0; i <= 3; ++i) CHECK(p.coefficients()[i] == doctest::Approx(c[i].real()));
}

TEST_CASE("complex-coefficient roots") {
    const std::vector<cplx> roots{cplx(1, 1), cplx(-2, 0.5)};
    const auto c = oracle::poly_from_roots(roots);
    CHECK(max_root_error(find_roots(std::span<const cplx>(c)), roots) < 1e-12);
}
