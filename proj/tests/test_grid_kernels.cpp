#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <omp.h>
#include <stdexcept>

#include "oracles.hpp"
#include "robust_interp/grid_kernels.hpp"
#include "robust_interp/outer_weight.hpp"

using namespace robust_interp;

namespace {

const DisturbanceFamily kBox = DisturbanceFamily::box(1.6, oracle::pi / 20, 1.5);

struct EnvGuard {
    explicit EnvGuard(const char* value) { setenv("ROBUST_INTERP_THREADS", value, 1); }
    ~EnvGuard() { unsetenv("ROBUST_INTERP_THREADS"); }
};

}  // namespace

TEST_CASE("grids") {
    const auto g = log_grid(1e-3, 1e3, 7);
    REQUIRE(g.size() == 7);
    CHECK(g.front() == doctest::Approx(1e-3));
    CHECK(g[3] == doctest::Approx(1.0));
    CHECK(g.back() == doctest::Approx(1e3));
    const auto l = linear_grid(0.0, 1.0, 5);
    CHECK(l == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
}

TEST_CASE("parallel kernels equal their serial references") {
    const auto omega = log_grid(1e-3, 1e3, 3000);
    CHECK(phi_on_grid(kBox, omega) == phi_on_grid_serial(kBox, omega));

    const RationalFunction f(Polynomial{1.0, 2.0}, Polynomial{1.0, 0.3, 4.0});
    CHECK(frequency_response(f, omega) == frequency_response_serial(f, omega));

    const auto z = frequency_response_serial(f, omega);
    for (Region r : {Region::Gamma, Region::Lambda})
        CHECK(region_distance_grid(kBox, r, omega, z) == region_distance_grid_serial(kBox, r, omega, z));
}

TEST_CASE("thread cap from the environment") {
    const int natural = omp_get_max_threads();
    {
        EnvGuard env("1");
        CHECK(max_threads() == 1);
    }
    {
        EnvGuard env("3");
        CHECK(max_threads() == std::min(3, natural));
    }
    {
        EnvGuard env("not-a-number");
        CHECK(max_threads() == natural);
    }
    {
        EnvGuard env("0");
        CHECK(max_threads() == natural);
    }
    CHECK(max_threads() == natural);
}

TEST_CASE("parallel_for visits every index and propagates exceptions") {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) CHECK(h.load() == 1);

    CHECK_THROWS_AS(parallel_for(100,
                                 [](std::size_t i) {
                                     if (i == 57) throw std::runtime_error("boom");
                                 }),
                    std::runtime_error);
}

TEST_CASE("weight memo is consistent under concurrent use") {
    const WeightFunction w(kBox, std::nullopt, 1e-3);
    const auto omega = log_grid(1e-3, 1e3, 2000);
    std::vector<double> a(omega.size()), b(omega.size());
    parallel_for(omega.size(), [&](std::size_t i) { a[i] = w(omega[i]); });
    parallel_for(omega.size(), [&](std::size_t i) { b[i] = w(omega[i]); });
    CHECK(a == b);
    for (std::size_t i = 0; i < omega.size(); ++i) CHECK(a[i] == std::max(phi(kBox, omega[i]), 1e-3));
}
