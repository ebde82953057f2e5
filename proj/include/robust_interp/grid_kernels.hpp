#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <vector>

#include "robust_interp/rational.hpp"
#include "robust_interp/uncertainty.hpp"

namespace robust_interp {

// Thread count for parallel kernels: omp_get_max_threads(), capped by the
// ROBUST_INTERP_THREADS environment variable when it holds a positive integer.
int max_threads();

// Runs body(i) for i in [0, n) across threads. The first exception thrown by
// any iteration is rethrown on the calling thread after the loop finishes.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
    std::exception_ptr failure;
    std::mutex guard;
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 8) num_threads(max_threads())
    for (long long i = 0; i < count; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard lock(guard);
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
}

std::vector<double> log_grid(double lo, double hi, int n);
std::vector<double> linear_grid(double lo, double hi, int n);

// phi(iw) at each grid frequency.
std::vector<double> phi_on_grid(const DisturbanceFamily& f, std::span<const double> omega);
std::vector<double> phi_on_grid_serial(const DisturbanceFamily& f, std::span<const double> omega);

// f(iw) at each grid frequency.
std::vector<cplx> frequency_response(const RationalFunction& f, std::span<const double> omega);
std::vector<cplx> frequency_response_serial(const RationalFunction& f, std::span<const double> omega);

// dist(region(iw_j), z_j) for paired frequencies and points.
std::vector<double> region_distance_grid(const DisturbanceFamily& f, Region region, std::span<const double> omega,
                                         std::span<const cplx> z);
std::vector<double> region_distance_grid_serial(const DisturbanceFamily& f, Region region,
                                                std::span<const double> omega, std::span<const cplx> z);

}  // namespace robust_interp
