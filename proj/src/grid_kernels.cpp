#include "robust_interp/grid_kernels.hpp"

#include <omp.h>

#include <cmath>
#include <cstdlib>
#include <string>

#include "robust_interp/errors.hpp"

namespace robust_interp {

int max_threads() {
    const int available = omp_get_max_threads();
    if (const char* env = std::getenv("ROBUST_INTERP_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && cap > 0) return static_cast<int>(std::min<long>(cap, available));
    }
    return available;
}

std::vector<double> log_grid(double lo, double hi, int n) {
    if (!(lo > 0.0 && hi > lo) || n < 2) throw Error(ErrorCode::DegenerateInput, "log grid needs 0 < lo < hi, n >= 2");
    std::vector<double> out(static_cast<std::size_t>(n));
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (int i = 0; i < n; ++i) out[i] = std::pow(10.0, a + (b - a) * i / (n - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

std::vector<double> linear_grid(double lo, double hi, int n) {
    if (!(hi > lo) || n < 2) throw Error(ErrorCode::DegenerateInput, "linear grid needs lo < hi, n >= 2");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
    out.back() = hi;
    return out;
}

std::vector<double> phi_on_grid(const DisturbanceFamily& f, std::span<const double> omega) {
    std::vector<double> out(omega.size());
    parallel_for(omega.size(), [&](std::size_t i) { out[i] = f.phi(omega[i]); });
    return out;
}

std::vector<double> phi_on_grid_serial(const DisturbanceFamily& f, std::span<const double> omega) {
    std::vector<double> out(omega.size());
    for (std::size_t i = 0; i < omega.size(); ++i) out[i] = f.phi(omega[i]);
    return out;
}

std::vector<cplx> frequency_response(const RationalFunction& f, std::span<const double> omega) {
    std::vector<cplx> out(omega.size());
    parallel_for(omega.size(), [&](std::size_t i) { out[i] = f.at_frequency(omega[i]); });
    return out;
}

std::vector<cplx> frequency_response_serial(const RationalFunction& f, std::span<const double> omega) {
    std::vector<cplx> out(omega.size());
    for (std::size_t i = 0; i < omega.size(); ++i) out[i] = f.at_frequency(omega[i]);
    return out;
}

namespace {

void check_paired(std::span<const double> omega, std::span<const cplx> z) {
    if (omega.size() != z.size())
        throw Error(ErrorCode::DegenerateInput, "frequency and point arrays differ in length");
}

}  // namespace

std::vector<double> region_distance_grid(const DisturbanceFamily& f, Region region, std::span<const double> omega,
                                         std::span<const cplx> z) {
    check_paired(omega, z);
    std::vector<double> out(omega.size());
    parallel_for(omega.size(), [&](std::size_t i) { out[i] = f.region_distance(region, omega[i], z[i]); });
    return out;
}

std::vector<double> region_distance_grid_serial(const DisturbanceFamily& f, Region region,
                                                std::span<const double> omega, std::span<const cplx> z) {
    check_paired(omega, z);
    std::vector<double> out(omega.size());
    for (std::size_t i = 0; i < omega.size(); ++i) out[i] = f.region_distance(region, omega[i], z[i]);
    return out;
}

}  // namespace robust_interp
