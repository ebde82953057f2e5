#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "robust_interp/grid_kernels.hpp"

using namespace robust_interp;

namespace {

const DisturbanceFamily& box_family() {
    static const DisturbanceFamily f = DisturbanceFamily::box(1.6, std::numbers::pi / 20, 1.5);
    return f;
}

const DisturbanceFamily& composite_family() {
    static const DisturbanceFamily f = DisturbanceFamily::composite(
        {DisturbanceFamily::box(1.3, 0.1, 0.5), DisturbanceFamily::uncertain_zero(2.0, 1.0, 1.5)});
    return f;
}

const RationalFunction& open_loop() {
    static const RationalFunction f(Polynomial{1.0, 0.5, 0.2, 0.01}, Polynomial{1.0, 1.5, 2.0, 0.6, 0.1, 0.02});
    return f;
}

template <auto Kernel>
void BM_phi(benchmark::State& state) {
    const auto omega = log_grid(1e-3, 1e3, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(box_family(), omega));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Kernel>
void BM_response(benchmark::State& state) {
    const auto omega = log_grid(1e-3, 1e3, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(open_loop(), omega));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Kernel>
void BM_distance(benchmark::State& state) {
    const auto omega = log_grid(1e-2, 1e2, static_cast<int>(state.range(0)));
    const auto z = frequency_response(open_loop(), omega);
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(box_family(), Region::Gamma, omega, z));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Kernel>
void BM_composite_phi(benchmark::State& state) {
    const auto omega = log_grid(1e-2, 1e2, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(composite_family(), omega));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_phi<phi_on_grid_serial>)->Name("phi_on_grid/serial")->Arg(1024)->Arg(8192);
BENCHMARK(BM_phi<phi_on_grid>)->Name("phi_on_grid/parallel")->Arg(1024)->Arg(8192);
BENCHMARK(BM_response<frequency_response_serial>)->Name("frequency_response/serial")->Arg(4096)->Arg(65536);
BENCHMARK(BM_response<frequency_response>)->Name("frequency_response/parallel")->Arg(4096)->Arg(65536);
BENCHMARK(BM_distance<region_distance_grid_serial>)->Name("region_distance_grid/serial")->Arg(1024)->Arg(8192);
BENCHMARK(BM_distance<region_distance_grid>)->Name("region_distance_grid/parallel")->Arg(1024)->Arg(8192);
BENCHMARK(BM_composite_phi<phi_on_grid_serial>)->Name("phi_on_grid_composite/serial")->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_composite_phi<phi_on_grid>)->Name("phi_on_grid_composite/parallel")->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
