// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <complex>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "robust_interp/cli.hpp"
#include "robust_interp/errors.hpp"
#include "robust_interp/grid_kernels.hpp"
#include "robust_interp/nevanlinna_pick.hpp"
#include "robust_interp/outer_weight.hpp"
#include "robust_interp/synthesis.hpp"
#include "robust_interp/winding.hpp"

using namespace robust_interp;
namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

RationalFunction plant() {
    return {Polynomial{0.01, -0.098341, -0.01659}, Polynomial{1.0, 0.19, 0.03058539, -0.006789761}};
}

const DisturbanceFamily& box() {
    static const DisturbanceFamily f = DisturbanceFamily::box(1.6, pi / 20, 1.5);
    return f;
}

SynthesisProblem box_problem() {
    SynthesisProblem p;
    p.plant = plant();
    p.family = box();
    return p;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(4);
    s << v;
    return s.str();
}

Outcome criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    const WeightedData wd = prepare(box_problem());
    const double elapsed = seconds_since(t0);
    bool nodes_ok = wd.data_eps.size() == 2 && std::abs(wd.data_eps.nodes[0] - 0.1081) < 1e-3 &&
                    std::abs(wd.data_eps.nodes[1] - 10.0) < 1e-9;
    const bool pass = nodes_ok && wd.feasible_eps && wd.pick_eps.min_eigenvalue > 0.0 && elapsed < 10.0;
    return {pass, "Pick min eigenvalue " + fmt(wd.pick_eps.min_eigenvalue) + " at eps " + fmt(wd.epsilon) + ", " +
                      fmt(elapsed) + " s"};
}

Outcome criterion2() {
    const RationalFunction k(
        Polynomial{-75.76, -300.8, -1154, -2182, -3347, -3420, -2590, -1407, -526.3, -135, -21.03, -1.823},
        Polynomial{0.1, 4.173, 28.49, 101.2, 261.3, 387.9, 467.9, 338.7, 192.8, 63.07, 13.44, 1.169});
    const fs::path configs = ROBUST_INTERP_CONFIG_DIR;
    const fs::path out = fs::temp_directory_path() / ("robust_interp_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(out);
    CliOptions opts;
    opts.config_path = (configs / "box_delay.json").string();
    opts.controller_path = (configs / "published_controller.json").string();
    opts.out_dir = out.string();
    opts.quiet = true;
    std::ostringstream sink_out, sink_err;
    const int code = cmd_verify(opts, sink_out, sink_err);
    fs::remove_all(out);

    const VerificationReport rep = verify(plant(), k, box(), FrequencyGridSpec{});
    // sampled Gamma at the plotted frequencies, straight from the family definition
    const RationalFunction l = plant() * k;
    double snapshot_min = INFINITY;
    for (double w : {0.9138, 1.110, 2.024}) {
        const std::complex<double> pk = l.at_frequency(w);
        for (int i = 0; i <= 30; ++i)
            for (int j = 0; j <= 30; ++j)
                for (int m = 0; m <= 300; ++m) {
                    const double kappa = 1.0 + 0.6 * i / 30, theta = -pi / 20 + pi / 10 * j / 30, tau = 1.5 * m / 300;
                    const auto g = -std::exp(std::complex<double>(0.0, theta + w * tau)) / kappa;
                    snapshot_min = std::min(snapshot_min, std::abs(pk - g));
                }
    }
    const bool pass = code == 0 && rep.winding == 1 && rep.expected_winding == 1 && rep.nyquist_margin > 0.0 &&
                      rep.nyquist_margin > rep.margin_threshold && snapshot_min > 0.0;
    return {pass, "exit " + std::to_string(code) + ", winding " + std::to_string(rep.winding) + " = 1 + " +
                      std::to_string(rep.controller_unstable_poles) + ", margin " + fmt(rep.nyquist_margin) +
                      " at w = " + fmt(rep.nyquist_margin_omega) + ", snapshot distance " + fmt(snapshot_min)};
}

Outcome criterion3() {
    const RationalFunction t(
        Polynomial{-7.576, 47.93, 171.6, 881.1, 1574, 2481, 2322, 1601, 731.5, 194.2, 29.03},
        Polynomial{1, 33.88, 321.5, 1108, 3230, 4781, 6208, 4585, 2787, 957, 223, 21.41});
    const double r_pole = std::abs(t(0.1081) - 1.0);
    const double r_zero = std::abs(t(10.0));
    return {r_pole <= 1e-2 && r_zero <= 1e-2, "|T(0.1081) - 1| = " + fmt(r_pole) + ", |T(10)| = " + fmt(r_zero)};
}

Outcome criterion4() {
    const auto prob = box_problem();
    const SynthesisResult res = synthesize(prob);
    const PoleZeroData pz = classify(prob.plant);
    double worst = 0.0;
    for (const auto& p : pz.unstable_poles) worst = std::max(worst, std::abs(res.t(p) - 1.0));
    for (const auto& z : pz.nonmin_phase_zeros) worst = std::max(worst, std::abs(res.t(z)));
    bool stable = true;
    for (const auto& p : res.t.poles()) stable &= p.real() < 0.0;
    const auto& r = res.report;
    const bool pass = r.passed && r.nyquist_margin > r.margin_threshold && worst <= 1e-6 && stable &&
                      res.controller.is_proper();
    return {pass, "K degree " + std::to_string(res.controller.num().degree()) + "/" +
                      std::to_string(res.controller.den().degree()) + ", margin " + fmt(r.nyquist_margin) +
                      ", small-gain sup " + fmt(r.small_gain_sup) + ", residual " + fmt(worst)};
}

Outcome criterion5() {
    const std::vector<DisturbanceFamily> families{
        box(),
        DisturbanceFamily::uncertain_zero(2.0, 1.0, 1.5),
        DisturbanceFamily::uncertain_pole(1.0, 0.5, 2.0),
        DisturbanceFamily::sampled({RationalFunction::constant(1.0), RationalFunction(Polynomial{2.0}, Polynomial{1.0, 1.0})}),
        DisturbanceFamily::composite({DisturbanceFamily::box(1.3, 0.1, 0.5), DisturbanceFamily::uncertain_zero(2.0, 1.0, 1.5)}),
    };
    const auto omega = log_grid(1e-4, 1e4, 10000);
    bool bounds_ok = true;
    double worst_product = 0.0;
    for (const auto& f : families) {
        const double n = f.norm_bound();
        const auto ph = phi_on_grid(f, omega);
        std::vector<std::complex<double>> origin(omega.size(), 0.0);
        const auto dist = region_distance_grid(f, Region::Lambda, omega, origin);
        for (std::size_t i = 0; i < omega.size(); ++i) {
            bounds_ok &= ph[i] >= 0.0 && ph[i] <= n + 1.0;
            if (std::isfinite(dist[i]) && ph[i] > 0.0) worst_product = std::max(worst_product, std::abs(ph[i] * dist[i] - 1.0));
        }
    }
    return {bounds_ok && worst_product <= 1e-6,
            std::to_string(families.size()) + " families x 10^4 frequencies, max |phi dist - 1| = " + fmt(worst_product)};
}

Outcome criterion6() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst_const = 0.0, worst_rat = 0.0;
    const WeightFunction c([](double) { return 3.0; }, 1e-3);
    for (std::complex<double> s : {std::complex<double>(1.0), {0.2, 4.0}, {25.0, -3.0}})
        worst_const = std::max(worst_const, std::abs(outer_eval(c, s) - 3.0));
    for (auto [a, b] : {std::pair{2.0, 1.0}, std::pair{3.0, 2.0}}) {
        const WeightFunction w([a, b](double x) { return std::sqrt((x * x + a * a) / (x * x + b * b)); }, 1e-6);
        for (std::complex<double> s : {std::complex<double>(1.0), {2.0, 0.0}, {0.5, 1.5}, {3.0, -7.0}})
            worst_rat = std::max(worst_rat, std::abs(outer_eval(w, s) - (s + a) / (s + b)));
    }
    const double elapsed = seconds_since(t0);
    return {worst_const <= 1e-6 && worst_rat <= 1e-4 && elapsed < 30.0,
            "constant error " + fmt(worst_const) + ", rational error " + fmt(worst_rat) + ", " + fmt(elapsed) + " s"};
}

Outcome criterion7() {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int feasible = 0, agree = 0, tested = 0;
    double worst_residual = 0.0, worst_sup = 0.0;
    while (tested < 200) {
        const int n = 1 + static_cast<int>(u(rng) * 6);
        InterpolationData d;
        while (static_cast<int>(d.size()) < n) {
            const double r = std::sqrt(u(rng));
            if (n - static_cast<int>(d.size()) >= 2 && u(rng) < 0.5) {
                const std::complex<double> x(0.1 + 3.0 * u(rng), 0.1 + 3.0 * u(rng));
                const auto w = r * std::exp(std::complex<double>(0.0, 2.0 * pi * u(rng)));
                d.add(x, w);
                d.add(std::conj(x), std::conj(w));
            } else {
                d.add(0.1 + 3.0 * u(rng), (u(rng) < 0.5 ? -1.0 : 1.0) * r);
            }
        }
        bool close = false;
        for (std::size_t i = 0; i < d.size(); ++i)
            for (std::size_t j = i + 1; j < d.size(); ++j) close |= std::abs(d.nodes[i] - d.nodes[j]) < 0.05;
        if (close) continue;
        ++tested;
        const bool verdict = is_feasible(pick_matrix(d));
        bool solved = false;
        try {
            const RationalFunction f = central_solution(d);
            double res = 0.0, sup = std::abs(f.value_at_infinity());
            for (std::size_t j = 0; j < d.size(); ++j) res = std::max(res, std::abs(f(d.nodes[j]) - d.values[j]));
            for (int i = 0; i < 4000; ++i) sup = std::max(sup, std::abs(f.at_frequency(std::tan(-pi / 2 + pi * (i + 0.5) / 4000))));
            worst_residual = std::max(worst_residual, res);
            worst_sup = std::max(worst_sup, sup);
            solved = res <= 1e-8 && sup < 1.0;
        } catch (const Error&) {
            solved = false;
        }
        feasible += verdict;
        agree += verdict == solved;
    }
    return {agree == tested && worst_residual <= 1e-8 && worst_sup < 1.0,
            std::to_string(agree) + "/" + std::to_string(tested) + " verdicts match, " + std::to_string(feasible) +
                " feasible, max residual " + fmt(worst_residual) + ", max sup " + fmt(worst_sup)};
}

// The imaginary axis traversed upwards bounds the right half plane clockwise,
// so the clockwise encirclements of 0 count Z - P.
Outcome criterion8() {
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    int matched = 0, tested = 0;
    while (tested < 100) {
        const int n = 1 + static_cast<int>((u(rng) + 3.0) / 6.0 * 5.0 - 1e-9);
        auto roots = [&] {
            std::vector<std::complex<double>> r;
            while (static_cast<int>(r.size()) < n) {
                if (n - static_cast<int>(r.size()) >= 2 && u(rng) > 0) {
                    const std::complex<double> z(u(rng), std::abs(u(rng)) + 0.05);
                    r.push_back(z);
                    r.push_back(std::conj(z));
                } else {
                    r.push_back(u(rng));
                }
            }
            return r;
        };
        const auto zr = roots(), pr = roots();
        bool degenerate = false;
        for (const auto& z : zr) degenerate |= std::abs(z.real()) < 0.05;
        for (const auto& p : pr) degenerate |= std::abs(p.real()) < 0.05;
        for (const auto& z : zr)
            for (const auto& p : pr) degenerate |= std::abs(z - p) < 0.05;
        if (degenerate) continue;
        ++tested;
        const RationalFunction f(Polynomial::from_roots(zr, 2.0), Polynomial::from_roots(pr));
        // brute-force root count from the constructed factors
        int z_rhp = 0, p_rhp = 0;
        for (const auto& z : zr) z_rhp += z.real() > 0;
        for (const auto& p : pr) p_rhp += p.real() > 0;
        matched += -nyquist_winding(f, 0.0) == z_rhp - p_rhp;
    }
    return {matched == tested, std::to_string(matched) + "/" + std::to_string(tested) +
                                   " random functions: clockwise encirclements of 0 = Z - P"};
}

// z = 1/(1 - d) with every phase reachable: z is in Lambda iff 1 <= |1 - 1/z| <= k.
// The disc is the part of the complement with |1 - 1/z| > k; the gain floor
// also removes the half-plane Re z > 1/2 (|1 - 1/z| < 1).
Outcome criterion9() {
    const double k = 1.6;
    const std::complex<double> c(-1.0 / (k * k - 1.0), 0.0);
    const double r = k / (k * k - 1.0);
    const double tol = 1e-6;
    const double w_min = (2 * pi - 2 * pi / 20) / 1.5;
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int lambda_outside = 0, lambda_total = 0, complement_inside = 0, complement_total = 0, halfplane_ok = 0,
        halfplane_total = 0, library_agree = 0, library_total = 0;
    for (int fi = 0; fi < 5; ++fi) {
        const double w = (fi % 2 == 0 ? 1.0 : -1.0) * (w_min + 5.0 * u(rng));
        for (int i = 0; i < 2000; ++i) {
            const double kappa = 1.0 + (k - 1.0) * u(rng);
            const double theta = -pi / 20 + pi / 10 * u(rng);
            const double tau = 1.5 * u(rng);
            const auto d = kappa * std::exp(std::complex<double>(0.0, -theta - w * tau));
            if (std::abs(d - 1.0) < 1e-9) continue;
            const auto z = 1.0 / (1.0 - d);
            ++lambda_total;
            lambda_outside += std::abs(z - c) >= r - tol;
        }
        for (int i = 0; i < 2000; ++i) {
            const std::complex<double> z(-3.0 + 6.0 * u(rng), -3.0 + 6.0 * u(rng));
            const double m = std::abs(1.0 - 1.0 / z);
            const bool member = m >= 1.0 && m <= k;
            if (std::abs(m - 1.0) > tol && std::abs(m - k) > tol) {
                ++library_total;
                library_agree += lambda_contains(box(), w, z, tol) == member;
            }
            if (member) continue;
            if (z.real() <= 0.5) {
                ++complement_total;
                complement_inside += std::abs(z - c) < r + tol;
            } else {
                ++halfplane_total;
                halfplane_ok += !lambda_contains(box(), w, z, 0.0);
            }
        }
    }
    const bool pass = lambda_outside == lambda_total && complement_inside == complement_total &&
                      halfplane_ok == halfplane_total && library_agree == library_total;
    return {pass, "Lambda samples outside disc " + std::to_string(lambda_outside) + "/" + std::to_string(lambda_total) +
                      ", complement (Re z <= 1/2) inside " + std::to_string(complement_inside) + "/" +
                      std::to_string(complement_total) + ", Re z > 1/2 excluded " + std::to_string(halfplane_ok) + "/" +
                      std::to_string(halfplane_total) + ", library membership agrees " +
                      std::to_string(library_agree) + "/" + std::to_string(library_total)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"feasibility of the delay-plant example", criterion1},
        {"published controller passes verify", criterion2},
        {"published interpolant meets the interpolation conditions", criterion3},
        {"synthesized controller passes verify", criterion4},
        {"weight bounds and phi-distance identity", criterion5},
        {"outer-function oracle suite", criterion6},
        {"Nevanlinna-Pick random suite", criterion7},
        {"argument principle", criterion8},
        {"disc characterization of the complement of Lambda", criterion9},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        const auto started = std::chrono::steady_clock::now();
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].first << " ("
                  << o.detail << ") [" << fmt(seconds_since(started)) << " s]" << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
