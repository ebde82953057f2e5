#include "robust_interp/outer_weight.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <unordered_map>

#include "robust_interp/errors.hpp"
#include "robust_interp/grid_kernels.hpp"

namespace robust_interp {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;
constexpr std::size_t kCacheCap = std::size_t{1} << 20;
constexpr int kJumpScan = 2048;

void require_floor(double eps) {
    if (!(eps > 0.0)) throw Error(ErrorCode::FloorNotPositive, "weight floor epsilon must be positive");
}

}  // namespace

struct WeightFunction::State {
    std::function<double(double)> modulus;
    double epsilon = 0.0;
    double upper = std::numeric_limits<double>::infinity();

    mutable std::shared_mutex mutex;
    mutable std::unordered_map<double, double> cache;

    mutable std::once_flag jumps_once;
    mutable std::vector<double> jumps;
};

WeightFunction::WeightFunction(const DisturbanceFamily& family, std::optional<RationalFunction> t0, double epsilon)
    : state_(std::make_shared<State>()) {
    require_floor(epsilon);
    state_->epsilon = epsilon;
    if (t0) {
        state_->modulus = [family, t0 = *t0](double w) { return phi_shifted(family, w, t0); };
    } else {
        state_->modulus = [family](double w) { return family.phi(w); };
        state_->upper = family.norm_bound() + 1.0;
    }
}

WeightFunction::WeightFunction(std::function<double(double)> modulus, double epsilon)
    : state_(std::make_shared<State>()) {
    require_floor(epsilon);
    state_->epsilon = epsilon;
    state_->modulus = std::move(modulus);
}

double WeightFunction::epsilon() const { return state_->epsilon; }

double WeightFunction::raw(double omega) const { return state_->modulus(std::abs(omega)); }

double WeightFunction::upper_bound() const { return std::max(state_->upper, state_->epsilon); }

double WeightFunction::operator()(double omega) const {
    omega = std::abs(omega);
    {
        std::shared_lock lock(state_->mutex);
        if (auto it = state_->cache.find(omega); it != state_->cache.end()) return it->second;
    }
    const double v = std::max(state_->modulus(omega), state_->epsilon);
    std::unique_lock lock(state_->mutex);
    if (state_->cache.size() < kCacheCap) state_->cache.emplace(omega, v);
    return v;
}

std::size_t WeightFunction::cache_size() const {
    std::shared_lock lock(state_->mutex);
    return state_->cache.size();
}

const std::vector<double>& WeightFunction::jump_frequencies() const {
    std::call_once(state_->jumps_once, [this] {
        const double u_max = kHalfPi * (1.0 - 1e-6);
        std::vector<double> u(kJumpScan + 1);
        std::vector<double> v(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) u[i] = u_max * static_cast<double>(i) / kJumpScan;
        parallel_for(u.size(), [&](std::size_t i) { v[i] = (*this)(std::tan(u[i])); });
        auto rel_gap = [](double a, double b) { return std::abs(a - b) / std::max(a, b); };
        for (std::size_t i = 0; i + 1 < u.size(); ++i) {
            if (rel_gap(v[i], v[i + 1]) <= 0.1) continue;
            double a = u[i], b = u[i + 1], fa = v[i], fb = v[i + 1];
            for (int it = 0; it < 50; ++it) {
                const double m = 0.5 * (a + b);
                const double fm = (*this)(std::tan(m));
                if (rel_gap(fa, fm) >= rel_gap(fm, fb)) {
                    b = m;
                    fb = fm;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            // a steep but continuous stretch shrinks to nothing under bisection
            if (rel_gap(fa, fb) > 0.05) state_->jumps.push_back(std::tan(0.5 * (a + b)));
        }
    });
    return state_->jumps;
}

double default_epsilon(const DisturbanceFamily& family, std::span<const double> omega_grid) {
    const auto v = phi_on_grid(family, omega_grid);
    const double sup = v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
    return 1e-3 * std::max(1.0, sup);
}

double default_epsilon(const DisturbanceFamily& family, const RationalFunction& t0,
                       std::span<const double> omega_grid) {
    std::vector<double> v(omega_grid.size());
    parallel_for(v.size(), [&](std::size_t i) { v[i] = phi_shifted(family, omega_grid[i], t0); });
    const double sup = v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
    return 1e-3 * std::max(1.0, sup);
}

cplx outer_eval(const WeightFunction& w, cplx s, const QuadratureConfig& q) {
    if (!(s.real() > 0.0)) throw Error(ErrorCode::DegenerateInput, "outer function evaluated off the open right half plane");
    // Kernel of the Poisson-type integral in u = atan(w); phi is even so the
    // two halves of the axis are folded onto [0, pi/2).
    auto kernel = [s](double u) {
        const double c = std::cos(u);
        const double sn = std::sin(u);
        return (c - cplx(0.0, 1.0) * s * sn) / (s * c - cplx(0.0, sn));
    };
    auto integrand = [&](double u) -> cplx {
        const double l = std::log(w(std::tan(u)));
        return l * (kernel(u) + kernel(-u));
    };
    std::vector<double> cuts;
    for (int i = 1; i < 8; ++i) cuts.push_back(kHalfPi * i / 8.0);
    for (double j : w.jump_frequencies()) cuts.push_back(std::atan(j));
    cuts.push_back(std::atan(std::abs(s.imag())));
    const QuadratureResult r = integrate(integrand, 0.0, kHalfPi, cuts, q);
    const cplx value = std::exp(r.value / std::numbers::pi);
    if (s.imag() == 0.0) return {value.real(), 0.0};
    return value;
}

double boundary_modulus_check(const WeightFunction& w, std::span<const double> omega_grid,
                              const QuadratureConfig& q) {
    if (omega_grid.empty()) throw Error(ErrorCode::DegenerateInput, "empty frequency grid");
    const auto& jumps = w.jump_frequencies();
    const std::array<double, 3> sigma = {1e-2, 1e-3, 1e-4};
    // Lagrange weights for extrapolating to sigma = 0
    std::array<double, 3> lw{};
    for (int i = 0; i < 3; ++i) {
        double l = 1.0;
        for (int j = 0; j < 3; ++j)
            if (j != i) l *= -sigma[j] / (sigma[i] - sigma[j]);
        lw[i] = l;
    }
    std::vector<double> dev(omega_grid.size(), 0.0);
    parallel_for(omega_grid.size(), [&](std::size_t k) {
        const double om = omega_grid[k];
        for (double j : jumps)
            if (std::abs(std::abs(om) - j) <= 1e-2 * std::max(1.0, j)) return;
        const double target = w(om);
        const double h = 1e-3 * std::max(std::abs(om), 1e-3);
        if (std::abs(w(om + h) - w(om - h)) > 0.05 * target) return;
        double m0 = 0.0;
        for (int i = 0; i < 3; ++i) m0 += lw[i] * std::abs(outer_eval(w, cplx(sigma[i], om), q));
        dev[k] = std::abs(m0 - target) / target;
    });
    return *std::max_element(dev.begin(), dev.end());
}

double RationalWeightApprox::fitted_square(double omega) const {
    const double x = (omega / freq_scale) * (omega / freq_scale);
    return fit_num(x) / fit_den(x);
}

namespace {

// Coefficients lowest degree first -> Polynomial.
Polynomial from_ascending(const Eigen::VectorXd& c) {
    std::vector<double> v(c.data(), c.data() + c.size());
    std::reverse(v.begin(), v.end());
    return Polynomial(std::move(v));
}

// Left-half-plane factor N(s) with |N(iw)|^2 proportional to p((w/scale)^2).
Polynomial stable_factor(const Polynomial& p, double scale) {
    if (p.is_zero()) throw Error(ErrorCode::FitInfeasible, "fitted even polynomial is identically zero");
    const Polynomial trimmed = p.trimmed(1e-13);
    if (trimmed(1.0) <= 0.0 || trimmed(0.0) <= 0.0)
        throw Error(ErrorCode::FitInfeasible, "fitted even polynomial is not positive on the axis");
    const int d = trimmed.degree();
    if (d == 0) return Polynomial::constant(1.0);
    // q(s) = p(-s^2 / scale^2)
    std::vector<double> q(static_cast<std::size_t>(2 * d + 1), 0.0);
    for (int k = 0; k <= d; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        q[static_cast<std::size_t>(2 * (d - k))] = sign * trimmed.coeff(k) / std::pow(scale, 2 * k);
    }
    std::vector<cplx> lhp;
    for (const cplx& r : find_roots(Polynomial(q))) {
        if (std::abs(r.real()) <= 1e-9 * std::max(1.0, std::abs(r)))
            throw Error(ErrorCode::FitInfeasible, "fitted even polynomial vanishes on the imaginary axis");
        if (r.real() < 0.0) lhp.push_back(r);
    }
    if (static_cast<int>(lhp.size()) != d)
        throw Error(ErrorCode::FitInfeasible, "even polynomial roots do not split into +/- pairs");
    return Polynomial::from_roots(lhp);
}

}  // namespace

namespace {

RationalWeightApprox fit_at_degree(const WeightFunction& w, std::span<const double> omega_grid,
                                   const WeightFitOptions& opts) {
    if (opts.degree < 0) throw Error(ErrorCode::DegenerateInput, "fit degree must be >= 0");
    if (omega_grid.size() < 2) throw Error(ErrorCode::DegenerateInput, "fit grid needs at least two points");
    const auto [lo_it, hi_it] = std::minmax_element(omega_grid.begin(), omega_grid.end());
    const double w_lo = *lo_it;
    const double w_hi = *hi_it;
    if (!(w_lo > 0.0)) throw Error(ErrorCode::DegenerateInput, "fit grid must be positive");

    const std::size_t n = omega_grid.size();
    const double scale = std::sqrt(w_lo * w_hi);
    std::vector<double> y(n), x(n);
    parallel_for(n, [&](std::size_t i) {
        const double v = w(omega_grid[i]);
        y[i] = v * v;
        x[i] = (omega_grid[i] / scale) * (omega_grid[i] / scale);
    });

    const int d = opts.degree;
    Eigen::VectorXd a = Eigen::VectorXd::Zero(d + 1);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(d + 1);
    b(0) = 1.0;
    if (d == 0) {
        // relative least squares for a constant
        double s1 = 0.0, s2 = 0.0;
        for (double v : y) {
            s1 += 1.0 / v;
            s2 += 1.0 / (v * v);
        }
        a(0) = s1 / s2;
    } else {
        std::vector<double> b_prev(n, 1.0);
        for (int it = 0; it < opts.iterations; ++it) {
            Eigen::MatrixXd m(static_cast<Eigen::Index>(n), 2 * d + 1);
            Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
            for (std::size_t i = 0; i < n; ++i) {
                const double wt = 1.0 / (y[i] * b_prev[i]);
                double xp = 1.0;
                for (int k = 0; k <= d; ++k) {
                    m(static_cast<Eigen::Index>(i), k) = wt * xp;
                    if (k > 0) m(static_cast<Eigen::Index>(i), d + k) = -wt * y[i] * xp;
                    xp *= x[i];
                }
                rhs(static_cast<Eigen::Index>(i)) = wt * y[i];
            }
            Eigen::VectorXd col_scale = m.colwise().norm().transpose();
            for (Eigen::Index c = 0; c < col_scale.size(); ++c)
                if (col_scale(c) == 0.0) col_scale(c) = 1.0;
            m = m * col_scale.cwiseInverse().asDiagonal();
            const Eigen::VectorXd theta = m.colPivHouseholderQr().solve(rhs).cwiseQuotient(col_scale);
            Eigen::VectorXd b_new(d + 1);
            b_new(0) = 1.0;
            b_new.tail(d) = theta.segment(d + 1, d);
            const double change = (b_new - b).norm() / std::max(1.0, b_new.norm());
            a = theta.head(d + 1);
            b = b_new;
            for (std::size_t i = 0; i < n; ++i) {
                double acc = 0.0;
                for (int k = d; k >= 0; --k) acc = acc * x[i] + b(k);
                b_prev[i] = std::abs(acc);
            }
            if (it > 0 && change < 1e-13) break;
        }
    }

    RationalWeightApprox out;
    out.fit_num = from_ascending(a);
    out.fit_den = from_ascending(b);
    out.freq_scale = scale;
    const Polynomial zn = stable_factor(out.fit_num, scale);
    const Polynomial zd = stable_factor(out.fit_den, scale);
    RationalFunction factor(zn, zd);
    const double gain = std::sqrt(out.fit_num.trimmed(1e-13)(1.0) / out.fit_den.trimmed(1e-13)(1.0)) /
                        std::abs(factor.at_frequency(scale));
    out.spectral_factor = RationalFunction::constant(gain) * factor;

    // relative-degree adjustment far beyond the grid
    RationalFunction shaped = out.spectral_factor;
    out.relative_degree_offset = opts.rel_deg_offset;
    if (opts.rel_deg_offset != 0) {
        const double wc = 2.0 * w_hi;
        const RationalFunction lead(Polynomial{1.0 / wc, 1.0}, Polynomial::constant(1.0));
        for (int i = 0; i < std::abs(opts.rel_deg_offset); ++i)
            shaped = opts.rel_deg_offset < 0 ? shaped * lead : shaped / lead;
    }

    const auto val = log_grid(w_lo, w_hi, static_cast<int>(10 * (n - 1) + 1));
    std::vector<double> ratio(val.size());
    parallel_for(val.size(), [&](std::size_t i) { ratio[i] = w(val[i]) / std::abs(shaped.at_frequency(val[i])); });
    const double worst = *std::max_element(ratio.begin(), ratio.end());
    out.overshoot = std::max(0.0, worst - 1.0);
    if (out.overshoot > opts.overshoot_cap)
        throw Error(ErrorCode::OvershootExcessive,
                    "required scale-up " + std::to_string(out.overshoot) + " exceeds the overshoot cap");
    const double lift = out.overshoot > 0.0 ? (1.0 + out.overshoot) * (1.0 + 1e-12) : 1.0;
    out.w_rat = RationalFunction::constant(lift) * shaped;

    double gap = 0.0;
    for (std::size_t i = 0; i < val.size(); ++i) {
        const double target = w(val[i]);
        gap = std::max(gap, (std::abs(out.w_rat.at_frequency(val[i])) - target) / target);
    }
    out.fit_report = gap;
    out.degree = d;
    return out;
}

}  // namespace

RationalWeightApprox rational_over_approx(const WeightFunction& w, std::span<const double> omega_grid,
                                          const WeightFitOptions& opts) {
    WeightFitOptions attempt = opts;
    while (true) {
        try {
            return fit_at_degree(w, omega_grid, attempt);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::FitInfeasible || !opts.reduce_degree_on_failure || attempt.degree == 0) throw;
            --attempt.degree;
        }
    }
}

}  // namespace robust_interp
