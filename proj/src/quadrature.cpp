#include "robust_interp/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

#include "robust_interp/errors.hpp"

namespace robust_interp {

namespace {

// Kronrod abscissae on [0,1) (odd indices are Gauss points) and weights.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                       0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Interval {
    double a;
    double b;
    cplx value;
    double error;
    bool operator<(const Interval& o) const { return error < o.error; }
};

Interval gauss_kronrod(const std::function<cplx(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const cplx fc = f(c);
    cplx kronrod = fc * kWgk[7];
    cplx gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const cplx sum = f(c - dx) + f(c + dx);
        kronrod += kWgk[j] * sum;
        if (j % 2 == 1) gauss += kWg[j / 2] * sum;
    }
    return {a, b, kronrod * h, std::abs((kronrod - gauss) * h)};
}

}  // namespace

QuadratureResult integrate(const std::function<cplx(double)>& f, double a, double b,
                           std::span<const double> breakpoints, const QuadratureConfig& cfg) {
    if (!(cfg.abs_tol > 0.0 && cfg.rel_tol > 0.0))
        throw Error(ErrorCode::DegenerateInput, "quadrature tolerances must be positive");
    std::vector<double> cuts{a};
    for (double x : breakpoints)
        if (x > a && x < b) cuts.push_back(x);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::priority_queue<Interval> active;
    cplx total = 0.0;
    double error = 0.0;
    // intervals too short to split further; their error is kept but not refined
    double frozen_error = 0.0;
    cplx frozen_value = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        Interval iv = gauss_kronrod(f, cuts[i], cuts[i + 1]);
        total += iv.value;
        error += iv.error;
        active.push(iv);
    }
    int count = static_cast<int>(active.size());
    const double min_width = 1e-14 * std::max(1.0, std::abs(b - a));

    while (error > std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total))) {
        if (active.empty() || count >= cfg.max_subdivisions) {
            throw Error(ErrorCode::QuadratureFailure,
                        "subdivision limit reached with error estimate " + std::to_string(error));
        }
        const Interval worst = active.top();
        active.pop();
        if (worst.b - worst.a < min_width) {
            frozen_error += worst.error;
            frozen_value += worst.value;
            if (frozen_error > std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total)))
                throw Error(ErrorCode::QuadratureFailure, "integrand not resolvable at machine precision");
            continue;
        }
        const double mid = 0.5 * (worst.a + worst.b);
        const Interval left = gauss_kronrod(f, worst.a, mid);
        const Interval right = gauss_kronrod(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        active.push(left);
        active.push(right);
        ++count;
    }
    // re-sum to shed the drift of incremental updates
    cplx sum = frozen_value;
    double err = frozen_error;
    for (; !active.empty(); active.pop()) {
        sum += active.top().value;
        err += active.top().error;
    }
    return {sum, err, count};
}

}  // namespace robust_interp
