#include "robust_interp/winding.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "robust_interp/errors.hpp"

namespace robust_interp {

int winding_number(const ClosedCurve& curve, cplx center, double intersect_tol) {
    const auto& z = curve.samples;
    if (z.size() < 2) {
        if (!z.empty() && std::abs(z.front() - center) <= intersect_tol)
            throw Error(ErrorCode::CenterOnCurve, "curve passes through the winding center");
        return 0;
    }
    // a crossing is reported as such even if neighbouring steps are coarse
    for (const cplx& p : z)
        if (std::abs(p - center) <= intersect_tol)
            throw Error(ErrorCode::CenterOnCurve, "curve passes through the winding center");
    double total = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const cplx a = z[i] - center;
        const cplx b = z[(i + 1) % z.size()] - center;
        const double step = std::arg(b / a);
        if (std::abs(step) > std::numbers::pi / 2)
            throw Error(ErrorCode::CurveTooCoarse, "argument step exceeds pi/2 between samples");
        total += step;
    }
    return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

namespace {

struct Sample {
    double u;
    cplx value;
};

}  // namespace

ClosedCurve nyquist_curve(const RationalFunction& f, cplx center, const NyquistOptions& opts) {
    if (!f.is_proper())
        throw Error(ErrorCode::UnsupportedCurve, "Nyquist curve of an improper function is unbounded");
    const double half_pi = std::numbers::pi / 2;
    const cplx at_inf(f.value_at_infinity(), 0.0);
    auto value = [&](double u) -> cplx {
        if (std::abs(u) >= half_pi) return at_inf;
        return f.at_frequency(std::tan(u));
    };

    // Seed frequencies: uniform in u = atan(omega), plus the neighbourhoods of
    // lightly damped poles and zeros where the curve moves fastest.
    std::vector<double> seeds;
    const int n0 = std::max(opts.initial_samples, 8);
    for (int i = 0; i <= n0; ++i) seeds.push_back(-half_pi + std::numbers::pi * i / n0);
    auto add_root_seeds = [&](const std::vector<cplx>& roots) {
        for (const cplx& r : roots) {
            const double w = std::max(std::abs(r.real()), 1e-12);
            for (double k : {-3.0, -1.0, -0.3, 0.0, 0.3, 1.0, 3.0}) {
                for (double sign : {-1.0, 1.0}) seeds.push_back(std::atan(sign * std::abs(r.imag()) + k * w));
            }
        }
    };
    add_root_seeds(f.poles());
    add_root_seeds(f.zeros());
    std::sort(seeds.begin(), seeds.end());
    seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());

    std::vector<Sample> base;
    base.reserve(seeds.size());
    for (double u : seeds) base.push_back({u, value(u)});

    auto too_coarse = [&](const cplx& a, const cplx& b) {
        const cplx da = a - center;
        const cplx db = b - center;
        if (da == cplx(0.0) || db == cplx(0.0)) return false;
        return std::abs(std::arg(db / da)) > opts.max_step_angle;
    };

    ClosedCurve curve;
    curve.samples.reserve(base.size() * 2);
    // depth-first refinement of each seed interval
    struct Pending {
        Sample lo;
        Sample hi;
        int depth;
    };
    std::vector<Pending> stack;
    for (std::size_t i = 0; i + 1 < base.size(); ++i) {
        curve.samples.push_back(base[i].value);
        stack.push_back({base[i], base[i + 1], 0});
        std::vector<cplx> refined;
        while (!stack.empty()) {
            Pending p = stack.back();
            stack.pop_back();
            if (!too_coarse(p.lo.value, p.hi.value) || p.depth >= opts.max_depth) {
                if (p.hi.u != base[i + 1].u) refined.push_back(p.hi.value);
                continue;
            }
            const double mid = 0.5 * (p.lo.u + p.hi.u);
            const Sample m{mid, value(mid)};
            // push right half first so the left half is processed first
            stack.push_back({m, p.hi, p.depth + 1});
            stack.push_back({p.lo, m, p.depth + 1});
        }
        curve.samples.insert(curve.samples.end(), refined.begin(), refined.end());
    }
    curve.samples.push_back(base.back().value);
    return curve;
}

int nyquist_winding(const RationalFunction& f, cplx center, const NyquistOptions& opts) {
    return winding_number(nyquist_curve(f, center, opts), center);
}

}  // namespace robust_interp
