#include "robust_interp/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "robust_interp/errors.hpp"

namespace robust_interp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

// Map from a disturbance value d = Delta(iw) to the corresponding region point.
cplx region_map(Region region, cplx d) {
    if (region == Region::Gamma) {
        if (d == cplx(0.0)) return {kInf, kInf};
        return -1.0 / d;
    }
    if (d == cplx(1.0)) return {kInf, kInf};
    return 1.0 / (1.0 - d);
}

bool is_finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Inverse of region_map; infinite when z has no finite preimage.
cplx region_preimage(Region region, cplx z) {
    if (z == cplx(0.0)) return {kInf, kInf};
    return region == Region::Gamma ? -1.0 / z : 1.0 - 1.0 / z;
}

// Minimizes f over [0,1] by sampling and a golden-section polish of the best bracket.
template <class F>
std::pair<double, double> minimize_unit(F&& f, int samples = 129) {
    double best_t = 0.0;
    double best_v = kInf;
    int best_i = 0;
    for (int i = 0; i < samples; ++i) {
        const double t = static_cast<double>(i) / (samples - 1);
        const double v = f(t);
        if (v < best_v) {
            best_v = v;
            best_t = t;
            best_i = i;
        }
    }
    if (!std::isfinite(best_v)) return {best_t, best_v};
    double a = static_cast<double>(std::max(best_i - 1, 0)) / (samples - 1);
    double b = static_cast<double>(std::min(best_i + 1, samples - 1)) / (samples - 1);
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - g * (b - a);
    double x2 = a + g * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int it = 0; it < 100 && (b - a) > 1e-15; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    for (auto [t, v] : {std::pair{x1, f1}, std::pair{x2, f2}}) {
        if (v < best_v) {
            best_v = v;
            best_t = t;
        }
    }
    return {best_t, best_v};
}

using Piece = std::function<cplx(double)>;

struct BoxGeometry {
    double lo;
    double hi;
    [[nodiscard]] bool full_turn() const { return hi - lo >= 2.0 * kPi; }
};

BoxGeometry box_angles(const GainPhaseDelayBox& b, double omega) {
    const double sweep = -omega * b.t_max;
    return {-b.phi_max + std::min(0.0, sweep), b.phi_max + std::max(0.0, sweep)};
}

bool angle_in(double angle, const BoxGeometry& g, double tol) {
    if (g.full_turn()) return true;
    double rel = std::fmod(angle - g.lo, 2.0 * kPi);
    if (rel < 0.0) rel += 2.0 * kPi;
    const double span = g.hi - g.lo;
    return rel <= span + tol || rel >= 2.0 * kPi - tol;
}

bool box_value_contains(const GainPhaseDelayBox& b, double omega, cplx w) {
    if (!is_finite(w)) return false;
    const double r = std::abs(w);
    const double tol = 1e-13;
    if (r < 1.0 - tol || r > b.k * (1.0 + tol)) return false;
    return angle_in(std::arg(w), box_angles(b, omega), tol);
}

std::vector<Piece> box_pieces(const GainPhaseDelayBox& b, double omega) {
    const BoxGeometry g = box_angles(b, omega);
    std::vector<Piece> pieces;
    if (g.full_turn()) {
        pieces.emplace_back([](double t) { return std::polar(1.0, 2.0 * kPi * t); });
        pieces.emplace_back([k = b.k](double t) { return std::polar(k, 2.0 * kPi * t); });
        return pieces;
    }
    const double lo = g.lo;
    const double span = g.hi - g.lo;
    pieces.emplace_back([=](double t) { return std::polar(1.0, lo + span * t); });
    pieces.emplace_back([=, k = b.k](double t) { return std::polar(k, lo + span * t); });
    pieces.emplace_back([=, k = b.k](double t) { return std::polar(1.0 + (k - 1.0) * t, lo); });
    pieces.emplace_back([=, k = b.k](double t) { return std::polar(1.0 + (k - 1.0) * t, lo + span); });
    return pieces;
}

Piece zero_piece(const UncertainZero& f, double omega) {
    return [=](double t) {
        const double y = f.a + (f.b - f.a) * t;
        return cplx(y, omega) / cplx(f.z, omega);
    };
}

Piece pole_piece(const UncertainPole& f, double omega) {
    return [=](double t) {
        const double y = f.a + (f.b - f.a) * t;
        return cplx(f.q, omega) / cplx(y, omega);
    };
}

// Points origin + t * dir with t in a union of (possibly unbounded) intervals.
struct LineSet {
    cplx origin;
    cplx dir;
    std::vector<std::pair<double, double>> intervals;

    [[nodiscard]] double distance(cplx z) const {
        if (intervals.empty()) return kInf;
        const double n2 = std::norm(dir);
        const double t_star = (n2 > 0.0) ? std::real((z - origin) * std::conj(dir)) / n2 : 0.0;
        double best = kInf;
        for (auto [lo, hi] : intervals) {
            const double t = std::clamp(t_star, lo, hi);
            best = std::min(best, std::abs(z - (origin + t * dir)));
        }
        return best;
    }
};

// t = sign / (y - c0) for y in [a, b], y != c0.
std::vector<std::pair<double, double>> reciprocal_intervals(double a, double b, double c0, double sign) {
    const double u1 = a - c0;
    const double u2 = b - c0;
    std::vector<std::pair<double, double>> out;
    if (u1 > 0.0 || u2 < 0.0) {
        out.emplace_back(1.0 / u2, 1.0 / u1);
    } else {
        if (u1 < 0.0) out.emplace_back(-kInf, 1.0 / u1);
        if (u2 > 0.0) out.emplace_back(1.0 / u2, kInf);
    }
    for (auto& [lo, hi] : out) {
        lo *= sign;
        hi *= sign;
        if (lo > hi) std::swap(lo, hi);
    }
    return out;
}

// Lambda(iw) for the uncertain zero/pole families is a subset of a line.
LineSet lambda_line(const UncertainZero& f, double omega) {
    // (z + iw)/(z - y)
    return {0.0, cplx(f.z, omega), reciprocal_intervals(f.a, f.b, f.z, -1.0)};
}

LineSet lambda_line(const UncertainPole& f, double omega) {
    // 1 + (q + iw)/(y - q)
    return {1.0, cplx(f.q, omega), reciprocal_intervals(f.a, f.b, f.q, 1.0)};
}

double piece_distance(const Piece& piece, Region region, cplx z) {
    return minimize_unit([&](double t) {
               const cplx p = region_map(region, piece(t));
               return is_finite(p) ? std::abs(z - p) : kInf;
           }).second;
}

double piece_max_deviation_from_one(const Piece& piece) {
    return -minimize_unit([&](double t) { return -std::abs(piece(t) - 1.0); }).second;
}

// Mixed-radix enumeration of a parameter grid; calls fn(params) for each node.
template <class Fn>
void for_each_grid_point(const std::vector<ParamAxis>& axes, int n, Fn&& fn) {
    std::vector<int> counts;
    for (const auto& ax : axes) {
        if (ax.discrete) counts.push_back(static_cast<int>(ax.hi - ax.lo) + 1);
        else counts.push_back(ax.hi > ax.lo ? n : 1);
    }
    std::vector<int> idx(axes.size(), 0);
    std::vector<double> p(axes.size(), 0.0);
    while (true) {
        for (std::size_t i = 0; i < axes.size(); ++i) {
            const auto& ax = axes[i];
            if (ax.discrete) p[i] = ax.lo + idx[i];
            else p[i] = counts[i] == 1 ? ax.lo : ax.lo + (ax.hi - ax.lo) * idx[i] / (counts[i] - 1);
        }
        fn(p);
        std::size_t k = 0;
        while (k < axes.size() && ++idx[k] == counts[k]) idx[k++] = 0;
        if (k == axes.size()) break;
    }
}

// Values of one factor on a parameter grid, with the parameters that produced them.
struct FactorTable {
    std::vector<ParamAxis> axes;
    std::vector<std::vector<double>> params;
    std::vector<cplx> values;
};

FactorTable tabulate(const DisturbanceFamily& f, const std::vector<ParamAxis>& axes, double omega, int n) {
    FactorTable t;
    t.axes = axes;
    for_each_grid_point(axes, n, [&](const std::vector<double>& p) {
        t.params.push_back(p);
        t.values.push_back(f.value(p, omega));
    });
    return t;
}

// Box of +-one grid cell around p, clipped to the axes; discrete axes are pinned.
std::vector<ParamAxis> local_axes(const std::vector<ParamAxis>& axes, const std::vector<double>& p, int n) {
    std::vector<ParamAxis> local = axes;
    for (std::size_t i = 0; i < axes.size(); ++i) {
        if (axes[i].discrete) {
            local[i].lo = local[i].hi = p[i];
            continue;
        }
        const double h = (axes[i].hi - axes[i].lo) / std::max(n - 1, 1);
        local[i].lo = std::max(axes[i].lo, p[i] - h);
        local[i].hi = std::min(axes[i].hi, p[i] + h);
    }
    return local;
}

// Minimum of objective(d1 * d2 * ...) over the product of factor tables;
// best[i] receives the index chosen in table i.
template <class Obj>
double product_minimize(const std::vector<FactorTable>& tables, Obj& objective, std::vector<std::size_t>& best) {
    const std::size_t m = tables.size();
    std::vector<std::size_t> idx(m, 0);
    // partial[i] = product of the values chosen in tables 0..i-1
    std::vector<cplx> partial(m + 1, 1.0);
    for (std::size_t i = 0; i < m; ++i) partial[i + 1] = partial[i] * tables[i].values[0];
    double best_v = kInf;
    best.assign(m, 0);
    while (true) {
        const double v = objective(partial[m]);
        if (v < best_v) {
            best_v = v;
            best = idx;
        }
        std::size_t k = m;
        while (k > 0 && ++idx[k - 1] == tables[k - 1].values.size()) idx[--k] = 0;
        if (k == 0) break;
        for (std::size_t i = k - 1; i < m; ++i) partial[i + 1] = partial[i] * tables[i].values[idx[i]];
    }
    return best_v;
}

// Grid search over value parameters minimizing objective(Delta(iw)), with one
// local refinement pass around the best node. Composite families are searched
// over the product of their members' value tables.
template <class Obj>
double grid_minimize(const DisturbanceFamily& f, double omega, int n, Obj&& objective) {
    std::vector<const DisturbanceFamily*> factors;
    if (const auto* c = std::get_if<CompositeFamily>(&f.variant())) {
        for (const auto& m : c->members) factors.push_back(&m);
    } else {
        factors.push_back(&f);
    }
    std::vector<FactorTable> tables;
    for (const auto* m : factors) tables.push_back(tabulate(*m, m->value_axes(omega), omega, n));
    std::vector<std::size_t> pick;
    double best = product_minimize(tables, objective, pick);
    if (!std::isfinite(best) && best > 0) return best;

    std::vector<FactorTable> refined;
    for (std::size_t i = 0; i < factors.size(); ++i)
        refined.push_back(tabulate(*factors[i], local_axes(tables[i].axes, tables[i].params[pick[i]], n), omega, 9));
    return std::min(best, product_minimize(refined, objective, pick));
}

double rational_hinf_norm(const RationalFunction& r) {
    double best = 0.0;
    double best_w = 0.0;
    const int n = 2001;
    for (int i = 0; i < n; ++i) {
        const double w = std::pow(10.0, -6.0 + 12.0 * i / (n - 1));
        const double v = std::abs(r.at_frequency(w));
        if (v > best) {
            best = v;
            best_w = w;
        }
    }
    best = std::max(best, std::abs(r.at_frequency(0.0)));
    best = std::max(best, std::abs(r.value_at_infinity()));
    // polish the interior peak in log-frequency
    const double lw = std::log10(best_w);
    const double step = 12.0 / (n - 1);
    const auto [t, v] = minimize_unit([&](double t) {
        return -std::abs(r.at_frequency(std::pow(10.0, lw - step + 2.0 * step * t)));
    });
    (void)t;
    best = std::max(best, -v);
    return best * (1.0 + 1e-12);
}

bool is_identity_function(const RationalFunction& r) {
    return r.num().degree() == r.den().degree() && r.num().degree() == 0 && r.num().leading() == r.den().leading();
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw Error(ErrorCode::InvalidFamily, msg);
}

}  // namespace

DisturbanceFamily::DisturbanceFamily(Variant v) : v_(std::move(v)) {
    std::visit(overloaded{
                   [](const GainPhaseDelayBox& b) {
                       require(std::isfinite(b.k) && b.k >= 1.0, "gain bound k must be >= 1");
                       require(b.phi_max >= 0.0, "phase half-width must be >= 0");
                       require(b.t_max >= 0.0, "delay bound must be >= 0");
                   },
                   [](const UncertainZero& f) {
                       require(f.z > 0.0, "nominal zero must be > 0");
                       require(f.a > 0.0, "lower bound a must be > 0");
                       require(f.b >= f.a, "upper bound b must be >= a");
                   },
                   [](const UncertainPole& f) {
                       require(f.q > 0.0, "nominal pole must be > 0");
                       require(f.a > 0.0, "lower bound a must be > 0");
                       require(f.b >= f.a, "upper bound b must be >= a");
                   },
                   [](const CompositeFamily& c) { require(!c.members.empty(), "composite family is empty"); },
                   [](const SampledFamily& s) {
                       require(!s.members.empty(), "sampled family is empty");
                       for (const auto& m : s.members) {
                           require(m.is_proper(), "sampled member must be proper");
                           for (const cplx& p : m.poles())
                               require(p.real() < 0.0, "sampled member must be stable");
                       }
                   },
               },
               v_);
    norm_bound_ = compute_norm_bound();
}

std::string DisturbanceFamily::name() const {
    return std::visit(overloaded{
                          [](const GainPhaseDelayBox&) { return std::string("gain_phase_delay_box"); },
                          [](const UncertainZero&) { return std::string("uncertain_zero"); },
                          [](const UncertainPole&) { return std::string("uncertain_pole"); },
                          [](const CompositeFamily&) { return std::string("composite"); },
                          [](const SampledFamily&) { return std::string("sampled"); },
                      },
                      v_);
}

double DisturbanceFamily::compute_norm_bound() const {
    return std::visit(overloaded{
                          [](const GainPhaseDelayBox& b) { return b.k; },
                          [](const UncertainZero& f) { return std::max(1.0, f.b / f.z); },
                          [](const UncertainPole& f) { return std::max(1.0, f.q / f.a); },
                          [](const CompositeFamily& c) {
                              double n = 1.0;
                              for (const auto& m : c.members) n *= m.norm_bound();
                              return n;
                          },
                          [](const SampledFamily& s) {
                              double n = 0.0;
                              for (const auto& m : s.members) n = std::max(n, rational_hinf_norm(m));
                              return n;
                          },
                      },
                      v_);
}

std::vector<ParamAxis> DisturbanceFamily::natural_axes() const {
    return std::visit(overloaded{
                          [](const GainPhaseDelayBox& b) {
                              return std::vector<ParamAxis>{{1.0, b.k}, {-b.phi_max, b.phi_max}, {0.0, b.t_max}};
                          },
                          [](const UncertainZero& f) { return std::vector<ParamAxis>{{f.a, f.b}}; },
                          [](const UncertainPole& f) { return std::vector<ParamAxis>{{f.a, f.b}}; },
                          [](const CompositeFamily& c) {
                              std::vector<ParamAxis> out;
                              for (const auto& m : c.members) {
                                  auto ax = m.natural_axes();
                                  out.insert(out.end(), ax.begin(), ax.end());
                              }
                              return out;
                          },
                          [](const SampledFamily& s) {
                              return std::vector<ParamAxis>{
                                  {0.0, static_cast<double>(s.members.size() - 1), true}};
                          },
                      },
                      v_);
}

std::vector<double> DisturbanceFamily::identity_params() const {
    return std::visit(overloaded{
                          [](const GainPhaseDelayBox&) { return std::vector<double>{1.0, 0.0, 0.0}; },
                          [](const UncertainZero& f) { return std::vector<double>{f.z}; },
                          [](const UncertainPole& f) { return std::vector<double>{f.q}; },
                          [](const CompositeFamily& c) {
                              std::vector<double> out;
                              for (const auto& m : c.members) {
                                  auto p = m.identity_params();
                                  out.insert(out.end(), p.begin(), p.end());
                              }
                              return out;
                          },
                          [](const SampledFamily& s) {
                              for (std::size_t i = 0; i < s.members.size(); ++i)
                                  if (is_identity_function(s.members[i]))
                                      return std::vector<double>{static_cast<double>(i)};
                              return std::vector<double>{0.0};
                          },
                      },
                      v_);
}

namespace {

void check_in_box(std::span<const double> p, const std::vector<ParamAxis>& axes) {
    if (p.size() != axes.size())
        throw Error(ErrorCode::ParamsOutOfBox, "expected " + std::to_string(axes.size()) + " parameters");
    for (std::size_t i = 0; i < axes.size(); ++i) {
        const double tol = 1e-12 * std::max(1.0, std::abs(axes[i].hi));
        if (!(p[i] >= axes[i].lo - tol && p[i] <= axes[i].hi + tol))
            throw Error(ErrorCode::ParamsOutOfBox, "parameter " + std::to_string(i) + " outside its range");
        if (axes[i].discrete && p[i] != std::round(p[i]))
            throw Error(ErrorCode::ParamsOutOfBox, "member index must be an integer");
    }
}

}  // namespace

cplx DisturbanceFamily::delta(std::span<const double> p, cplx s) const {
    check_in_box(p, natural_axes());
    return std::visit(overloaded{
                          [&](const GainPhaseDelayBox&) {
                              return p[0] * std::exp(cplx(0.0, -p[1])) * std::exp(-s * p[2]);
                          },
                          [&](const UncertainZero& f) { return (s + p[0]) / (s + f.z); },
                          [&](const UncertainPole& f) { return (s + f.q) / (s + p[0]); },
                          [&](const CompositeFamily& c) {
                              cplx acc = 1.0;
                              std::size_t off = 0;
                              for (const auto& m : c.members) {
                                  const std::size_t n = m.natural_axes().size();
                                  acc *= m.delta(p.subspan(off, n), s);
                                  off += n;
                              }
                              return acc;
                          },
                          [&](const SampledFamily& sf) {
                              return sf.members[static_cast<std::size_t>(p[0])](s);
                          },
                      },
                      v_);
}

std::vector<ParamAxis> DisturbanceFamily::value_axes(double omega) const {
    return std::visit(overloaded{
                          [&](const GainPhaseDelayBox& b) {
                              const auto g = box_angles(b, omega);
                              return std::vector<ParamAxis>{{1.0, b.k}, {g.lo, g.hi}};
                          },
                          [&](const CompositeFamily& c) {
                              std::vector<ParamAxis> out;
                              for (const auto& m : c.members) {
                                  auto ax = m.value_axes(omega);
                                  out.insert(out.end(), ax.begin(), ax.end());
                              }
                              return out;
                          },
                          [&](const auto&) { return natural_axes(); },
                      },
                      v_);
}

cplx DisturbanceFamily::value(std::span<const double> p, double omega) const {
    return std::visit(overloaded{
                          [&](const GainPhaseDelayBox&) { return std::polar(p[0], p[1]); },
                          [&](const CompositeFamily& c) {
                              cplx acc = 1.0;
                              std::size_t off = 0;
                              for (const auto& m : c.members) {
                                  const std::size_t n = m.value_axes(omega).size();
                                  acc *= m.value(p.subspan(off, n), omega);
                                  off += n;
                              }
                              return acc;
                          },
                          [&](const auto&) { return delta(p, cplx(0.0, omega)); },
                      },
                      v_);
}

std::vector<cplx> DisturbanceFamily::sample_values(double omega, int n_per_axis) const {
    std::vector<cplx> out;
    for_each_grid_point(value_axes(omega), n_per_axis,
                        [&](const std::vector<double>& p) { out.push_back(value(p, omega)); });
    return out;
}

double DisturbanceFamily::region_distance(Region region, double omega, cplx z) const {
    return std::visit(
        overloaded{
            [&](const GainPhaseDelayBox& b) {
                // Lambda(iw) is empty only for the degenerate singleton {I}
                if (region == Region::Lambda && b.k == 1.0 && box_angles(b, omega).hi == box_angles(b, omega).lo)
                    return kInf;
                if (box_value_contains(b, omega, region_preimage(region, z))) return 0.0;
                double best = kInf;
                for (const auto& piece : box_pieces(b, omega)) best = std::min(best, piece_distance(piece, region, z));
                return best;
            },
            [&](const UncertainZero& f) {
                if (region == Region::Lambda) return lambda_line(f, omega).distance(z);
                return piece_distance(zero_piece(f, omega), region, z);
            },
            [&](const UncertainPole& f) {
                if (region == Region::Lambda) return lambda_line(f, omega).distance(z);
                return piece_distance(pole_piece(f, omega), region, z);
            },
            [&](const CompositeFamily&) {
                return grid_minimize(*this, omega, grid_points, [&](cplx d) {
                    const cplx p = region_map(region, d);
                    return is_finite(p) ? std::abs(z - p) : kInf;
                });
            },
            [&](const SampledFamily& s) {
                double best = kInf;
                for (const auto& m : s.members) {
                    const cplx p = region_map(region, m.at_frequency(omega));
                    if (is_finite(p)) best = std::min(best, std::abs(z - p));
                }
                return best;
            },
        },
        v_);
}

RegionSample DisturbanceFamily::region_boundary(Region region, double omega, int n_points) const {
    n_points = std::max(n_points, 8);
    RegionSample out;
    out.omega = omega;
    int segment = 0;
    bool open = false;
    auto emit = [&](cplx d) {
        const cplx z = region_map(region, d);
        if (!is_finite(z) || std::abs(z) > 1e6) {
            if (open) ++segment;
            open = false;
            return;
        }
        out.boundary_points.push_back(z);
        out.segment_ids.push_back(segment);
        open = true;
    };
    auto trace = [&](const Piece& piece) {
        for (int i = 0; i < n_points; ++i) emit(piece(static_cast<double>(i) / (n_points - 1)));
        if (open) ++segment;
        open = false;
    };
    std::visit(overloaded{
                   [&](const GainPhaseDelayBox& b) {
                       for (const auto& piece : box_pieces(b, omega)) trace(piece);
                   },
                   [&](const UncertainZero& f) { trace(zero_piece(f, omega)); },
                   [&](const UncertainPole& f) { trace(pole_piece(f, omega)); },
                   [&](const SampledFamily& s) {
                       for (const auto& m : s.members) emit(m.at_frequency(omega));
                   },
                   [&](const CompositeFamily&) {
                       // images of the parameter-box edges
                       const auto axes = value_axes(omega);
                       for (std::size_t i = 0; i < axes.size(); ++i) {
                           if (axes[i].discrete || axes[i].hi == axes[i].lo) continue;
                           std::vector<ParamAxis> corners = axes;
                           corners.erase(corners.begin() + static_cast<std::ptrdiff_t>(i));
                           for_each_grid_point(corners, 2, [&](const std::vector<double>& c) {
                               trace([&](double t) {
                                   std::vector<double> p = c;
                                   p.insert(p.begin() + static_cast<std::ptrdiff_t>(i),
                                            axes[i].lo + (axes[i].hi - axes[i].lo) * t);
                                   return value(p, omega);
                               });
                           });
                       }
                       if (out.boundary_points.empty())
                           for (const cplx& d : sample_values(omega, 2)) emit(d);
                   },
               },
               v_);
    out.is_empty = out.boundary_points.empty() && !std::isfinite(region_distance(region, omega, 0.0));
    return out;
}

double DisturbanceFamily::phi(double omega) const {
    return std::visit(overloaded{
                          [&](const GainPhaseDelayBox& b) {
                              const BoxGeometry g = box_angles(b, omega);
                              if (g.full_turn()) return b.k + 1.0;
                              // odd multiple of pi inside [lo, hi]
                              const double m = std::ceil((g.lo - kPi) / (2.0 * kPi));
                              if ((2.0 * m + 1.0) * kPi <= g.hi) return b.k + 1.0;
                              return std::max(std::abs(std::polar(b.k, g.lo) - 1.0),
                                              std::abs(std::polar(b.k, g.hi) - 1.0));
                          },
                          [&](const UncertainZero& f) {
                              const double den = std::abs(cplx(f.z, omega));
                              return std::max(std::abs(f.a - f.z), std::abs(f.b - f.z)) / den;
                          },
                          [&](const UncertainPole& f) { return piece_max_deviation_from_one(pole_piece(f, omega)); },
                          [&](const CompositeFamily&) {
                              return -grid_minimize(*this, omega, grid_points,
                                                    [](cplx d) { return -std::abs(d - 1.0); });
                          },
                          [&](const SampledFamily& s) {
                              double best = 0.0;
                              for (const auto& m : s.members) best = std::max(best, std::abs(m.at_frequency(omega) - 1.0));
                              return best;
                          },
                      },
                      v_);
}

LambdaInfinityResult DisturbanceFamily::lambda_infinity_contains(cplx z, double tol) const {
    return std::visit(
        overloaded{
            [&](const GainPhaseDelayBox& b) {
                if (b.t_max > 0.0) {
                    // limits of kappa e^{-i theta} e^{-s tau} fill the disc |w| <= k
                    if (z == cplx(0.0)) return LambdaInfinityResult{false, true};
                    return LambdaInfinityResult{std::abs(z - 1.0) <= b.k * std::abs(z) + tol, true};
                }
                return LambdaInfinityResult{region_distance(Region::Lambda, 0.0, z) <= tol, true};
            },
            // Delta_y(s) -> 1 while 1/(1 - Delta_y(s)) diverges: no finite limit points
            [&](const UncertainZero&) { return LambdaInfinityResult{false, true}; },
            [&](const UncertainPole&) { return LambdaInfinityResult{false, true}; },
            [&](const SampledFamily& s) {
                for (const auto& m : s.members) {
                    const double d = m.value_at_infinity();
                    if (d == 1.0) continue;
                    if (std::abs(z - 1.0 / (1.0 - d)) <= tol) return LambdaInfinityResult{true, true};
                }
                return LambdaInfinityResult{false, true};
            },
            [&](const CompositeFamily&) {
                const auto axes = natural_axes();
                const double sweep_tol = std::max(tol, 1e-2 * (1.0 + std::abs(z)));
                bool hit = false;
                for (double radius : {1e3, 1e4, 1e5}) {
                    for (int j = 0; j <= 32 && !hit; ++j) {
                        const cplx s = std::polar(radius, -kPi / 2 + kPi * j / 32);
                        for_each_grid_point(axes, 8, [&](const std::vector<double>& p) {
                            const cplx d = delta(p, s);
                            if (d == cplx(1.0)) return;
                            if (std::abs(z - 1.0 / (1.0 - d)) <= sweep_tol) hit = true;
                        });
                    }
                }
                return LambdaInfinityResult{hit, false};
            },
        },
        v_);
}

cplx delta_eval(const DisturbanceFamily& f, std::span<const double> params, cplx s) { return f.delta(params, s); }

bool gamma_contains(const DisturbanceFamily& f, double omega, cplx z, double tol) {
    return f.region_contains(Region::Gamma, omega, z, tol);
}
RegionSample gamma_boundary(const DisturbanceFamily& f, double omega, int n_points) {
    return f.region_boundary(Region::Gamma, omega, n_points);
}
double dist_to_gamma(const DisturbanceFamily& f, double omega, cplx z) {
    return f.region_distance(Region::Gamma, omega, z);
}
bool lambda_contains(const DisturbanceFamily& f, double omega, cplx z, double tol) {
    return f.region_contains(Region::Lambda, omega, z, tol);
}
RegionSample lambda_boundary(const DisturbanceFamily& f, double omega, int n_points) {
    return f.region_boundary(Region::Lambda, omega, n_points);
}
double dist_to_lambda(const DisturbanceFamily& f, double omega, cplx z) {
    return f.region_distance(Region::Lambda, omega, z);
}

double phi(const DisturbanceFamily& f, double omega) { return f.phi(omega); }

double phi_shifted(const DisturbanceFamily& f, double omega, const RationalFunction& t0) {
    const double d = dist_to_lambda(f, omega, t0.at_frequency(omega));
    if (!std::isfinite(d)) return 0.0;
    if (d <= kDistFloor) {
        std::ostringstream msg;
        msg << "shift T0 is within " << d << " of Lambda at omega = " << omega;
        throw Error(ErrorCode::ShiftTouchesRegion, msg.str());
    }
    return 1.0 / d;
}

LambdaInfinityResult lambda_infinity_contains(const DisturbanceFamily& f, cplx z) {
    return f.lambda_infinity_contains(z);
}

AssumptionReport check_assumptions(const DisturbanceFamily& f, const PoleZeroData& pz) {
    AssumptionReport report;
    const auto axes = f.natural_axes();
    const double n_bound = f.norm_bound();

    for (const cplx& p : pz.unstable_poles) {
        double smallest = kInf;
        for_each_grid_point(axes, 8, [&](const std::vector<double>& params) {
            smallest = std::min(smallest, std::abs(f.delta(params, p)));
        });
        if (smallest <= 1e-9 * (1.0 + n_bound)) {
            std::ostringstream msg;
            msg << "a member vanishes at the unstable pole " << p.real() << (p.imag() >= 0 ? "+" : "") << p.imag()
                << "i";
            report.violations.push_back(msg.str());
        }
    }

    if (!std::isfinite(n_bound)) {
        report.norm_bound_ok = false;
    } else {
        for (int i = 0; i <= 200 && report.norm_bound_ok; ++i) {
            const double w = i == 0 ? 0.0 : std::pow(10.0, -4.0 + 8.0 * (i - 1) / 199.0);
            for_each_grid_point(axes, 8, [&](const std::vector<double>& params) {
                const double m = std::abs(f.delta(params, cplx(0.0, w)));
                if (!std::isfinite(m) || m > n_bound * (1.0 + 1e-9)) report.norm_bound_ok = false;
            });
        }
    }
    if (!report.norm_bound_ok) report.violations.emplace_back("sampled |Delta(iw)| exceeds the norm bound");

    // identity member: Delta == 1 at a few test points
    try {
        const auto id = f.identity_params();
        for (cplx s : {cplx(0.0, 0.0), cplx(0.3, 1.7), cplx(2.0, -5.0)})
            if (std::abs(f.delta(id, s) - 1.0) > 1e-12) report.identity_member = false;
    } catch (const Error&) {
        report.identity_member = false;
    }

    report.passed = report.violations.empty();
    return report;
}

}  // namespace robust_interp
