#include "robust_interp/nevanlinna_pick.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "robust_interp/errors.hpp"

namespace robust_interp {

namespace {

constexpr double kConditionFloor = 1e-12;

bool near(cplx a, cplx b) { return std::abs(a - b) <= Tolerances::distinct * std::max(1.0, std::abs(a)); }

// Complex polynomials, highest degree first.
using CPoly = std::vector<cplx>;

CPoly add(const CPoly& a, const CPoly& b) {
    CPoly out(std::max(a.size(), b.size()), 0.0);
    std::copy_backward(a.begin(), a.end(), out.end());
    for (std::size_t i = 0; i < b.size(); ++i) out[out.size() - b.size() + i] += b[i];
    return out;
}

// (s + c) * p
CPoly mul_linear(const CPoly& p, cplx c) {
    CPoly out(p.size() + 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
        out[i] += p[i];
        out[i + 1] += c * p[i];
    }
    return out;
}

CPoly scale(CPoly p, cplx c) {
    for (auto& v : p) v *= c;
    return p;
}

Polynomial to_real(const CPoly& p, cplx normalizer) {
    std::vector<double> c(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) c[i] = (p[i] / normalizer).real();
    return Polynomial(std::move(c)).trimmed(1e-14);
}

}  // namespace

void validate(const InterpolationData& data) {
    if (data.values.size() != data.nodes.size() || data.kinds.size() != data.nodes.size())
        throw Error(ErrorCode::DegenerateInput, "interpolation data arrays differ in length");
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (!(data.nodes[i].real() > 0.0))
            throw Error(ErrorCode::DegenerateInput, "interpolation node outside the open right half plane");
        for (std::size_t j = i + 1; j < data.size(); ++j)
            if (near(data.nodes[i], data.nodes[j])) throw Error(ErrorCode::NodeCollision, "repeated interpolation node");
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
        bool closed = false;
        for (std::size_t j = 0; j < data.size() && !closed; ++j)
            closed = near(data.nodes[j], std::conj(data.nodes[i])) &&
                     std::abs(data.values[j] - std::conj(data.values[i])) <= 1e-9 * std::max(1.0, std::abs(data.values[i]));
        if (!closed) throw Error(ErrorCode::InfeasibleData, "interpolation data not closed under conjugation");
    }
}

InterpolationData build_data(const PoleZeroData& pz, const std::function<cplx(cplx)>& weight,
                             const RationalFunction& t0) {
    for (const cplx& p : pz.unstable_poles)
        for (const cplx& z : pz.nonmin_phase_zeros)
            if (near(p, z)) throw Error(ErrorCode::NodeCollision, "unstable pole coincides with a nonminimum-phase zero");
    InterpolationData data;
    // values are computed on the upper member of each pair and mirrored
    auto add_closed = [&](const std::vector<cplx>& roots, NodeKind kind, auto&& value_at) {
        for (const cplx& r : roots) {
            if (r.imag() < 0.0) continue;
            const cplx v = value_at(r);
            if (r.imag() == 0.0) {
                data.add(r, {v.real(), 0.0}, kind);
            } else {
                data.add(r, v, kind);
                data.add(std::conj(r), std::conj(v), kind);
            }
        }
    };
    add_closed(pz.unstable_poles, NodeKind::Pole, [&](cplx p) { return (1.0 - t0(p)) * weight(p); });
    add_closed(pz.nonmin_phase_zeros, NodeKind::Zero, [&](cplx z) { return -t0(z) * weight(z); });
    return data;
}

PickMatrix pick_matrix(const InterpolationData& data) {
    const auto n = static_cast<Eigen::Index>(data.size());
    PickMatrix pm;
    pm.entries.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < n; ++k)
            pm.entries(j, k) = (1.0 - data.values[j] * std::conj(data.values[k])) /
                               (data.nodes[j] + std::conj(data.nodes[k]));
    if (n == 0) {
        pm.min_eigenvalue = std::numeric_limits<double>::infinity();
        return pm;
    }
    pm.trace = pm.entries.trace().real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(pm.entries, Eigen::EigenvaluesOnly);
    pm.min_eigenvalue = es.eigenvalues().minCoeff();
    return pm;
}

bool is_feasible(const PickMatrix& pm, double margin) {
    const auto n = pm.entries.rows();
    if (n == 0) return true;
    return pm.min_eigenvalue > margin * pm.trace / static_cast<double>(n);
}

InterpolationData schur_step(const InterpolationData& data, std::size_t index) {
    const cplx x1 = data.nodes.at(index);
    const cplx w1 = data.values.at(index);
    InterpolationData out;
    for (std::size_t j = 0; j < data.size(); ++j) {
        if (j == index) continue;
        const cplx b = (data.nodes[j] - x1) / (data.nodes[j] + std::conj(x1));
        const cplx den = 1.0 - std::conj(w1) * data.values[j];
        if (std::abs(b) < kConditionFloor || std::abs(den) < kConditionFloor)
            throw Error(ErrorCode::IllConditioned, "Schur step denominator below 1e-12");
        out.add(data.nodes[j], (data.values[j] - w1) / den / b, data.kinds[j]);
    }
    return out;
}

RationalFunction central_solution(const InterpolationData& data, double margin) {
    validate(data);
    const PickMatrix pm = pick_matrix(data);
    if (!is_feasible(pm, margin)) {
        std::ostringstream msg;
        msg << "Pick matrix not positive definite (min eigenvalue " << pm.min_eigenvalue << ")";
        throw Error(ErrorCode::InfeasibleData, msg.str());
    }
    // forward sweep: peel the largest remaining |w| first
    std::vector<std::pair<cplx, cplx>> peeled;
    InterpolationData current = data;
    while (current.size() > 0) {
        std::size_t idx = 0;
        for (std::size_t j = 1; j < current.size(); ++j)
            if (std::abs(current.values[j]) > std::abs(current.values[idx])) idx = j;
        const cplx w = current.values[idx];
        if (std::abs(w) >= 1.0) throw Error(ErrorCode::InfeasibleData, "Schur parameter of modulus >= 1");
        if (1.0 - std::abs(w) < kConditionFloor) throw Error(ErrorCode::IllConditioned, "Schur parameter too close to the unit circle");
        peeled.emplace_back(current.nodes[idx], w);
        current = schur_step(current, idx);
    }
    // back substitution from f = 0:
    // f_k = ((s - x) N + w (s + conj x) D) / ((s + conj x) D + conj(w) (s - x) N)
    CPoly num{0.0};
    CPoly den{1.0};
    for (auto it = peeled.rbegin(); it != peeled.rend(); ++it) {
        const auto [x, w] = *it;
        const CPoly sn = mul_linear(num, -x);
        const CPoly sd = mul_linear(den, std::conj(x));
        CPoly next_num = add(sn, scale(sd, w));
        CPoly next_den = add(sd, scale(sn, std::conj(w)));
        num = std::move(next_num);
        den = std::move(next_den);
    }
    // the pair is fixed up to a common complex factor; normalize on den
    const auto lead = std::max_element(den.begin(), den.end(), [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });
    const cplx normalizer = *lead;
    return {to_real(num, normalizer), to_real(den, normalizer)};
}

}  // namespace robust_interp
