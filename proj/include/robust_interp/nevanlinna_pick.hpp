#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "robust_interp/rational.hpp"

namespace robust_interp {

enum class NodeKind { Pole, Zero, Other };

// Interpolation conditions f(x_j) = w_j with Re x_j > 0.
struct InterpolationData {
    std::vector<cplx> nodes;
    std::vector<cplx> values;
    std::vector<NodeKind> kinds;

    [[nodiscard]] std::size_t size() const { return nodes.size(); }
    void add(cplx x, cplx w, NodeKind kind = NodeKind::Other) {
        nodes.push_back(x);
        values.push_back(w);
        kinds.push_back(kind);
    }
};

// Throws DegenerateInput (size mismatch, node off C+), NodeCollision (repeated
// node) or InfeasibleData (data not closed under conjugation).
void validate(const InterpolationData& data);

// Nodes are the unstable poles and nonminimum-phase zeros; values
// (1 - T0(p)) W(p) at poles and -T0(z) W(z) at zeros. Throws NodeCollision when
// a pole meets a zero.
InterpolationData build_data(const PoleZeroData& pz, const std::function<cplx(cplx)>& weight,
                             const RationalFunction& t0);

struct PickMatrix {
    Eigen::MatrixXcd entries;
    double min_eigenvalue = 0.0;  // +inf for empty data
    double trace = 0.0;
};

PickMatrix pick_matrix(const InterpolationData& data);

inline constexpr double kPickMargin = 1e-10;
// min eigenvalue > margin * trace / size; empty matrices are feasible.
bool is_feasible(const PickMatrix& pm, double margin = kPickMargin);

// Data left after peeling node `index` by one Schur step:
// w_j' = M_{w_i}(w_j) / b_i(x_j), with b_i(s) = (s - x_i)/(s + conj(x_i)).
InterpolationData schur_step(const InterpolationData& data, std::size_t index);

// Central (maximum-entropy) interpolant from the half-plane Schur recursion,
// terminated by the zero function. Real coefficients for conjugate-closed data.
// Throws InfeasibleData or IllConditioned.
RationalFunction central_solution(const InterpolationData& data, double margin = kPickMargin);

}  // namespace robust_interp
