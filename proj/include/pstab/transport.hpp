#pragma once

#include <Eigen/Core>

#include "pstab/measure.hpp"

namespace pstab {

/// A coupling of two measures: entry (i, j) is the mass moved from point i to
/// point j. Row sums match the source weights and column sums the target
/// weights, each within 1e-10.
struct TransportPlan {
  Eigen::MatrixXd plan;
  double cost = 0.0;  // sum_ij plan(i,j) * d(i,j)^p at the optimum
};

struct WassersteinResult {
  double value = 0.0;  // (optimal cost)^(1/p)
  TransportPlan plan;
};

/// 1-Lipschitz Kantorovich potential attaining the order-1 duality supremum.
/// The potential is defined at every point of the space (it extends off the
/// union support by the same tightening formula) and vanishes at base_index,
/// the first union-support index.
struct DualCertificate {
  Eigen::VectorXd potential;
  Eigen::Index base_index = 0;
  double objective = 0.0;  // |integral of f d(mu) - integral of f d(nu)|
};

/// Exact p-Wasserstein distance via a primal transportation simplex on the
/// bipartite support graph. Zero-weight points are dropped before the solve
/// and carry zero plan mass.
WassersteinResult wasserstein_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                    double p);

DualCertificate kantorovich_dual(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// One solve producing both sides for order 1; the bound evaluations need the
/// distance and its optimizer together.
struct TransportPair {
  WassersteinResult primal;
  DualCertificate dual;
};
TransportPair wasserstein_with_dual(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

namespace detail {

/// Balanced transportation problem: minimise sum c(i,j) x(i,j) subject to
/// row sums = supply and column sums = demand. Returns the optimal flow and
/// the node potentials of the optimal basis (u[0] = 0).
struct TransportSolution {
  double cost = 0.0;
  Eigen::MatrixXd flow;
  Eigen::VectorXd u;
  Eigen::VectorXd v;
};
TransportSolution solve_transportation(const Eigen::MatrixXd& cost, Eigen::VectorXd supply,
                                       Eigen::VectorXd demand);

}  // namespace detail

}  // namespace pstab
