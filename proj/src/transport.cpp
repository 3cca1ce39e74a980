#include "pstab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "pstab/numerics.hpp"

namespace pstab {

namespace detail {

namespace {

// Basis of a transportation tableau, maintained as a spanning tree on the
// bipartite node set {sources 0..m-1, sinks m..m+n-1}.
class Basis {
 public:
  Basis(Eigen::Index m, Eigen::Index n) : m_(m), n_(n), adj_(m + n) {}

  void add(Eigen::Index i, Eigen::Index j) {
    adj_[i].push_back(m_ + j);
    adj_[m_ + j].push_back(i);
  }
  void remove(Eigen::Index i, Eigen::Index j) {
    erase(adj_[i], m_ + j);
    erase(adj_[m_ + j], i);
  }

  // Potentials from u[0] = 0 by propagating u_i + v_j = c_ij over tree arcs.
  void potentials(const Eigen::MatrixXd& cost, Eigen::VectorXd& u, Eigen::VectorXd& v) const {
    const Eigen::Index total = m_ + n_;
    std::vector<char> seen(total, 0);
    std::vector<Eigen::Index> stack{0};
    u[0] = 0.0;
    seen[0] = 1;
    while (!stack.empty()) {
      const Eigen::Index node = stack.back();
      stack.pop_back();
      for (Eigen::Index next : adj_[node]) {
        if (seen[next]) continue;
        seen[next] = 1;
        if (node < m_) {
          v[next - m_] = cost(node, next - m_) - u[node];
        } else {
          u[next] = cost(next, node - m_) - v[node - m_];
        }
        stack.push_back(next);
      }
    }
  }

  // Unique tree path between two nodes (inclusive).
  std::vector<Eigen::Index> path(Eigen::Index from, Eigen::Index to) const {
    const Eigen::Index total = m_ + n_;
    std::vector<Eigen::Index> parent(total, -1);
    std::vector<char> seen(total, 0);
    std::vector<Eigen::Index> stack{from};
    seen[from] = 1;
    while (!stack.empty()) {
      const Eigen::Index node = stack.back();
      stack.pop_back();
      if (node == to) break;
      for (Eigen::Index next : adj_[node]) {
        if (seen[next]) continue;
        seen[next] = 1;
        parent[next] = node;
        stack.push_back(next);
      }
    }
    std::vector<Eigen::Index> nodes;
    for (Eigen::Index node = to; node != -1; node = parent[node]) nodes.push_back(node);
    std::reverse(nodes.begin(), nodes.end());
    return nodes;  // nodes.front() == from, nodes.back() == to
  }

 private:
  static void erase(std::vector<Eigen::Index>& vec, Eigen::Index value) {
    vec.erase(std::find(vec.begin(), vec.end(), value));
  }
  Eigen::Index m_, n_;
  std::vector<std::vector<Eigen::Index>> adj_;
};

struct Cell {
  Eigen::Index i, j;
};

}  // namespace

TransportSolution solve_transportation(const Eigen::MatrixXd& cost, Eigen::VectorXd supply,
                                       Eigen::VectorXd demand) {
  const Eigen::Index m = supply.size();
  const Eigen::Index n = demand.size();
  if (cost.rows() != m || cost.cols() != n) {
    throw std::invalid_argument("cost matrix shape does not match marginals");
  }
  // Absorb the rounding imbalance so the tableau is exactly balanced.
  demand[n - 1] += stable_sum(supply) - stable_sum(demand);

  Eigen::MatrixXd flow = Eigen::MatrixXd::Zero(m, n);
  Eigen::MatrixXd basic = Eigen::MatrixXd::Zero(m, n);
  Basis basis(m, n);

  // North-west corner start: m + n - 1 basic cells, one index advanced per cell.
  {
    Eigen::VectorXd a = supply;
    Eigen::VectorXd b = demand;
    Eigen::Index i = 0, j = 0;
    while (true) {
      double f = std::max(0.0, std::min(a[i], b[j]));
      if (i == m - 1 && j == n - 1) f = std::max(0.0, std::max(a[i], b[j]));
      flow(i, j) = f;
      basic(i, j) = 1.0;
      basis.add(i, j);
      a[i] -= f;
      b[j] -= f;
      if (i == m - 1 && j == n - 1) break;
      if (j == n - 1 || (a[i] <= b[j] && i < m - 1)) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  Eigen::VectorXd u(m), v(n);
  const double enter_tol = 1e-12 * (1.0 + cost.cwiseAbs().maxCoeff());
  const long bland_after = 200 * static_cast<long>(m + n);
  const long hard_cap = 20000 * static_cast<long>(m + n) + 10000;

  for (long iter = 0;; ++iter) {
    if (iter > hard_cap) throw std::runtime_error("transportation simplex failed to terminate");
    basis.potentials(cost, u, v);

    // Entering arc: most negative reduced cost; Bland's rule (first eligible
    // cell in lexicographic order) as the anti-cycling fallback after many
    // degenerate rounds.
    const bool bland = iter > bland_after;
    Eigen::Index ei = -1, ej = -1;
    double best = -enter_tol;
    for (Eigen::Index i = 0; i < m && !(bland && ei != -1); ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (basic(i, j) != 0.0) continue;
        const double reduced = cost(i, j) - u[i] - v[j];
        if (reduced < best) {
          ei = i;
          ej = j;
          if (bland) break;
          best = reduced;
        }
      }
    }
    if (ei == -1) break;  // optimal

    // Cycle: entering cell plus the tree path from sink ej back to source ei.
    // Signs alternate starting with - on the path edge incident to the sink.
    const auto nodes = basis.path(m + ej, ei);
    std::vector<Cell> minus, plus;
    for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
      const Eigen::Index a = nodes[k];
      const Eigen::Index b = nodes[k + 1];
      const Eigen::Index ci = a < m ? a : b;
      const Eigen::Index cj = a < m ? b - m : a - m;
      if (k % 2 == 0) {
        minus.push_back({ci, cj});
      } else {
        plus.push_back({ci, cj});
      }
    }

    double theta = kInf;
    Cell leaving{-1, -1};
    for (const Cell& c : minus) {
      const double f = flow(c.i, c.j);
      if (f < theta || (f == theta && (c.i < leaving.i || (c.i == leaving.i && c.j < leaving.j)))) {
        theta = f;
        leaving = c;
      }
    }

    for (const Cell& c : plus) flow(c.i, c.j) += theta;
    for (const Cell& c : minus) flow(c.i, c.j) = std::max(0.0, flow(c.i, c.j) - theta);
    flow(ei, ej) += theta;

    flow(leaving.i, leaving.j) = 0.0;
    basic(leaving.i, leaving.j) = 0.0;
    basis.remove(leaving.i, leaving.j);
    basic(ei, ej) = 1.0;
    basis.add(ei, ej);
  }

  NeumaierSum total;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (flow(i, j) != 0.0) total.add(flow(i, j) * cost(i, j));
    }
  }
  basis.potentials(cost, u, v);
  return TransportSolution{std::max(0.0, total.value()), std::move(flow), std::move(u),
                           std::move(v)};
}

}  // namespace detail

namespace {

void check_inputs(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (!mu.same_space(nu)) throw SpaceMismatchError("transport requires one shared space");
  if (!mu.is_probability() || !nu.is_probability()) {
    throw std::invalid_argument("transport requires probability measures");
  }
}

detail::TransportSolution solve_on_supports(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                            double p) {
  const auto& src = mu.support();
  const auto& dst = nu.support();
  const MetricSpace& space = *mu.space();
  Eigen::MatrixXd cost(src.size(), dst.size());
  for (std::size_t a = 0; a < src.size(); ++a) {
    for (std::size_t b = 0; b < dst.size(); ++b) {
      const double d = space.distance(src[a], dst[b]);
      cost(a, b) = p == 1.0 ? d : std::pow(d, p);
    }
  }
  Eigen::VectorXd supply(src.size()), demand(dst.size());
  for (std::size_t a = 0; a < src.size(); ++a) supply[a] = mu.weight(src[a]);
  for (std::size_t b = 0; b < dst.size(); ++b) demand[b] = nu.weight(dst[b]);
  return detail::solve_transportation(cost, std::move(supply), std::move(demand));
}

WassersteinResult assemble_primal(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                                  const detail::TransportSolution& sol) {
  const auto& src = mu.support();
  const auto& dst = nu.support();
  Eigen::MatrixXd plan = Eigen::MatrixXd::Zero(mu.size(), nu.size());
  for (std::size_t a = 0; a < src.size(); ++a) {
    for (std::size_t b = 0; b < dst.size(); ++b) {
      plan(src[a], dst[b]) = sol.flow(a, b);
    }
  }
  const double value = p == 1.0 ? sol.cost : std::pow(sol.cost, 1.0 / p);
  return WassersteinResult{value, TransportPlan{std::move(plan), sol.cost}};
}

DualCertificate assemble_dual(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                              const detail::TransportSolution& sol) {
  const auto& dst = nu.support();
  const MetricSpace& space = *mu.space();

  // Tightening pass f(x) = min_y (f0(y) + d(x, y)) with f0 = -v on the sink
  // support; the result is 1-Lipschitz everywhere and attains the duality
  // supremum. Ties in the minimum resolve to the lowest index.
  Eigen::VectorXd f(space.size());
  for (Eigen::Index x = 0; x < space.size(); ++x) {
    double best = kInf;
    for (std::size_t b = 0; b < dst.size(); ++b) {
      const double cand = space.distance(x, dst[b]) - sol.v[static_cast<Eigen::Index>(b)];
      if (cand < best) best = cand;
    }
    f[x] = best;
  }

  const auto uni = union_support(mu, nu);
  const Eigen::Index base = uni.front();
  f.array() -= f[base];

  NeumaierSum gap;
  for (Eigen::Index i : mu.support()) gap.add(f[i] * mu.weight(i));
  for (Eigen::Index i : nu.support()) gap.add(-f[i] * nu.weight(i));
  return DualCertificate{std::move(f), base, std::abs(gap.value())};
}

}  // namespace

WassersteinResult wasserstein_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                    double p) {
  check_inputs(mu, nu);
  if (!(p >= 1.0)) throw std::invalid_argument("wasserstein_exact requires p >= 1");
  const auto sol = solve_on_supports(mu, nu, p);
  return assemble_primal(mu, nu, p, sol);
}

DualCertificate kantorovich_dual(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  check_inputs(mu, nu);
  const auto sol = solve_on_supports(mu, nu, 1.0);
  return assemble_dual(mu, nu, sol);
}

TransportPair wasserstein_with_dual(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  check_inputs(mu, nu);
  const auto sol = solve_on_supports(mu, nu, 1.0);
  return TransportPair{assemble_primal(mu, nu, 1.0, sol), assemble_dual(mu, nu, sol)};
}

}  // namespace pstab
