#include "pstab/metric_space.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace pstab {

namespace {

std::vector<std::string> default_labels(Eigen::Index n, std::vector<std::string> labels) {
  if (!labels.empty()) {
    if (static_cast<Eigen::Index>(labels.size()) != n) {
      throw std::invalid_argument("label count does not match point count");
    }
    return labels;
  }
  labels.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) labels.push_back("p" + std::to_string(i));
  return labels;
}

Eigen::MatrixXd pairwise_euclidean(const Eigen::MatrixXd& coords) {
  const Eigen::Index n = coords.rows();
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double dij = (coords.row(i) - coords.row(j)).norm();
      d(i, j) = dij;
      d(j, i) = dij;
    }
  }
  return d;
}

}  // namespace

MetricSpace::MetricSpace(Eigen::MatrixXd dist, std::optional<Eigen::MatrixXd> coords,
                         std::vector<std::string> labels)
    : dist_(std::move(dist)), coords_(std::move(coords)) {
  if (dist_.rows() < 1 || dist_.rows() != dist_.cols()) {
    throw std::invalid_argument("distance matrix must be square with n >= 1");
  }
  labels_ = default_labels(dist_.rows(), std::move(labels));
}

std::shared_ptr<const MetricSpace> MetricSpace::from_distance(Eigen::MatrixXd dist,
                                                              std::vector<std::string> labels) {
  auto space = std::make_shared<MetricSpace>(std::move(dist), std::nullopt, std::move(labels));
  require_valid(*space);
  return space;
}

std::shared_ptr<const MetricSpace> MetricSpace::from_coords(Eigen::MatrixXd coords,
                                                            std::vector<std::string> labels) {
  if (coords.rows() < 1) throw std::invalid_argument("need at least one point");
  Eigen::MatrixXd dist = pairwise_euclidean(coords);
  return std::make_shared<MetricSpace>(std::move(dist), std::move(coords), std::move(labels));
}

double MetricSpace::diameter() const { return dist_.maxCoeff(); }

std::vector<SpaceViolation> validate_space(const MetricSpace& space, double tolerance) {
  std::vector<SpaceViolation> out;
  const Eigen::MatrixXd& d = space.distance_matrix();
  const Eigen::Index n = d.rows();

  if (n < 1) {
    out.push_back({"size", -1, -1, -1, "space has no points"});
    return out;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(d(i, i) == 0.0)) {
      out.push_back({"diagonal", i, i, -1, "d(i,i) must be zero"});
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!std::isfinite(d(i, j)) || d(i, j) < 0.0) {
        out.push_back({"nonnegative", i, j, -1, "distances must be finite and >= 0"});
      }
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (std::abs(d(i, j) - d(j, i)) > tolerance) {
        out.push_back({"symmetry", i, j, -1, "d(i,j) != d(j,i)"});
      }
    }
  }

  if (space.has_coords()) {
    // Euclidean-derived: triangle inequality holds by construction; check that
    // the stored matrix matches the coordinates.
    const Eigen::MatrixXd& c = space.coords();
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double expect = (c.row(i) - c.row(j)).norm();
        if (std::abs(d(i, j) - expect) > tolerance) {
          out.push_back({"coords", i, j, -1, "distance disagrees with coordinates"});
        }
      }
    }
    return out;
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k == i) continue;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i || j == k) continue;
        if (d(i, k) > d(i, j) + d(j, k) + tolerance) {
          out.push_back({"triangle", i, j, k, "d(i,k) > d(i,j) + d(j,k)"});
        }
      }
    }
  }
  return out;
}

void require_valid(const MetricSpace& space, double tolerance) {
  const auto violations = validate_space(space, tolerance);
  if (violations.empty()) return;
  std::ostringstream msg;
  msg << "invalid metric space:";
  for (const auto& v : violations) {
    msg << " [" << v.axiom << " @(" << v.i << "," << v.j;
    if (v.k >= 0) msg << "," << v.k;
    msg << ")]";
  }
  throw std::invalid_argument(msg.str());
}

}  // namespace pstab
