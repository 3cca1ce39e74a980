#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace pstab {

/// One failed metric axiom, naming the axiom and the offending indices.
struct SpaceViolation {
  std::string axiom;  // "size", "nonnegative", "diagonal", "symmetry", "triangle", "coords"
  Eigen::Index i = -1;
  Eigen::Index j = -1;
  Eigen::Index k = -1;
  std::string detail;
};

/// A finite metric space: point labels plus a dense distance matrix, optionally
/// derived from coordinates (rows of `coords`) under the Euclidean metric.
///
/// Instances are immutable after construction and are shared between measures
/// via shared_ptr; two measures are comparable only when they hold the same
/// space object.
class MetricSpace {
 public:
  static std::shared_ptr<const MetricSpace> from_distance(Eigen::MatrixXd dist,
                                                          std::vector<std::string> labels = {});
  static std::shared_ptr<const MetricSpace> from_coords(Eigen::MatrixXd coords,
                                                        std::vector<std::string> labels = {});

  Eigen::Index size() const { return dist_.rows(); }
  double distance(Eigen::Index i, Eigen::Index j) const { return dist_(i, j); }
  const Eigen::MatrixXd& distance_matrix() const { return dist_; }
  const std::vector<std::string>& labels() const { return labels_; }
  bool has_coords() const { return coords_.has_value(); }
  const Eigen::MatrixXd& coords() const { return *coords_; }

  /// Largest pairwise distance in the whole space.
  double diameter() const;

  MetricSpace(Eigen::MatrixXd dist, std::optional<Eigen::MatrixXd> coords,
              std::vector<std::string> labels);

 private:
  Eigen::MatrixXd dist_;
  std::optional<Eigen::MatrixXd> coords_;
  std::vector<std::string> labels_;
};

using SpacePtr = std::shared_ptr<const MetricSpace>;

/// Diagnostic check of all metric axioms. Empty result iff the space is valid.
/// The cubic triangle-inequality scan is skipped for coordinate-derived spaces,
/// where the axiom holds by construction; consistency of the stored matrix with
/// the coordinates is checked instead.
std::vector<SpaceViolation> validate_space(const MetricSpace& space, double tolerance = 1e-12);

/// Throws std::invalid_argument combining all violations, if any.
void require_valid(const MetricSpace& space, double tolerance = 1e-12);

}  // namespace pstab
