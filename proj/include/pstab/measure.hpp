#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "pstab/metric_space.hpp"
#include "pstab/numerics.hpp"

namespace pstab {

/// Non-negative weight vector over a shared MetricSpace. Weights at or below
/// `support_tol` are treated as exact zeros when computing the support, so a
/// probability measure keeps a stable support under floating-point dust.
class DiscreteMeasure {
 public:
  DiscreteMeasure(SpacePtr space, Eigen::VectorXd weights, bool is_probability = true,
                  double support_tol = tol::kSupport);

  /// Normalises `weights` to a probability vector. The last support weight is
  /// nudged so the accumulated sum is exactly 1.0.
  static DiscreteMeasure probability(SpacePtr space, Eigen::VectorXd weights,
                                     double support_tol = tol::kSupport);

  const SpacePtr& space() const { return space_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  double weight(Eigen::Index i) const { return weights_[i]; }
  Eigen::Index size() const { return weights_.size(); }
  bool is_probability() const { return is_probability_; }
  double support_tol() const { return support_tol_; }

  /// Indices with weight strictly above the support tolerance; never empty.
  const std::vector<Eigen::Index>& support() const { return support_; }
  bool in_support(Eigen::Index i) const { return weights_[i] > support_tol_; }

  bool same_space(const DiscreteMeasure& other) const { return space_ == other.space_; }

 private:
  SpacePtr space_;
  Eigen::VectorXd weights_;
  bool is_probability_;
  double support_tol_;
  std::vector<Eigen::Index> support_;
};

/// Finite real value per point (log-likelihood units). Entries must be finite;
/// values at or above kMisfitCap stand in for +infinity (see numerics.hpp).
class Misfit {
 public:
  explicit Misfit(Eigen::VectorXd values);

  const Eigen::VectorXd& values() const { return values_; }
  double operator[](Eigen::Index i) const { return values_[i]; }
  Eigen::Index size() const { return values_.size(); }

 private:
  Eigen::VectorXd values_;
};

/// Diameter of the support of mu; 0 for a single support point.
double radius(const DiscreteMeasure& mu);

/// Diameter of the union of the two supports.
double union_radius(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2);

std::vector<Eigen::Index> union_support(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2);

/// max over pairs x != y in `restrict` of |f(x)-f(y)| / d(x,y). Returns 0 for a
/// single point and +infinity when two distinct restricted points coincide
/// (d = 0) but carry different f values.
double lipschitz_norm(const Eigen::Ref<const Eigen::VectorXd>& f, const MetricSpace& space,
                      const std::vector<Eigen::Index>& restrict_to);

/// (essinf, esssup) of f over the support of mu: exact min/max on discrete measures.
std::pair<double, double> ess_bounds(const Eigen::Ref<const Eigen::VectorXd>& f,
                                     const DiscreteMeasure& mu);

/// Radon-Nikodym derivative of mu1 with respect to mu2.
struct DensityResult {
  Eigen::VectorXd density;                     // r_i = w1_i / w2_i on supp mu2, 0 elsewhere
  std::optional<Eigen::Index> failure_index;   // first i with w1_i > 0 but w2_i = 0
  bool dominated() const { return !failure_index.has_value(); }
};
DensityResult radon_nikodym(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2);

/// (sum_i d(base,i)^p w_i)^(1/p) for p >= 1.
double pth_moment(const DiscreteMeasure& mu, double p, Eigen::Index base);

}  // namespace pstab
