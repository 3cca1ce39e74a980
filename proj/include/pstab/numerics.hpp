#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace pstab {

/// Default tolerances used across the library. Callers that need different
/// thresholds pass them explicitly; these are the documented defaults.
namespace tol {
inline constexpr double kMetric = 1e-12;        // triangle inequality, symmetry
inline constexpr double kProbability = 1e-12;   // weight sums of probability measures
inline constexpr double kSupport = 1e-15;       // weights at or below this count as zero
inline constexpr double kMarginal = 1e-10;      // transport plan marginals
inline constexpr double kDuality = 1e-8;        // primal/dual gap for exact transport
inline constexpr double kSlack = 1e-9;          // sandwich violations
inline constexpr double kBranch = 1e-10;        // evidence-equality / zero-Lipschitz branches
}  // namespace tol

/// Misfit values at or above this threshold stand in for +infinity: the
/// unnormalised likelihood exp(-phi) is flushed to exactly zero there.
inline constexpr double kMisfitCap = 745.0;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct SpaceMismatchError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Compensated (Neumaier) summation. Several certificates demand absolute
/// errors near machine epsilon on sums of thousands of terms, which plain
/// left-to-right accumulation does not guarantee.
class NeumaierSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double stable_sum(const Eigen::Ref<const Eigen::VectorXd>& v) {
  NeumaierSum s;
  for (Eigen::Index i = 0; i < v.size(); ++i) s.add(v[i]);
  return s.value();
}

inline double unnormalised_likelihood(double phi, double cap = kMisfitCap) {
  return phi >= cap ? 0.0 : std::exp(-phi);
}

}  // namespace pstab
