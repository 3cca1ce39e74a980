#pragma once

#include <random>
#include <vector>

#include "pstab/measure.hpp"

// Local randomness for unit tests; the harness generator is its own test
// subject, so tests roll instances with the standard engine instead.
namespace testutil {

inline pstab::SpacePtr random_space(std::mt19937_64& rng, int n, int dim = 2) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd coords(n, dim);
  for (Eigen::Index i = 0; i < coords.rows(); ++i) {
    for (Eigen::Index d = 0; d < coords.cols(); ++d) coords(i, d) = u(rng);
  }
  return pstab::MetricSpace::from_coords(std::move(coords));
}

inline pstab::DiscreteMeasure random_probability(std::mt19937_64& rng, const pstab::SpacePtr& space,
                                                 double zero_fraction = 0.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd w(space->size());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    w[i] = u(rng) < zero_fraction ? 0.0 : 0.05 + u(rng);
  }
  if (w.maxCoeff() <= 0.0) w[0] = 1.0;
  return pstab::DiscreteMeasure::probability(space, std::move(w));
}

inline pstab::Misfit random_misfit(std::mt19937_64& rng, Eigen::Index n, double cap = 3.0) {
  std::uniform_real_distribution<double> u(0.0, cap);
  Eigen::VectorXd phi(n);
  for (Eigen::Index i = 0; i < n; ++i) phi[i] = u(rng);
  return pstab::Misfit(std::move(phi));
}

inline std::vector<Eigen::Index> all_indices(Eigen::Index n) {
  std::vector<Eigen::Index> out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = i;
  return out;
}

}  // namespace testutil
