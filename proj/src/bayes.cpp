#include "pstab/bayes.hpp"

#include <cmath>
#include <stdexcept>

namespace pstab {

namespace {

void check_sizes(const DiscreteMeasure& mu, const Misfit& phi) {
  if (phi.size() != mu.size()) {
    throw std::invalid_argument("misfit length does not match measure");
  }
}

}  // namespace

double evidence(const DiscreteMeasure& mu, const Misfit& phi, double cap) {
  check_sizes(mu, phi);
  NeumaierSum z;
  for (Eigen::Index i : mu.support()) {
    z.add(unnormalised_likelihood(phi[i], cap) * mu.weight(i));
  }
  const double value = z.value();
  if (!(value > 0.0)) {
    throw std::domain_error("evidence vanished: all support misfits at or above the cap");
  }
  return value;
}

double log_evidence(const DiscreteMeasure& mu, const Misfit& phi, double cap) {
  check_sizes(mu, phi);
  double m = -kInf;
  for (Eigen::Index i : mu.support()) m = std::max(m, -phi[i]);
  NeumaierSum shifted;
  for (Eigen::Index i : mu.support()) {
    if (phi[i] >= cap) continue;
    shifted.add(std::exp(-phi[i] - m) * mu.weight(i));
  }
  const double s = shifted.value();
  if (!(s > 0.0)) {
    throw std::domain_error("evidence vanished: all support misfits at or above the cap");
  }
  return m + std::log(s);
}

PosteriorResult posterior(const DiscreteMeasure& mu, const Misfit& phi, double cap) {
  const double z = evidence(mu, phi, cap);
  const double log_z = log_evidence(mu, phi, cap);
  const Eigen::Index n = mu.size();
  Eigen::VectorXd likelihood = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd weights = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i : mu.support()) {
    likelihood[i] = unnormalised_likelihood(phi[i], cap) / z;
    weights[i] = likelihood[i] * mu.weight(i);
  }
  DiscreteMeasure post = DiscreteMeasure::probability(mu.space(), std::move(weights),
                                                      mu.support_tol());
  return PosteriorResult{z, log_z, std::move(likelihood), std::move(post)};
}

Misfit normalize_misfit(const DiscreteMeasure& mu, const Misfit& phi) {
  check_sizes(mu, phi);
  const auto [lo, hi] = ess_bounds(phi.values(), mu);
  (void)hi;
  if (lo == 0.0) return phi;
  return Misfit(phi.values().array() - lo);
}

ShiftCheck evidence_shift_check(const DiscreteMeasure& mu, const Misfit& phi, double c) {
  if (!std::isfinite(c)) throw std::invalid_argument("shift must be finite");
  const double z = evidence(mu, phi);
  const double z_shifted = evidence(mu, Misfit(phi.values().array() + c));
  const double residual = std::abs(z_shifted - std::exp(-c) * z) / z;
  return ShiftCheck{residual, residual <= 1e-12};
}

}  // namespace pstab
