#pragma once

#include <map>
#include <optional>
#include <string>

#include "pstab/bayes.hpp"
#include "pstab/divergences.hpp"
#include "pstab/measure.hpp"
#include "pstab/transport.hpp"

namespace pstab {

/// Outcome of one bound evaluation: the true distance, every applicable named
/// lower/upper bound, and the hypothesis flags that gated them. A bound whose
/// hypotheses fail is absent (std::nullopt), never a number.
struct BoundReport {
  std::map<std::string, bool> hypotheses;
  double actual = 0.0;  // +inf allowed (Kullback-Leibler without domination)
  std::map<std::string, double> components;
  std::map<std::string, std::optional<double>> lower_bounds;
  std::map<std::string, std::optional<double>> upper_bounds;

  std::optional<double> best_lower() const;  // max over applicable lower bounds
  std::optional<double> best_upper() const;  // min over applicable upper bounds
  std::optional<double> slack_lower() const; // actual - best_lower
  std::optional<double> slack_upper() const; // best_upper - actual
};

/// Total variation between posteriors of one prior under two misfits.
/// Misfits are shifted to essinf 0 before evaluation (the posteriors are
/// unchanged); the applied shifts are recorded in the components.
BoundReport tv_misfit_bounds(const DiscreteMeasure& mu, const Misfit& phi1, const Misfit& phi2);

/// Total variation between posteriors of two priors under one misfit.
BoundReport tv_prior_bounds(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                            const Misfit& phi);

BoundReport hellinger_misfit_bounds(const DiscreteMeasure& mu, const Misfit& phi1,
                                    const Misfit& phi2);

BoundReport hellinger_prior_bounds(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                                   const Misfit& phi);

/// Kullback-Leibler divergence between posteriors when both the prior and the
/// misfit are perturbed; misfit-only and prior-only specialisations add their
/// exponent-form bounds when the respective inputs coincide.
BoundReport kl_joint_bounds(const DiscreteMeasure& mu1, const Misfit& phi1,
                            const DiscreteMeasure& mu2, const Misfit& phi2);

/// 1-Wasserstein distance between posteriors of one prior under two misfits.
BoundReport w1_misfit_bounds(const DiscreteMeasure& mu, const Misfit& phi1, const Misfit& phi2);

/// 1-Wasserstein distance between posteriors of two priors under one misfit.
BoundReport w1_prior_bounds(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                            const Misfit& phi);

/// Residuals of the auxiliary lemmas. Inequality residuals are
/// (larger side - smaller side) and must be >= -1e-10; identity residuals are
/// stored as -|lhs - rhs| so the same acceptance threshold applies.
using ResidualMap = std::map<std::string, std::optional<double>>;

ResidualMap aux_lemma_suite(const DiscreteMeasure& mu, const Misfit& phi1, const Misfit& phi2);
ResidualMap aux_lemma_suite(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                            const Misfit& phi);

}  // namespace pstab
