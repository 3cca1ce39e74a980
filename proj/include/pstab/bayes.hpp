#pragma once

#include <Eigen/Core>

#include "pstab/measure.hpp"
#include "pstab/numerics.hpp"

namespace pstab {

/// Evidence, normalised likelihood, and posterior of a (prior, misfit) pair.
struct PosteriorResult {
  double evidence = 0.0;             // Z = sum_i exp(-phi_i) w_i, strictly positive
  double log_evidence = 0.0;         // computed via max-shifted log-sum-exp
  Eigen::VectorXd likelihood;        // exp(-phi_i - log Z) pointwise
  DiscreteMeasure posterior;         // weights w_i * likelihood_i
};

/// Z = sum over supp mu of exp(-phi_i) w_i. Entries at or above `cap` are
/// flushed to a zero likelihood contribution.
double evidence(const DiscreteMeasure& mu, const Misfit& phi, double cap = kMisfitCap);

/// log Z via max-shift; agrees with log(evidence(...)) but survives misfit
/// scalings that drive Z toward the underflow threshold.
double log_evidence(const DiscreteMeasure& mu, const Misfit& phi, double cap = kMisfitCap);

PosteriorResult posterior(const DiscreteMeasure& mu, const Misfit& phi, double cap = kMisfitCap);

/// phi - essinf_mu(phi); the posterior is unchanged by the shift.
Misfit normalize_misfit(const DiscreteMeasure& mu, const Misfit& phi);

/// Relative residual of the translation identity Z(phi + c) = exp(-c) Z(phi).
struct ShiftCheck {
  double residual = 0.0;
  bool holds = false;  // residual <= 1e-12
};
ShiftCheck evidence_shift_check(const DiscreteMeasure& mu, const Misfit& phi, double c);

}  // namespace pstab
