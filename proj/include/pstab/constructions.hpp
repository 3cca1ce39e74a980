#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pstab/bayes.hpp"
#include "pstab/measure.hpp"

namespace pstab {

/// Midpoint-cell discretization of an interval. When breakpoints are supplied
/// the grid is refined so that every breakpoint is a cell boundary, which makes
/// integrals of piecewise-constant functions exact.
class Grid1D {
 public:
  Grid1D(double a, double b, int n, std::vector<double> align = {});

  const SpacePtr& space() const { return space_; }
  const Eigen::VectorXd& midpoints() const { return midpoints_; }
  const Eigen::VectorXd& widths() const { return widths_; }
  Eigen::Index cells() const { return midpoints_.size(); }

  /// Uniform probability measure on [c, d]; c and d must be cell boundaries.
  DiscreteMeasure uniform(double c, double d) const;

  /// Misfit sampled at cell midpoints.
  Misfit misfit(const std::function<double(double)>& f) const;

 private:
  SpacePtr space_;
  Eigen::VectorXd midpoints_;
  Eigen::VectorXd widths_;
};

std::pair<SpacePtr, DiscreteMeasure> discretize_interval_uniform(double a, double b, int n,
                                                                 std::vector<double> align = {});

/// One certified value of a reproducible example.
struct CertificateEntry {
  std::string name;
  double computed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass() const { return std::abs(computed - expected) <= tolerance; }
};

struct Certificate {
  std::string example_id;
  std::vector<CertificateEntry> entries;
  bool pass() const {
    for (const auto& e : entries) {
      if (!e.pass()) return false;
    }
    return true;
  }
};

/// Two uniform priors plus one misfit on a shared grid, with the certificate
/// of the example they instantiate.
struct ExampleInstance {
  SpacePtr space;
  DiscreteMeasure mu1;
  DiscreteMeasure mu2;
  Misfit phi;
  Certificate certificate;
};

/// Two overlapping uniform priors whose evidences coincide under a two-level
/// misfit although the priors differ.
ExampleInstance example_prior_evidence(int n = 3000);

/// Same priors with an indicator likelihood: identical posteriors from
/// distinct priors.
ExampleInstance example_prior_posterior(int n = 3000);

/// Uniform measure against its translate: total variation |tau| while neither
/// measure dominates the other.
ExampleInstance example_translated_uniform(double tau, int n = 3000);

/// Sequence phi_k = phi + step * indicator(S_k) over nested index sets growing
/// to the full support: the misfit gap stays bounded away from zero while the
/// log-likelihood gap collapses.
struct MisfitSequenceRow {
  int k = 0;
  double misfit_gap_l1 = 0.0;
  double misfit_gap_linf = 0.0;
  double log_likelihood_gap_l1 = 0.0;
};
struct MisfitSequenceTrace {
  std::vector<MisfitSequenceRow> rows;
  double misfit_gap_floor = 0.0;  // step * mu(S_1)
};
MisfitSequenceTrace counterexample_misfit_sequence(const DiscreteMeasure& mu, const Misfit& phi,
                                                   double step,
                                                   const std::vector<std::vector<Eigen::Index>>& sets);

enum class ContinuityKind { kMisfitForward, kPosteriorToMisfit, kPosteriorToPrior };

struct ContinuityRow {
  long n = 0;
  double z_gap = 0.0;
  double w1_gap = 0.0;
  double likelihood_l2_gap = 0.0;  // NaN when not tracked by the experiment
  double misfit_l2_gap = 0.0;      // NaN when not tracked by the experiment
};

struct ContinuityTrace {
  ContinuityKind kind{};
  std::vector<ContinuityRow> rows;
  bool monotone_decreasing = false;  // every tracked gap non-increasing along the schedule

  /// Final tracked gaps at most `factor` times the initial ones. The schedule
  /// constructions land exactly on the factor, so the comparison admits a
  /// 1e-9 relative guard.
  bool contracted(double factor) const;
};

ContinuityTrace continuity_experiment(ContinuityKind kind, const std::vector<long>& schedule);

}  // namespace pstab
