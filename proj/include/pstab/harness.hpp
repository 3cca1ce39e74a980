#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pstab/bounds.hpp"
#include "pstab/constructions.hpp"
#include "pstab/measure.hpp"

#include <json.hpp>

namespace pstab {

/// SplitMix64. Chosen because it is trivial to restate in any language, so the
/// same seeds reproduce bit-identical instances elsewhere. Draw order is part
/// of the format and documented at each consumer.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

struct InstanceConfig {
  double misfit_cap = 4.0;     // misfits drawn uniformly in [0, misfit_cap]
  int dimension = 2;           // coordinates in the unit cube
  double concentration = 1.0;  // weights ~ u^(1/concentration); large => flat
  double sparsity = 0.0;       // probability of zeroing a prior weight
};

struct ProblemInstance {
  SpacePtr space;
  DiscreteMeasure prior1;
  DiscreteMeasure prior2;
  Misfit misfit1;
  Misfit misfit2;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> meta;
};

/// Deterministic instance: one SplitMix64 stream seeded with `seed`, consumed
/// in the order coords, prior1, prior2, misfit1, misfit2 (two draws per prior
/// weight: value then sparsity gate).
ProblemInstance generate_instance(std::uint64_t seed, int size, const InstanceConfig& config = {});

struct SweepConfig {
  int seeds = 500;
  int min_size = 2;
  int max_size = 30;
  InstanceConfig instance;
  std::map<std::string, bool> toggles;  // proposition name -> enabled (absent = enabled)
  // Fault injection for harness self-tests: scales every upper bound of the
  // named proposition.
  std::string break_proposition;
  double break_factor = 1.0;
};

struct PropositionStats {
  long evaluated = 0;
  long applicable = 0;
  std::optional<double> min_slack_lower;
  std::optional<double> min_slack_upper;
  std::uint64_t worst_seed_lower = 0;
  std::uint64_t worst_seed_upper = 0;
};

struct SweepReport {
  std::map<std::string, PropositionStats> propositions;
  double max_duality_gap = 0.0;
  std::uint64_t worst_duality_seed = 0;
  long instances = 0;
  bool pass = false;
};

/// Evaluates every bound operation and the auxiliary-lemma suite on seeded
/// instances; pass iff every applicable slack is >= -1e-9 and all duality gaps
/// are within 1e-8.
SweepReport run_verification_sweep(const SweepConfig& config);

enum class PerturbationKind { kMisfit, kPrior };

struct SensitivityRow {
  double beta = 0.0;
  double z1 = 0.0;
  double z2 = 0.0;
  std::string metric;  // tv | hellinger | kl | w1
  double actual = 0.0;
  std::optional<double> best_lower;
  std::optional<double> best_upper;
  bool applicable = false;
  bool contained = false;  // applicable bounds sandwich the actual value
};

/// Scales the instance's first misfit by each beta. Misfit mode perturbs by
/// the instance's second misfit under the first prior; prior mode compares the
/// two priors under the scaled misfit. Four rows (one per metric) per beta.
std::vector<SensitivityRow> sensitivity_sweep(const ProblemInstance& instance,
                                              const std::vector<double>& betas,
                                              PerturbationKind kind);

/// Runs a named example ("misfit-sequence", "prior-evidence", "prior-posterior",
/// "translated-uniform", "continuity-misfit", "continuity-posterior-misfit",
/// "continuity-posterior-prior") and returns its certificate.
Certificate reproduce(const std::string& example_id, double tau = 0.25, int grid = 3000);

/// Problem-spec JSON: {"points" | "distance_matrix", "prior1", "prior2"?,
/// "misfit1", "misfit2"?}; weights are validated on load.
struct ProblemSpec {
  SpacePtr space;
  std::optional<DiscreteMeasure> prior1;
  std::optional<DiscreteMeasure> prior2;
  std::optional<Misfit> misfit1;
  std::optional<Misfit> misfit2;
};
ProblemSpec load_problem_spec(const nlohmann::json& doc);
ProblemSpec load_problem_spec_file(const std::string& path);

nlohmann::json bound_report_to_json(const BoundReport& report);
nlohmann::json sweep_report_to_json(const SweepReport& report, const SweepConfig& config);
nlohmann::json certificate_to_json(const Certificate& cert);

/// Fixed columns: beta,Z1,Z2,metric,actual,best_lower,best_upper,applicable.
std::string sensitivity_csv(const std::vector<SensitivityRow>& rows);

}  // namespace pstab
