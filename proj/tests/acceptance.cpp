// Acceptance suite: every criterion is evaluated at its stated tolerance and
// reported as one pass/fail line. The process exits with the number of failed
// criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pstab/harness.hpp"

using namespace pstab;

namespace {

int failures = 0;

// Wall-time budgets are pinned for the optimized build; instrumented builds
// get a fixed multiple so the value checks still run everywhere.
#ifdef NDEBUG
constexpr double kTimeScale = 1.0;
#else
constexpr double kTimeScale = 25.0;
#endif

class Criterion {
 public:
  Criterion(int number, std::string title)
      : number_(number), title_(std::move(title)), start_(std::chrono::steady_clock::now()) {}

  void require(bool ok, const std::string& detail) {
    if (!ok && reason_.empty()) reason_ = detail;
    ok_ = ok_ && ok;
  }

  void finish(double time_budget = 0.0) {
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    time_budget *= kTimeScale;
    if (time_budget > 0.0 && elapsed >= time_budget) {
      ok_ = false;
      if (reason_.empty()) reason_ = "time budget exceeded";
    }
    std::printf("[%s] criterion %2d: %s (%.2fs%s%s)\n", ok_ ? "PASS" : "FAIL", number_,
                title_.c_str(), elapsed, reason_.empty() ? "" : "; ", reason_.c_str());
    if (!ok_) ++failures;
  }

 private:
  int number_;
  std::string title_;
  bool ok_ = true;
  std::string reason_;
  std::chrono::steady_clock::time_point start_;
};

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3g", x);
  return buf;
}

void criterion_1_prior_evidence() {
  Criterion c(1, "prior-to-evidence example: Z1 = Z2 = (exp(-1)+2)/3 within 1e-12");
  const auto example = example_prior_evidence(3000);
  const double expected = (std::exp(-1.0) + 2.0) / 3.0;
  const double z1 = evidence(example.mu1, example.phi);
  const double z2 = evidence(example.mu2, example.phi);
  c.require(std::abs(z1 - expected) <= 1e-12, "z1 error " + fmt(std::abs(z1 - expected)));
  c.require(std::abs(z2 - expected) <= 1e-12, "z2 error " + fmt(std::abs(z2 - expected)));
  c.require(std::abs(z1 - z2) <= 1e-12, "z gap " + fmt(std::abs(z1 - z2)));
  c.finish(1.0);
}

void criterion_2_prior_posterior() {
  Criterion c(2, "prior-to-posterior example: equal posteriors, prior tv 1/3");
  const auto example = example_prior_posterior(3000);
  const auto post1 = posterior(example.mu1, example.phi);
  const auto post2 = posterior(example.mu2, example.phi);
  c.require(std::abs(post1.evidence - 2.0 / 3.0) <= 1e-12, "z1 off 2/3");
  c.require(std::abs(post2.evidence - 2.0 / 3.0) <= 1e-12, "z2 off 2/3");
  const double post_tv = total_variation(post1.posterior, post2.posterior);
  c.require(post_tv <= 1e-12, "posterior tv " + fmt(post_tv));
  const double prior_tv = total_variation(example.mu1, example.mu2);
  c.require(std::abs(prior_tv - 1.0 / 3.0) <= 1e-9, "prior tv " + fmt(prior_tv));
  c.finish(1.0);
}

void criterion_3_translated_uniform() {
  Criterion c(3, "translated uniforms: tv = |tau|, mutual domination fails");
  for (double tau : {0.1, 0.25, 0.5}) {
    const auto example = example_translated_uniform(tau, 3000);
    const double tv = total_variation(example.mu1, example.mu2);
    c.require(std::abs(tv - tau) <= 1e-9, "tv(" + fmt(tau) + ") = " + fmt(tv));
    c.require(!radon_nikodym(example.mu1, example.mu2).dominated(), "forward domination held");
    c.require(!radon_nikodym(example.mu2, example.mu1).dominated(), "backward domination held");
  }
  c.finish(1.0);
}

void criterion_4_evidence_shift() {
  Criterion c(4, "evidence translation identity on 100 random (instance, shift) pairs");
  SplitMix64 shifts(424242);
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto inst = generate_instance(seed, 2 + static_cast<int>(seed % 19));
    const double shift = 16.0 * shifts.uniform() - 8.0;
    const auto check = evidence_shift_check(inst.prior1, inst.misfit1, shift);
    c.require(check.residual <= 1e-12,
              "seed " + std::to_string(seed) + " residual " + fmt(check.residual));
  }
  c.finish();
}

void criterion_5_full_sweep() {
  Criterion c(5, "sandwich sweep: 500 instances, sizes 2-30, every proposition");
  SweepConfig config;
  config.seeds = 500;
  config.min_size = 2;
  config.max_size = 30;
  const auto report = run_verification_sweep(config);
  for (const auto& [name, stats] : report.propositions) {
    if (stats.min_slack_lower) {
      c.require(*stats.min_slack_lower >= -1e-9,
                name + " lower slack " + fmt(*stats.min_slack_lower) + " at seed " +
                    std::to_string(stats.worst_seed_lower));
    }
    if (stats.min_slack_upper) {
      c.require(*stats.min_slack_upper >= -1e-9,
                name + " upper slack " + fmt(*stats.min_slack_upper) + " at seed " +
                    std::to_string(stats.worst_seed_upper));
    }
    c.require(stats.evaluated == 500, name + " evaluated " + std::to_string(stats.evaluated));
  }
  c.require(report.propositions.size() == 8, "expected 8 propositions");
  c.require(report.max_duality_gap <= 1e-8, "duality gap " + fmt(report.max_duality_gap));
  c.require(report.pass, "sweep reported failure");
  c.finish(60.0);
}

void criterion_6_equality_cases() {
  Criterion c(6, "constant shifts force zero smooth-route bounds (50 instances)");
  SplitMix64 shifts(55);
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto inst = generate_instance(seed, 2 + static_cast<int>(seed % 12));
    const double shift = 6.0 * shifts.uniform() - 3.0;
    const Misfit other(inst.misfit1.values().array() + shift);

    const auto tv = tv_misfit_bounds(inst.prior1, inst.misfit1, other);
    c.require(tv.actual <= 1e-12, "tv actual " + fmt(tv.actual));
    c.require(tv.lower_bounds.at("lipschitz").has_value(), "tv lower missing");
    c.require(*tv.lower_bounds.at("lipschitz") <= 1e-12, "tv lipschitz lower positive");
    c.require(*tv.upper_bounds.at("lipschitz") <= 1e-12, "tv lipschitz upper positive");

    const auto hel = hellinger_misfit_bounds(inst.prior1, inst.misfit1, other);
    c.require(hel.actual <= 1e-12, "hellinger actual " + fmt(hel.actual));
    c.require(*hel.lower_bounds.at("lipschitz") <= 1e-12, "hellinger lower positive");
    c.require(*hel.upper_bounds.at("lipschitz") <= 1e-12, "hellinger upper positive");
  }
  c.finish();
}

void criterion_7_transport() {
  Criterion c(7, "transport: duality gap <= 1e-8, line oracle agreement <= 1e-10");
  SplitMix64 rng(777);
  for (int trial = 0; trial < 200; ++trial) {
    const int size = 2 + static_cast<int>(rng.next() % 39);
    const auto inst = generate_instance(1000 + static_cast<std::uint64_t>(trial), size);
    const auto pair = wasserstein_with_dual(inst.prior1, inst.prior2);
    const double gap = std::abs(pair.primal.value - pair.dual.objective);
    c.require(gap <= 1e-8, "duality gap " + fmt(gap) + " at trial " + std::to_string(trial));
  }
  InstanceConfig line;
  line.dimension = 1;
  for (int trial = 0; trial < 100; ++trial) {
    const int size = 2 + static_cast<int>(rng.next() % 24);
    const auto inst = generate_instance(5000 + static_cast<std::uint64_t>(trial), size, line);
    const double solver = wasserstein_exact(inst.prior1, inst.prior2, 1.0).value;
    const double expected = oracle::line_wasserstein(inst.space->coords().col(0),
                                                     inst.prior1.weights(),
                                                     inst.prior2.weights(), 1.0);
    c.require(std::abs(solver - expected) <= 1e-10,
              "oracle mismatch " + fmt(std::abs(solver - expected)));
  }
  c.finish();
}

void criterion_8_misfit_sequence() {
  Criterion c(8, "misfit-sequence counterexample trace");
  const auto cert = reproduce("misfit-sequence");
  for (const auto& entry : cert.entries) {
    c.require(entry.pass(), entry.name + " computed " + fmt(entry.computed));
  }
  c.finish();
}

void criterion_9_scalar_inequalities() {
  Criterion c(9, "scalar inequalities on 1e4-point grids");
  for (int k = 0; k < 10000; ++k) {
    const double x = 40.0 * k / 9999.0;
    const double lhs = x + std::sqrt(2.0 * x);
    const double rhs = x >= 2.0 ? 2.0 * x : 2.0 * std::sqrt(2.0 * x);
    c.require(rhs - lhs >= -1e-12, "basic inequality at x " + fmt(x));
  }
  for (int i = 0; i < 100; ++i) {
    for (int j = 0; j < 100; ++j) {
      const double s = 0.01 + 10.0 * i / 99.0;
      const double t = 0.01 + 10.0 * j / 99.0;
      const auto le = log_envelope(s, t);
      c.require(le.actual - le.lower >= -1e-12, "log lower at " + fmt(s) + "," + fmt(t));
      c.require(le.upper - le.actual >= -1e-12, "log upper at " + fmt(s) + "," + fmt(t));
      const double x = -5.0 + 10.0 * i / 99.0;
      const double y = -5.0 + 10.0 * j / 99.0;
      const auto ee = exp_envelope(x, y);
      c.require(ee.actual - ee.lower >= -1e-12, "exp lower at " + fmt(x) + "," + fmt(y));
      c.require(ee.upper - ee.actual >= -1e-12, "exp upper at " + fmt(x) + "," + fmt(y));
    }
  }
  c.finish();
}

void criterion_10_continuity() {
  Criterion c(10, "continuity experiments contract along the schedule");
  const auto forward = continuity_experiment(ContinuityKind::kMisfitForward, {1, 10, 100, 1000});
  c.require(forward.rows.back().w1_gap <= forward.rows.front().w1_gap / 100.0,
            "forward w1 ratio " + fmt(forward.rows.back().w1_gap / forward.rows.front().w1_gap));
  const auto prior = continuity_experiment(ContinuityKind::kPosteriorToPrior, {1, 10, 100, 1000});
  c.require(prior.contracted(1e-3),
            "prior-case contraction ratio z " +
                fmt(prior.rows.back().z_gap / prior.rows.front().z_gap) + " w1 " +
                fmt(prior.rows.back().w1_gap / prior.rows.front().w1_gap));
  c.finish(10.0);
}

void criterion_11_sensitivity() {
  Criterion c(11, "sensitivity sweep: evidence decreasing, sandwiches contain");
  const auto inst = generate_instance(2024, 20);
  std::vector<double> betas;
  for (int b = 0; b <= 8; ++b) betas.push_back(b);
  const auto rows = sensitivity_sweep(inst, betas, PerturbationKind::kMisfit);
  double prev_z = kInf;
  for (std::size_t k = 0; k < rows.size(); k += 4) {
    c.require(rows[k].z1 <= prev_z + 1e-14, "evidence increased at beta " + fmt(rows[k].beta));
    prev_z = rows[k].z1;
  }
  for (const auto& row : rows) {
    if (row.applicable) {
      c.require(row.contained, row.metric + " not contained at beta " + fmt(row.beta));
    }
  }
  c.require(rows.size() == 4 * betas.size(), "row count");
  c.finish();
}

}  // namespace

int main() {
  criterion_1_prior_evidence();
  criterion_2_prior_posterior();
  criterion_3_translated_uniform();
  criterion_4_evidence_shift();
  criterion_5_full_sweep();
  criterion_6_equality_cases();
  criterion_7_transport();
  criterion_8_misfit_sequence();
  criterion_9_scalar_inequalities();
  criterion_10_continuity();
  criterion_11_sensitivity();
  std::printf("%d of 11 criteria passed\n", 11 - failures);
  return failures;
}
