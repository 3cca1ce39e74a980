#include "pstab/bounds.hpp"

#include <algorithm>
#include <cmath>

namespace pstab {

namespace {

// Exp-safe ceiling for misfit magnitudes: beyond this, exp(+phi) overflows and
// the flushed likelihood no longer represents a finite misfit.
constexpr double kBoundedCeiling = 700.0;

double lp_norm(const Eigen::VectorXd& f, const DiscreteMeasure& mu, double p) {
  NeumaierSum s;
  for (Eigen::Index i : mu.support()) {
    s.add(std::pow(std::abs(f[i]), p) * mu.weight(i));
  }
  return std::pow(s.value(), 1.0 / p);
}

double l1_norm(const Eigen::VectorXd& f, const DiscreteMeasure& mu) {
  NeumaierSum s;
  for (Eigen::Index i : mu.support()) s.add(std::abs(f[i]) * mu.weight(i));
  return s.value();
}

double integral(const Eigen::VectorXd& f, const DiscreteMeasure& mu) {
  NeumaierSum s;
  for (Eigen::Index i : mu.support()) s.add(f[i] * mu.weight(i));
  return s.value();
}

Eigen::VectorXd flushed_exp(const Misfit& phi) {
  Eigen::VectorXd e(phi.size());
  for (Eigen::Index i = 0; i < phi.size(); ++i) e[i] = unnormalised_likelihood(phi[i]);
  return e;
}

bool evidences_equal(double z1, double z2) {
  return std::abs(z1 - z2) <= tol::kBranch * std::max(z1, z2);
}

// Shared state for the misfit-perturbation reports. The upper bounds need the
// pair shifted to essinf 0; the lower-bound routes carry no essinf hypothesis
// and are evaluated on the raw pair, whose evidences the caller may have
// matched deliberately.
struct MisfitPair {
  Misfit phi1, phi2;  // shifted misfits (essinf 0 over supp mu)
  double shift1 = 0.0, shift2 = 0.0;
  PosteriorResult post1, post2;
  double z1 = 0.0, z2 = 0.0;  // evidences of the shifted misfits
  double sup1 = 0.0, sup2 = 0.0;
  Eigen::VectorXd raw1, raw2;
  double z1_raw = 0.0, z2_raw = 0.0;
  double sup_abs1 = 0.0, sup_abs2 = 0.0;  // esssup |raw misfit|
  bool bounded = false;                   // raw misfits below the exp-safe ceiling
  bool exp_safe = false;                  // exp(-raw misfit) cannot overflow
  bool sign_pos = false, sign_neg = false;  // signs of raw phi1 - phi2 on supp mu
  bool z_equal = false;                     // raw evidence equality
};

MisfitPair make_misfit_pair(const DiscreteMeasure& mu, const Misfit& raw1, const Misfit& raw2,
                            bool normalize = true) {
  Misfit n1 = normalize ? normalize_misfit(mu, raw1) : raw1;
  Misfit n2 = normalize ? normalize_misfit(mu, raw2) : raw2;
  PosteriorResult p1 = posterior(mu, n1);
  PosteriorResult p2 = posterior(mu, n2);
  MisfitPair ctx{std::move(n1),
                 std::move(n2),
                 normalize ? ess_bounds(raw1.values(), mu).first : 0.0,
                 normalize ? ess_bounds(raw2.values(), mu).first : 0.0,
                 std::move(p1),
                 std::move(p2),
                 0.0,
                 0.0,
                 0.0,
                 0.0,
                 raw1.values(),
                 raw2.values()};
  ctx.z1 = ctx.post1.evidence;
  ctx.z2 = ctx.post2.evidence;
  ctx.sup1 = ess_bounds(ctx.phi1.values(), mu).second;
  ctx.sup2 = ess_bounds(ctx.phi2.values(), mu).second;
  ctx.z1_raw = evidence(mu, raw1);
  ctx.z2_raw = evidence(mu, raw2);
  const auto [inf1, hi1] = ess_bounds(ctx.raw1, mu);
  const auto [inf2, hi2] = ess_bounds(ctx.raw2, mu);
  ctx.sup_abs1 = std::max(std::abs(inf1), std::abs(hi1));
  ctx.sup_abs2 = std::max(std::abs(inf2), std::abs(hi2));
  ctx.bounded = ctx.sup_abs1 < kBoundedCeiling && ctx.sup_abs2 < kBoundedCeiling;
  ctx.exp_safe = std::min(inf1, inf2) > -kBoundedCeiling;
  for (Eigen::Index i : mu.support()) {
    const double d = ctx.raw1[i] - ctx.raw2[i];
    if (d > 0.0) ctx.sign_pos = true;
    if (d < 0.0) ctx.sign_neg = true;
  }
  ctx.z_equal = evidences_equal(ctx.z1_raw, ctx.z2_raw);
  return ctx;
}

// |log l1 - log l2| pointwise; only meaningful when both misfits are bounded.
Eigen::VectorXd log_likelihood_gap(const MisfitPair& ctx) {
  const double dlz = ctx.post1.log_evidence - ctx.post2.log_evidence;
  return (ctx.phi1.values() - ctx.phi2.values()).array() + dlz;
}

// Shared state for the prior-perturbation reports: one misfit shifted to
// essinf 0 over the union support.
struct PriorPair {
  Misfit phi;
  double shift = 0.0;
  std::vector<Eigen::Index> uni;
  PosteriorResult post1, post2;
  double z1 = 0.0, z2 = 0.0;
  double sup1 = 0.0, sup2 = 0.0;  // esssup of the shifted misfit over each support
  double essinf1 = 0.0, essinf2 = 0.0;
  bool bounded = false;
  bool z_equal = false;
};

PriorPair make_prior_pair(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                          const Misfit& raw) {
  if (!mu1.same_space(mu2)) throw SpaceMismatchError("priors live on different spaces");
  if (raw.size() != mu1.size()) throw std::invalid_argument("misfit length does not match space");
  auto uni = union_support(mu1, mu2);
  double lo = kInf;
  for (Eigen::Index i : uni) lo = std::min(lo, raw[i]);
  Misfit phi = lo == 0.0 ? raw : Misfit(raw.values().array() - lo);
  PosteriorResult p1 = posterior(mu1, phi);
  PosteriorResult p2 = posterior(mu2, phi);
  PriorPair ctx{std::move(phi), lo, std::move(uni), std::move(p1), std::move(p2)};
  ctx.z1 = ctx.post1.evidence;
  ctx.z2 = ctx.post2.evidence;
  std::tie(ctx.essinf1, ctx.sup1) = ess_bounds(ctx.phi.values(), mu1);
  std::tie(ctx.essinf2, ctx.sup2) = ess_bounds(ctx.phi.values(), mu2);
  ctx.bounded = std::max(ctx.sup1, ctx.sup2) < kBoundedCeiling;
  ctx.z_equal = evidences_equal(ctx.z1, ctx.z2);
  return ctx;
}

}  // namespace

std::optional<double> BoundReport::best_lower() const {
  std::optional<double> best;
  for (const auto& [name, value] : lower_bounds) {
    if (value && (!best || *value > *best)) best = *value;
  }
  return best;
}

std::optional<double> BoundReport::best_upper() const {
  std::optional<double> best;
  for (const auto& [name, value] : upper_bounds) {
    if (value && (!best || *value < *best)) best = *value;
  }
  return best;
}

std::optional<double> BoundReport::slack_lower() const {
  const auto b = best_lower();
  if (!b || std::isinf(actual)) return std::nullopt;
  return actual - *b;
}

std::optional<double> BoundReport::slack_upper() const {
  const auto b = best_upper();
  if (!b || std::isinf(actual)) return std::nullopt;
  return *b - actual;
}

BoundReport tv_misfit_bounds(const DiscreteMeasure& mu, const Misfit& phi1, const Misfit& phi2) {
  const MisfitPair ctx = make_misfit_pair(mu, phi1, phi2);
  BoundReport report;
  report.actual = total_variation(ctx.post1.posterior, ctx.post2.posterior);

  report.hypotheses["essinf_zero"] = true;
  report.hypotheses["bounded_misfits"] = ctx.bounded;
  report.hypotheses["sign_change"] = ctx.sign_pos && ctx.sign_neg;
  report.hypotheses["evidence_equal"] = ctx.z_equal;

  report.components["z1"] = ctx.z1;
  report.components["z2"] = ctx.z2;
  report.components["z1_raw"] = ctx.z1_raw;
  report.components["z2_raw"] = ctx.z2_raw;
  report.components["shift1"] = ctx.shift1;
  report.components["shift2"] = ctx.shift2;
  report.components["esssup_phi1"] = ctx.sup1;
  report.components["esssup_phi2"] = ctx.sup2;

  const Eigen::VectorXd e1 = flushed_exp(ctx.phi1);
  const Eigen::VectorXd e2 = flushed_exp(ctx.phi2);
  const double exp_l1 = l1_norm(e1 - e2, mu);
  const double dz = std::abs(ctx.z2 - ctx.z1);
  report.components["exp_gap_l1"] = exp_l1;
  report.components["chain_exp_vs_dz"] = exp_l1 - dz;

  report.upper_bounds["triangle"] = 0.5 / std::max(ctx.z1, ctx.z2) * (exp_l1 + dz);

  if (ctx.bounded) {
    const Eigen::VectorXd gap = log_likelihood_gap(ctx);
    const double core = l1_norm(gap, mu);
    const double misfit_l1 = l1_norm(ctx.raw1 - ctx.raw2, mu);
    report.components["log_likelihood_gap_l1"] = core;
    report.components["misfit_gap_l1"] = misfit_l1;
    report.components["chain_misfit_vs_exp"] =
        l1_norm(ctx.phi1.values() - ctx.phi2.values(), mu) - exp_l1;

    report.upper_bounds["lipschitz"] = 0.5 / std::min(ctx.z1, ctx.z2) * core;
    report.lower_bounds["lipschitz"] =
        0.5 * std::min(std::exp(-ctx.sup1) / ctx.z1, std::exp(-ctx.sup2) / ctx.z2) * core;

    // Triangle-approach lower bound: evaluated on the raw pair (the caller may
    // have matched the raw evidences), split on the evidence comparison and on
    // the sign pattern of phi1 - phi2.
    double branch;
    double value;
    if (ctx.z_equal) {
      branch = 0;
      value = 0.5 * std::min(std::exp(-ctx.sup_abs1), std::exp(-ctx.sup_abs2)) /
              std::min(ctx.z1_raw, ctx.z2_raw) * misfit_l1;
    } else if (!(ctx.sign_pos && ctx.sign_neg)) {
      branch = 3;
      value = 0.0;
    } else if (ctx.z1_raw > ctx.z2_raw) {
      branch = 1;
      NeumaierSum s;
      for (Eigen::Index i : mu.support()) {
        const double d = ctx.raw1[i] - ctx.raw2[i];
        if (d > 0.0) s.add(d * mu.weight(i));
      }
      value = std::exp(-ctx.sup_abs1) / ctx.z2_raw * s.value();
    } else {
      branch = 2;
      NeumaierSum s;
      for (Eigen::Index i : mu.support()) {
        const double d = ctx.raw2[i] - ctx.raw1[i];
        if (d > 0.0) s.add(d * mu.weight(i));
      }
      value = std::exp(-ctx.sup_abs2) / ctx.z1_raw * s.value();
    }
    report.components["triangle_lower_branch"] = branch;
    report.lower_bounds["triangle"] = value;
  }
  return report;
}

BoundReport tv_prior_bounds(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                            const Misfit& phi) {
  const PriorPair ctx = make_prior_pair(mu1, mu2, phi);
  BoundReport report;
  report.actual = total_variation(ctx.post1.posterior, ctx.post2.posterior);

  const double prior_tv = total_variation(mu1, mu2);
  const double dz = std::abs(ctx.z2 - ctx.z1);

  report.hypotheses["essinf_zero"] = true;
  report.hypotheses["bounded_misfits"] = ctx.bounded;
  report.hypotheses["evidence_equal"] = ctx.z_equal;

  report.components["z1"] = ctx.z1;
  report.components["z2"] = ctx.z2;
  report.components["shift"] = ctx.shift;
  report.components["essinf_phi_mu1"] = ctx.essinf1;
  report.components["essinf_phi_mu2"] = ctx.essinf2;
  report.components["esssup_phi_mu1"] = ctx.sup1;
  report.components["esssup_phi_mu2"] = ctx.sup2;
  report.components["prior_tv"] = prior_tv;
  report.components["chain_dz_vs_2tv"] = 2.0 * prior_tv - dz;

  report.upper_bounds["triangle"] = (prior_tv + 0.5 * dz) / std::max(ctx.z1, ctx.z2);
  if (ctx.bounded) {
    report.lower_bounds["triangle"] = std::min(std::exp(-ctx.sup1), std::exp(-ctx.sup2)) /
                                      ctx.z1 *
                                      std::abs(prior_tv - std::abs((ctx.z2 - ctx.z1) /
                                                                   (2.0 * ctx.z2)));
  }

  // Density-ratio route: needs mutually dominating priors with a pinned ratio.
  const auto rn21 = radon_nikodym(mu2, mu1);
  const auto rn12 = radon_nikodym(mu1, mu2);
  const bool mutual = rn21.dominated() && rn12.dominated();
  report.hypotheses["mutually_dominating"] = mutual;
  if (mutual) {
    double c = kInf, C = 0.0;
    for (Eigen::Index i : mu1.support()) {
      c = std::min(c, rn21.density[i]);
      C = std::max(C, rn21.density[i]);
    }
    report.components["density_ratio_min"] = c;
    report.components["density_ratio_max"] = C;

    Eigen::VectorXd core = Eigen::VectorXd::Zero(mu1.size());
    const double log_ratio = std::log(ctx.z2 / ctx.z1);
    for (Eigen::Index i : mu1.support()) {
      core[i] = log_ratio - std::log(rn21.density[i]);
    }
    const double core_l1 = l1_norm(core, mu1);
    report.components["log_core_l1"] = core_l1;
    report.upper_bounds["lipschitz"] = 0.5 / std::min(ctx.z1, ctx.z2) * C * core_l1;
    if (ctx.bounded) {
      report.lower_bounds["lipschitz"] =
          0.5 * std::exp(-ctx.sup1) * std::min(1.0 / ctx.z1, c / ctx.z2) * core_l1;
    }
  }
  return report;
}

BoundReport hellinger_misfit_bounds(const DiscreteMeasure& mu, const Misfit& phi1,
                                    const Misfit& phi2) {
  const MisfitPair ctx = make_misfit_pair(mu, phi1, phi2);
  BoundReport report;
  report.actual = hellinger(ctx.post1.posterior, ctx.post2.posterior);

  report.hypotheses["essinf_zero"] = true;
  report.hypotheses["bounded_misfits"] = ctx.bounded;
  report.hypotheses["evidence_equal"] = ctx.z_equal;

  const double sz1 = std::sqrt(ctx.z1);
  const double sz2 = std::sqrt(ctx.z2);
  report.components["z1"] = ctx.z1;
  report.components["z2"] = ctx.z2;
  report.components["shift1"] = ctx.shift1;
  report.components["shift2"] = ctx.shift2;
  report.components["esssup_phi1"] = ctx.sup1;
  report.components["esssup_phi2"] = ctx.sup2;

  // Half-misfit likelihoods: sqrt of the flushed full likelihood keeps capped
  // points at exactly zero.
  Eigen::VectorXd h1 = flushed_exp(ctx.phi1).cwiseSqrt();
  Eigen::VectorXd h2 = flushed_exp(ctx.phi2).cwiseSqrt();
  const double exp_l2 = lp_norm(h1 - h2, mu, 2.0);
  const double dsz = std::abs(sz2 - sz1);
  report.components["half_exp_gap_l2"] = exp_l2;
  report.components["chain_exp_vs_dsqrtz"] = exp_l2 - dsz;

  report.upper_bounds["triangle"] = (exp_l2 + dsz) / std::max(sz1, sz2);

  if (ctx.bounded) {
    const Eigen::VectorXd gap = log_likelihood_gap(ctx);
    const double core = lp_norm(gap, mu, 2.0);
    const double misfit_l1 = l1_norm(ctx.phi1.values() - ctx.phi2.values(), mu);
    const double misfit_l2 = lp_norm(ctx.phi1.values() - ctx.phi2.values(), mu, 2.0);
    report.components["log_likelihood_gap_l2"] = core;

    report.upper_bounds["lipschitz"] = 0.5 / std::min(sz1, sz2) * core;
    report.lower_bounds["lipschitz"] =
        0.5 *
        std::min(std::exp(-0.5 * ctx.sup1) / sz1, std::exp(-0.5 * ctx.sup2) / sz2) * core;
    report.upper_bounds["chain"] =
        std::min(2.0 * std::sqrt(misfit_l1), misfit_l2) / std::max(sz1, sz2);
  }
  return report;
}

BoundReport hellinger_prior_bounds(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                                   const Misfit& phi) {
  const PriorPair ctx = make_prior_pair(mu1, mu2, phi);
  BoundReport report;
  report.actual = hellinger(ctx.post1.posterior, ctx.post2.posterior);

  const double prior_hel = hellinger(mu1, mu2);
  const double sz1 = std::sqrt(ctx.z1);
  const double sz2 = std::sqrt(ctx.z2);
  const double dsz = std::abs(sz2 - sz1);

  report.hypotheses["essinf_zero"] = true;
  report.hypotheses["bounded_misfits"] = ctx.bounded;
  report.hypotheses["evidence_equal"] = ctx.z_equal;

  report.components["z1"] = ctx.z1;
  report.components["z2"] = ctx.z2;
  report.components["shift"] = ctx.shift;
  report.components["prior_hellinger"] = prior_hel;
  report.components["chain_hel_vs_dsqrtz"] = prior_hel - dsz;
  report.components["chain_hel_vs_dz"] = 2.0 * prior_hel - std::abs(ctx.z1 - ctx.z2);

  report.upper_bounds["triangle"] = (prior_hel + dsz) / std::max(sz1, sz2);
  report.upper_bounds["reference"] = 2.0 * prior_hel / std::min(ctx.z1, ctx.z2);
  if (ctx.bounded) {
    report.lower_bounds["triangle"] =
        std::min(std::exp(-0.5 * ctx.sup1), std::exp(-0.5 * ctx.sup2)) / sz1 *
        std::abs(prior_hel - dsz / sz2);
  }
  return report;
}

BoundReport kl_joint_bounds(const DiscreteMeasure& mu1, const Misfit& phi1,
                            const DiscreteMeasure& mu2, const Misfit& phi2) {
  if (!mu1.same_space(mu2)) throw SpaceMismatchError("priors live on different spaces");
  const bool misfit_only = mu1.weights() == mu2.weights();
  const bool prior_only = phi1.values() == phi2.values();

  // The first misfit is shifted to essinf 0 under mu1; the second under mu2,
  // except that an identical misfit keeps the first shift so the perturbation
  // term vanishes exactly.
  const Misfit phi1n = normalize_misfit(mu1, phi1);
  const Misfit phi2n = prior_only ? phi1n : normalize_misfit(mu2, phi2);

  const PosteriorResult post1 = posterior(mu1, phi1n);
  const PosteriorResult post2 = posterior(mu2, phi2n);
  const double z1 = post1.evidence;
  const double z2 = post2.evidence;

  BoundReport report;
  report.actual = kullback_leibler(post1.posterior, post2.posterior);

  const auto rn = radon_nikodym(mu1, mu2);
  const bool dominated = rn.dominated();
  const double sup1 = ess_bounds(phi1n.values(), mu1).second;
  const double sup2 = ess_bounds(phi2n.values(), mu2).second;
  const double sup21 = ess_bounds(phi2n.values(), mu1).second;
  const bool bounded = std::max({sup1, sup2, sup21}) < kBoundedCeiling;

  report.hypotheses["dominated"] = dominated;
  report.hypotheses["posterior_dominated"] = !std::isinf(report.actual);
  report.hypotheses["bounded_misfits"] = bounded;
  report.hypotheses["misfit_only"] = misfit_only;
  report.hypotheses["prior_only"] = prior_only;

  report.components["z1"] = z1;
  report.components["z2"] = z2;
  report.components["esssup_phi1_mu1"] = sup1;
  report.components["esssup_phi2_mu2"] = sup2;

  if (!dominated || !bounded) return report;

  const double kl_prior = kullback_leibler(mu1, mu2);
  const double log_ratio = std::abs(std::log(z2 / z1));
  const Eigen::VectorXd dphi = phi2n.values() - phi1n.values();
  const double dphi_l1_mu1 = l1_norm(dphi, mu1);
  report.components["kl_prior"] = kl_prior;
  report.components["abs_log_evidence_ratio"] = log_ratio;
  report.components["misfit_gap_l1_mu1"] = dphi_l1_mu1;

  report.upper_bounds["joint"] =
      dphi_l1_mu1 / z1 + log_ratio + (kl_prior + std::sqrt(2.0 * kl_prior)) / z1;

  // Evidence-ratio chain, applicable when both shifted misfits also have
  // essinf 0 under mu2.
  const double essinf1_mu2 = ess_bounds(phi1n.values(), mu2).first;
  const double essinf2_mu2 = ess_bounds(phi2n.values(), mu2).first;
  const bool chain_ok = std::abs(essinf1_mu2) <= tol::kBranch &&
                        std::abs(essinf2_mu2) <= tol::kBranch;
  report.hypotheses["evidence_chain"] = chain_ok;
  if (chain_ok) {
    const double z12 = evidence(mu2, phi1n);
    const double zmin = std::min(z12, z2);
    const double chain_bound =
        l1_norm(dphi, mu2) / zmin + std::sqrt(2.0 * kl_prior) / zmin;
    report.components["evidence_ratio_chain_bound"] = chain_bound;
    report.components["evidence_ratio_chain_residual"] = chain_bound - log_ratio;
  }

  if (!std::isinf(report.actual)) {
    // Exponent-form lower bound. The chained quantity is the weighted L1 norm
    // of the pointwise log-density gap (misfit difference + evidence ratio +
    // prior log-density), which sits below x + sqrt(2x) at x = actual; the
    // scalar inequality then turns it into a lower bound with exponent gamma.
    const double signed_log_ratio = std::log(z2 / z1);
    Eigen::VectorXd core = Eigen::VectorXd::Zero(mu1.size());
    for (Eigen::Index i : mu1.support()) {
      core[i] = dphi[i] + signed_log_ratio + std::log(rn.density[i]);
    }
    const double mid = std::exp(-sup1) / z1 * l1_norm(core, mu1);
    const double gamma = report.actual < 2.0 ? 2.0 : 1.0;
    report.components["gamma"] = gamma;
    report.components["exponent_mid"] = mid;
    report.components["exponent_chain_residual"] =
        report.actual + std::sqrt(2.0 * report.actual) - mid;
    report.lower_bounds["exponent"] = 0.125 * std::pow(mid, gamma);

    if (prior_only) {
      const double lower_core =
          std::exp(-sup1) / z1 * std::abs(std::log(z2 / z1) + kl_prior);
      report.lower_bounds["prior_exponent"] = 0.125 * std::pow(lower_core, gamma);
      const double xi = kl_prior >= 2.0 ? 1.0 : 0.5;
      report.components["xi"] = xi;
      report.upper_bounds["prior_exponent"] =
          log_ratio + 2.0 * std::sqrt(2.0) * std::pow(kl_prior, xi) / z1;
    }
  }

  if (misfit_only) {
    const double combined = dphi_l1_mu1 / z1 + dphi_l1_mu1 / std::min(z1, z2);
    const double reference = 2.0 * dphi_l1_mu1 / std::min(z1, z2);
    report.upper_bounds["misfit_combined"] = combined;
    report.upper_bounds["reference"] = reference;
    report.components["tightness_residual"] = reference - combined;
  }
  return report;
}

BoundReport w1_misfit_bounds(const DiscreteMeasure& mu, const Misfit& phi1, const Misfit& phi2) {
  const MisfitPair ctx = make_misfit_pair(mu, phi1, phi2);
  BoundReport report;

  const TransportPair tp = wasserstein_with_dual(ctx.post1.posterior, ctx.post2.posterior);
  report.actual = tp.primal.value;

  const double r = radius(mu);
  const Eigen::VectorXd e1 = flushed_exp(ctx.phi1);
  const Eigen::VectorXd e2 = flushed_exp(ctx.phi2);
  const double exp_l1 = l1_norm(e1 - e2, mu);
  const double dz = std::abs(ctx.z1 - ctx.z2);
  const double zmax = std::max(ctx.z1, ctx.z2);

  report.hypotheses["essinf_zero"] = true;
  report.hypotheses["bounded_misfits"] = ctx.bounded;
  report.hypotheses["evidence_equal"] = ctx.z_equal;

  report.components["z1"] = ctx.z1;
  report.components["z2"] = ctx.z2;
  report.components["z1_raw"] = ctx.z1_raw;
  report.components["z2_raw"] = ctx.z2_raw;
  report.components["radius"] = r;
  report.components["exp_gap_l1"] = exp_l1;
  report.components["duality_gap"] = std::abs(tp.primal.value - tp.dual.objective);

  // The duality identity re-evaluated with the computed optimizer.
  {
    const Eigen::VectorXd& f = tp.dual.potential;
    NeumaierSum first;
    for (Eigen::Index i : mu.support()) first.add(f[i] * (e1[i] - e2[i]) * mu.weight(i));
    const double second = (ctx.z2 - ctx.z1) * integral(f, ctx.post2.posterior);
    report.components["dual_identity_residual"] =
        std::abs(report.actual - std::abs(first.value() + second) / ctx.z1);
  }

  // The likelihood-route upper bound holds for the misfits as given (its
  // derivation never shifts them), so a non-zero constant misfit offset keeps
  // this bound strictly positive while the actual distance vanishes.
  if (ctx.exp_safe) {
    const Eigen::VectorXd er1 = ctx.raw1.array().unaryExpr(
        [](double v) { return unnormalised_likelihood(v); });
    const Eigen::VectorXd er2 = ctx.raw2.array().unaryExpr(
        [](double v) { return unnormalised_likelihood(v); });
    const double raw_exp_l1 = l1_norm(er1 - er2, mu);
    const double raw_dz = std::abs(ctx.z1_raw - ctx.z2_raw);
    report.components["exp_gap_l1_raw"] = raw_exp_l1;
    report.upper_bounds["likelihood"] =
        r / std::max(ctx.z1_raw, ctx.z2_raw) * (raw_exp_l1 + raw_dz);
  }
  if (ctx.bounded) {
    const double misfit_l1 = l1_norm(ctx.phi1.values() - ctx.phi2.values(), mu);
    report.components["misfit_gap_l1"] = misfit_l1;
    report.upper_bounds["misfit"] = r / zmax * (misfit_l1 + dz);
  }

  // Level-set lower bounds: raw pair, since evidence matching is a property of
  // the misfits as given.
  double lip = kInf;
  if (ctx.bounded) {
    const Eigen::VectorXd er1 = ctx.raw1.array().unaryExpr(
        [](double v) { return unnormalised_likelihood(v); });
    const Eigen::VectorXd er2 = ctx.raw2.array().unaryExpr(
        [](double v) { return unnormalised_likelihood(v); });
    lip = lipschitz_norm(er1 - er2, *mu.space(), mu.support());
    report.components["exp_gap_lipschitz"] = lip;
    const bool lip_positive = lip > tol::kBranch;
    report.hypotheses["lipschitz_positive"] = lip_positive;
    report.hypotheses["lipschitz_finite"] = std::isfinite(lip);
    if (ctx.z_equal && lip_positive && std::isfinite(lip)) {
      const double exp_l2 = lp_norm(er1 - er2, mu, 2.0);
      report.lower_bounds["l2_lipschitz"] = exp_l2 * exp_l2 / (ctx.z1_raw * lip);
      const double misfit_l2 = lp_norm(ctx.raw1 - ctx.raw2, mu, 2.0);
      report.lower_bounds["linf"] =
          std::min(std::exp(-2.0 * ctx.sup_abs1), std::exp(-2.0 * ctx.sup_abs2)) / ctx.z1_raw *
          misfit_l2 * misfit_l2 / lip;
    }
  }
  return report;
}

BoundReport w1_prior_bounds(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                            const Misfit& phi) {
  const PriorPair ctx = make_prior_pair(mu1, mu2, phi);
  BoundReport report;

  const TransportPair tp_post = wasserstein_with_dual(ctx.post1.posterior, ctx.post2.posterior);
  const TransportPair tp_prior = wasserstein_with_dual(mu1, mu2);
  report.actual = tp_post.primal.value;
  const double w1_prior = tp_prior.primal.value;
  const Eigen::VectorXd& f_opt = tp_post.dual.potential;
  const Eigen::VectorXd& g_opt = tp_prior.dual.potential;

  const MetricSpace& space = *mu1.space();
  const double r_uni = union_radius(mu1, mu2);
  const Eigen::VectorXd e = flushed_exp(ctx.phi);
  const double elip = lipschitz_norm(e, space, ctx.uni);
  const double zmax = std::max(ctx.z1, ctx.z2);
  const double dz = std::abs(ctx.z1 - ctx.z2);

  const double flip = lipschitz_norm(f_opt.cwiseProduct(e), space, ctx.uni);
  const bool zero_branch = flip <= tol::kBranch;

  report.hypotheses["essinf_zero"] = true;
  report.hypotheses["bounded_misfits"] = ctx.bounded;
  report.hypotheses["evidence_equal"] = ctx.z_equal;
  report.hypotheses["fopt_zero_branch"] = zero_branch;
  report.hypotheses["fopt_lip_finite"] = std::isfinite(flip);
  report.hypotheses["elip_finite"] = std::isfinite(elip);

  report.components["z1"] = ctx.z1;
  report.components["z2"] = ctx.z2;
  report.components["shift"] = ctx.shift;
  report.components["prior_w1"] = w1_prior;
  report.components["union_radius"] = r_uni;
  report.components["exp_lipschitz"] = elip;
  report.components["fopt_exp_lipschitz"] = flip;
  report.components["duality_gap_posterior"] =
      std::abs(tp_post.primal.value - tp_post.dual.objective);
  report.components["duality_gap_prior"] =
      std::abs(tp_prior.primal.value - tp_prior.dual.objective);
  if (std::isfinite(elip)) {
    report.components["chain_dz_residual"] = elip * w1_prior - dz;
  }

  if (zero_branch && ctx.bounded) {
    // f_opt = lambda * exp(phi) on the union support.
    NeumaierSum lam_sum;
    double lam_lo = kInf, lam_hi = -kInf;
    for (Eigen::Index i : ctx.uni) {
      const double li = f_opt[i] * e[i];
      lam_sum.add(li);
      lam_lo = std::min(lam_lo, li);
      lam_hi = std::max(lam_hi, li);
    }
    const double lambda = lam_sum.value() / static_cast<double>(ctx.uni.size());
    report.components["lambda"] = lambda;
    report.components["lambda_variation"] = lam_hi - lam_lo;
    report.components["zero_branch_identity_residual"] =
        std::abs(report.actual - std::abs(lambda) * dz / (ctx.z1 * ctx.z2));
    if (std::isfinite(elip)) {
      report.upper_bounds["zero_branch"] =
          std::abs(lambda) * elip * w1_prior / (ctx.z1 * ctx.z2);
    }
  } else if (!zero_branch && std::isfinite(flip) && std::isfinite(elip)) {
    report.upper_bounds["two_term"] =
        (1.0 + elip * r_uni) / zmax * w1_prior + dz / zmax * r_uni;
    report.upper_bounds["single_line"] = (1.0 + 2.0 * elip * r_uni) * w1_prior / zmax;
  }

  if (ctx.bounded) {
    Eigen::VectorXd g_exp = Eigen::VectorXd::Zero(mu1.size());
    for (Eigen::Index i : ctx.uni) g_exp[i] = g_opt[i] * std::exp(ctx.phi[i]);
    const double glip = lipschitz_norm(g_exp, space, ctx.uni);
    report.components["gopt_exp_lipschitz"] = glip;
    report.hypotheses["gopt_lip_positive"] = glip > tol::kBranch;
    report.hypotheses["gopt_lip_finite"] = std::isfinite(glip);

    const double t1 = integral(g_exp, ctx.post1.posterior);
    const double t2 = integral(g_exp, ctx.post2.posterior);
    const double t3 = integral(g_opt, mu2) * (1.0 / ctx.z2 - 1.0 / ctx.z1);
    report.components["gopt_identity_residual"] =
        std::abs(w1_prior - ctx.z1 * std::abs(t1 - t2 + t3));

    if (ctx.z_equal && glip > tol::kBranch && std::isfinite(glip)) {
      report.lower_bounds["gopt"] = w1_prior / (ctx.z1 * glip);
    }
  }

  // Reference prefactor from the earlier literature, for comparison: requires
  // a misfit that is non-negative on the whole space.
  {
    std::vector<Eigen::Index> all(space.size());
    for (Eigen::Index i = 0; i < space.size(); ++i) all[i] = i;
    const bool nonneg_global = ctx.phi.values().minCoeff() >= -tol::kMetric;
    const double elip_global = lipschitz_norm(e, space, all);
    report.hypotheses["nonneg_global"] = nonneg_global;
    if (nonneg_global && std::isfinite(elip_global) && ctx.bounded) {
      const double diam = space.diameter();
      double p1 = kInf;
      for (Eigen::Index x0 = 0; x0 < space.size(); ++x0) {
        NeumaierSum s;
        for (Eigen::Index i : mu1.support()) s.add(space.distance(x0, i) * mu1.weight(i));
        p1 = std::min(p1, s.value());
      }
      const double reference_prefactor =
          (1.0 + elip_global * diam) / ctx.z2 * (1.0 + elip_global * p1 / ctx.z1);
      report.components["reference_prefactor"] = reference_prefactor;
      report.components["our_prefactor"] = (1.0 + 2.0 * elip * r_uni) / zmax;
      report.upper_bounds["reference"] = reference_prefactor * w1_prior;
    }
  }
  return report;
}

namespace {

void root_likelihood_residuals(const DiscreteMeasure& mu, const MisfitPair& ctx,
                               ResidualMap& out) {
  if (!ctx.bounded) {
    out["root_likelihood_upper_p1"] = std::nullopt;
    out["root_likelihood_lower_p1"] = std::nullopt;
    out["root_likelihood_upper_p2"] = std::nullopt;
    out["root_likelihood_lower_p2"] = std::nullopt;
    return;
  }
  const Eigen::VectorXd gap = log_likelihood_gap(ctx);
  const auto [inf1, sup1] = ess_bounds(ctx.phi1.values(), mu);
  const auto [inf2, sup2] = ess_bounds(ctx.phi2.values(), mu);
  for (double p : {1.0, 2.0}) {
    const double up = std::max(std::exp(-inf1 / p) / std::pow(ctx.z1, 1.0 / p),
                               std::exp(-inf2 / p) / std::pow(ctx.z2, 1.0 / p));
    const double lo = std::min(std::exp(-sup1 / p) / std::pow(ctx.z1, 1.0 / p),
                               std::exp(-sup2 / p) / std::pow(ctx.z2, 1.0 / p));
    double worst_up = kInf, worst_lo = kInf;
    for (Eigen::Index i : mu.support()) {
      const double l1 = std::pow(ctx.post1.likelihood[i], 1.0 / p);
      const double l2 = std::pow(ctx.post2.likelihood[i], 1.0 / p);
      const double mid = std::abs(l1 - l2);
      const double scaled = std::abs(gap[i]) / p;
      worst_up = std::min(worst_up, up * scaled - mid);
      worst_lo = std::min(worst_lo, mid - lo * scaled);
    }
    const std::string suffix = p == 1.0 ? "_p1" : "_p2";
    out["root_likelihood_upper" + suffix] = worst_up;
    out["root_likelihood_lower" + suffix] = worst_lo;
  }
}

void lipschitz_sandwich_residuals(const MetricSpace& space, const Misfit& phi,
                                  const std::vector<Eigen::Index>& restrict_to,
                                  const std::string& tag, ResidualMap& out) {
  // inf/sup of the misfit over the same set the Lipschitz constants use.
  double lo = kInf, hi = -kInf;
  for (Eigen::Index i : restrict_to) {
    lo = std::min(lo, phi[i]);
    hi = std::max(hi, phi[i]);
  }
  if (hi >= kBoundedCeiling || lo <= -kBoundedCeiling) {
    out["lipschitz_sandwich_lower" + tag] = std::nullopt;
    out["lipschitz_sandwich_upper" + tag] = std::nullopt;
    return;
  }
  const Eigen::VectorXd e = flushed_exp(phi);
  const double lip_phi = lipschitz_norm(phi.values(), space, restrict_to);
  const double lip_exp = lipschitz_norm(e, space, restrict_to);
  if (!std::isfinite(lip_phi) || !std::isfinite(lip_exp)) {
    out["lipschitz_sandwich_lower" + tag] = std::nullopt;
    out["lipschitz_sandwich_upper" + tag] = std::nullopt;
    return;
  }
  out["lipschitz_sandwich_lower" + tag] = lip_phi - std::exp(lo) * lip_exp;
  out["lipschitz_sandwich_upper" + tag] = lip_exp * std::exp(hi) - lip_phi;
}

void tv_decomposition_residuals(const DiscreteMeasure& a, const DiscreteMeasure& b,
                                ResidualMap& out) {
  const double tv = total_variation(a, b);
  NeumaierSum plus, minus;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double d = a.weight(i) - b.weight(i);
    if (d > 0.0) plus.add(d);
    if (d < 0.0) minus.add(-d);
  }
  out["tv_decomposition_plus"] = -std::abs(tv - plus.value());
  out["tv_decomposition_minus"] = -std::abs(tv - minus.value());
}

}  // namespace

ResidualMap aux_lemma_suite(const DiscreteMeasure& mu, const Misfit& phi1, const Misfit& phi2) {
  // The lemmas carry no essinf-normalisation hypotheses; the raw pair keeps
  // deliberate orderings and sign patterns intact.
  const MisfitPair ctx = make_misfit_pair(mu, phi1, phi2, /*normalize=*/false);
  ResidualMap out;

  root_likelihood_residuals(mu, ctx, out);

  out["l1_gap_nonnegative"] = std::nullopt;
  out["l1_gap_no_sign_change"] = std::nullopt;
  out["l1_gap_case_split"] = std::nullopt;
  out["evidence_monotonicity"] = std::nullopt;
  if (ctx.bounded) {
    // L1 gap between unnormalised likelihoods versus the evidence difference.
    const Eigen::VectorXd e1 = flushed_exp(ctx.phi1);
    const Eigen::VectorXd e2 = flushed_exp(ctx.phi2);
    const double exp_l1 = l1_norm(e1 - e2, mu);
    const double dz = std::abs(ctx.z1 - ctx.z2);
    out["l1_gap_nonnegative"] = exp_l1 - dz;
    if (!(ctx.sign_pos && ctx.sign_neg)) {
      out["l1_gap_no_sign_change"] = -std::abs(exp_l1 - dz);
    }
    if (!ctx.z_equal) {
      NeumaierSum side;
      const bool first_larger = ctx.z1 > ctx.z2;
      for (Eigen::Index i : mu.support()) {
        const double d = ctx.phi1[i] - ctx.phi2[i];
        if ((first_larger && d > 0.0) || (!first_larger && d < 0.0)) {
          side.add(std::abs(e1[i] - e2[i]) * mu.weight(i));
        }
      }
      out["l1_gap_case_split"] = -std::abs(0.5 * (exp_l1 - dz) - side.value());
    }

    // Pointwise evidence monotonicity under an ordered misfit pair.
    bool ge = true, le = true;
    for (Eigen::Index i : mu.support()) {
      const double d = ctx.phi1[i] - ctx.phi2[i];
      if (d < 0.0) ge = false;
      if (d > 0.0) le = false;
    }
    if (ge) {
      out["evidence_monotonicity"] = ctx.z2 - ctx.z1;
    } else if (le) {
      out["evidence_monotonicity"] = ctx.z1 - ctx.z2;
    }
  }

  tv_decomposition_residuals(ctx.post1.posterior, ctx.post2.posterior, out);
  lipschitz_sandwich_residuals(*mu.space(), ctx.phi1, mu.support(), "_phi1", out);
  lipschitz_sandwich_residuals(*mu.space(), ctx.phi2, mu.support(), "_phi2", out);
  return out;
}

ResidualMap aux_lemma_suite(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                            const Misfit& phi) {
  const PriorPair ctx = make_prior_pair(mu1, mu2, phi);
  ResidualMap out;

  tv_decomposition_residuals(mu1, mu2, out);

  // Evidence difference against the exp-weighted L1 distance of the priors.
  const Eigen::VectorXd e = flushed_exp(ctx.phi);
  NeumaierSum weighted;
  for (Eigen::Index i : ctx.uni) {
    weighted.add(e[i] * std::abs(mu2.weight(i) - mu1.weight(i)));
  }
  out["prior_l1_gap_nonnegative"] = weighted.value() - std::abs(ctx.z2 - ctx.z1);

  // Essential-bound monotonicity under support inclusion.
  const auto rn = radon_nikodym(mu1, mu2);
  if (rn.dominated()) {
    out["esssup_monotonicity"] = ctx.sup2 - ctx.sup1;
    out["essinf_monotonicity"] = ctx.essinf1 - ctx.essinf2;
  } else {
    out["esssup_monotonicity"] = std::nullopt;
    out["essinf_monotonicity"] = std::nullopt;
  }

  lipschitz_sandwich_residuals(*mu1.space(), ctx.phi, ctx.uni, "_phi", out);
  return out;
}

}  // namespace pstab
