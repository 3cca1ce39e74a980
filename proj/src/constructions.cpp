#include "pstab/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pstab/divergences.hpp"
#include "pstab/transport.hpp"

namespace pstab {

Grid1D::Grid1D(double a, double b, int n, std::vector<double> align) {
  if (!(a < b)) throw std::invalid_argument("interval requires a < b");
  if (n < 1) throw std::invalid_argument("grid requires n >= 1");

  std::vector<double> edges{a, b};
  for (double x : align) {
    if (x > a && x < b) edges.push_back(x);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::vector<double> mids, widths;
  const double range = b - a;
  for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
    const double len = edges[s + 1] - edges[s];
    const auto cells = std::max<long>(1, std::lround(n * len / range));
    const double h = len / static_cast<double>(cells);
    for (long c = 0; c < cells; ++c) {
      mids.push_back(edges[s] + (static_cast<double>(c) + 0.5) * h);
      widths.push_back(h);
    }
  }

  midpoints_ = Eigen::Map<Eigen::VectorXd>(mids.data(), static_cast<Eigen::Index>(mids.size()));
  widths_ = Eigen::Map<Eigen::VectorXd>(widths.data(), static_cast<Eigen::Index>(widths.size()));
  space_ = MetricSpace::from_coords(midpoints_);
}

DiscreteMeasure Grid1D::uniform(double c, double d) const {
  if (!(c < d)) throw std::invalid_argument("interval requires c < d");
  Eigen::VectorXd weights = Eigen::VectorXd::Zero(cells());
  for (Eigen::Index i = 0; i < cells(); ++i) {
    if (midpoints_[i] > c && midpoints_[i] < d) weights[i] = widths_[i] / (d - c);
  }
  return DiscreteMeasure::probability(space_, std::move(weights));
}

Misfit Grid1D::misfit(const std::function<double(double)>& f) const {
  Eigen::VectorXd values(cells());
  for (Eigen::Index i = 0; i < cells(); ++i) values[i] = f(midpoints_[i]);
  return Misfit(std::move(values));
}

std::pair<SpacePtr, DiscreteMeasure> discretize_interval_uniform(double a, double b, int n,
                                                                 std::vector<double> align) {
  Grid1D grid(a, b, n, std::move(align));
  DiscreteMeasure mu = grid.uniform(a, b);
  return {grid.space(), std::move(mu)};
}

namespace {

double l1_gap(const Eigen::VectorXd& f, const DiscreteMeasure& mu) {
  NeumaierSum s;
  for (Eigen::Index i : mu.support()) s.add(std::abs(f[i]) * mu.weight(i));
  return s.value();
}

}  // namespace

ExampleInstance example_prior_evidence(int n) {
  Grid1D grid(-2.0, 2.0, n, {-1.0, 1.0});
  DiscreteMeasure mu1 = grid.uniform(-2.0, 1.0);
  DiscreteMeasure mu2 = grid.uniform(-1.0, 2.0);
  Misfit phi = grid.misfit([](double x) { return (x < -1.0 || x > 1.0) ? 1.0 : 0.0; });

  const double z1 = evidence(mu1, phi);
  const double z2 = evidence(mu2, phi);
  const double expected = (std::exp(-1.0) + 2.0) / 3.0;
  const double tv = total_variation(mu1, mu2);

  Certificate cert{"prior-evidence",
                   {{"z1", z1, expected, 1e-12},
                    {"z2", z2, expected, 1e-12},
                    {"evidence_gap", std::abs(z1 - z2), 0.0, 1e-12},
                    {"prior_tv", tv, 1.0 / 3.0, 1e-9}}};
  return ExampleInstance{grid.space(), std::move(mu1), std::move(mu2), std::move(phi),
                         std::move(cert)};
}

ExampleInstance example_prior_posterior(int n) {
  Grid1D grid(-2.0, 2.0, n, {-1.0, 1.0});
  DiscreteMeasure mu1 = grid.uniform(-2.0, 1.0);
  DiscreteMeasure mu2 = grid.uniform(-1.0, 2.0);
  // Likelihood is the indicator of [-1, 1]: zero likelihood realised by the
  // capped misfit value.
  Misfit phi = grid.misfit([](double x) { return (x > -1.0 && x < 1.0) ? 0.0 : kMisfitCap; });

  const PosteriorResult post1 = posterior(mu1, phi);
  const PosteriorResult post2 = posterior(mu2, phi);
  const double posterior_tv = total_variation(post1.posterior, post2.posterior);
  const double prior_tv = total_variation(mu1, mu2);

  Certificate cert{"prior-posterior",
                   {{"z1", post1.evidence, 2.0 / 3.0, 1e-12},
                    {"z2", post2.evidence, 2.0 / 3.0, 1e-12},
                    {"posterior_tv", posterior_tv, 0.0, 1e-12},
                    {"prior_tv", prior_tv, 1.0 / 3.0, 1e-9}}};
  return ExampleInstance{grid.space(), std::move(mu1), std::move(mu2), std::move(phi),
                         std::move(cert)};
}

ExampleInstance example_translated_uniform(double tau, int n) {
  if (!(std::abs(tau) < 1.0)) throw std::invalid_argument("translation requires |tau| < 1");
  const double lo = std::min(0.0, tau);
  const double hi = std::max(1.0, 1.0 + tau);
  Grid1D grid(lo, hi, n, {0.0, tau, 1.0, 1.0 + tau});
  DiscreteMeasure mu = grid.uniform(0.0, 1.0);
  DiscreteMeasure mu_tau = tau == 0.0 ? mu : grid.uniform(tau, 1.0 + tau);
  Misfit phi(Eigen::VectorXd::Zero(grid.cells()));

  const double tv = total_variation(mu, mu_tau);
  const auto forward = radon_nikodym(mu, mu_tau);
  const auto backward = radon_nikodym(mu_tau, mu);
  const double expected_dominated = tau == 0.0 ? 1.0 : 0.0;

  Certificate cert{"translated-uniform",
                   {{"tv", tv, std::abs(tau), 1e-9},
                    {"forward_dominated", forward.dominated() ? 1.0 : 0.0, expected_dominated, 0.0},
                    {"backward_dominated", backward.dominated() ? 1.0 : 0.0, expected_dominated,
                     0.0}}};
  return ExampleInstance{grid.space(), std::move(mu), std::move(mu_tau), std::move(phi),
                         std::move(cert)};
}

MisfitSequenceTrace counterexample_misfit_sequence(
    const DiscreteMeasure& mu, const Misfit& phi, double step,
    const std::vector<std::vector<Eigen::Index>>& sets) {
  if (sets.empty()) throw std::invalid_argument("need at least one index set");
  for (std::size_t k = 0; k + 1 < sets.size(); ++k) {
    if (!std::includes(sets[k + 1].begin(), sets[k + 1].end(), sets[k].begin(), sets[k].end())) {
      throw std::invalid_argument("index sets must be nested and sorted");
    }
  }
  {
    NeumaierSum first_mass;
    for (Eigen::Index i : sets.front()) first_mass.add(mu.weight(i));
    if (!(first_mass.value() > 0.0)) {
      throw std::invalid_argument("first index set must carry positive mass");
    }
  }

  const double log_z_base = log_evidence(mu, phi);
  MisfitSequenceTrace trace;
  {
    NeumaierSum s;
    for (Eigen::Index i : sets.front()) s.add(mu.weight(i));
    trace.misfit_gap_floor = step * s.value();
  }

  for (std::size_t k = 0; k < sets.size(); ++k) {
    Eigen::VectorXd bumped = phi.values();
    for (Eigen::Index i : sets[k]) bumped[i] += step;
    const Misfit phik{bumped};
    const double log_zk = log_evidence(mu, phik);

    MisfitSequenceRow row;
    row.k = static_cast<int>(k);
    row.misfit_gap_l1 = l1_gap(bumped - phi.values(), mu);
    row.misfit_gap_linf = 0.0;
    Eigen::VectorXd log_gap = (bumped - phi.values()).array() + (log_zk - log_z_base);
    row.log_likelihood_gap_l1 = l1_gap(log_gap, mu);
    for (Eigen::Index i : mu.support()) {
      row.misfit_gap_linf = std::max(row.misfit_gap_linf, std::abs(bumped[i] - phi[i]));
    }
    trace.rows.push_back(row);
  }
  return trace;
}

bool ContinuityTrace::contracted(double factor) const {
  if (rows.size() < 2) return false;
  const auto check = [&](double first, double last) {
    if (std::isnan(first) || std::isnan(last)) return true;
    return last <= first * factor * (1.0 + 1e-9);
  };
  const ContinuityRow& a = rows.front();
  const ContinuityRow& b = rows.back();
  return check(a.z_gap, b.z_gap) && check(a.w1_gap, b.w1_gap) &&
         check(a.likelihood_l2_gap, b.likelihood_l2_gap) &&
         check(a.misfit_l2_gap, b.misfit_l2_gap);
}

namespace {

constexpr int kContinuityCells = 50;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

double l2_gap(const Eigen::VectorXd& f, const DiscreteMeasure& mu) {
  NeumaierSum s;
  for (Eigen::Index i : mu.support()) s.add(f[i] * f[i] * mu.weight(i));
  return std::sqrt(s.value());
}

ContinuityTrace misfit_side_experiment(ContinuityKind kind, const std::vector<long>& schedule) {
  Grid1D grid(0.0, 1.0, kContinuityCells);
  DiscreteMeasure mu = grid.uniform(0.0, 1.0);
  const Misfit base = normalize_misfit(mu, grid.misfit([](double x) { return 2.0 * x * x; }));
  const Misfit bump = grid.misfit([](double x) { return 1.0 + std::cos(3.0 * x); });

  const PosteriorResult limit = posterior(mu, base);
  const bool match_evidence = kind == ContinuityKind::kPosteriorToMisfit;

  ContinuityTrace trace{kind, {}, true};
  ContinuityRow prev{0, kInf, kInf, kInf, kInf};
  for (long n : schedule) {
    if (n < 1) throw std::invalid_argument("schedule entries must be >= 1");
    Eigen::VectorXd values = base.values() + bump.values() / static_cast<double>(n);
    Misfit phin = normalize_misfit(mu, Misfit(values));
    if (match_evidence) {
      // Shift onto the evidence level set of the limit misfit.
      const double c = log_evidence(mu, phin) - limit.log_evidence;
      phin = Misfit(phin.values().array() + c);
    }
    const PosteriorResult post = posterior(mu, phin);

    ContinuityRow row;
    row.n = n;
    row.z_gap = std::abs(post.evidence - limit.evidence);
    row.w1_gap = wasserstein_exact(post.posterior, limit.posterior, 1.0).value;
    row.likelihood_l2_gap = l2_gap(post.likelihood - limit.likelihood, mu);
    row.misfit_l2_gap =
        match_evidence ? l2_gap(phin.values() - base.values(), mu) : kNaN;
    // "Converged without subsequence extraction": every tracked gap shrinks
    // along the whole schedule, not merely along some subsequence.
    for (auto gap : {&ContinuityRow::w1_gap, &ContinuityRow::likelihood_l2_gap,
                     &ContinuityRow::misfit_l2_gap}) {
      if (!std::isnan(row.*gap) && row.*gap > prev.*gap * (1.0 + 1e-12)) {
        trace.monotone_decreasing = false;
      }
    }
    prev = row;
    trace.rows.push_back(row);
  }
  return trace;
}

ContinuityTrace prior_side_experiment(const std::vector<long>& schedule) {
  Grid1D grid(0.0, 1.0, kContinuityCells);
  DiscreteMeasure mu = grid.uniform(0.0, 1.0);
  const Misfit phi = normalize_misfit(mu, grid.misfit([](double x) { return 2.0 * x * x; }));

  // The perturbing measure concentrates on the right half of the interval.
  Eigen::VectorXd other_weights = Eigen::VectorXd::Zero(grid.cells());
  for (Eigen::Index i = 0; i < grid.cells(); ++i) {
    if (grid.midpoints()[i] > 0.5) other_weights[i] = grid.widths()[i];
  }
  DiscreteMeasure other = DiscreteMeasure::probability(grid.space(), std::move(other_weights));

  const double z_limit = evidence(mu, phi);

  ContinuityTrace trace{ContinuityKind::kPosteriorToPrior, {}, true};
  double prev_w1 = kInf;
  for (long n : schedule) {
    if (n < 1) throw std::invalid_argument("schedule entries must be >= 1");
    const double eps = 1.0 / static_cast<double>(n);
    Eigen::VectorXd mixed = (1.0 - eps) * mu.weights() + eps * other.weights();
    DiscreteMeasure mun = DiscreteMeasure::probability(grid.space(), std::move(mixed));

    ContinuityRow row;
    row.n = n;
    row.z_gap = std::abs(evidence(mun, phi) - z_limit);
    row.w1_gap = wasserstein_exact(mun, mu, 1.0).value;
    row.likelihood_l2_gap = kNaN;
    row.misfit_l2_gap = kNaN;
    if (row.w1_gap > prev_w1 * (1.0 + 1e-12)) trace.monotone_decreasing = false;
    prev_w1 = row.w1_gap;
    trace.rows.push_back(row);
  }
  return trace;
}

}  // namespace

ContinuityTrace continuity_experiment(ContinuityKind kind, const std::vector<long>& schedule) {
  if (schedule.empty()) throw std::invalid_argument("schedule must be non-empty");
  switch (kind) {
    case ContinuityKind::kMisfitForward:
    case ContinuityKind::kPosteriorToMisfit:
      return misfit_side_experiment(kind, schedule);
    case ContinuityKind::kPosteriorToPrior:
      return prior_side_experiment(schedule);
  }
  throw std::invalid_argument("unknown continuity kind");
}

}  // namespace pstab
