#include "pstab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pstab {

ProblemInstance generate_instance(std::uint64_t seed, int size, const InstanceConfig& config) {
  if (size < 2) throw std::invalid_argument("instance size must be >= 2");
  if (config.dimension < 1) throw std::invalid_argument("dimension must be >= 1");
  if (!(config.concentration > 0.0)) throw std::invalid_argument("concentration must be > 0");
  if (config.sparsity < 0.0 || config.sparsity >= 1.0) {
    throw std::invalid_argument("sparsity must lie in [0, 1)");
  }
  if (!(config.misfit_cap >= 0.0)) throw std::invalid_argument("misfit cap must be >= 0");

  SplitMix64 rng(seed);

  Eigen::MatrixXd coords(size, config.dimension);
  for (Eigen::Index i = 0; i < size; ++i) {
    for (int d = 0; d < config.dimension; ++d) coords(i, d) = rng.uniform();
  }
  SpacePtr space = MetricSpace::from_coords(std::move(coords));

  const auto draw_prior = [&]() {
    Eigen::VectorXd w(size);
    Eigen::Index best = 0;
    double best_u = -1.0;
    for (Eigen::Index i = 0; i < size; ++i) {
      const double u = rng.uniform();
      const double gate = rng.uniform();  // always drawn: stream layout is fixed
      w[i] = std::pow(u, 1.0 / config.concentration);
      if (gate < config.sparsity) w[i] = 0.0;
      if (u > best_u) {
        best_u = u;
        best = i;
      }
    }
    if (w.maxCoeff() <= 0.0) w[best] = 1.0;
    return DiscreteMeasure::probability(space, std::move(w));
  };
  DiscreteMeasure prior1 = draw_prior();
  DiscreteMeasure prior2 = draw_prior();

  const auto draw_misfit = [&]() {
    Eigen::VectorXd phi(size);
    for (Eigen::Index i = 0; i < size; ++i) phi[i] = config.misfit_cap * rng.uniform();
    phi.array() -= phi.minCoeff();
    return Misfit(std::move(phi));
  };
  Misfit misfit1 = draw_misfit();
  Misfit misfit2 = draw_misfit();

  return ProblemInstance{std::move(space), std::move(prior1), std::move(prior2),
                         std::move(misfit1),  std::move(misfit2), seed,
                         {{"generator", "splitmix64"}}};
}

namespace {

struct SlackSample {
  std::optional<double> lower;
  std::optional<double> upper;
};

void update_stats(PropositionStats& stats, const SlackSample& sample, std::uint64_t seed) {
  ++stats.evaluated;
  if (!sample.lower && !sample.upper) return;
  ++stats.applicable;
  if (sample.lower && (!stats.min_slack_lower || *sample.lower < *stats.min_slack_lower)) {
    stats.min_slack_lower = *sample.lower;
    stats.worst_seed_lower = seed;
  }
  if (sample.upper && (!stats.min_slack_upper || *sample.upper < *stats.min_slack_upper)) {
    stats.min_slack_upper = *sample.upper;
    stats.worst_seed_upper = seed;
  }
}

SlackSample report_slacks(const BoundReport& report) {
  return SlackSample{report.slack_lower(), report.slack_upper()};
}

SlackSample residual_slack(const ResidualMap& residuals) {
  SlackSample out;
  for (const auto& [name, value] : residuals) {
    if (!value) continue;
    if (!out.lower || *value < *out.lower) out.lower = *value;
  }
  return out;
}

void inject_fault(BoundReport& report, const SweepConfig& config, const std::string& name) {
  if (config.break_proposition != name || config.break_factor == 1.0) return;
  for (auto& [bound_name, value] : report.upper_bounds) {
    if (value) value = *value * config.break_factor;
  }
}

}  // namespace

SweepReport run_verification_sweep(const SweepConfig& config) {
  if (config.seeds < 1) throw std::invalid_argument("need at least one seed");
  if (config.min_size < 2 || config.max_size < config.min_size) {
    throw std::invalid_argument("invalid size range");
  }

  const auto enabled = [&](const std::string& name) {
    const auto it = config.toggles.find(name);
    return it == config.toggles.end() || it->second;
  };

  SweepReport report;
  const int span = config.max_size - config.min_size + 1;

  for (int s = 1; s <= config.seeds; ++s) {
    const auto seed = static_cast<std::uint64_t>(s);
    const int size = config.min_size + static_cast<int>(SplitMix64(seed).next() %
                                                        static_cast<std::uint64_t>(span));
    const ProblemInstance inst = generate_instance(seed, size, config.instance);
    report.instances += 1;

    const auto run_bound = [&](const std::string& name, auto&& make) {
      if (!enabled(name)) return;
      BoundReport r = make();
      inject_fault(r, config, name);
      update_stats(report.propositions[name], report_slacks(r), seed);
      for (const char* key : {"duality_gap", "duality_gap_posterior", "duality_gap_prior"}) {
        const auto it = r.components.find(key);
        if (it != r.components.end() && it->second > report.max_duality_gap) {
          report.max_duality_gap = it->second;
          report.worst_duality_seed = seed;
        }
      }
    };

    run_bound("tv_misfit", [&] { return tv_misfit_bounds(inst.prior1, inst.misfit1, inst.misfit2); });
    run_bound("tv_prior", [&] { return tv_prior_bounds(inst.prior1, inst.prior2, inst.misfit1); });
    run_bound("hellinger_misfit",
              [&] { return hellinger_misfit_bounds(inst.prior1, inst.misfit1, inst.misfit2); });
    run_bound("hellinger_prior",
              [&] { return hellinger_prior_bounds(inst.prior1, inst.prior2, inst.misfit1); });
    run_bound("kl_joint",
              [&] { return kl_joint_bounds(inst.prior1, inst.misfit1, inst.prior2, inst.misfit2); });
    run_bound("w1_misfit", [&] { return w1_misfit_bounds(inst.prior1, inst.misfit1, inst.misfit2); });
    run_bound("w1_prior", [&] { return w1_prior_bounds(inst.prior1, inst.prior2, inst.misfit1); });

    if (enabled("aux_lemmas")) {
      ResidualMap merged = aux_lemma_suite(inst.prior1, inst.misfit1, inst.misfit2);
      for (auto& [name, value] : aux_lemma_suite(inst.prior1, inst.prior2, inst.misfit1)) {
        merged["prior_" + name] = value;
      }
      update_stats(report.propositions["aux_lemmas"], residual_slack(merged), seed);
    }
  }

  report.pass = report.max_duality_gap <= tol::kDuality;
  for (const auto& [name, stats] : report.propositions) {
    if (stats.min_slack_lower && *stats.min_slack_lower < -tol::kSlack) report.pass = false;
    if (stats.min_slack_upper && *stats.min_slack_upper < -tol::kSlack) report.pass = false;
  }
  return report;
}

namespace {

SensitivityRow make_row(double beta, double z1, double z2, const std::string& metric,
                        const BoundReport& report) {
  SensitivityRow row;
  row.beta = beta;
  row.z1 = z1;
  row.z2 = z2;
  row.metric = metric;
  row.actual = report.actual;
  row.best_lower = report.best_lower();
  row.best_upper = report.best_upper();
  row.applicable = row.best_lower.has_value() || row.best_upper.has_value();
  bool ok = row.applicable && !std::isinf(report.actual);
  if (ok && row.best_lower && !(*row.best_lower - tol::kSlack <= report.actual)) ok = false;
  if (ok && row.best_upper && !(report.actual <= *row.best_upper + tol::kSlack)) ok = false;
  row.contained = ok;
  return row;
}

}  // namespace

std::vector<SensitivityRow> sensitivity_sweep(const ProblemInstance& instance,
                                              const std::vector<double>& betas,
                                              PerturbationKind kind) {
  std::vector<SensitivityRow> rows;
  for (double beta : betas) {
    if (beta < 0.0) throw std::invalid_argument("beta grid must be non-negative");
    const Misfit scaled(instance.misfit1.values() * beta);
    if (kind == PerturbationKind::kMisfit) {
      const Misfit perturbed(scaled.values() + instance.misfit2.values());
      const double z1 = evidence(instance.prior1, scaled);
      const double z2 = evidence(instance.prior1, perturbed);
      rows.push_back(make_row(beta, z1, z2, "tv",
                              tv_misfit_bounds(instance.prior1, scaled, perturbed)));
      rows.push_back(make_row(beta, z1, z2, "hellinger",
                              hellinger_misfit_bounds(instance.prior1, scaled, perturbed)));
      rows.push_back(make_row(beta, z1, z2, "kl",
                              kl_joint_bounds(instance.prior1, scaled, instance.prior1, perturbed)));
      rows.push_back(make_row(beta, z1, z2, "w1",
                              w1_misfit_bounds(instance.prior1, scaled, perturbed)));
    } else {
      const double z1 = evidence(instance.prior1, scaled);
      const double z2 = evidence(instance.prior2, scaled);
      rows.push_back(make_row(beta, z1, z2, "tv",
                              tv_prior_bounds(instance.prior1, instance.prior2, scaled)));
      rows.push_back(make_row(beta, z1, z2, "hellinger",
                              hellinger_prior_bounds(instance.prior1, instance.prior2, scaled)));
      rows.push_back(make_row(beta, z1, z2, "kl",
                              kl_joint_bounds(instance.prior1, scaled, instance.prior2, scaled)));
      rows.push_back(make_row(beta, z1, z2, "w1",
                              w1_prior_bounds(instance.prior1, instance.prior2, scaled)));
    }
  }
  return rows;
}

namespace {

Certificate misfit_sequence_certificate() {
  Grid1D grid(0.0, 1.0, 100);
  DiscreteMeasure mu = grid.uniform(0.0, 1.0);
  Misfit phi(Eigen::VectorXd::Zero(grid.cells()));
  std::vector<std::vector<Eigen::Index>> sets;
  for (Eigen::Index stop : {1, 25, 50, 75, 100}) {
    std::vector<Eigen::Index> prefix;
    for (Eigen::Index i = 0; i < stop; ++i) prefix.push_back(i);
    sets.push_back(std::move(prefix));
  }
  const MisfitSequenceTrace trace = counterexample_misfit_sequence(mu, phi, 2.0, sets);

  double min_floor_gap = 0.0;
  for (const auto& row : trace.rows) {
    min_floor_gap = std::min(min_floor_gap, row.misfit_gap_l1 - trace.misfit_gap_floor);
  }
  return Certificate{"misfit-sequence",
                     {{"final_log_likelihood_gap_l1", trace.rows.back().log_likelihood_gap_l1,
                       0.0, 1e-12},
                      {"final_misfit_gap_l1", trace.rows.back().misfit_gap_l1, 2.0, 0.0},
                      {"misfit_gap_floor_violation", min_floor_gap, 0.0, 1e-12}}};
}

Certificate continuity_certificate(const std::string& id, ContinuityKind kind, double factor) {
  const ContinuityTrace trace = continuity_experiment(kind, {1, 10, 100, 1000});
  const ContinuityRow& first = trace.rows.front();
  const ContinuityRow& last = trace.rows.back();
  const auto entry = [&](const std::string& name, double initial, double final_value) {
    // pass iff final <= factor * initial, with the boundary-inclusive guard
    return CertificateEntry{name, std::isnan(final_value) ? 0.0 : final_value, 0.0,
                            std::isnan(initial) ? kInf : factor * initial * (1.0 + 1e-9)};
  };
  Certificate cert{id,
                   {entry("z_gap_contraction", first.z_gap, last.z_gap),
                    entry("w1_gap_contraction", first.w1_gap, last.w1_gap)}};
  if (kind == ContinuityKind::kPosteriorToMisfit) {
    cert.entries.push_back(
        entry("likelihood_l2_contraction", first.likelihood_l2_gap, last.likelihood_l2_gap));
    cert.entries.push_back(
        entry("misfit_l2_contraction", first.misfit_l2_gap, last.misfit_l2_gap));
    cert.entries.push_back({"full_sequence_convergence", trace.monotone_decreasing ? 1.0 : 0.0,
                            1.0, 0.0});
  }
  return cert;
}

}  // namespace

Certificate reproduce(const std::string& example_id, double tau, int grid) {
  if (example_id == "prior-evidence") return example_prior_evidence(grid).certificate;
  if (example_id == "prior-posterior") return example_prior_posterior(grid).certificate;
  if (example_id == "translated-uniform") {
    return example_translated_uniform(tau, grid).certificate;
  }
  if (example_id == "misfit-sequence") return misfit_sequence_certificate();
  if (example_id == "continuity-misfit") {
    return continuity_certificate(example_id, ContinuityKind::kMisfitForward, 1e-2);
  }
  if (example_id == "continuity-posterior-misfit") {
    return continuity_certificate(example_id, ContinuityKind::kPosteriorToMisfit, 1e-2);
  }
  if (example_id == "continuity-posterior-prior") {
    return continuity_certificate(example_id, ContinuityKind::kPosteriorToPrior, 1e-3);
  }
  throw std::invalid_argument("unknown example id: " + example_id);
}

namespace {

Eigen::VectorXd json_vector(const nlohmann::json& arr, const std::string& name) {
  if (!arr.is_array() || arr.empty()) {
    throw std::invalid_argument(name + " must be a non-empty array");
  }
  Eigen::VectorXd v(arr.size());
  Eigen::Index i = 0;
  for (const auto& x : arr) {
    if (!x.is_number()) throw std::invalid_argument(name + " must contain numbers");
    v[i++] = x.get<double>();
  }
  return v;
}

Eigen::MatrixXd json_matrix(const nlohmann::json& arr, const std::string& name) {
  if (!arr.is_array() || arr.empty()) {
    throw std::invalid_argument(name + " must be a non-empty array of rows");
  }
  const std::size_t cols = arr.front().is_array() ? arr.front().size() : 0;
  if (cols == 0) throw std::invalid_argument(name + " rows must be non-empty arrays");
  Eigen::MatrixXd m(arr.size(), cols);
  Eigen::Index r = 0;
  for (const auto& row : arr) {
    if (!row.is_array() || row.size() != cols) {
      throw std::invalid_argument(name + " rows must have equal length");
    }
    Eigen::Index c = 0;
    for (const auto& x : row) m(r, c++) = x.get<double>();
    ++r;
  }
  return m;
}

}  // namespace

ProblemSpec load_problem_spec(const nlohmann::json& doc) {
  ProblemSpec spec;
  if (doc.contains("points")) {
    spec.space = MetricSpace::from_coords(json_matrix(doc["points"], "points"));
  } else if (doc.contains("distance_matrix")) {
    spec.space = MetricSpace::from_distance(json_matrix(doc["distance_matrix"], "distance_matrix"));
  } else {
    throw std::invalid_argument("spec requires either points or distance_matrix");
  }
  const auto measure = [&](const char* key) -> std::optional<DiscreteMeasure> {
    if (!doc.contains(key)) return std::nullopt;
    return DiscreteMeasure(spec.space, json_vector(doc[key], key));
  };
  const auto misfit = [&](const char* key) -> std::optional<Misfit> {
    if (!doc.contains(key)) return std::nullopt;
    Eigen::VectorXd v = json_vector(doc[key], key);
    if (v.size() != spec.space->size()) {
      throw std::invalid_argument(std::string(key) + " length does not match the space");
    }
    return Misfit(std::move(v));
  };
  spec.prior1 = measure("prior1");
  spec.prior2 = measure("prior2");
  spec.misfit1 = misfit("misfit1");
  spec.misfit2 = misfit("misfit2");
  if (!spec.prior1) throw std::invalid_argument("spec requires prior1");
  if (!spec.misfit1) throw std::invalid_argument("spec requires misfit1");
  return spec;
}

ProblemSpec load_problem_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  nlohmann::json doc;
  in >> doc;
  return load_problem_spec(doc);
}

namespace {

nlohmann::json optional_to_json(const std::optional<double>& value) {
  if (!value) return "n/a";
  return *value;
}

}  // namespace

nlohmann::json bound_report_to_json(const BoundReport& report) {
  nlohmann::json doc;
  doc["actual"] = std::isinf(report.actual) ? nlohmann::json("inf") : nlohmann::json(report.actual);
  for (const auto& [name, value] : report.hypotheses) doc["hypothesis." + name] = value;
  for (const auto& [name, value] : report.components) doc["component." + name] = value;
  for (const auto& [name, value] : report.lower_bounds) {
    doc["lower." + name] = optional_to_json(value);
  }
  for (const auto& [name, value] : report.upper_bounds) {
    doc["upper." + name] = optional_to_json(value);
  }
  doc["slack_lower"] = optional_to_json(report.slack_lower());
  doc["slack_upper"] = optional_to_json(report.slack_upper());
  return doc;
}

nlohmann::json sweep_report_to_json(const SweepReport& report, const SweepConfig& config) {
  nlohmann::json doc;
  doc["config"]["seeds"] = config.seeds;
  doc["config"]["min_size"] = config.min_size;
  doc["config"]["max_size"] = config.max_size;
  doc["config"]["misfit_cap"] = config.instance.misfit_cap;
  doc["config"]["dimension"] = config.instance.dimension;
  doc["config"]["concentration"] = config.instance.concentration;
  doc["config"]["sparsity"] = config.instance.sparsity;
  doc["instances"] = report.instances;
  doc["max_duality_gap"] = report.max_duality_gap;
  doc["worst_duality_seed"] = report.worst_duality_seed;
  for (const auto& [name, stats] : report.propositions) {
    nlohmann::json& p = doc["propositions"][name];
    p["evaluated"] = stats.evaluated;
    p["applicable"] = stats.applicable;
    p["min_slack_lower"] = optional_to_json(stats.min_slack_lower);
    p["min_slack_upper"] = optional_to_json(stats.min_slack_upper);
    p["worst_seed_lower"] = stats.worst_seed_lower;
    p["worst_seed_upper"] = stats.worst_seed_upper;
  }
  doc["pass"] = report.pass;
  return doc;
}

nlohmann::json certificate_to_json(const Certificate& cert) {
  nlohmann::json doc;
  doc["example"] = cert.example_id;
  doc["pass"] = cert.pass();
  for (const auto& e : cert.entries) {
    nlohmann::json& entry = doc["entries"][e.name];
    entry["computed"] = e.computed;
    entry["expected"] = e.expected;
    entry["tolerance"] = e.tolerance;
    entry["pass"] = e.pass();
  }
  return doc;
}

namespace {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

std::string sensitivity_csv(const std::vector<SensitivityRow>& rows) {
  std::ostringstream out;
  out << "beta,Z1,Z2,metric,actual,best_lower,best_upper,applicable\n";
  for (const auto& row : rows) {
    out << format_double(row.beta) << ',' << format_double(row.z1) << ','
        << format_double(row.z2) << ',' << row.metric << ',' << format_double(row.actual) << ','
        << (row.best_lower ? format_double(*row.best_lower) : "n/a") << ','
        << (row.best_upper ? format_double(*row.best_upper) : "n/a") << ','
        << (row.applicable ? "true" : "false") << '\n';
  }
  return out.str();
}

}  // namespace pstab
