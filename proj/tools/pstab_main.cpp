#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pstab/harness.hpp"

namespace {

int write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) {
    std::cerr << "cannot write " << path << "\n";
    return 2;
  }
  out << text;
  return 0;
}

void print_certificate(const pstab::Certificate& cert) {
  for (const auto& e : cert.entries) {
    std::printf("[%s] %s: computed=%.17g expected=%.17g tolerance=%.3g\n",
                e.pass() ? "PASS" : "FAIL", e.name.c_str(), e.computed, e.expected, e.tolerance);
  }
  std::printf("%s: %s\n", cert.example_id.c_str(), cert.pass() ? "PASS" : "FAIL");
}

int run_verify(int seeds, int min_size, int max_size, const pstab::InstanceConfig& instance,
               const std::string& out_path) {
  pstab::SweepConfig config;
  config.seeds = seeds;
  config.min_size = min_size;
  config.max_size = max_size;
  config.instance = instance;
  const pstab::SweepReport report = pstab::run_verification_sweep(config);
  const std::string text = pstab::sweep_report_to_json(report, config).dump(2) + "\n";
  if (!out_path.empty()) {
    if (int rc = write_file(out_path, text)) return rc;
  } else {
    std::cout << text;
  }
  std::cerr << (report.pass ? "verification sweep passed" : "verification sweep FAILED") << "\n";
  return report.pass ? 0 : 1;
}

int run_bounds(const std::string& input, const std::string& metric,
               const std::string& perturbation, const std::string& out_path) {
  const pstab::ProblemSpec spec = pstab::load_problem_spec_file(input);
  const auto need_prior2 = [&]() -> const pstab::DiscreteMeasure& {
    if (!spec.prior2) throw std::invalid_argument("this perturbation requires prior2");
    return *spec.prior2;
  };
  const auto need_misfit2 = [&]() -> const pstab::Misfit& {
    if (!spec.misfit2) throw std::invalid_argument("this perturbation requires misfit2");
    return *spec.misfit2;
  };
  const pstab::DiscreteMeasure& prior1 = *spec.prior1;
  const pstab::Misfit& misfit1 = *spec.misfit1;

  pstab::BoundReport report;
  if (metric == "tv" && perturbation == "misfit") {
    report = pstab::tv_misfit_bounds(prior1, misfit1, need_misfit2());
  } else if (metric == "tv" && perturbation == "prior") {
    report = pstab::tv_prior_bounds(prior1, need_prior2(), misfit1);
  } else if (metric == "hellinger" && perturbation == "misfit") {
    report = pstab::hellinger_misfit_bounds(prior1, misfit1, need_misfit2());
  } else if (metric == "hellinger" && perturbation == "prior") {
    report = pstab::hellinger_prior_bounds(prior1, need_prior2(), misfit1);
  } else if (metric == "kl" && perturbation == "misfit") {
    report = pstab::kl_joint_bounds(prior1, misfit1, prior1, need_misfit2());
  } else if (metric == "kl" && perturbation == "prior") {
    report = pstab::kl_joint_bounds(prior1, misfit1, need_prior2(), misfit1);
  } else if (metric == "kl" && perturbation == "joint") {
    report = pstab::kl_joint_bounds(prior1, misfit1, need_prior2(), need_misfit2());
  } else if (metric == "w1" && perturbation == "misfit") {
    report = pstab::w1_misfit_bounds(prior1, misfit1, need_misfit2());
  } else if (metric == "w1" && perturbation == "prior") {
    report = pstab::w1_prior_bounds(prior1, need_prior2(), misfit1);
  } else {
    throw std::invalid_argument("unsupported metric/perturbation combination: " + metric + "/" +
                                perturbation);
  }

  const std::string text = pstab::bound_report_to_json(report).dump(2) + "\n";
  if (!out_path.empty()) {
    if (int rc = write_file(out_path, text)) return rc;
  } else {
    std::cout << text;
  }

  const auto sl = report.slack_lower();
  const auto su = report.slack_upper();
  const bool violated = (sl && *sl < -pstab::tol::kSlack) || (su && *su < -pstab::tol::kSlack);
  return violated ? 1 : 0;
}

int run_sensitivity(const std::string& input, double beta_min, double beta_max, int steps,
                    const std::string& perturbation, const std::string& out_path) {
  const pstab::ProblemSpec spec = pstab::load_problem_spec_file(input);
  if (!spec.misfit2 && perturbation == "misfit") {
    throw std::invalid_argument("misfit perturbation requires misfit2");
  }
  if (!spec.prior2 && perturbation == "prior") {
    throw std::invalid_argument("prior perturbation requires prior2");
  }
  pstab::ProblemInstance instance{
      spec.space,
      *spec.prior1,
      spec.prior2 ? *spec.prior2 : *spec.prior1,
      *spec.misfit1,
      spec.misfit2 ? *spec.misfit2 : pstab::Misfit(Eigen::VectorXd::Zero(spec.space->size())),
      0,
      {}};

  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  std::vector<double> betas;
  for (int k = 0; k < steps; ++k) {
    betas.push_back(steps == 1 ? beta_min
                               : beta_min + (beta_max - beta_min) * k / (steps - 1.0));
  }
  const auto kind = perturbation == "prior" ? pstab::PerturbationKind::kPrior
                                            : pstab::PerturbationKind::kMisfit;
  const auto rows = pstab::sensitivity_sweep(instance, betas, kind);
  const std::string text = pstab::sensitivity_csv(rows);
  if (!out_path.empty()) {
    if (int rc = write_file(out_path, text)) return rc;
  } else {
    std::cout << text;
  }
  for (const auto& row : rows) {
    if (row.applicable && !row.contained) return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification of posterior stability bounds on finite metric spaces"};
  app.require_subcommand(1);

  auto* verify = app.add_subcommand("verify", "run the randomized bound-verification sweep");
  int seeds = 500, min_size = 2, max_size = 30;
  pstab::InstanceConfig instance;
  std::string verify_out;
  verify->add_option("--seeds", seeds, "number of seeded instances");
  verify->add_option("--min-size", min_size, "smallest support size");
  verify->add_option("--max-size", max_size, "largest support size");
  verify->add_option("--misfit-cap", instance.misfit_cap, "misfit values drawn in [0, cap]");
  verify->add_option("--dimension", instance.dimension, "coordinate dimension");
  verify->add_option("--concentration", instance.concentration, "prior flatness parameter");
  verify->add_option("--sparsity", instance.sparsity, "probability of zero prior weights");
  verify->add_option("--out", verify_out, "write the JSON report here");

  auto* bounds = app.add_subcommand("bounds", "evaluate one bound report for a problem spec");
  std::string bounds_input, metric = "tv", perturbation = "misfit", bounds_out;
  bounds->add_option("--input", bounds_input, "problem-spec JSON file")->required();
  bounds->add_option("--metric", metric, "tv | hellinger | kl | w1")
      ->check(CLI::IsMember({"tv", "hellinger", "kl", "w1"}));
  bounds->add_option("--perturbation", perturbation, "misfit | prior | joint")
      ->check(CLI::IsMember({"misfit", "prior", "joint"}));
  bounds->add_option("--out", bounds_out, "write the JSON report here");

  auto* sensitivity = app.add_subcommand("sensitivity", "scale the misfit and track all bounds");
  std::string sens_input, sens_out, sens_perturbation = "misfit";
  double beta_min = 0.0, beta_max = 8.0;
  int steps = 9;
  sensitivity->add_option("--input", sens_input, "problem-spec JSON file")->required();
  sensitivity->add_option("--beta-min", beta_min, "first misfit scale");
  sensitivity->add_option("--beta-max", beta_max, "last misfit scale");
  sensitivity->add_option("--steps", steps, "number of grid points");
  sensitivity->add_option("--perturbation", sens_perturbation, "misfit | prior")
      ->check(CLI::IsMember({"misfit", "prior"}));
  sensitivity->add_option("--out", sens_out, "write the CSV table here");

  auto* reproduce = app.add_subcommand("reproduce", "re-run a named example and check its certificate");
  std::string example_id;
  double tau = 0.25;
  int grid = 3000;
  reproduce->add_option("example", example_id, "example identifier")->required();
  reproduce->add_option("--tau", tau, "translation for translated-uniform");
  reproduce->add_option("--grid", grid, "grid resolution");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*verify) return run_verify(seeds, min_size, max_size, instance, verify_out);
    if (*bounds) return run_bounds(bounds_input, metric, perturbation, bounds_out);
    if (*sensitivity) {
      return run_sensitivity(sens_input, beta_min, beta_max, steps, sens_perturbation, sens_out);
    }
    if (*reproduce) {
      const pstab::Certificate cert = pstab::reproduce(example_id, tau, grid);
      print_certificate(cert);
      return cert.pass() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
