#include <doctest.h>

#include <cmath>

#include "pstab/bounds.hpp"

// Closed-form cross-checks on a two-point space: every report entry is
// recomputed here with straight-line arithmetic, independently of the library
// helpers, so a transcription slip in a prefactor or min/max cannot hide
// behind a still-valid sandwich.

using namespace pstab;

namespace {

constexpr double kD = 2.0;  // distance between the two points

SpacePtr two_points() {
  Eigen::MatrixXd coords(2, 1);
  coords << 0.0, kD;
  return MetricSpace::from_coords(coords);
}

Misfit misfit(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return Misfit(v);
}

DiscreteMeasure measure(const SpacePtr& space, double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return DiscreteMeasure(space, v);
}

}  // namespace

TEST_CASE("misfit-perturbation reports on two points match closed forms") {
  auto space = two_points();
  const double p = 0.6, q = 0.4;
  const auto mu = measure(space, p, q);
  const double x1 = 0.0, y1 = 1.0;  // first misfit (essinf already zero)
  const double x2 = 0.5, y2 = 0.0;  // second misfit
  const auto phi1 = misfit(x1, y1);
  const auto phi2 = misfit(x2, y2);

  const double z1 = p * std::exp(-x1) + q * std::exp(-y1);
  const double z2 = p * std::exp(-x2) + q * std::exp(-y2);
  const double post1a = p * std::exp(-x1) / z1, post1b = q * std::exp(-y1) / z1;
  const double post2a = p * std::exp(-x2) / z2, post2b = q * std::exp(-y2) / z2;

  // log-likelihood gap per point and its weighted norms
  const double ga = (x2 - x1) + std::log(z2 / z1);
  const double gb = (y2 - y1) + std::log(z2 / z1);
  const double gap_l1 = p * std::abs(ga) + q * std::abs(gb);
  const double gap_l2 = std::sqrt(p * ga * ga + q * gb * gb);
  const double dphi_l1 = p * std::abs(x1 - x2) + q * std::abs(y1 - y2);
  const double dphi_l2 = std::sqrt(p * (x1 - x2) * (x1 - x2) + q * (y1 - y2) * (y1 - y2));
  const double sup1 = std::max(x1, y1), sup2 = std::max(x2, y2);

  SUBCASE("total variation") {
    const auto r = tv_misfit_bounds(mu, phi1, phi2);
    const double actual = 0.5 * (std::abs(post1a - post2a) + std::abs(post1b - post2b));
    CHECK(r.actual == doctest::Approx(actual).epsilon(1e-12));

    CHECK(*r.upper_bounds.at("lipschitz") ==
          doctest::Approx(0.5 / std::min(z1, z2) * gap_l1).epsilon(1e-12));
    CHECK(*r.lower_bounds.at("lipschitz") ==
          doctest::Approx(0.5 * std::min(std::exp(-sup1) / z1, std::exp(-sup2) / z2) * gap_l1)
              .epsilon(1e-12));

    const double exp_l1 =
        p * std::abs(std::exp(-x1) - std::exp(-x2)) + q * std::abs(std::exp(-y1) - std::exp(-y2));
    CHECK(*r.upper_bounds.at("triangle") ==
          doctest::Approx(0.5 / std::max(z1, z2) * (exp_l1 + std::abs(z2 - z1))).epsilon(1e-12));

    // phi1 - phi2 = (-0.5, +1.0) changes sign and z1 < z2 here: the lower
    // bound integrates |phi1 - phi2| over the set where the second misfit is
    // larger and divides by the smaller evidence.
    REQUIRE(z1 < z2);
    REQUIRE(r.hypotheses.at("sign_change"));
    CHECK(*r.lower_bounds.at("triangle") ==
          doctest::Approx(std::exp(-sup2) / z1 * (p * (x2 - x1))).epsilon(1e-12));
  }

  SUBCASE("hellinger") {
    const auto r = hellinger_misfit_bounds(mu, phi1, phi2);
    const double actual =
        std::sqrt(std::pow(std::sqrt(post1a) - std::sqrt(post2a), 2) +
                  std::pow(std::sqrt(post1b) - std::sqrt(post2b), 2));
    CHECK(r.actual == doctest::Approx(actual).epsilon(1e-12));

    const double sz1 = std::sqrt(z1), sz2 = std::sqrt(z2);
    CHECK(*r.upper_bounds.at("lipschitz") ==
          doctest::Approx(0.5 / std::min(sz1, sz2) * gap_l2).epsilon(1e-12));
    CHECK(*r.lower_bounds.at("lipschitz") ==
          doctest::Approx(0.5 *
                          std::min(std::exp(-0.5 * sup1) / sz1, std::exp(-0.5 * sup2) / sz2) *
                          gap_l2)
              .epsilon(1e-12));

    const double half_l2 = std::sqrt(p * std::pow(std::exp(-x1 / 2) - std::exp(-x2 / 2), 2) +
                                     q * std::pow(std::exp(-y1 / 2) - std::exp(-y2 / 2), 2));
    CHECK(*r.upper_bounds.at("triangle") ==
          doctest::Approx((half_l2 + std::abs(sz2 - sz1)) / std::max(sz1, sz2)).epsilon(1e-12));
    CHECK(*r.upper_bounds.at("chain") ==
          doctest::Approx(std::min(2.0 * std::sqrt(dphi_l1), dphi_l2) / std::max(sz1, sz2))
              .epsilon(1e-12));
  }

  SUBCASE("kullback-leibler with one shared prior") {
    const auto r = kl_joint_bounds(mu, phi1, mu, phi2);
    const double actual =
        post1a * std::log(post1a / post2a) + post1b * std::log(post1b / post2b);
    CHECK(r.actual == doctest::Approx(actual).epsilon(1e-12));

    const double log_ratio = std::abs(std::log(z2 / z1));
    CHECK(*r.upper_bounds.at("joint") ==
          doctest::Approx(dphi_l1 / z1 + log_ratio).epsilon(1e-12));
    CHECK(*r.upper_bounds.at("misfit_combined") ==
          doctest::Approx(dphi_l1 / z1 + dphi_l1 / std::min(z1, z2)).epsilon(1e-12));
    CHECK(*r.upper_bounds.at("reference") ==
          doctest::Approx(2.0 * dphi_l1 / std::min(z1, z2)).epsilon(1e-12));

    const double mid = std::exp(-sup1) / z1 *
                       (p * std::abs((x2 - x1) + std::log(z2 / z1)) +
                        q * std::abs((y2 - y1) + std::log(z2 / z1)));
    REQUIRE(actual < 2.0);
    CHECK(*r.lower_bounds.at("exponent") == doctest::Approx(0.125 * mid * mid).epsilon(1e-12));
  }

  SUBCASE("1-wasserstein") {
    const auto r = w1_misfit_bounds(mu, phi1, phi2);
    const double actual = kD * std::abs(post1a - post2a);
    CHECK(r.actual == doctest::Approx(actual).epsilon(1e-12));

    const double exp_l1 =
        p * std::abs(std::exp(-x1) - std::exp(-x2)) + q * std::abs(std::exp(-y1) - std::exp(-y2));
    CHECK(*r.upper_bounds.at("likelihood") ==
          doctest::Approx(kD / std::max(z1, z2) * (exp_l1 + std::abs(z1 - z2))).epsilon(1e-12));
    CHECK(*r.upper_bounds.at("misfit") ==
          doctest::Approx(kD / std::max(z1, z2) * (dphi_l1 + std::abs(z1 - z2))).epsilon(1e-12));
    CHECK(r.components.at("dual_identity_residual") <= 1e-12);
  }
}

TEST_CASE("evidence-matched misfit pair: level-set lower bounds match closed forms") {
  auto space = two_points();
  const double p = 0.55, q = 0.45;
  const auto mu = measure(space, p, q);
  const double x1 = 0.0, y1 = 0.8;
  const auto phi1 = misfit(x1, y1);
  const double z1 = p * std::exp(-x1) + q * std::exp(-y1);

  // Shift the second misfit onto the evidence level set of the first.
  double x2 = 0.6, y2 = 0.1;
  const double z2_pre = p * std::exp(-x2) + q * std::exp(-y2);
  const double shift = std::log(z2_pre / z1);
  x2 += shift;
  y2 += shift;
  const auto phi2 = misfit(x2, y2);
  const double z2 = p * std::exp(-x2) + q * std::exp(-y2);
  REQUIRE(std::abs(z1 - z2) <= 1e-13);

  const auto r = w1_misfit_bounds(mu, phi1, phi2);
  REQUIRE(r.hypotheses.at("evidence_equal"));
  const double da = std::exp(-x1) - std::exp(-x2);
  const double db = std::exp(-y1) - std::exp(-y2);
  const double lip = std::abs(da - db) / kD;
  const double l2sq = p * da * da + q * db * db;
  CHECK(*r.lower_bounds.at("l2_lipschitz") == doctest::Approx(l2sq / (z1 * lip)).epsilon(1e-10));

  const double sup1 = std::max(std::abs(x1), std::abs(y1));
  const double sup2 = std::max(std::abs(x2), std::abs(y2));
  const double dphi_l2sq = p * (x1 - x2) * (x1 - x2) + q * (y1 - y2) * (y1 - y2);
  CHECK(*r.lower_bounds.at("linf") ==
        doctest::Approx(std::min(std::exp(-2.0 * sup1), std::exp(-2.0 * sup2)) / z1 * dphi_l2sq /
                        lip)
            .epsilon(1e-10));

  // The matched pair also fires the equal-evidence branch of the
  // triangle-route total variation lower bound.
  const auto tv = tv_misfit_bounds(mu, phi1, phi2);
  REQUIRE(tv.hypotheses.at("evidence_equal"));
  CHECK(tv.components.at("triangle_lower_branch") == 0.0);
  const double dphi_l1 = p * std::abs(x1 - x2) + q * std::abs(y1 - y2);
  CHECK(*tv.lower_bounds.at("triangle") ==
        doctest::Approx(0.5 * std::min(std::exp(-sup1), std::exp(-sup2)) / std::min(z1, z2) *
                        dphi_l1)
            .epsilon(1e-10));
  CHECK(*tv.slack_lower() >= -1e-9);
  CHECK(*tv.slack_upper() >= -1e-9);
}

TEST_CASE("kl prior-only exponent forms on two points match closed forms") {
  auto space = two_points();
  const auto mu1 = measure(space, 0.6, 0.4);
  const auto mu2 = measure(space, 0.3, 0.7);
  const double xa = 0.5, xb = 0.0;
  const auto phi = misfit(xa, xb);

  const auto r = kl_joint_bounds(mu1, phi, mu2, phi);
  REQUIRE(r.hypotheses.at("prior_only"));

  const double z1 = 0.6 * std::exp(-xa) + 0.4;
  const double z2 = 0.3 * std::exp(-xa) + 0.7;
  const double kl_prior = 0.6 * std::log(0.6 / 0.3) + 0.4 * std::log(0.4 / 0.7);
  const double log_ratio = std::abs(std::log(z2 / z1));
  REQUIRE(kl_prior < 2.0);  // so xi = 1/2
  CHECK(*r.upper_bounds.at("prior_exponent") ==
        doctest::Approx(log_ratio + 2.0 * std::sqrt(2.0) * std::sqrt(kl_prior) / z1)
            .epsilon(1e-12));

  REQUIRE(r.actual < 2.0);  // so gamma = 2
  const double core = std::exp(-xa) / z1 * std::abs(std::log(z2 / z1) + kl_prior);
  CHECK(*r.lower_bounds.at("prior_exponent") ==
        doctest::Approx(0.125 * core * core).epsilon(1e-12));
  CHECK(*r.slack_lower() >= -1e-9);
  CHECK(*r.slack_upper() >= -1e-9);
}

TEST_CASE("prior-perturbation reports on two points match closed forms") {
  auto space = two_points();
  const auto mu1 = measure(space, 0.6, 0.4);
  const auto mu2 = measure(space, 0.3, 0.7);
  const double xa = 0.2, xb = 0.0;
  const auto phi = misfit(xa, xb);

  const double ea = std::exp(-xa), eb = std::exp(-xb);
  const double z1 = 0.6 * ea + 0.4 * eb;
  const double z2 = 0.3 * ea + 0.7 * eb;
  const double prior_tv = 0.3;

  SUBCASE("total variation") {
    const auto r = tv_prior_bounds(mu1, mu2, phi);
    const double p1a = 0.6 * ea / z1, p2a = 0.3 * ea / z2;
    CHECK(r.actual == doctest::Approx(std::abs(p1a - p2a)).epsilon(1e-12));

    CHECK(*r.upper_bounds.at("triangle") ==
          doctest::Approx((prior_tv + 0.5 * std::abs(z2 - z1)) / std::max(z1, z2))
              .epsilon(1e-12));
    CHECK(*r.lower_bounds.at("triangle") ==
          doctest::Approx(std::exp(-xa) / z1 *
                          std::abs(prior_tv - std::abs((z2 - z1) / (2.0 * z2))))
              .epsilon(1e-12));

    // Density ratio route: r = (0.5, 1.75) against mu1.
    const double ra = 0.3 / 0.6, rb = 0.7 / 0.4;
    const double core = 0.6 * std::abs(std::log(z2 / z1) - std::log(ra)) +
                        0.4 * std::abs(std::log(z2 / z1) - std::log(rb));
    CHECK(*r.upper_bounds.at("lipschitz") ==
          doctest::Approx(0.5 / std::min(z1, z2) * rb * core).epsilon(1e-12));
    CHECK(*r.lower_bounds.at("lipschitz") ==
          doctest::Approx(0.5 * std::exp(-xa) * std::min(1.0 / z1, ra / z2) * core)
              .epsilon(1e-12));
  }

  SUBCASE("hellinger") {
    const auto r = hellinger_prior_bounds(mu1, mu2, phi);
    const double hel =
        std::sqrt(std::pow(std::sqrt(0.6) - std::sqrt(0.3), 2) +
                  std::pow(std::sqrt(0.4) - std::sqrt(0.7), 2));
    const double sz1 = std::sqrt(z1), sz2 = std::sqrt(z2);
    CHECK(*r.upper_bounds.at("triangle") ==
          doctest::Approx((hel + std::abs(sz2 - sz1)) / std::max(sz1, sz2)).epsilon(1e-12));
    CHECK(*r.upper_bounds.at("reference") ==
          doctest::Approx(2.0 * hel / std::min(z1, z2)).epsilon(1e-12));
    CHECK(*r.lower_bounds.at("triangle") ==
          doctest::Approx(std::exp(-0.5 * xa) / sz1 * std::abs(hel - std::abs(sz2 - sz1) / sz2))
              .epsilon(1e-12));
  }

  SUBCASE("1-wasserstein") {
    const auto r = w1_prior_bounds(mu1, mu2, phi);
    const double w1_prior = kD * prior_tv;
    const double elip = std::abs(ea - eb) / kD;
    CHECK(r.components.at("prior_w1") == doctest::Approx(w1_prior).epsilon(1e-12));
    CHECK(*r.upper_bounds.at("two_term") ==
          doctest::Approx((1.0 + elip * kD) / std::max(z1, z2) * w1_prior +
                          std::abs(z1 - z2) / std::max(z1, z2) * kD)
              .epsilon(1e-12));
    CHECK(*r.upper_bounds.at("single_line") ==
          doctest::Approx((1.0 + 2.0 * elip * kD) * w1_prior / std::max(z1, z2))
              .epsilon(1e-12));
    CHECK(r.components.at("gopt_identity_residual") <= 1e-12);
    CHECK(r.components.at("chain_dz_residual") ==
          doctest::Approx(elip * w1_prior - std::abs(z1 - z2)).epsilon(1e-10));
  }
}
