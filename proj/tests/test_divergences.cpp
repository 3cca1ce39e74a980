#include <doctest.h>

#include <cmath>

#include "pstab/divergences.hpp"
#include "test_helpers.hpp"

using namespace pstab;

namespace {

SpacePtr unit_pair() {
  Eigen::MatrixXd coords(2, 1);
  coords << 0.0, 1.0;
  return MetricSpace::from_coords(coords);
}

DiscreteMeasure make(const SpacePtr& space, std::initializer_list<double> ws) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(ws.size()));
  Eigen::Index i = 0;
  for (double x : ws) w[i++] = x;
  return DiscreteMeasure(space, w);
}

}  // namespace

TEST_CASE("total variation endpoints") {
  auto space = unit_pair();
  auto uniform = make(space, {0.5, 0.5});
  auto left = make(space, {1.0, 0.0});
  auto right = make(space, {0.0, 1.0});

  CHECK(total_variation(uniform, uniform) == 0.0);
  CHECK(total_variation(left, right) == doctest::Approx(1.0));
  CHECK(total_variation(left, uniform) == doctest::Approx(0.5));
}

TEST_CASE("divergences require one shared space") {
  auto a = make(unit_pair(), {0.5, 0.5});
  auto b = make(unit_pair(), {0.5, 0.5});
  CHECK_THROWS_AS(total_variation(a, b), SpaceMismatchError);
  CHECK_THROWS_AS(hellinger(a, b), SpaceMismatchError);
  CHECK_THROWS_AS(kullback_leibler(a, b), SpaceMismatchError);
}

TEST_CASE("hellinger endpoints and the hand-computed mixed case") {
  auto space = unit_pair();
  auto uniform = make(space, {0.5, 0.5});
  auto left = make(space, {1.0, 0.0});
  auto right = make(space, {0.0, 1.0});

  CHECK(hellinger(uniform, uniform) == 0.0);
  CHECK(hellinger(left, right) == doctest::Approx(std::sqrt(2.0)));
  CHECK(hellinger(left, uniform) == doctest::Approx(std::sqrt(2.0 - std::sqrt(2.0))));
}

TEST_CASE("kullback-leibler values and domination") {
  auto space = unit_pair();
  auto uniform = make(space, {0.5, 0.5});
  auto left = make(space, {1.0, 0.0});

  CHECK(kullback_leibler(uniform, uniform) == 0.0);
  CHECK(std::isinf(kullback_leibler(uniform, left)));
  CHECK(kullback_leibler(left, uniform) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("metric axioms on random triples") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 30; ++trial) {
    auto space = testutil::random_space(rng, 6);
    auto a = testutil::random_probability(rng, space, 0.2);
    auto b = testutil::random_probability(rng, space, 0.2);
    auto c = testutil::random_probability(rng, space, 0.2);

    CHECK(total_variation(a, b) == doctest::Approx(total_variation(b, a)));
    CHECK(hellinger(a, b) == doctest::Approx(hellinger(b, a)));
    CHECK(total_variation(a, a) <= 1e-12);
    CHECK(hellinger(a, a) <= 1e-12);
    CHECK(total_variation(a, b) <= total_variation(a, c) + total_variation(c, b) + 1e-12);
    CHECK(hellinger(a, b) <= hellinger(a, c) + hellinger(c, b) + 1e-12);

    CHECK(total_variation(a, b) >= 0.0);
    CHECK(total_variation(a, b) <= 1.0 + 1e-12);
    CHECK(hellinger(a, b) <= std::sqrt(2.0) + 1e-12);
    CHECK(kullback_leibler(a, b) >= 0.0);
  }
}

TEST_CASE("pinsker and the hellinger comparison hold on random pairs") {
  std::mt19937_64 rng(103);
  for (int trial = 0; trial < 50; ++trial) {
    auto space = testutil::random_space(rng, 8);
    auto a = testutil::random_probability(rng, space, trial % 2 ? 0.3 : 0.0);
    auto b = testutil::random_probability(rng, space, trial % 2 ? 0.3 : 0.0);
    const double tv = total_variation(a, b);
    const double hel = hellinger(a, b);
    const double kl = kullback_leibler(a, b);

    if (std::isfinite(kl)) CHECK(tv <= std::sqrt(kl / 2.0) + 1e-12);
    CHECK(0.5 * hel * hel <= tv + 1e-12);
    CHECK(tv <= hel * std::sqrt(1.0 - hel * hel / 4.0) + 1e-12);
  }
}

TEST_CASE("total variation decomposes into one-sided sums") {
  std::mt19937_64 rng(107);
  auto space = testutil::random_space(rng, 9);
  for (int trial = 0; trial < 20; ++trial) {
    auto a = testutil::random_probability(rng, space, 0.2);
    auto b = testutil::random_probability(rng, space, 0.2);
    double plus = 0.0, minus = 0.0;
    for (Eigen::Index i = 0; i < 9; ++i) {
      const double d = a.weight(i) - b.weight(i);
      if (d > 0) plus += d;
      if (d < 0) minus -= d;
    }
    CHECK(total_variation(a, b) == doctest::Approx(plus).epsilon(1e-12));
    CHECK(total_variation(a, b) == doctest::Approx(minus).epsilon(1e-12));
  }
}

TEST_CASE("scalar envelopes sandwich the log and exp differences") {
  auto log0 = log_envelope(2.0, 2.0);
  CHECK(log0.lower == 0.0);
  CHECK(log0.actual == 0.0);
  CHECK(log0.upper == 0.0);

  auto log1 = log_envelope(1.0, 2.0);
  CHECK(log1.lower == doctest::Approx(0.5));
  CHECK(log1.actual == doctest::Approx(std::log(2.0)));
  CHECK(log1.upper == doctest::Approx(1.0));

  auto exp1 = exp_envelope(0.0, 1.0);
  CHECK(exp1.lower == doctest::Approx(1.0));
  CHECK(exp1.actual == doctest::Approx(std::exp(1.0) - 1.0));
  CHECK(exp1.upper == doctest::Approx(std::exp(1.0)));

  CHECK_THROWS_AS(log_envelope(0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(log_envelope(1.0, -2.0), std::domain_error);

  std::mt19937_64 rng(109);
  std::uniform_real_distribution<double> pos(1e-3, 20.0);
  std::uniform_real_distribution<double> real(-5.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    auto le = log_envelope(pos(rng), pos(rng));
    CHECK(le.lower <= le.actual + 1e-12);
    CHECK(le.actual <= le.upper + 1e-12);
    auto ee = exp_envelope(real(rng), real(rng));
    CHECK(ee.lower <= ee.actual + 1e-12);
    CHECK(ee.actual <= ee.upper + 1e-12);
  }
}
