#include "pstab/divergences.hpp"

#include <cmath>
#include <stdexcept>

namespace pstab {

namespace {

void check_pair(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2, bool need_probability) {
  if (!mu1.same_space(mu2)) {
    throw SpaceMismatchError("divergences require measures on one shared space");
  }
  if (need_probability && (!mu1.is_probability() || !mu2.is_probability())) {
    throw std::invalid_argument("divergences require probability measures");
  }
}

}  // namespace

double total_variation(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2) {
  check_pair(mu1, mu2, true);
  NeumaierSum s;
  for (Eigen::Index i = 0; i < mu1.size(); ++i) {
    s.add(std::abs(mu1.weight(i) - mu2.weight(i)));
  }
  return 0.5 * s.value();
}

double hellinger(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2) {
  check_pair(mu1, mu2, true);
  NeumaierSum s;
  for (Eigen::Index i = 0; i < mu1.size(); ++i) {
    const double d = std::sqrt(mu1.weight(i)) - std::sqrt(mu2.weight(i));
    s.add(d * d);
  }
  return std::sqrt(s.value());
}

double kullback_leibler(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2) {
  check_pair(mu1, mu2, false);
  NeumaierSum s;
  for (Eigen::Index i : mu1.support()) {
    if (!mu2.in_support(i)) return kInf;
    s.add(mu1.weight(i) * std::log(mu1.weight(i) / mu2.weight(i)));
  }
  // Rounding can leave a tiny negative value for nearly identical inputs.
  return std::max(0.0, s.value());
}

EnvelopeBounds log_envelope(double s, double t) {
  if (!(s > 0.0) || !(t > 0.0)) throw std::domain_error("log_envelope requires s, t > 0");
  const double gap = std::abs(s - t);
  return EnvelopeBounds{gap / std::max(s, t), std::abs(std::log(t) - std::log(s)),
                        gap / std::min(s, t)};
}

EnvelopeBounds exp_envelope(double x, double y) {
  const double ex = std::exp(x);
  const double ey = std::exp(y);
  const double gap = std::abs(x - y);
  return EnvelopeBounds{std::min(ex, ey) * gap, std::abs(ex - ey), std::max(ex, ey) * gap};
}

}  // namespace pstab
