#include "pstab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pstab {

DiscreteMeasure::DiscreteMeasure(SpacePtr space, Eigen::VectorXd weights, bool is_probability,
                                 double support_tol)
    : space_(std::move(space)),
      weights_(std::move(weights)),
      is_probability_(is_probability),
      support_tol_(support_tol) {
  if (!space_) throw std::invalid_argument("measure requires a space");
  if (weights_.size() != space_->size()) {
    throw std::invalid_argument("weight vector length does not match space size");
  }
  for (Eigen::Index i = 0; i < weights_.size(); ++i) {
    if (!std::isfinite(weights_[i]) || weights_[i] < 0.0) {
      throw std::invalid_argument("weights must be finite and non-negative");
    }
    if (weights_[i] > support_tol_) support_.push_back(i);
  }
  if (support_.empty()) throw std::invalid_argument("measure has empty support");
  if (is_probability_) {
    const double total = stable_sum(weights_);
    if (std::abs(total - 1.0) > tol::kProbability) {
      throw std::invalid_argument("probability weights must sum to 1 within 1e-12");
    }
  }
}

DiscreteMeasure DiscreteMeasure::probability(SpacePtr space, Eigen::VectorXd weights,
                                             double support_tol) {
  const double total = stable_sum(weights);
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw std::invalid_argument("cannot normalise: total mass must be positive and finite");
  }
  weights /= total;
  // Nudge one support weight so the accumulated sum is exactly 1; several
  // certificates compare evidence values at absolute 1e-12 over thousands of
  // cells, which a raw normalisation does not quite reach.
  Eigen::Index last = -1;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (weights[i] > support_tol) last = i;
  }
  if (last >= 0) {
    NeumaierSum rest;
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
      if (i != last) rest.add(weights[i]);
    }
    const double corrected = 1.0 - rest.value();
    if (corrected > support_tol) weights[last] = corrected;
  }
  return DiscreteMeasure(std::move(space), std::move(weights), true, support_tol);
}

Misfit::Misfit(Eigen::VectorXd values) : values_(std::move(values)) {
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw std::invalid_argument("misfit entries must be finite");
    }
  }
}

double radius(const DiscreteMeasure& mu) {
  const auto& supp = mu.support();
  const MetricSpace& space = *mu.space();
  double r = 0.0;
  for (std::size_t a = 0; a < supp.size(); ++a) {
    for (std::size_t b = a + 1; b < supp.size(); ++b) {
      r = std::max(r, space.distance(supp[a], supp[b]));
    }
  }
  return r;
}

std::vector<Eigen::Index> union_support(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2) {
  if (!mu1.same_space(mu2)) throw SpaceMismatchError("measures live on different spaces");
  std::vector<Eigen::Index> out;
  for (Eigen::Index i = 0; i < mu1.size(); ++i) {
    if (mu1.in_support(i) || mu2.in_support(i)) out.push_back(i);
  }
  return out;
}

double union_radius(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2) {
  const auto supp = union_support(mu1, mu2);
  const MetricSpace& space = *mu1.space();
  double r = 0.0;
  for (std::size_t a = 0; a < supp.size(); ++a) {
    for (std::size_t b = a + 1; b < supp.size(); ++b) {
      r = std::max(r, space.distance(supp[a], supp[b]));
    }
  }
  return r;
}

double lipschitz_norm(const Eigen::Ref<const Eigen::VectorXd>& f, const MetricSpace& space,
                      const std::vector<Eigen::Index>& restrict_to) {
  if (restrict_to.empty()) throw std::invalid_argument("lipschitz_norm: empty restriction set");
  if (f.size() != space.size()) {
    throw std::invalid_argument("lipschitz_norm: function length does not match space");
  }
  double norm = 0.0;
  for (std::size_t a = 0; a < restrict_to.size(); ++a) {
    for (std::size_t b = a + 1; b < restrict_to.size(); ++b) {
      const Eigen::Index i = restrict_to[a];
      const Eigen::Index j = restrict_to[b];
      const double num = std::abs(f[i] - f[j]);
      const double den = space.distance(i, j);
      if (den == 0.0) {
        if (num > 0.0) return kInf;
        continue;
      }
      norm = std::max(norm, num / den);
    }
  }
  return norm;
}

std::pair<double, double> ess_bounds(const Eigen::Ref<const Eigen::VectorXd>& f,
                                     const DiscreteMeasure& mu) {
  if (f.size() != mu.size()) {
    throw std::invalid_argument("ess_bounds: function length does not match measure");
  }
  double lo = kInf, hi = -kInf;
  for (Eigen::Index i : mu.support()) {
    lo = std::min(lo, f[i]);
    hi = std::max(hi, f[i]);
  }
  return {lo, hi};
}

DensityResult radon_nikodym(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2) {
  if (!mu1.same_space(mu2)) throw SpaceMismatchError("measures live on different spaces");
  DensityResult result;
  result.density = Eigen::VectorXd::Zero(mu1.size());
  for (Eigen::Index i = 0; i < mu1.size(); ++i) {
    if (mu2.in_support(i)) {
      result.density[i] = mu1.weight(i) / mu2.weight(i);
    } else if (mu1.in_support(i)) {
      result.failure_index = i;
      return result;
    }
  }
  return result;
}

double pth_moment(const DiscreteMeasure& mu, double p, Eigen::Index base) {
  if (!(p >= 1.0)) throw std::invalid_argument("pth_moment requires p >= 1");
  if (base < 0 || base >= mu.size()) throw std::invalid_argument("base index out of range");
  const MetricSpace& space = *mu.space();
  NeumaierSum s;
  for (Eigen::Index i : mu.support()) {
    s.add(std::pow(space.distance(base, i), p) * mu.weight(i));
  }
  return std::pow(s.value(), 1.0 / p);
}

}  // namespace pstab
