#pragma once

#include "pstab/measure.hpp"

namespace pstab {

/// Half the L1 distance between weight vectors; in [0, 1], maximal iff the
/// supports are disjoint. Requires one shared space and probability inputs.
double total_variation(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2);

/// L2 distance between square-root weight vectors; in [0, sqrt(2)] (no 1/2
/// factor in the convention used here).
double hellinger(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2);

/// sum_{p_i > 0} p_i log(p_i / q_i) when supp mu1 is contained in supp mu2,
/// +infinity otherwise. 0 * log 0 = 0.
double kullback_leibler(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2);

/// Scalar sandwich around a value, for the local Lipschitz envelopes of log
/// and exp.
struct EnvelopeBounds {
  double lower = 0.0;
  double actual = 0.0;
  double upper = 0.0;
};

/// |s - t| / (s v t)  <=  |log t - log s|  <=  |s - t| / (s ^ t), for s, t > 0.
EnvelopeBounds log_envelope(double s, double t);

/// (e^x ^ e^y) |x - y|  <=  |e^x - e^y|  <=  (e^x v e^y) |x - y|.
EnvelopeBounds exp_envelope(double x, double y);

}  // namespace pstab
