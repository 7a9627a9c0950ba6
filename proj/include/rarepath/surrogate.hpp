#pragma once

#include <vector>

#include "rarepath/gaussian.hpp"
#include "rarepath/metrics.hpp"
#include "rarepath/schedule.hpp"

namespace rarepath {

/// lambda-weighted mixture of the rare and frequent conditionals,
/// p~(x|cR) = lambda p(x|cR) + (1-lambda) p(x|cF).
struct SurrogateMixture {
  Concept rare;
  Concept frequent;
  double lambda;

  SurrogateMixture(Concept rare_, Concept frequent_, double lambda_);
};

double surrogate_log_density(const SurrogateMixture& sm, const Vec& x, int t,
                             const NoiseSchedule& schedule);

// Responsibility-weighted combination of the two conditional scores at noise
// level t. The lambda = 0 and lambda = 1 endpoints reduce exactly.
Vec surrogate_score(const SurrogateMixture& sm, const Vec& x, int t,
                    const NoiseSchedule& schedule);

// log p_t(x|cR) - log p_t(x|cF), the log-density gap between the pair.
double perturbation_field(const Concept& rare, const Concept& frequent, const Vec& x,
                          int t, const NoiseSchedule& schedule);

// Score-substitution gap statistics over a probe set (absolute and relative
// to the frequent score).
GapStats substitution_gap(const Concept& rare, const Concept& frequent, int t,
                          const NoiseSchedule& schedule, const std::vector<Vec>& probe);

}  // namespace rarepath
