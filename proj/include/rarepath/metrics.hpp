#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "rarepath/gaussian.hpp"
#include "rarepath/sampler.hpp"

namespace rarepath {

struct GapStats {
  double mean_abs = 0.0;
  double max_abs = 0.0;
  double mean_rel = 0.0;
  double max_rel = 0.0;
  std::size_t count = 0;
};

// Central difference per coordinate, (f(x+h e_i) - f(x-h e_i)) / 2h.
Vec finite_diff_grad(const std::function<double(const Vec&)>& f, const Vec& x, double h);

// -(1/N) sum log_density(m, x_i)
double nll(const GaussianMixture& m, const std::vector<Vec>& samples);

// Average 1-D W1 distance over random unit projections.
double sliced_wasserstein(const std::vector<Vec>& a, const std::vector<Vec>& b,
                          int n_proj, Rng& rng);

// Chi-square quantile for dof in {1,2,3}, by Simpson integration of the
// density (step 1e-4 on [0, 60]).
double chi_square_quantile(int dof, double q);

// Fraction of samples inside the target's Mahalanobis ellipsoid at the given
// chi-square quantile.
double concept_hit_rate(const std::vector<Vec>& samples, const GaussianComponent& target,
                        double quantile);

// Pairwise-concordance tau over pair count n(n-1)/2; ties count as neither.
double kendall_tau(const std::vector<double>& series);

// Per-stage fractions: each sample goes to the stage with the highest
// noiseless log density; ties break toward the lower stage index.
std::vector<double> mode_attribution(const std::vector<Vec>& samples, const StageList& stages);

}  // namespace rarepath
