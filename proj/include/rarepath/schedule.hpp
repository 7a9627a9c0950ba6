#pragma once

#include <vector>

#include "rarepath/rng.hpp"

namespace rarepath {

/// Discrete variance-preserving forward process. Arrays are indexed by
/// t = 0..T where t = 0 is clean data and t = T is pure noise; a is
/// nonincreasing, sigma nondecreasing, and a_t^2 + sigma_t^2 = 1.
class NoiseSchedule {
 public:
  NoiseSchedule(std::vector<double> a, std::vector<double> sigma);

  // cosine schedule: a_t = cos((t/T) * pi/2) clipped to [1e-4, 1]
  static NoiseSchedule cosine_vp(int steps);

  int steps() const { return static_cast<int>(a_.size()) - 1; }
  double a(int t) const;
  double sigma(int t) const;

  bool operator==(const NoiseSchedule& other) const {
    return a_ == other.a_ && sigma_ == other.sigma_;
  }

 private:
  std::vector<double> a_, sigma_;
};

NoiseSchedule make_vp_schedule(int steps);

// eps = -sigma_t * score
Vec score_to_eps(const Vec& score, double sigma_t);
// score = -eps / sigma_t; undefined at sigma_t = 0
Vec eps_to_score(const Vec& eps, double sigma_t);

// Deterministic reverse update from t_from to t_to:
//   x0_hat = (x - sigma_from * eps) / a_from
//   x'     = a_to * x0_hat + sigma_to * eps
// t_to == t_from is tolerated and returns x unchanged.
Vec denoise_update(const Vec& x, const Vec& eps, const NoiseSchedule& schedule,
                   int t_from, int t_to);

/// Descending traversal order T, T-1, ..., 1; position in `indices` is the
/// 0-based loop index used for even/odd parity.
struct TimeGrid {
  explicit TimeGrid(int steps);
  std::vector<int> indices;
};

}  // namespace rarepath
