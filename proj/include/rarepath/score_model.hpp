#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rarepath/gaussian.hpp"
#include "rarepath/schedule.hpp"

namespace rarepath {

/// Error model for poorly estimated rare-concept scores: a fixed smooth
/// random field, attenuated wherever the concept's noisy marginal has
/// support. Everything is deterministic given field_seed.
struct CorruptionSpec {
  double amplitude = 0.0;      // kappa, max perturbation magnitude
  double density_floor = 0.1;  // rho, density at which attenuation halves
  double bandwidth = 1.0;      // frequency scale of the field
  std::uint64_t field_seed = 0;
  std::set<std::string> targets;

  void validate() const;
};

/// Smooth vector field with ||g(x)|| <= 1, built from random Fourier
/// features: per output coordinate, g_j(x) = mean_f cos(w_f . x + p_f) / sqrt(d)
/// with w_f ~ N(0, bandwidth^2 I).
class FourierField {
 public:
  FourierField(int dim, double bandwidth, std::uint64_t seed, int features = 64);
  Vec operator()(const Vec& x) const;
  int dim() const { return dim_; }

 private:
  int dim_;
  std::vector<Mat> freqs_;   // one (features x dim) matrix per output coordinate
  std::vector<Vec> phases_;  // one (features) vector per output coordinate
};

class CorruptionField {
 public:
  CorruptionField(CorruptionSpec spec, int dim);
  // g(x) * kappa / (1 + local_density / rho)
  Vec at(const Vec& x, double local_density) const;
  const CorruptionSpec& spec() const { return spec_; }

 private:
  CorruptionSpec spec_;
  FourierField field_;
};

enum class ModelKind { AnalyticOracle, Corrupted };

struct EvalResult {
  Vec eps;       // guidance-combined output
  Vec eps_cond;  // conditional-only output (pre-guidance)
};

/// Uniform evaluator producing eps_hat(x, t, c) with classifier-free
/// guidance. The analytic oracle converts the exact score of the concept's
/// noisy marginal; the corrupted kind perturbs targeted concepts' scores.
/// Noisy marginals for every (concept, t) are precomputed, so evaluation is
/// read-only apart from the evaluation counter.
class ScoreModel {
 public:
  ScoreModel(ModelKind kind, ConceptLibrary library, NoiseSchedule schedule,
             std::optional<CorruptionSpec> corruption = std::nullopt);

  // Counter cost: +1 (conditional) and +1 more for the unconditional branch
  // when w != 1.
  Vec evaluate(const Vec& x, int t, const std::string& concept_id, double w);
  EvalResult evaluate_full(const Vec& x, int t, const std::string& concept_id, double w);

  // score of p_t(x | c), corrupted when the concept is targeted; does not
  // touch the counter (used for analysis paths)
  Vec conditional_score(const Vec& x, int t, const std::string& concept_id) const;
  double conditional_log_density(const Vec& x, int t, const std::string& concept_id) const;

  std::uint64_t eval_count() const { return eval_count_; }
  void reset_eval_count() { eval_count_ = 0; }

  ModelKind kind() const { return kind_; }
  const ConceptLibrary& library() const { return library_; }
  const NoiseSchedule& schedule() const { return schedule_; }
  const std::optional<CorruptionField>& corruption() const { return corruption_; }

 private:
  const GaussianMixture& marginal(const std::string& concept_id, int t) const;

  ModelKind kind_;
  ConceptLibrary library_;
  NoiseSchedule schedule_;
  std::optional<CorruptionField> corruption_;
  std::vector<std::string> ids_;                       // insertion order
  std::vector<std::vector<GaussianMixture>> marginals_;  // [concept][t]
  std::vector<GaussianMixture> uncond_marginals_;        // [t]
  std::uint64_t eval_count_ = 0;
};

}  // namespace rarepath
