#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rarepath/score_model.hpp"

namespace rarepath {

/// Ordered prompt stages c_1..c_n; the last stage is the rare target and
/// priors must be nonincreasing.
struct StageList {
  std::vector<Concept> stages;

  explicit StageList(std::vector<Concept> stages_);
  std::size_t size() const { return stages.size(); }
  const Concept& rare() const { return stages.back(); }
};

enum class Alternation { None, R2F, Rap };
enum class BasePromptMode { LiteralRare, StageOne };
enum class DeltaSpace { Score, Eps };

struct SamplerConfig {
  int steps = 25;
  double delta_star = 0.08;
  double alpha = 0.5;
  int base_steps = 3;
  BasePromptMode base_prompt_mode = BasePromptMode::LiteralRare;
  double guidance_w = 1.0;
  Alternation alternation = Alternation::None;
  std::uint64_t seed = 1;
  int trajectories = 1;
  // matching-score options: compare guided or conditional-only outputs, in
  // score space or eps space
  bool delta_on_guided = true;
  DeltaSpace delta_space = DeltaSpace::Score;

  void validate() const;
};

enum class PairRole { Single, PairFirst, PairSecond };

const char* to_string(PairRole role);

struct TrajectoryStep {
  int loop_index = 0;
  int t = 0;
  Vec x;  // state at index t, before the update
  int active_stage = 1;  // 1-based stage pointer when the step began
  std::string prompt_id;
  std::optional<double> delta_t;
  bool switch_event = false;
  PairRole pair_role = PairRole::Single;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  std::uint64_t eval_count = 0;
  std::vector<int> switch_steps;  // loop indices where a stage advance fired
  Vec final_x;
};

struct RunResult {
  std::vector<Vec> samples;
  std::vector<Trajectory> trajectories;
};

// ||s_k - s_k1|| / max(||s_k||, 1e-12); 0 when both norms vanish.
double matching_score(const Vec& s_k, const Vec& s_k1);

// delta_t <= delta_star, boundary inclusive
bool should_switch(double delta_t, double delta_star);

// Baseline: one first-order update per step under a single prompt.
RunResult first_order_sample(ScoreModel& model, const Concept& concept,
                             const SamplerConfig& cfg, const NoiseSchedule& schedule);

/// Fixed per-stage step counts v_1..v_{n-1}; the last stage holds the rest.
struct R2FSchedule {
  std::vector<int> stage_steps;
};

// Fixed-schedule baseline: stage k for v_k steps, prompt alternating between
// the scheduled stage (even loop index) and the rare target (odd loop index).
RunResult r2f_sample(ScoreModel& model, const StageList& stages, const R2FSchedule& sched,
                     const SamplerConfig& cfg, const NoiseSchedule& schedule);

// Predictor-corrector pair consuming t-1 -> t-2 from x_pair_start = x_{t-1}:
//   eps_F at (x_{t-1}, t-1, stage); predictor x' to t-2;
//   eps_R at (x', t-2, rare); corrector with
//   (1 - 1/(2 alpha)) eps_F + (1/(2 alpha)) eps_R.
// Returns the corrected point and the number of evaluate calls made (2).
std::pair<Vec, int> second_order_pair_step(ScoreModel& model, const Vec& x_pair_start,
                                           const Concept& stage, const Concept& rare,
                                           double alpha, const NoiseSchedule& schedule,
                                           int t, const SamplerConfig& cfg);

// Adaptive sampler: base phase, then pair iterations gated by the matching
// score, reverting to single-step denoising once the rare stage is active.
RunResult rap_sample(ScoreModel& model, const StageList& stages, const SamplerConfig& cfg,
                     const NoiseSchedule& schedule);

}  // namespace rarepath
