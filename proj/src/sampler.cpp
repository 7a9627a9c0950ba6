#include "rarepath/sampler.hpp"

#include <cmath>
#include <stdexcept>

namespace rarepath {

namespace {

constexpr double kNormFloor = 1e-12;

void check_run_inputs(const ScoreModel& model, const SamplerConfig& cfg,
                      const NoiseSchedule& schedule) {
  cfg.validate();
  if (!(schedule == model.schedule()))
    throw std::invalid_argument("sampler: schedule does not match the model's schedule");
  if (cfg.steps != schedule.steps())
    throw std::invalid_argument("sampler: cfg.steps does not match the schedule");
}

double delta_between(const EvalResult& a, const EvalResult& b, double sigma_t,
                     const SamplerConfig& cfg) {
  const Vec& ea = cfg.delta_on_guided ? a.eps : a.eps_cond;
  const Vec& eb = cfg.delta_on_guided ? b.eps : b.eps_cond;
  if (cfg.delta_space == DeltaSpace::Eps) return matching_score(ea, eb);
  return matching_score(eps_to_score(ea, sigma_t), eps_to_score(eb, sigma_t));
}

}  // namespace

StageList::StageList(std::vector<Concept> stages_) : stages(std::move(stages_)) {
  if (stages.empty()) throw std::invalid_argument("stage list: needs at least one stage");
  const int d = stages.front().dim();
  for (std::size_t k = 0; k < stages.size(); ++k) {
    if (stages[k].dim() != d) throw std::invalid_argument("stage list: mixed dimensions");
    if (k > 0 && stages[k].prior > stages[k - 1].prior)
      throw std::invalid_argument("stage list: priors must be nonincreasing");
  }
}

void SamplerConfig::validate() const {
  if (steps < 2) throw std::invalid_argument("config: steps must be >= 2");
  if (!(delta_star > 0.0)) throw std::invalid_argument("config: delta_star must be > 0");
  if (!(alpha > 0.0)) throw std::invalid_argument("config: alpha must be > 0");
  if (base_steps < 0 || base_steps >= steps)
    throw std::invalid_argument("config: base_steps must lie in [0, steps)");
  if (guidance_w < 0.0) throw std::invalid_argument("config: guidance_w must be >= 0");
  if (trajectories < 1) throw std::invalid_argument("config: trajectories must be >= 1");
}

const char* to_string(PairRole role) {
  switch (role) {
    case PairRole::Single: return "single";
    case PairRole::PairFirst: return "pair-first";
    case PairRole::PairSecond: return "pair-second";
  }
  return "single";
}

double matching_score(const Vec& s_k, const Vec& s_k1) {
  if (s_k.size() != s_k1.size())
    throw std::invalid_argument("matching_score: dimension mismatch");
  const double diff = (s_k - s_k1).norm();
  const double ref = s_k.norm();
  if (ref <= kNormFloor && diff <= kNormFloor) return 0.0;
  return diff / std::max(ref, kNormFloor);
}

bool should_switch(double delta_t, double delta_star) {
  if (delta_t < 0.0 || delta_star < 0.0)
    throw std::invalid_argument("should_switch: inputs must be >= 0");
  return delta_t <= delta_star;
}

RunResult first_order_sample(ScoreModel& model, const Concept& concept,
                             const SamplerConfig& cfg, const NoiseSchedule& schedule) {
  check_run_inputs(model, cfg, schedule);
  if (cfg.alternation != Alternation::None)
    throw std::invalid_argument("first_order_sample: alternation must be none");

  const int T = schedule.steps();
  const int d = concept.dim();
  RunResult result;
  result.samples.reserve(cfg.trajectories);
  result.trajectories.reserve(cfg.trajectories);

  for (int traj = 0; traj < cfg.trajectories; ++traj) {
    Rng rng(split_seed(cfg.seed, traj));
    Vec x = rng.normal_vec(d);
    Trajectory record;
    const std::uint64_t count0 = model.eval_count();
    for (int i = 0; i < T; ++i) {
      const int t = T - i;
      record.steps.push_back({i, t, x, 1, concept.id, std::nullopt, false, PairRole::Single});
      const Vec eps = model.evaluate(x, t, concept.id, cfg.guidance_w);
      x = denoise_update(x, eps, schedule, t, t - 1);
    }
    record.eval_count = model.eval_count() - count0;
    record.final_x = x;
    result.samples.push_back(x);
    result.trajectories.push_back(std::move(record));
  }
  return result;
}

RunResult r2f_sample(ScoreModel& model, const StageList& stages, const R2FSchedule& sched,
                     const SamplerConfig& cfg, const NoiseSchedule& schedule) {
  check_run_inputs(model, cfg, schedule);
  if (cfg.alternation != Alternation::R2F)
    throw std::invalid_argument("r2f_sample: alternation must be r2f");
  const std::size_t n = stages.size();
  if (sched.stage_steps.size() != n - 1)
    throw std::invalid_argument("r2f_sample: need one step count per non-final stage");
  int total = 0;
  for (int v : sched.stage_steps) {
    if (v < 1) throw std::invalid_argument("r2f_sample: stage steps must be >= 1");
    total += v;
  }
  if (total > cfg.steps)
    throw std::invalid_argument("r2f_sample: stage steps exceed the step budget");

  const int T = schedule.steps();
  const int d = stages.rare().dim();
  RunResult result;

  for (int traj = 0; traj < cfg.trajectories; ++traj) {
    Rng rng(split_seed(cfg.seed, traj));
    Vec x = rng.normal_vec(d);
    Trajectory record;
    const std::uint64_t count0 = model.eval_count();
    int stage = 1;
    int used_in_stage = 0;
    for (int i = 0; i < T; ++i) {
      const int t = T - i;
      while (stage <= static_cast<int>(n) - 1 &&
             used_in_stage >= sched.stage_steps[stage - 1]) {
        ++stage;
        used_in_stage = 0;
      }
      const std::string& prompt =
          (i % 2 == 0) ? stages.stages[stage - 1].id : stages.rare().id;
      record.steps.push_back({i, t, x, stage, prompt, std::nullopt, false, PairRole::Single});
      const Vec eps = model.evaluate(x, t, prompt, cfg.guidance_w);
      x = denoise_update(x, eps, schedule, t, t - 1);
      ++used_in_stage;
    }
    record.eval_count = model.eval_count() - count0;
    record.final_x = x;
    result.samples.push_back(x);
    result.trajectories.push_back(std::move(record));
  }
  return result;
}

std::pair<Vec, int> second_order_pair_step(ScoreModel& model, const Vec& x_pair_start,
                                           const Concept& stage, const Concept& rare,
                                           double alpha, const NoiseSchedule& schedule,
                                           int t, const SamplerConfig& cfg) {
  if (t < 2) throw std::out_of_range("pair step: t must be >= 2");
  if (!(alpha > 0.0)) throw std::invalid_argument("pair step: alpha must be > 0");

  const std::uint64_t count0 = model.eval_count();
  const Vec eps_f = model.evaluate(x_pair_start, t - 1, stage.id, cfg.guidance_w);
  const Vec x_pred = denoise_update(x_pair_start, eps_f, schedule, t - 1, t - 2);
  const Vec eps_r = model.evaluate(x_pred, t - 2, rare.id, cfg.guidance_w);

  const double coef_r = 1.0 / (2.0 * alpha);
  const double coef_f = 1.0 - coef_r;
  const Vec blend = (coef_f == 0.0) ? eps_r : Vec(coef_f * eps_f + coef_r * eps_r);
  const Vec x_out = denoise_update(x_pair_start, blend, schedule, t - 1, t - 2);
  return {x_out, static_cast<int>(model.eval_count() - count0)};
}

RunResult rap_sample(ScoreModel& model, const StageList& stages, const SamplerConfig& cfg,
                     const NoiseSchedule& schedule) {
  check_run_inputs(model, cfg, schedule);
  if (cfg.alternation != Alternation::Rap)
    throw std::invalid_argument("rap_sample: alternation must be rap");

  const int T = schedule.steps();
  const int n = static_cast<int>(stages.size());
  const int d = stages.rare().dim();
  const std::string& rare_id = stages.rare().id;
  const std::string base_prompt = (cfg.base_prompt_mode == BasePromptMode::LiteralRare)
                                      ? rare_id
                                      : stages.stages.front().id;
  RunResult result;

  for (int traj = 0; traj < cfg.trajectories; ++traj) {
    Rng rng(split_seed(cfg.seed, traj));
    Vec x = rng.normal_vec(d);
    Trajectory record;
    const std::uint64_t count0 = model.eval_count();
    int k = 1;
    int i = 0;
    int t = T;
    while (t > 0) {
      if (i < cfg.base_steps) {
        // base phase: plain updates, no matching-score evaluation
        record.steps.push_back(
            {i, t, x, k, base_prompt, std::nullopt, false, PairRole::Single});
        const Vec eps = model.evaluate(x, t, base_prompt, cfg.guidance_w);
        x = denoise_update(x, eps, schedule, t, t - 1);
        --t;
        ++i;
        continue;
      }
      if (k == n) {
        // rare stage active: revert to standard single-step denoising
        record.steps.push_back({i, t, x, k, rare_id, std::nullopt, false, PairRole::Single});
        const Vec eps = model.evaluate(x, t, rare_id, cfg.guidance_w);
        x = denoise_update(x, eps, schedule, t, t - 1);
        --t;
        ++i;
        continue;
      }
      if (t == 1) {
        // odd leftover: end the run under the rare target
        record.steps.push_back({i, t, x, k, rare_id, std::nullopt, false, PairRole::Single});
        const Vec eps = model.evaluate(x, t, rare_id, cfg.guidance_w);
        x = denoise_update(x, eps, schedule, 1, 0);
        --t;
        ++i;
        continue;
      }

      // pair boundary: compare consecutive stages at the current state
      const EvalResult ek = model.evaluate_full(x, t, stages.stages[k - 1].id, cfg.guidance_w);
      const EvalResult ek1 = model.evaluate_full(x, t, stages.stages[k].id, cfg.guidance_w);
      const double delta = delta_between(ek, ek1, schedule.sigma(t), cfg);
      const bool switched = should_switch(delta, cfg.delta_star);
      const int stage_at_check = k;
      Vec eps_active = ek.eps;
      if (switched) {
        ++k;
        eps_active = ek1.eps;  // the new stage's output was just computed
        record.switch_steps.push_back(i);
      }

      if (k == n) {
        // advanced into the rare stage: single step, reusing its evaluation
        record.steps.push_back(
            {i, t, x, stage_at_check, rare_id, delta, switched, PairRole::Single});
        x = denoise_update(x, eps_active, schedule, t, t - 1);
        --t;
        ++i;
        continue;
      }

      // first-order step with c_k, then the predictor-corrector pair step
      record.steps.push_back({i, t, x, stage_at_check, stages.stages[k - 1].id, delta,
                              switched, PairRole::PairFirst});
      const Vec x_mid = denoise_update(x, eps_active, schedule, t, t - 1);
      record.steps.push_back(
          {i + 1, t - 1, x_mid, k, rare_id, std::nullopt, false, PairRole::PairSecond});
      auto [x_next, evals] = second_order_pair_step(model, x_mid, stages.stages[k - 1],
                                                    stages.rare(), cfg.alpha, schedule, t, cfg);
      (void)evals;  // already reflected in the model counter
      x = x_next;
      t -= 2;
      i += 2;
    }
    record.eval_count = model.eval_count() - count0;
    record.final_x = x;
    result.samples.push_back(x);
    result.trajectories.push_back(std::move(record));
  }
  return result;
}

}  // namespace rarepath
