#include "rarepath/score_model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rarepath {

void CorruptionSpec::validate() const {
  if (amplitude < 0.0) throw std::invalid_argument("corruption: amplitude must be >= 0");
  if (!(density_floor > 0.0)) throw std::invalid_argument("corruption: density_floor must be > 0");
  if (!(bandwidth > 0.0)) throw std::invalid_argument("corruption: bandwidth must be > 0");
}

FourierField::FourierField(int dim, double bandwidth, std::uint64_t seed, int features)
    : dim_(dim) {
  if (dim < 1) throw std::invalid_argument("fourier field: dim must be >= 1");
  if (features < 1) throw std::invalid_argument("fourier field: features must be >= 1");
  Rng rng(seed);
  freqs_.reserve(dim);
  phases_.reserve(dim);
  for (int j = 0; j < dim; ++j) {
    Mat w(features, dim);
    Vec p(features);
    for (int f = 0; f < features; ++f) {
      for (int k = 0; k < dim; ++k) w(f, k) = bandwidth * rng.normal();
      p[f] = 2.0 * std::numbers::pi * rng.uniform();
    }
    freqs_.push_back(std::move(w));
    phases_.push_back(std::move(p));
  }
}

Vec FourierField::operator()(const Vec& x) const {
  if (x.size() != dim_) throw std::invalid_argument("fourier field: dimension mismatch");
  Vec g(dim_);
  const double norm = 1.0 / std::sqrt(static_cast<double>(dim_));
  for (int j = 0; j < dim_; ++j) {
    const Vec args = freqs_[j] * x + phases_[j];
    g[j] = norm * args.array().cos().mean();
  }
  return g;
}

namespace {
CorruptionSpec validated(CorruptionSpec spec) {
  spec.validate();
  return spec;
}
}  // namespace

CorruptionField::CorruptionField(CorruptionSpec spec, int dim)
    : spec_(validated(std::move(spec))),
      field_(dim, spec_.bandwidth, spec_.field_seed) {}

Vec CorruptionField::at(const Vec& x, double local_density) const {
  if (local_density < 0.0)
    throw std::invalid_argument("corruption: local density must be >= 0");
  if (spec_.amplitude == 0.0) return Vec::Zero(x.size());
  const double atten = 1.0 / (1.0 + local_density / spec_.density_floor);
  return field_(x) * (spec_.amplitude * atten);
}

ScoreModel::ScoreModel(ModelKind kind, ConceptLibrary library, NoiseSchedule schedule,
                       std::optional<CorruptionSpec> corruption)
    : kind_(kind), library_(std::move(library)), schedule_(std::move(schedule)) {
  if (library_.size() == 0) throw std::invalid_argument("score model: empty library");
  if (kind_ == ModelKind::Corrupted) {
    if (!corruption) throw std::invalid_argument("score model: corrupted kind needs a spec");
    corruption->validate();
    for (const auto& id : corruption->targets) {
      if (!library_.contains(id))
        throw std::invalid_argument("score model: corruption target " + id + " not in library");
    }
    corruption_.emplace(*corruption, library_.concepts().front().dim());
  }

  const int T = schedule_.steps();
  for (const auto& c : library_.concepts()) {
    ids_.push_back(c.id);
    std::vector<GaussianMixture> per_t;
    per_t.reserve(T + 1);
    for (int t = 0; t <= T; ++t)
      per_t.push_back(c.distribution.noisy_marginal(schedule_.a(t), schedule_.sigma(t)));
    marginals_.push_back(std::move(per_t));
  }
  const GaussianMixture uncond = library_.unconditional();
  uncond_marginals_.reserve(T + 1);
  for (int t = 0; t <= T; ++t)
    uncond_marginals_.push_back(uncond.noisy_marginal(schedule_.a(t), schedule_.sigma(t)));
}

const GaussianMixture& ScoreModel::marginal(const std::string& concept_id, int t) const {
  for (std::size_t i = 0; i < ids_.size(); ++i)
    if (ids_[i] == concept_id) return marginals_[i][t];
  throw std::out_of_range("score model: unknown concept " + concept_id);
}

Vec ScoreModel::conditional_score(const Vec& x, int t, const std::string& concept_id) const {
  const GaussianMixture& m = marginal(concept_id, t);
  Vec s = m.score(x);
  if (corruption_ && corruption_->spec().targets.count(concept_id) > 0) {
    const double density = std::exp(m.log_density(x));
    s += corruption_->at(x, density);
  }
  return s;
}

double ScoreModel::conditional_log_density(const Vec& x, int t,
                                           const std::string& concept_id) const {
  return marginal(concept_id, t).log_density(x);
}

EvalResult ScoreModel::evaluate_full(const Vec& x, int t, const std::string& concept_id,
                                     double w) {
  if (w < 0.0) throw std::invalid_argument("evaluate: guidance scale must be >= 0");
  if (t < 1 || t > schedule_.steps())
    throw std::invalid_argument("evaluate: t must lie in [1, T]");
  const double sigma_t = schedule_.sigma(t);

  const Vec eps_cond = score_to_eps(conditional_score(x, t, concept_id), sigma_t);
  eval_count_ += 1;
  if (w == 1.0) return {eps_cond, eps_cond};

  const Vec eps_uncond = score_to_eps(uncond_marginals_[t].score(x), sigma_t);
  eval_count_ += 1;
  return {eps_uncond + w * (eps_cond - eps_uncond), eps_cond};
}

Vec ScoreModel::evaluate(const Vec& x, int t, const std::string& concept_id, double w) {
  return evaluate_full(x, t, concept_id, w).eps;
}

}  // namespace rarepath
