#include "rarepath/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace rarepath {

namespace {

constexpr double kMinEigenvalue = 1e-10;
constexpr double kWeightSumTol = 1e-9;

double log_two_pi() { return std::log(2.0 * std::numbers::pi); }

}  // namespace

GaussianComponent::GaussianComponent(double weight, Vec mean, Mat cov)
    : weight_(weight), mean_(std::move(mean)), cov_(std::move(cov)) {
  const int d = static_cast<int>(mean_.size());
  if (d < 1) throw std::invalid_argument("component: empty mean");
  if (!(weight_ > 0.0) || weight_ > 1.0)
    throw std::invalid_argument("component: weight must lie in (0, 1]");
  if (cov_.rows() != d || cov_.cols() != d)
    throw std::invalid_argument("component: covariance shape does not match mean");
  if (!cov_.isApprox(cov_.transpose(), 1e-12))
    throw std::invalid_argument("component: covariance not symmetric");

  Eigen::SelfAdjointEigenSolver<Mat> es(cov_);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() < kMinEigenvalue)
    throw std::invalid_argument("component: covariance not SPD (min eigenvalue < 1e-10)");

  Eigen::LLT<Mat> llt(cov_);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("component: Cholesky factorization failed");
  chol_ = llt.matrixL();
  cov_inv_ = llt.solve(Mat::Identity(d, d));

  double log_det = 0.0;
  for (int i = 0; i < d; ++i) log_det += 2.0 * std::log(chol_(i, i));
  log_norm_ = -0.5 * (d * log_two_pi() + log_det);
}

GaussianComponent GaussianComponent::diagonal(double weight, Vec mean, Vec variances) {
  if (variances.size() != mean.size())
    throw std::invalid_argument("component: diagonal size does not match mean");
  Mat cov = variances.asDiagonal();
  return GaussianComponent(weight, std::move(mean), std::move(cov));
}

double GaussianComponent::mahalanobis2(const Vec& x) const {
  const Vec d = x - mean_;
  return d.dot(cov_inv_ * d);
}

double GaussianComponent::log_pdf(const Vec& x) const {
  return log_norm_ - 0.5 * mahalanobis2(x);
}

Vec GaussianComponent::score(const Vec& x) const { return cov_inv_ * (mean_ - x); }

GaussianMixture::GaussianMixture(std::vector<GaussianComponent> components)
    : comps_(std::move(components)) {
  if (comps_.empty()) throw std::invalid_argument("mixture: no components");
  dim_ = comps_.front().dim();
  double sum = 0.0;
  for (const auto& c : comps_) {
    if (c.dim() != dim_) throw std::invalid_argument("mixture: mixed dimensions");
    sum += c.weight();
  }
  if (std::abs(sum - 1.0) > kWeightSumTol)
    throw std::invalid_argument("mixture: weights must sum to 1");
}

double GaussianMixture::log_density(const Vec& x) const {
  if (x.size() != dim_) throw std::invalid_argument("log_density: dimension mismatch");
  // log-sum-exp over log w_i + log N_i(x); stable for near-underflow components
  double max_term = -std::numeric_limits<double>::infinity();
  std::vector<double> terms(comps_.size());
  for (std::size_t i = 0; i < comps_.size(); ++i) {
    terms[i] = std::log(comps_[i].weight()) + comps_[i].log_pdf(x);
    max_term = std::max(max_term, terms[i]);
  }
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - max_term);
  return max_term + std::log(acc);
}

Vec GaussianMixture::score(const Vec& x) const {
  if (x.size() != dim_) throw std::invalid_argument("score: dimension mismatch");
  // responsibilities in log space, then sum gamma_i * cov_i^{-1} (mu_i - x)
  std::vector<double> terms(comps_.size());
  double max_term = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < comps_.size(); ++i) {
    terms[i] = std::log(comps_[i].weight()) + comps_[i].log_pdf(x);
    max_term = std::max(max_term, terms[i]);
  }
  double denom = 0.0;
  for (double t : terms) denom += std::exp(t - max_term);
  Vec s = Vec::Zero(dim_);
  for (std::size_t i = 0; i < comps_.size(); ++i) {
    const double gamma = std::exp(terms[i] - max_term) / denom;
    if (gamma > 0.0) s += gamma * comps_[i].score(x);
  }
  return s;
}

std::vector<Vec> GaussianMixture::sample(int count, Rng& rng) const {
  if (count < 1) throw std::invalid_argument("sample: count must be >= 1");
  std::vector<double> weights(comps_.size());
  for (std::size_t i = 0; i < comps_.size(); ++i) weights[i] = comps_[i].weight();
  std::vector<Vec> out;
  out.reserve(count);
  for (int n = 0; n < count; ++n) {
    const std::size_t i = rng.categorical(weights);
    out.push_back(comps_[i].mean() + comps_[i].chol() * rng.normal_vec(dim_));
  }
  return out;
}

GaussianMixture GaussianMixture::noisy_marginal(double a_t, double sigma_t) const {
  if (a_t < 0.0 || sigma_t < 0.0)
    throw std::invalid_argument("noisy_marginal: coefficients must be nonnegative");
  if (a_t == 0.0 && sigma_t == 0.0)
    throw std::invalid_argument("noisy_marginal: both coefficients zero");
  std::vector<GaussianComponent> comps;
  comps.reserve(comps_.size());
  const Mat noise = sigma_t * sigma_t * Mat::Identity(dim_, dim_);
  for (const auto& c : comps_) {
    comps.emplace_back(c.weight(), a_t * c.mean(), a_t * a_t * c.cov() + noise);
  }
  return GaussianMixture(std::move(comps));
}

Concept::Concept(std::string id_, GaussianMixture dist, double prior_)
    : id(std::move(id_)), distribution(std::move(dist)), prior(prior_) {
  if (id.empty()) throw std::invalid_argument("concept: empty id");
  if (!(prior > 0.0) || prior > 1.0)
    throw std::invalid_argument("concept: prior must lie in (0, 1]");
}

void ConceptLibrary::add(Concept c) {
  if (contains(c.id)) throw std::invalid_argument("library: duplicate id " + c.id);
  if (!concepts_.empty() && c.dim() != concepts_.front().dim())
    throw std::invalid_argument("library: mixed dimensions");
  concepts_.push_back(std::move(c));
}

const Concept& ConceptLibrary::at(const std::string& id) const {
  for (const auto& c : concepts_)
    if (c.id == id) return c;
  throw std::out_of_range("library: unknown concept " + id);
}

bool ConceptLibrary::contains(const std::string& id) const {
  for (const auto& c : concepts_)
    if (c.id == id) return true;
  return false;
}

GaussianMixture ConceptLibrary::unconditional() const {
  if (concepts_.empty()) throw std::invalid_argument("library: empty");
  double prior_sum = 0.0;
  for (const auto& c : concepts_) prior_sum += c.prior;
  std::vector<GaussianComponent> comps;
  for (const auto& c : concepts_) {
    for (const auto& comp : c.distribution.components()) {
      comps.emplace_back(c.prior / prior_sum * comp.weight(), comp.mean(), comp.cov());
    }
  }
  return GaussianMixture(std::move(comps));
}

GaussianMixture unconditional_mixture(const ConceptLibrary& lib) {
  return lib.unconditional();
}

}  // namespace rarepath
