#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rarepath/rng.hpp"

namespace rarepath {

/// One weighted Gaussian N(mean, cov). The covariance is factorized at
/// construction; matrices whose smallest eigenvalue is below 1e-10 are
/// rejected to keep scores finite.
class GaussianComponent {
 public:
  GaussianComponent(double weight, Vec mean, Mat cov);
  static GaussianComponent diagonal(double weight, Vec mean, Vec variances);

  double weight() const { return weight_; }
  const Vec& mean() const { return mean_; }
  const Mat& cov() const { return cov_; }
  const Mat& chol() const { return chol_; }
  int dim() const { return static_cast<int>(mean_.size()); }

  double log_pdf(const Vec& x) const;
  double mahalanobis2(const Vec& x) const;
  // gradient of log_pdf: cov^{-1} (mean - x)
  Vec score(const Vec& x) const;

 private:
  double weight_;
  Vec mean_;
  Mat cov_;
  Mat chol_;     // lower triangular, cov = L L^T
  Mat cov_inv_;
  double log_norm_;  // -(d/2) log 2pi - (1/2) log det cov
};

/// Finite Gaussian mixture with closed-form log density and score.
class GaussianMixture {
 public:
  explicit GaussianMixture(std::vector<GaussianComponent> components);

  int dim() const { return dim_; }
  const std::vector<GaussianComponent>& components() const { return comps_; }

  double log_density(const Vec& x) const;
  Vec score(const Vec& x) const;
  std::vector<Vec> sample(int count, Rng& rng) const;

  // Marginal of a_t * x0 + sigma_t * eps under this mixture:
  // each N(mu, S) maps to N(a_t mu, a_t^2 S + sigma_t^2 I).
  GaussianMixture noisy_marginal(double a_t, double sigma_t) const;

 private:
  std::vector<GaussianComponent> comps_;
  int dim_;
};

struct Concept {
  std::string id;
  GaussianMixture distribution;
  double prior;  // in (0, 1]; used only to order stage lists

  Concept(std::string id_, GaussianMixture dist, double prior_);
  int dim() const { return distribution.dim(); }
};

/// Keyed, insertion-ordered collection of concepts. The prior-weighted union
/// of all concept components serves as the null condition for guidance.
class ConceptLibrary {
 public:
  void add(Concept c);
  const Concept& at(const std::string& id) const;
  bool contains(const std::string& id) const;
  std::size_t size() const { return concepts_.size(); }
  const std::vector<Concept>& concepts() const { return concepts_; }

  GaussianMixture unconditional() const;

 private:
  std::vector<Concept> concepts_;
};

GaussianMixture unconditional_mixture(const ConceptLibrary& lib);

}  // namespace rarepath
