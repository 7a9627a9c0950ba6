#include "rarepath/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rarepath {

namespace {
constexpr double kClipLow = 1e-4;
}

NoiseSchedule::NoiseSchedule(std::vector<double> a, std::vector<double> sigma)
    : a_(std::move(a)), sigma_(std::move(sigma)) {
  if (a_.size() != sigma_.size() || a_.size() < 3)
    throw std::invalid_argument("schedule: need matching arrays of length T+1, T >= 2");
  const std::size_t T = a_.size() - 1;
  for (std::size_t t = 0; t < T; ++t) {
    if (a_[t + 1] > a_[t] || sigma_[t + 1] < sigma_[t])
      throw std::invalid_argument("schedule: a must be nonincreasing, sigma nondecreasing");
  }
  if (a_[0] < 1.0 - 1e-6 || sigma_[0] > 1e-3 || a_[T] > 1e-3 || sigma_[T] < 1.0 - 1e-6)
    throw std::invalid_argument("schedule: endpoint constraints violated");
  for (std::size_t t = 0; t <= T; ++t) {
    if (std::abs(a_[t] * a_[t] + sigma_[t] * sigma_[t] - 1.0) > 1e-9)
      throw std::invalid_argument("schedule: not variance preserving");
  }
}

NoiseSchedule NoiseSchedule::cosine_vp(int steps) {
  if (steps < 2) throw std::invalid_argument("schedule: steps must be >= 2");
  std::vector<double> a(steps + 1), sigma(steps + 1);
  for (int t = 0; t <= steps; ++t) {
    const double raw = std::cos((static_cast<double>(t) / steps) * std::numbers::pi / 2.0);
    a[t] = std::clamp(raw, kClipLow, 1.0);
    sigma[t] = std::sqrt(1.0 - a[t] * a[t]);
  }
  return NoiseSchedule(std::move(a), std::move(sigma));
}

NoiseSchedule make_vp_schedule(int steps) { return NoiseSchedule::cosine_vp(steps); }

double NoiseSchedule::a(int t) const {
  if (t < 0 || t >= static_cast<int>(a_.size()))
    throw std::out_of_range("schedule: index out of range");
  return a_[t];
}

double NoiseSchedule::sigma(int t) const {
  if (t < 0 || t >= static_cast<int>(sigma_.size()))
    throw std::out_of_range("schedule: index out of range");
  return sigma_[t];
}

Vec score_to_eps(const Vec& score, double sigma_t) {
  if (sigma_t < 0.0) throw std::invalid_argument("score_to_eps: sigma must be >= 0");
  return -sigma_t * score;
}

Vec eps_to_score(const Vec& eps, double sigma_t) {
  if (sigma_t <= 0.0) throw std::domain_error("eps_to_score: sigma must be > 0");
  return -eps / sigma_t;
}

Vec denoise_update(const Vec& x, const Vec& eps, const NoiseSchedule& schedule,
                   int t_from, int t_to) {
  const int T = schedule.steps();
  if (t_from < 0 || t_from > T || t_to < 0 || t_to > T)
    throw std::invalid_argument("denoise_update: index out of range");
  if (t_to > t_from) throw std::invalid_argument("denoise_update: t_to must not exceed t_from");
  if (x.size() != eps.size()) throw std::invalid_argument("denoise_update: dimension mismatch");
  const double a_from = schedule.a(t_from);
  if (a_from == 0.0) throw std::domain_error("denoise_update: a_{t_from} is zero");
  const Vec x0_hat = (x - schedule.sigma(t_from) * eps) / a_from;
  return schedule.a(t_to) * x0_hat + schedule.sigma(t_to) * eps;
}

TimeGrid::TimeGrid(int steps) {
  if (steps < 1) throw std::invalid_argument("time grid: steps must be >= 1");
  indices.reserve(steps);
  for (int t = steps; t >= 1; --t) indices.push_back(t);
}

}  // namespace rarepath
