#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

namespace rarepath {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Deterministic random source. mt19937_64 output is fully specified by the
// standard and all transforms below are explicit, so streams are reproducible
// byte-for-byte across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t raw() { return eng_(); }

  // uniform on [0, 1)
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // uniform on (0, 1], safe under log()
  double uniform_pos() {
    return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;
  }

  // standard normal via Box-Muller; the spare value is cached
  double normal();

  Vec normal_vec(int dim);

  // index distributed according to `weights` (need not be normalized)
  std::size_t categorical(const std::vector<double>& weights);

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Derives independent per-worker seeds from (run seed, index); splitmix64.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace rarepath
