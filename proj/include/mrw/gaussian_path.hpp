#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

namespace mrw {

// Samples stationary gaussian vectors with a prescribed lag covariance.
//
// Default method: circulant embedding. The lag sequence here has compact
// support (support_lags values, zero beyond), so the wrapped embedding of
// length >= n + support reproduces the target covariance exactly and its
// eigenvalues are samples of the nonnegative spectral density. Negative
// eigenvalues can only be rounding noise: magnitudes below 1e-10 * max are
// clipped; anything larger triggers grid doubling (at most 3 times), then an
// error.
class CirculantSampler {
 public:
  // cov(k) is the covariance at lag k (in grid steps); it must vanish for
  // k >= support_lags. n is the path length.
  CirculantSampler(const std::function<double(std::size_t)>& cov, std::size_t n,
                   std::size_t support_lags);
  ~CirculantSampler();

  CirculantSampler(const CirculantSampler&) = delete;
  CirculantSampler& operator=(const CirculantSampler&) = delete;

  // Two independent zero-mean paths per draw (real and imaginary output of
  // one transform). Deterministic in seed.
  void sample_pair(std::uint64_t seed, std::vector<double>& out1, std::vector<double>& out2) const;
  std::vector<double> sample(std::uint64_t seed) const;

  std::size_t grid_size() const { return m_; }
  double clipped_mass() const { return clipped_; }  // |most negative eigenvalue| / max

 private:
  std::size_t n_;
  std::size_t m_ = 0;
  double clipped_ = 0.0;
  std::vector<double> sqrt_eig_;  // sqrt(eigenvalue / m)
};

// Dense fallback for short paths or as an independent cross-check: Toeplitz
// covariance matrix, Cholesky factor (with a relative jitter retry), times a
// standard normal vector.
std::vector<double> cholesky_gaussian_path(const std::function<double(std::size_t)>& cov,
                                           std::size_t n, std::uint64_t seed);

enum class SamplerKind { circulant, cholesky };

// One zero-mean stationary path with covariance cov(k) plus a constant mean.
std::vector<double> sample_stationary_gaussian(const std::function<double(std::size_t)>& cov,
                                               std::size_t support_lags, double mean,
                                               std::size_t n, std::uint64_t seed,
                                               SamplerKind kind = SamplerKind::circulant);

}  // namespace mrw
