#include "mrw/gaussian_path.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <mutex>
#include <stdexcept>

#include "mrw/rng.hpp"

namespace mrw {

namespace {

// FFTW's planner is not thread-safe; execution of independent plans is.
std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

// Smallest 5-smooth integer >= n: keeps FFT grids lean without power-of-two
// doubling (memory matters more than a few percent of FFT speed here).
std::size_t next_fast_size(std::size_t n) {
  for (std::size_t m = n;; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2ull, 3ull, 5ull}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

struct FftwPlanDeleter {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};

}  // namespace

CirculantSampler::CirculantSampler(const std::function<double(std::size_t)>& cov, std::size_t n,
                                   std::size_t support_lags)
    : n_(n) {
  if (n == 0) throw std::invalid_argument("CirculantSampler: empty path");
  std::size_t target = 2 * (n + support_lags);
  for (int attempt = 0;; ++attempt) {
    const std::size_t m = next_fast_size(std::max<std::size_t>(target, 2));
    // first circulant row: wrapped covariance
    std::vector<double> eig(m, 0.0);
    {
      std::unique_ptr<fftw_complex, FftwPlanDeleter> buf(
          static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * m)));
      if (!buf) throw std::bad_alloc();
      for (std::size_t k = 0; k < m; ++k) {
        buf.get()[k][0] = 0.0;
        buf.get()[k][1] = 0.0;
      }
      const std::size_t half = m / 2;
      for (std::size_t k = 0; k <= half && k < support_lags; ++k) {
        const double v = cov(k);
        buf.get()[k][0] = v;
        if (k > 0 && k < m - k) buf.get()[m - k][0] = v;
      }
      fftw_plan plan;
      {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(m), buf.get(), buf.get(), FFTW_FORWARD,
                                FFTW_ESTIMATE);
      }
      fftw_execute(plan);
      {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_destroy_plan(plan);
      }
      for (std::size_t k = 0; k < m; ++k) eig[k] = buf.get()[k][0];
    }
    double max_eig = 0.0, min_eig = 0.0;
    for (double v : eig) {
      max_eig = std::max(max_eig, v);
      min_eig = std::min(min_eig, v);
    }
    if (max_eig <= 0.0) throw std::runtime_error("CirculantSampler: degenerate spectrum");
    if (-min_eig <= 1e-10 * max_eig) {
      m_ = m;
      clipped_ = -min_eig / max_eig;
      sqrt_eig_.resize(m);
      for (std::size_t k = 0; k < m; ++k)
        sqrt_eig_[k] = std::sqrt(std::max(0.0, eig[k]) / static_cast<double>(m));
      return;
    }
    if (attempt >= 3)
      throw std::runtime_error("CirculantSampler: embedding not nonnegative after 3 doublings");
    target *= 2;
  }
}

CirculantSampler::~CirculantSampler() = default;

void CirculantSampler::sample_pair(std::uint64_t seed, std::vector<double>& out1,
                                   std::vector<double>& out2) const {
  const std::size_t m = m_;
  std::unique_ptr<fftw_complex, FftwPlanDeleter> buf(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * m)));
  if (!buf) throw std::bad_alloc();
  Rng rng(seed);
  for (std::size_t k = 0; k < m; ++k) {
    const double s = sqrt_eig_[k];
    buf.get()[k][0] = s * rng.gaussian();
    buf.get()[k][1] = s * rng.gaussian();
  }
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(m), buf.get(), buf.get(), FFTW_BACKWARD,
                            FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_destroy_plan(plan);
  }
  // unnormalized inverse DFT of sqrt(eig/m) * z has covariance C for both the
  // real and the imaginary part, independently
  out1.resize(n_);
  out2.resize(n_);
  for (std::size_t k = 0; k < n_; ++k) {
    out1[k] = buf.get()[k][0];
    out2[k] = buf.get()[k][1];
  }
}

std::vector<double> CirculantSampler::sample(std::uint64_t seed) const {
  std::vector<double> a, b;
  sample_pair(seed, a, b);
  return a;
}

std::vector<double> cholesky_gaussian_path(const std::function<double(std::size_t)>& cov,
                                           std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("cholesky_gaussian_path: empty path");
  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd sig(ni, ni);
  for (Eigen::Index i = 0; i < ni; ++i) {
    for (Eigen::Index j = i; j < ni; ++j) {
      const double v = cov(static_cast<std::size_t>(j - i));
      sig(i, j) = v;
      sig(j, i) = v;
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(sig);
  if (llt.info() != Eigen::Success) {
    const double jitter = 1e-12 * sig.diagonal().maxCoeff();
    llt.compute(sig + jitter * Eigen::MatrixXd::Identity(ni, ni));
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("cholesky_gaussian_path: covariance not positive definite");
  }
  Rng rng(seed);
  Eigen::VectorXd z(ni);
  for (Eigen::Index i = 0; i < ni; ++i) z(i) = rng.gaussian();
  Eigen::VectorXd x = llt.matrixL() * z;
  return {x.data(), x.data() + n};
}

std::vector<double> sample_stationary_gaussian(const std::function<double(std::size_t)>& cov,
                                               std::size_t support_lags, double mean,
                                               std::size_t n, std::uint64_t seed,
                                               SamplerKind kind) {
  std::vector<double> path;
  if (kind == SamplerKind::circulant) {
    CirculantSampler sampler(cov, n, support_lags);
    path = sampler.sample(seed);
  } else {
    path = cholesky_gaussian_path(cov, n, seed);
  }
  for (double& v : path) v += mean;
  return path;
}

}  // namespace mrw
