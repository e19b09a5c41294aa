#include "mrw/simulate.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "mrw/kernels.hpp"
#include "mrw/rng.hpp"
#include "mrw/threading.hpp"

namespace mrw {

void SimulationSpec::validate() const {
  params.validate();
  if (!(tau > 0.0)) throw std::invalid_argument("SimulationSpec: tau > 0");
  if (n == 0) throw std::invalid_argument("SimulationSpec: n > 0");
  if (l_ratio < 1) throw std::invalid_argument("SimulationSpec: l_ratio >= 1");
  if (!(l() < params.T)) throw std::invalid_argument("SimulationSpec: need l < T");
}

namespace {

struct FineGrid {
  double l;
  std::size_t count;
  std::size_t support;  // lags with nonzero covariance: ceil(T / l)
  MagnitudeKernel kernel;

  explicit FineGrid(const SimulationSpec& spec)
      : l(spec.l()),
        count(spec.fine_count()),
        support(static_cast<std::size_t>(std::ceil(spec.params.T / spec.l())) + 1),
        kernel(spec.params.lambda2, spec.params.T, spec.l()) {}

  std::function<double(std::size_t)> cov() const {
    const MagnitudeKernel k = kernel;
    const double step = l;
    return [k, step](std::size_t lag) { return k.rho(static_cast<double>(lag) * step); };
  }
};

std::vector<double> fine_omega(const SimulationSpec& spec, std::uint64_t seed) {
  const FineGrid grid(spec);
  return sample_stationary_gaussian(grid.cov(), grid.support, grid.kernel.mean(), grid.count,
                                    derive_seed(seed, StreamRole::magnitude), spec.sampler);
}

// Coarse-grains the fine field into measure increments.
std::vector<double> mrm_increments(const SimulationSpec& spec, const std::vector<double>& omega) {
  const double l = spec.l();
  const auto r = static_cast<std::size_t>(spec.l_ratio);
  std::vector<double> out(spec.n);
  std::size_t idx = 0;
  for (std::size_t j = 0; j < spec.n; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < r; ++i, ++idx) acc += std::exp(2.0 * omega[idx]);
    out[j] = acc * l;
  }
  return out;
}

std::vector<double> mrw_increments(const SimulationSpec& spec, const std::vector<double>& omega,
                                   std::uint64_t noise_seed) {
  const double sql = std::sqrt(spec.l());
  const double sigma = spec.params.sigma;
  const auto r = static_cast<std::size_t>(spec.l_ratio);
  Rng rng(noise_seed);
  std::vector<double> out(spec.n);
  std::size_t idx = 0;
  for (std::size_t j = 0; j < spec.n; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < r; ++i, ++idx) {
      acc += sigma * rng.gaussian() * sql * std::exp(omega[idx]);
    }
    out[j] = acc;
  }
  return out;
}

}  // namespace

SampledPath simulate_omega(const SimulationSpec& spec, std::uint64_t seed) {
  spec.validate();
  return {spec.l(), "omega", fine_omega(spec, seed)};
}

SampledPath simulate_mrm(const SimulationSpec& spec, std::uint64_t seed) {
  spec.validate();
  const auto omega = fine_omega(spec, seed);
  return {spec.tau, "mrm", mrm_increments(spec, omega)};
}

SampledPath simulate_mrw(const SimulationSpec& spec, std::uint64_t seed) {
  spec.validate();
  const auto omega = fine_omega(spec, seed);
  return {spec.tau, "mrw", mrw_increments(spec, omega, derive_seed(seed, StreamRole::noise))};
}

void simulate_ensemble(const SimulationSpec& spec, Process process, std::uint64_t seed,
                       std::size_t n_paths,
                       const std::function<void(std::size_t, std::vector<double>&&)>& consume,
                       unsigned threads) {
  spec.validate();
  if (n_paths == 0) return;
  const FineGrid grid(spec);
  const auto cov = grid.cov();
  const double mean = grid.kernel.mean();
  if (spec.sampler == SamplerKind::cholesky) {
    parallel_for(n_paths, [&](std::size_t i) {
      const std::uint64_t path_seed = derive_seed(seed, StreamRole::ensemble, i);
      auto omega = cholesky_gaussian_path(cov, grid.count, derive_seed(path_seed, StreamRole::magnitude));
      for (double& v : omega) v += mean;
      std::vector<double> inc = (process == Process::mrm)
                                    ? mrm_increments(spec, omega)
                                    : mrw_increments(spec, omega,
                                                     derive_seed(path_seed, StreamRole::noise));
      consume(i, std::move(inc));
    }, threads);
    return;
  }
  // One embedding for the whole ensemble; each transform yields two
  // independent magnitude fields, consumed by paths 2p and 2p+1.
  CirculantSampler sampler(cov, grid.count, grid.support);
  const std::size_t n_pairs = (n_paths + 1) / 2;
  parallel_for(n_pairs, [&](std::size_t p) {
    std::vector<double> om1, om2;
    sampler.sample_pair(derive_seed(seed, StreamRole::magnitude, p), om1, om2);
    for (std::size_t half = 0; half < 2; ++half) {
      const std::size_t i = 2 * p + half;
      if (i >= n_paths) break;
      std::vector<double>& om = (half == 0) ? om1 : om2;
      for (double& v : om) v += mean;
      std::vector<double> inc =
          (process == Process::mrm)
              ? mrm_increments(spec, om)
              : mrw_increments(spec, om, derive_seed(seed, StreamRole::noise, i));
      consume(i, std::move(inc));
    }
  }, threads);
}

}  // namespace mrw
