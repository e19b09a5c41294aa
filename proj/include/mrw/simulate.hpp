#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mrw/gaussian_path.hpp"
#include "mrw/params.hpp"

namespace mrw {

// Discretization of the cascade: fine grid step l = tau / l_ratio, coarse
// sampling step tau, n coarse samples, horizon L = n * tau.
struct SimulationSpec {
  ModelParams params;
  double tau = 1.0;
  std::size_t n = 8192;
  int l_ratio = 128;
  SamplerKind sampler = SamplerKind::circulant;

  void validate() const;
  double l() const { return tau / l_ratio; }
  std::size_t fine_count() const { return n * static_cast<std::size_t>(l_ratio); }
};

struct SampledPath {
  double dt = 1.0;             // grid step of values
  std::string kind;            // "omega" | "mrm" | "mrw"
  std::vector<double> values;  // omega: fine-grid field; mrm/mrw: coarse increments
};

// Fine-grid magnitude field omega_{l,T} (stationary gaussian).
SampledPath simulate_omega(const SimulationSpec& spec, std::uint64_t seed);

// Coarse increments of the measure: delta M(k tau) = sum_fine l e^{2 omega}.
SampledPath simulate_mrm(const SimulationSpec& spec, std::uint64_t seed);

// Coarse increments of the walk: delta X(k tau) = sum_fine eps sqrt(l) e^{omega},
// eps gaussian white noise with variance sigma^2, independent of the magnitude.
SampledPath simulate_mrw(const SimulationSpec& spec, std::uint64_t seed);

// Ensemble of independent realizations. The sampler grid is built once; the
// per-path streams are derived from (seed, path index), so results do not
// depend on the thread count. consume(i, increments) may be called from
// worker threads.
void simulate_ensemble(const SimulationSpec& spec, Process process, std::uint64_t seed,
                       std::size_t n_paths,
                       const std::function<void(std::size_t, std::vector<double>&&)>& consume,
                       unsigned threads = 0);

}  // namespace mrw
