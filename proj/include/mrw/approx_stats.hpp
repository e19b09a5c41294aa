#pragma once

#include "mrw/kernels.hpp"
#include "mrw/params.hpp"

namespace mrw {

struct GaussianMoments {
  double mean = 0.0;
  double cov = 0.0;
};

// First-order (in lambda2) law of ln(delta_tau M / tau): mean
// -2 lambda2 ln(T e^{3/2}/tau), covariance 4 lambda2 Cov_Omega(h).
GaussianMoments log_mrm_stats(double tau, double h, const ModelParams& params);

// E[ln |delta_tau X|] to first order: ln sigma - (gamma + ln 2)/2
// - lambda2 ln(T e^{3/2}/tau). Exact at tau = 1; downstream consumers add the
// Brownian scale term (ln tau)/2 where a tau-dependent level is needed.
double log_absinc_mean(double tau, const ModelParams& params);

// Cov[ln|delta_tau X(t)|, ln|delta_tau X(t+h)|] to first order: the ln|eps|
// noise contributes pi^2/8 at h = 0 only; lambda2 Cov_Omega(h) elsewhere.
double log_absinc_cov(double tau, double h, const ModelParams& params);

// Cov[delta X(t)^2, delta X(t+h)^2] under the first-order log-normal factor:
//   h  > 0: sigma^4 tau^2 (e^{4 lambda2 C(h)} - 1)
//   h == 0: sigma^4 tau^2 (3 e^{4 lambda2 C(0)} - 1)
double sq_increment_cov(double tau, double h, const ModelParams& params);

// Small-scale limit of the expected empirical log-magnitude covariance at
// horizon h for a sample of length L (covers the finite-size distortion of
// the empirical estimator, including its pi^2/(8L) noise term).
double hf_expected_empirical_cov(double h, double L, double lambda2);

// Evaluator bundle for one (tau, params) pair.
struct LogIncrementModel {
  double tau;
  ModelParams params;
  OmegaIncrementCov omega_cov;

  LogIncrementModel(double tau_, const ModelParams& params_);

  double mean() const { return log_absinc_mean(tau, params); }
  double cov(double h) const { return log_absinc_cov(tau, h, params); }
};

}  // namespace mrw
