#include "mrw/approx_stats.hpp"

#include <cmath>
#include <stdexcept>

#include "mrw/numeric.hpp"

namespace mrw {

GaussianMoments log_mrm_stats(double tau, double h, const ModelParams& params) {
  params.validate();
  if (tau <= 0.0) throw std::invalid_argument("log_mrm_stats: tau must be positive");
  OmegaIncrementCov cov(tau, params.T);
  GaussianMoments out;
  out.mean = -2.0 * params.lambda2 * (std::log(params.T / tau) + 1.5);
  out.cov = 4.0 * params.lambda2 * cov(h);
  return out;
}

double log_absinc_mean(double tau, const ModelParams& params) {
  params.validate();
  if (tau <= 0.0) throw std::invalid_argument("log_absinc_mean: tau must be positive");
  return std::log(params.sigma) + kLogAbsGaussMean -
         params.lambda2 * (std::log(params.T / tau) + 1.5);
}

double log_absinc_cov(double tau, double h, const ModelParams& params) {
  params.validate();
  if (tau <= 0.0) throw std::invalid_argument("log_absinc_cov: tau must be positive");
  OmegaIncrementCov cov(tau, params.T);
  // the ln|gaussian| noise is iid across increments
  return params.lambda2 * cov(h) + (h == 0.0 ? log_abs_gauss_var() : 0.0);
}

double sq_increment_cov(double tau, double h, const ModelParams& params) {
  params.validate();
  if (tau <= 0.0) throw std::invalid_argument("sq_increment_cov: tau must be positive");
  OmegaIncrementCov cov(tau, params.T);
  double s4 = params.sigma * params.sigma * params.sigma * params.sigma;
  double base = std::exp(4.0 * params.lambda2 * cov(h));
  if (h == 0.0) return s4 * tau * tau * (3.0 * base - 1.0);
  return s4 * tau * tau * (base - 1.0);
}

double hf_expected_empirical_cov(double h, double L, double lambda2) {
  if (!(h > 0.0) || !(L > 0.0) || h >= L)
    throw std::invalid_argument("hf_expected_empirical_cov: need 0 < h < L");
  double r = h / L;
  double log_main = std::log(L / h) - 1.5;  // ln(L / (h e^{3/2}))
  double model = log_main - r * log_main + r * r * std::log(r) +
                 0.5 * (1.0 - r) * (1.0 - r) * std::log1p(-r);
  return lambda2 * model - (1.0 - r) * log_abs_gauss_var() / L;
}

LogIncrementModel::LogIncrementModel(double tau_, const ModelParams& params_)
    : tau(tau_), params(params_), omega_cov(tau_, params_.T) {
  params.validate();
  if (tau <= 0.0) throw std::invalid_argument("LogIncrementModel: tau must be positive");
}

}  // namespace mrw
