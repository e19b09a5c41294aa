#include "mrw/scaling.hpp"

#include <cmath>
#include <stdexcept>

#include "mrw/numeric.hpp"

namespace mrw {

double psi(double q, double lambda2) { return 2.0 * lambda2 * q * q - 2.0 * lambda2 * q; }

double zeta_m(double q, double lambda2) { return q - psi(q, lambda2); }

double zeta_x(double q, double lambda2) { return zeta_m(0.5 * q, lambda2); }

namespace {

bool near_nonpositive_integer(double x) {
  if (x > 1e-12) return false;
  return std::abs(x - std::round(x)) < 1e-12;
}

}  // namespace

double moment_prefactor(int n, const ModelParams& params) {
  params.validate();
  if (n < 1) throw std::invalid_argument("moment_prefactor: n >= 1");
  const double l2 = params.lambda2;
  double log_val = 2.0 * n * std::log(params.sigma) + 2.0 * n * (n - 1) * l2 * std::log(params.T);
  for (int k = 0; k < n; ++k) {
    const double a1 = 1.0 - 2.0 * (k + 1) * l2;
    const double a2 = 1.0 - 2.0 * k * l2;
    const double a3 = 2.0 - 2.0 * (n + k - 1) * l2;
    const double a4 = 1.0 - 2.0 * l2;
    for (double a : {a1, a2, a3, a4}) {
      if (near_nonpositive_integer(a))
        throw std::domain_error("moment_prefactor: Gamma pole, moment of order n diverges");
    }
    log_val += std::lgamma(a1) + 2.0 * std::lgamma(a2) - std::lgamma(a3) - std::lgamma(a4);
  }
  return std::exp(log_val);
}

double walk_moment_prefactor(int n, const ModelParams& params) {
  return double_factorial_odd(2 * n - 1) * moment_prefactor(n, params);
}

}  // namespace mrw
