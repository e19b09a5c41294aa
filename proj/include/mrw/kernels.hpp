#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "mrw/params.hpp"
#include "mrw/quadrature.hpp"

namespace mrw {

using Interval = std::pair<double, double>;

// Cutoff-l magnitude field omega_{l,T}: stationary gaussian with
//   E[omega] = -lambda2 (ln(T/l) + 1)
//   rho(t)   = lambda2 (ln(T/l) + 1 - |t|/l)   for |t| <  l
//              lambda2 ln(T/|t|)               for l <= |t| < T
//              0                               for |t| >= T
// The mean is pinned so E[e^{2 omega}] = 1 (the measure has unit density).
struct MagnitudeKernel {
  double lambda2;
  double T;
  double l;

  MagnitudeKernel(double lambda2_, double T_, double l_);

  double rho(double t) const;
  double mean() const;
};

// l -> 0 limit covariance lambda2 ln(T/|t|), truncated at |t| >= T.
// Throws on the pointwise divergence at t = 0.
double rho_limit(double t, double lambda2, double T);

// Shape function of the increment-magnitude covariance:
//   f(u) = -((u+1)^2/2) ln(1 + 1/u) - ((u-1)^2/2) ln(1 - 1/u)   for u >= 1
// (continuous extension at u = 1: -2 ln 2), f(0) = 0, and for 0 < u < 1 the
// exact overlapping-interval integral. f decreases from 0 toward -3/2.
double f_shape(double u);

// Exact integral of ln(T/|u-v|) 1_{|u-v|<T} over [a1,b1] x [a2,b2].
// Reduction to the difference variable (piecewise-linear overlap weight)
// integrated with closed-form antiderivatives; exact for every geometry,
// including ranges crossing the truncation radius T.
double log_kernel_rect_integral(double a1, double b1, double a2, double b2, double T);

// Cov[delta_tau Omega(t)/tau, delta_tau Omega(t+h)/tau] for the renormalized
// magnitude Omega. Closed form ln(T e^{3/2}/h) + f(h/tau) on tau <= h <= T-tau,
// ln(T e^{3/2}/tau) at h = 0, zero for h >= T+tau, exact integral in the
// overlap/transition bands.
double omega_increment_cov(double tau, double h, double T);

// Evaluator bound to a (tau, T) pair.
struct OmegaIncrementCov {
  double tau;
  double T;
  OmegaIncrementCov(double tau_, double T_);
  double operator()(double h) const;
};

// Covariance matrix of (Omega(t_1), ..., Omega(t_n)) for strictly increasing
// positive times: Sigma_jk = int_0^tj int_0^tk ln(T/|u-v|) 1_{|u-v|<T} du dv.
Eigen::MatrixXd omega_cov_matrix(const std::vector<double>& times, double T);

// E[prod_j Omega(I_j)/|I_j|] by the Wick pair-partition sum (0 for odd n).
double omega_wick_moment(const std::vector<Interval>& intervals, double T);

// E[prod_j M(I_j)/|I_j|] for the limit measure, n <= 3. n = 1 is exact (1),
// n = 2 reduces to closed-form antiderivatives of the power kernel, n = 3 uses
// graded Gauss-Legendre panels around the pairwise singularities; the result
// carries an achieved-error estimate.
QuadResult mrm_moment_integral(const std::vector<Interval>& intervals, const ModelParams& params);

}  // namespace mrw
