#pragma once

#include "mrw/params.hpp"

namespace mrw {

// Cumulant exponent of the magnitude: psi(q) = 2 lambda2 q^2 - 2 lambda2 q.
double psi(double q, double lambda2);

// Measure scaling exponent zeta_M(q) = q - psi(q) = (1 + 2 lambda2) q - 2 lambda2 q^2.
double zeta_m(double q, double lambda2);

// Walk scaling exponent zeta_X(q) = zeta_M(q/2).
double zeta_x(double q, double lambda2);

// Moment prefactor K_n of E[M[0,t]^n] = (K_n / sigma^{2n}) t^{zeta_M(n)}.
// Gamma-product form; sigma^{2n} is carried so that the walk even-moment
// prefactor is (2n-1)!! K_n. Throws when a Gamma argument hits a pole
// (moment diverges: n lambda2 too large).
double moment_prefactor(int n, const ModelParams& params);

// Walk variant: E[X(t)^{2n}] = walk_moment_prefactor(n) * t^{zeta_X(2n)}.
double walk_moment_prefactor(int n, const ModelParams& params);

}  // namespace mrw
