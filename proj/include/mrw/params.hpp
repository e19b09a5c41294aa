#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace mrw {

enum class Process { mrm, mrw };

inline std::string to_string(Process p) { return p == Process::mrm ? "mrm" : "mrw"; }
inline Process process_from_string(const std::string& s) {
  if (s == "mrm") return Process::mrm;
  if (s == "mrw") return Process::mrw;
  throw std::invalid_argument("unknown process kind: " + s);
}

// Intermittency lambda2, integral scale T, noise scale sigma.
// lambda2 < 1/2 is the non-degeneracy bound of the limit measure.
struct ModelParams {
  double lambda2 = 0.02;
  double T = 1000.0;
  double sigma = 1.0;

  void validate() const {
    if (!(lambda2 >= 0.0 && lambda2 < 0.5))
      throw std::invalid_argument("ModelParams: lambda2 must lie in [0, 1/2)");
    if (!(T > 0.0)) throw std::invalid_argument("ModelParams: T must be positive");
    if (!(sigma > 0.0)) throw std::invalid_argument("ModelParams: sigma must be positive");
  }
};

// Law of the scale factor Omega_s in W_s = s e^{Omega_s} (measure) or
// W_s = s^{1/2} e^{Omega_s/2} (walk): gaussian, mean = -var/2 = 2 lambda2 ln s.
struct ScaleFactorLaw {
  double mean = 0.0;
  double variance = 0.0;
};

inline ScaleFactorLaw scale_factor_law(double s, double lambda2, Process /*process*/) {
  if (!(s > 0.0 && s <= 1.0)) throw std::invalid_argument("scale_factor_law: s in (0, 1]");
  if (!(lambda2 >= 0.0 && lambda2 < 0.5))
    throw std::invalid_argument("scale_factor_law: lambda2 in [0, 1/2)");
  // Same law for both processes; the flag documents which convention the
  // factor plugs into.
  return {2.0 * lambda2 * std::log(s), -4.0 * lambda2 * std::log(s)};
}

}  // namespace mrw
