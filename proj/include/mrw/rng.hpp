#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mrw {

// Stateless 64-bit mixer (splitmix64 finalizer). Used both as a tiny PRNG step
// and to derive independent sub-stream seeds from (master seed, tags...).
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Splittable seed derivation: fold the tag words into the master seed one at a
// time through the mixer. Schedule-independent by construction: the sub-seed
// depends only on (seed, tags), never on which thread draws first.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return mix64(seed ^ mix64(tag));
}
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag1, std::uint64_t tag2) {
  return derive_seed(derive_seed(seed, tag1), tag2);
}

// Stream roles for sub-seed derivation (second tag = path index).
enum class StreamRole : std::uint64_t {
  magnitude = 0x6d61676e,  // fine-grid magnitude field
  noise = 0x6e6f6973,      // white-noise factor of the walk
  tick = 0x7469636b,       // tick adjustment of flat closes
  ensemble = 0x656e7362,   // per-realization master
};

inline std::uint64_t derive_seed(std::uint64_t seed, StreamRole role, std::uint64_t index = 0) {
  return derive_seed(seed, static_cast<std::uint64_t>(role), index);
}

// mt19937_64 with a hand-rolled Marsaglia polar transform. std::normal_distribution
// is implementation-defined, so gaussians are generated in-house to keep the
// (seed -> path) map stable across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() {  // (0,1)
    // 53-bit mantissa; never returns 0.
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1p-53;
  }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

  std::uint64_t next_u64() { return eng_(); }

  // Fair coin for the +/- tick draw.
  bool flip() { return (eng_() >> 63) != 0; }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace mrw
