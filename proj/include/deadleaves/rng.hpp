#ifndef DEADLEAVES_RNG_HPP
#define DEADLEAVES_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace deadleaves {

// splitmix64; used to derive independent stream seeds from (seed, index)
inline std::uint64_t mix_seed(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index) {
  return mix_seed(seed ^ mix_seed(index));
}

// Deterministic double-precision RNG. std::mt19937_64 output is pinned by the
// standard and the mappings below avoid the implementation-defined
// std::*_distribution classes, so sequences are bit-identical everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // uniform on [0,1), 53-bit resolution
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // inclusive bounds
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    // multiply-shift; bias is < 2^-64 per draw, irrelevant at our spans
    const unsigned __int128 m =
        static_cast<unsigned __int128>(eng_()) * static_cast<unsigned __int128>(span);
    return lo + static_cast<std::int64_t>(m >> 64);
  }

  // standard normal via Box-Muller, one spare cached
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * 3.14159265358979323846 * u2;
    spare_ = mag * std::sin(ang);
    have_spare_ = true;
    return mag * std::cos(ang);
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace deadleaves

#endif  // DEADLEAVES_RNG_HPP
