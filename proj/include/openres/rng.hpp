#pragma once

#include <cstdint>
#include <random>

#include "openres/types.hpp"

namespace openres {

// splitmix64 increment step; also used to derive child stream keys.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Key for an independent child stream.  For a fixed parent the map
// index -> key is injective (splitmix64 is a bijection composed with
// distinct inputs), so substreams within one run never collide.
inline std::uint64_t substream(std::uint64_t parent, std::uint64_t index) {
  return splitmix64(parent + (index + 1) * 0x9e3779b97f4a7c15ull);
}

// Deterministic generator with portable uniform and normal draws.  We avoid
// std::uniform_real_distribution / std::normal_distribution on purpose: their
// output is implementation-defined, and reproducibility across standard
// libraries is part of the contract.
class Rng {
 public:
  explicit Rng(std::uint64_t key) : gen_(key) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; the second value of each pair is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u in (0, 1] so the log is finite.
    double u = 1.0 - uniform();
    double v = uniform();
    double r = std::sqrt(-2.0 * std::log(u));
    double angle = 2.0 * M_PI * v;
    spare_ = r * std::sin(angle);
    have_spare_ = true;
    return r * std::cos(angle);
  }

  // Complex normal with unit variance: <|z|^2> = 1, <z^2> = 0.
  Complex complex_normal() {
    double re = normal();
    double im = normal();
    return Complex(re * M_SQRT1_2, im * M_SQRT1_2);
  }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace openres
