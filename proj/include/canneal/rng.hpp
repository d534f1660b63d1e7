#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

namespace canneal {

// Counter-based random streams. A stream is keyed by up to four 64-bit
// values (seed, purpose tag, particle index, step index); draws from
// distinct keys are independent and the sequence for a given key does not
// depend on scheduling or worker count. The generator is splitmix64 over a
// keyed initial state, which is enough statistical quality for Monte Carlo
// noise while staying bit-reproducible across platforms.
class StreamRng {
 public:
  explicit StreamRng(std::uint64_t k0, std::uint64_t k1 = 0, std::uint64_t k2 = 0,
                     std::uint64_t k3 = 0) {
    state_ = mix(k0 + 0x9e3779b97f4a7c15ull);
    state_ = mix(state_ ^ mix(k1 + 0xbf58476d1ce4e5b9ull));
    state_ = mix(state_ ^ mix(k2 + 0x94d049bb133111ebull));
    state_ = mix(state_ ^ mix(k3 + 0xd6e8feb86659fd93ull));
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  // Uniform on the open interval (0, 1); never returns 0 or 1, so log()
  // and inverse-CDF transforms are safe.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; draws are paired internally.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  double exponential(double lambda) { return -std::log(uniform()) / lambda; }

  // Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) {
    // Rejection-free modulo is fine here: n is tiny compared to 2^64.
    return next_u64() % n;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace canneal
