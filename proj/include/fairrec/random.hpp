#ifndef FAIRREC_RANDOM_HPP
#define FAIRREC_RANDOM_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>

namespace fairrec {

// Identifier printed by `fairrec --version` and recorded in run manifests.
inline constexpr const char *kPrngName = "xoshiro256** (splitmix64 seeding)";

// One step of the splitmix64 sequence. Used to expand a 64-bit seed into
// xoshiro state and to mix sub-seed components.
constexpr std::uint64_t splitmix64(std::uint64_t &state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Deterministic sub-seed derivation: derive_seed({seed, a, b, ...}).
// Order of the components matters.
constexpr std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x6A09E667F3BCC909ULL;
  for (std::uint64_t part : parts) {
    std::uint64_t s = h ^ part;
    h = splitmix64(s);
  }
  return h;
}

// xoshiro256** by Blackman and Vigna. Satisfies UniformRandomBitGenerator.
//
// The standard <random> distributions are implementation-defined, so the
// uniform, Bernoulli and normal draws used by the experiments are defined
// here on top of the raw 64-bit stream. That keeps every output
// bit-reproducible across compilers and standard libraries.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto &word : state_) word = splitmix64(sm);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // True with probability p; p <= 0 never fires and p >= 1 always does.
  bool bernoulli(double p) { return uniform() < p; }

  // Uniform on {-1, +1}.
  double rademacher() { return ((*this)() >> 63) ? -1.0 : 1.0; }

  // Standard normal via the Box-Muller transform; the paired deviate is
  // cached for the next call.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace fairrec

#endif  // FAIRREC_RANDOM_HPP
