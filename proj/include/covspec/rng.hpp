#pragma once

#include <cstdint>
#include <initializer_list>

namespace covspec::rng {

// Counter-based random streams.
//
// Every random number in the project is a pure function of a 64-bit seed and
// a small tuple of counter words, so results are independent of evaluation
// order, thread count, and platform. The primitive is the SplitMix64
// finalizer; the constants below are the documented contract and must not
// change between releases:
//
//   gamma = 0x9E3779B97F4A7C15
//   mix(z) = ((z ^ z>>30) * 0xBF58476D1CE4E5B9
//             ^ ... >>27) * 0x94D049BB133111EB ^ ... >>31
//   at(seed, j)        = mix(seed + (j+1) * gamma)
//   key(seed, w0..wn)  = at(...at(at(seed, w0), w1)..., wn)

inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// j-th output of the SplitMix64 sequence seeded with `seed`.
inline std::uint64_t at(std::uint64_t seed, std::uint64_t j) {
  return mix64(seed + (j + 1) * kGamma);
}

inline std::uint64_t key(std::uint64_t seed, std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = seed;
  for (std::uint64_t w : words) h = at(h, w);
  return h;
}

// Per-rep seed derivation used by the CLI: split(master, rep) = at(master, rep).
inline std::uint64_t split(std::uint64_t master_seed, std::uint64_t index) {
  return at(master_seed, index);
}

// Uniform in the open interval (0,1): 52 bits plus a half-step offset keeps
// both endpoints unreachable (every intermediate value is exactly
// representable, so no rounding to 0 or 1 can occur).
inline double to_unit_open(std::uint64_t u) {
  return (static_cast<double>(u >> 12) + 0.5) * 0x1.0p-52;
}

// Inverse standard normal CDF (Wichura's AS 241, double precision).
double inverse_normal_cdf(double p);

// One standard normal draw per counter word.
inline double normal(std::uint64_t word) { return inverse_normal_cdf(to_unit_open(word)); }

// Stream purposes keep independent uses of the same seed from colliding.
enum Purpose : std::uint64_t {
  kPathIncrement = 1,  // shared by path and Gram estimators (coupling)
  kEnsemble = 3,       // rotation matrices and other model randomness
};

// Standard normal for component `comp` of the sub-increment (i, l).
inline double gaussian(std::uint64_t seed, Purpose purpose, std::uint64_t w0, std::uint64_t w1,
                       std::uint64_t comp) {
  return normal(key(seed, {static_cast<std::uint64_t>(purpose), w0, w1, comp}));
}

}  // namespace covspec::rng
