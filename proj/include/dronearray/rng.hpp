#ifndef DRONEARRAY_RNG_HPP
#define DRONEARRAY_RNG_HPP

#include <cstdint>

namespace dronearray {

// splitmix64, used for seeding and for deriving per-run seeds in sweeps.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// xoshiro256++ with splitmix64 seeding. Self-contained so that streams are
// bit-identical across platforms and standard library versions.
class Rng {
public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, 1) with 53 significant bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

// Deterministic seed derivation for sweep repetitions.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t value_index,
                                 std::uint64_t repetition) {
  std::uint64_t x = base ^ (0x9e3779b97f4a7c15ULL * (value_index + 1)) ^
                    (0xc2b2ae3d27d4eb4fULL * (repetition + 1));
  return splitmix64(x);
}

}  // namespace dronearray

#endif
