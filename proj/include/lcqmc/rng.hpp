#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <random>

namespace lcqmc {

// Thin wrapper around mt19937_64 with fixed sampling recipes, so that a run
// is bit-reproducible for a given seed independently of the standard
// library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::uint64_t uniform_int(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % n;
  }

  // Fair +1/-1.
  int sign() { return (gen_() >> 63) ? 1 : -1; }

  std::uint64_t raw() { return gen_(); }

  void save(std::ostream& os) const { os << gen_; }
  void load(std::istream& is) { is >> gen_; }

  bool operator==(const Rng& other) const { return gen_ == other.gen_; }

 private:
  std::mt19937_64 gen_;
};

// SplitMix64 finalizer, used to derive well-separated child seeds.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  return mix64(mix64(mix64(master) ^ a) ^ b);
}

}  // namespace lcqmc
