#pragma once

#include <bit>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace slpi {

// Seedable generator used for every random draw in the library.  All
// sampling goes through below(), which uses mask rejection on the raw
// mt19937_64 stream, so a seed reproduces a full run bit-for-bit on any
// platform.  split(k) derives an independent stream from the original seed
// without disturbing this generator's state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next() { return gen_(); }

  // Uniform draw from [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
    if (bound == 1) return 0;
    std::uint64_t mask = ~std::uint64_t{0} >> std::countl_zero(bound - 1);
    for (;;) {
      std::uint64_t r = gen_() & mask;
      if (r < bound) return r;
    }
  }

  Rng split(std::uint64_t stream) const { return Rng(mix(seed_, stream)); }

  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    // splitmix64 finalizer over the pair.
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

}  // namespace slpi
