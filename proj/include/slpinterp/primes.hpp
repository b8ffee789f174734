#pragma once

#include <cstdint>
#include <vector>

#include "slpinterp/ff.hpp"
#include "slpinterp/rng.hpp"

namespace slpi {

// Run parameters derived from the problem bounds (n variables, total degree
// < D, at most T terms, base field of size q):
//   m      = max(6, ceil(2*log2 D), ceil((25/8)*ln(4T)))     primes to draw
//   lambda = max(21, (95/3)(T-1)*ln D, 80n, (10/3)*m*ln m)    prime interval base
//   s      = ceil(log2 40 + 2*log2 m + 2*log2 n + 2*log2 T)   diversifiers
//   u      = ceil(log_q(2nD+1))                               extension degree
struct ParamSet {
  u32 n = 0;
  u64 degree_bound = 0;  // D
  u32 term_bound = 0;    // T
  u64 q = 0;
  u32 m = 0;
  double lambda = 0.0;
  u32 s = 0;
  u32 u = 0;
};

ParamSet compute_params(u32 n, u64 degree_bound, u32 term_bound, u64 q);

// All primes p with lambda < p <= 2*lambda, ascending.  Deterministic
// segmented Eratosthenes; lambda > 2^32 raises ResourceError.
std::vector<u64> sieve_interval(double lambda);

// m distinct primes drawn uniformly without replacement from
// sieve_interval(lambda), in draw order.
using PrimeDraw = std::vector<u64>;
PrimeDraw draw_primes(const ParamSet& params, Rng& rng);

}  // namespace slpi
