#include "slpinterp/primes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "slpinterp/errors.hpp"

namespace slpi {

ParamSet compute_params(u32 n, u64 degree_bound, u32 term_bound, u64 q) {
  if (n < 1) throw std::invalid_argument("compute_params: n must be >= 1");
  if (degree_bound < 2) throw std::invalid_argument("compute_params: degree bound must be >= 2");
  if (term_bound < 1) throw std::invalid_argument("compute_params: term bound must be >= 1");
  if (q < 2) throw std::invalid_argument("compute_params: field size must be >= 2");

  ParamSet ps;
  ps.n = n;
  ps.degree_bound = degree_bound;
  ps.term_bound = term_bound;
  ps.q = q;

  double D = double(degree_bound);
  double T = double(term_bound);
  double m = 6.0;
  m = std::max(m, std::ceil(2.0 * std::log2(D)));
  m = std::max(m, std::ceil(25.0 / 8.0 * std::log(4.0 * T)));
  ps.m = u32(m);

  double lambda = 21.0;
  lambda = std::max(lambda, 95.0 / 3.0 * (T - 1.0) * std::log(D));
  lambda = std::max(lambda, 80.0 * double(n));
  lambda = std::max(lambda, 10.0 / 3.0 * m * std::log(m));
  ps.lambda = lambda;

  ps.s = u32(std::ceil(std::log2(40.0) + 2.0 * std::log2(double(ps.m)) +
                       2.0 * std::log2(double(n)) + 2.0 * std::log2(T)));

  // smallest u >= 1 with q^u >= 2nD+1, exact in integers
  u128 need = 2 * u128(n) * degree_bound + 1;
  u128 power = 1;
  u32 u = 0;
  while (power < need) {
    ++u;
    if (power > ~u128(0) / q) break;  // q^u already exceeds any representable bound
    power *= q;
  }
  ps.u = std::max(u, 1u);
  return ps;
}

std::vector<u64> sieve_interval(double lambda) {
  if (!(lambda >= 2.0)) throw std::invalid_argument("sieve_interval: lambda must be >= 2");
  if (lambda > 4294967296.0) throw ResourceError("sieve_interval: lambda exceeds 2^32");
  u64 lo = u64(std::floor(lambda));      // primes strictly above lo
  u64 hi = u64(std::floor(2.0 * lambda));  // primes up to hi inclusive

  // base primes up to sqrt(hi)
  u64 root = u64(std::sqrt(double(hi))) + 2;
  std::vector<bool> small(root + 1, true);
  std::vector<u64> base;
  for (u64 i = 2; i <= root; ++i) {
    if (!small[i]) continue;
    base.push_back(i);
    for (u64 j = i * i; j <= root; j += i) small[j] = false;
  }

  std::vector<u64> out;
  const u64 kSegment = 1 << 20;
  for (u64 start = lo + 1; start <= hi; start += kSegment) {
    u64 end = std::min(hi, start + kSegment - 1);
    std::vector<bool> seg(end - start + 1, true);
    for (u64 b : base) {
      if (b * b > end) break;
      u64 first = std::max(b * b, (start + b - 1) / b * b);
      for (u64 j = first; j <= end; j += b) seg[j - start] = false;
    }
    for (u64 i = start; i <= end; ++i)
      if (i >= 2 && seg[i - start]) out.push_back(i);
  }
  return out;
}

PrimeDraw draw_primes(const ParamSet& params, Rng& rng) {
  std::vector<u64> pool = sieve_interval(params.lambda);
  if (pool.size() < params.m)
    throw std::logic_error("draw_primes: interval holds fewer than m primes");
  PrimeDraw out;
  out.reserve(params.m);
  for (u32 i = 0; i < params.m; ++i) {
    std::size_t j = i + rng.below(pool.size() - i);
    std::swap(pool[i], pool[j]);
    out.push_back(pool[i]);
  }
  return out;
}

}  // namespace slpi
