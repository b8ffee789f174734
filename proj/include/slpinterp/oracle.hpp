#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "slpinterp/cyclic.hpp"
#include "slpinterp/engine.hpp"
#include "slpinterp/ff.hpp"
#include "slpinterp/slp.hpp"
#include "slpinterp/sparse_poly.hpp"

namespace slpi {

// Limits for explicit expansion.  Expansion is exponential in the worst
// case, so both caps are hard: exceeding either raises ResourceError.
struct ExpansionCap {
  u64 max_terms = 10'000;           // any intermediate term count
  u64 max_degree = u64{1} << 32;    // any intermediate partial degree
};

// Expands the program into an explicit polynomial in n variables by
// evaluating it with term-map arithmetic over F_q.  Exact, deterministic,
// and independent of the interpolation pipeline.
SparsePolynomial brute_force_expand(const Slp& slp, u32 n, const FieldTowerSpec& field,
                                    const ExpansionCap& cap = {});

// Image of f in F_q[z]/(z_1^modulus - 1, .., z_n^modulus - 1): every
// exponent reduced mod modulus, colliding terms summed.
SparsePolynomial reduce_mod_ideal(const SparsePolynomial& f, u64 modulus,
                                  const FieldTowerSpec& field);

// Value of f at a point of F_{q^u}^n.
ExtElem evaluate_at(const SparsePolynomial& f, std::span<const ExtElem> point,
                    const FieldTowerSpec& field);

// Univariate image of the explicit polynomial under z_j -> a_j * x^(v_j):
// term c * z^e contributes c * prod_j a_j^(e_j) at degree sum_j v_j e_j
// mod p.  Reference semantics for probing a program image.
CyclicPoly apply_substitution(const SparsePolynomial& f, std::span<const ExtElem> a,
                              std::span<const u64> v, u64 p, const FieldTowerSpec& field);

// One nonzero term of one probe image: the term of degree `degree` in the
// image of f under substitution vector v[prime_index][image_index] modulo
// primes[prime_index].
struct ImageTermRef {
  std::size_t prime_index;
  std::size_t image_index;
  u64 degree;
};

// Enumerates the nonzero terms of every image of f under the substitution
// vectors in `choices` and returns the unrevealed deceptive pairs: pairs of
// image terms with equal coefficients that are images of different subsets
// of f's terms (deceptive), whose diversified coefficients under the first
// `diversifier_count` vectors of `choices` also all agree (unrevealed).
// Pairs from the same image count.  Pairs are reported grouped by
// fingerprint, each pair in image enumeration order.
std::vector<std::pair<ImageTermRef, ImageTermRef>> find_deceptive_pairs(
    const SparsePolynomial& f, const RandomChoices& choices, std::size_t diversifier_count,
    const FieldTowerSpec& field);

}  // namespace slpi
