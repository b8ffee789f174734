#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "slpinterp/ff.hpp"
#include "slpinterp/rng.hpp"

namespace slpi {

struct Term {
  FqElem coeff;             // length v, reduced
  std::vector<u64> exps;    // length n
  bool operator==(const Term&) const = default;
};

// Canonical sparse polynomial over F_q[z_1..z_n]: terms sorted by exponent
// vector (lexicographic ascending), exponent vectors distinct, no zero
// coefficients.  Equality on canonical forms is exact polynomial equality.
class SparsePolynomial {
 public:
  explicit SparsePolynomial(u32 arity) : arity_(arity) {}  // zero polynomial

  // Canonicalizes: validates shapes, sums coefficients of equal exponent
  // vectors, drops zero terms, sorts.
  static SparsePolynomial from_terms(u32 arity, std::vector<Term> terms,
                                     const FieldTowerSpec& field);

  u32 arity() const { return arity_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  bool operator==(const SparsePolynomial&) const = default;

 private:
  u32 arity_;
  std::vector<Term> terms_;
};

// Text form, one term per line: "<coeff> <e1> ... <en>", terms in canonical
// order.  Coefficients print as a decimal residue (comma-separated residues
// when v > 1).  The zero polynomial prints as an empty string.
std::string format_polynomial(const SparsePolynomial& f);
// arity_hint resolves the arity when the text has no terms.
SparsePolynomial parse_polynomial(std::string_view text, const FieldTowerSpec& field,
                                  std::optional<u32> arity_hint = {});

// Exactly term_count terms: distinct exponent vectors uniform in [0, D)^n,
// coefficients uniform nonzero in F_q.
SparsePolynomial random_sparse_polynomial(u32 n, u64 degree_bound, u32 term_count,
                                          const FieldTowerSpec& field, Rng& rng);

class Slp;
// Straight-line program computing f: powers by squaring per variable, one
// product chain per term, then a running sum.  Length O(t * n * log D).
Slp slp_from_sparse(const SparsePolynomial& f, const FieldTowerSpec& field);

}  // namespace slpi
