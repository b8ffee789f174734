#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "slpinterp/ff.hpp"

namespace slpi {

// Dense element of F_{q^u}[x]/(x^p - 1): p coefficient slots over the
// tower, stored as one flat residue buffer (slot d occupies ext_len()
// consecutive residues).  Operands must share the modulus and the same
// FieldTowerSpec instance; the tower must outlive the polynomial.
class CyclicPoly {
 public:
  CyclicPoly(const FieldTowerSpec& tower, u64 modulus);  // zero polynomial
  static CyclicPoly monomial(const FieldTowerSpec& tower, const ExtElem& c, u64 d, u64 modulus);

  u64 modulus() const { return p_; }
  const FieldTowerSpec& tower() const { return *tower_; }

  ExtElem coeff_at(u64 d) const;  // throws std::invalid_argument if d >= modulus
  void set_coeff(u64 d, const ExtElem& c);
  // c += value at slot d (d reduced mod modulus by the caller's contract)
  void add_to_coeff(u64 d, std::span<const u64> value);

  // (degree, coefficient) pairs for all nonzero slots, ascending degree.
  std::vector<std::pair<u64, ExtElem>> nonzero_terms() const;
  bool is_zero() const;

  std::span<const u64> raw() const { return c_; }

  friend CyclicPoly operator+(const CyclicPoly& a, const CyclicPoly& b);
  friend CyclicPoly operator-(const CyclicPoly& a, const CyclicPoly& b);
  friend CyclicPoly operator*(const CyclicPoly& a, const CyclicPoly& b);
  bool operator==(const CyclicPoly& b) const;

 private:
  static void require_compatible(const CyclicPoly& a, const CyclicPoly& b);

  const FieldTowerSpec* tower_;
  u64 p_;
  std::vector<u64> c_;  // p_ * ext_len() residues
};

}  // namespace slpi
