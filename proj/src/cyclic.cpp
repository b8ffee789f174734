#include "slpinterp/cyclic.hpp"

#include <algorithm>
#include <stdexcept>

namespace slpi {

CyclicPoly::CyclicPoly(const FieldTowerSpec& tower, u64 modulus)
    : tower_(&tower), p_(modulus) {
  if (modulus == 0) throw std::invalid_argument("CyclicPoly: modulus must be positive");
  c_.assign(std::size_t(modulus) * tower.ext_len(), 0);
}

CyclicPoly CyclicPoly::monomial(const FieldTowerSpec& tower, const ExtElem& c, u64 d, u64 modulus) {
  CyclicPoly out(tower, modulus);
  if (c.c.size() != tower.ext_len()) throw std::invalid_argument("monomial: coefficient length mismatch");
  out.set_coeff(d % modulus, c);
  return out;
}

ExtElem CyclicPoly::coeff_at(u64 d) const {
  if (d >= p_) throw std::invalid_argument("coeff_at: degree out of range");
  u32 w = tower_->ext_len();
  return ExtElem{std::vector<u64>(c_.begin() + std::size_t(d) * w, c_.begin() + std::size_t(d + 1) * w)};
}

void CyclicPoly::set_coeff(u64 d, const ExtElem& c) {
  if (d >= p_) throw std::invalid_argument("set_coeff: degree out of range");
  if (c.c.size() != tower_->ext_len()) throw std::invalid_argument("set_coeff: coefficient length mismatch");
  for (u64 r : c.c)
    if (r >= tower_->p()) throw std::invalid_argument("set_coeff: residue not reduced");
  std::copy(c.c.begin(), c.c.end(), c_.begin() + std::size_t(d) * tower_->ext_len());
}

void CyclicPoly::add_to_coeff(u64 d, std::span<const u64> value) {
  u32 w = tower_->ext_len();
  std::span<u64> slot(c_.data() + std::size_t(d) * w, w);
  tower_->ext_add_into(slot, slot, value);
}

std::vector<std::pair<u64, ExtElem>> CyclicPoly::nonzero_terms() const {
  u32 w = tower_->ext_len();
  std::vector<std::pair<u64, ExtElem>> out;
  for (u64 d = 0; d < p_; ++d) {
    std::span<const u64> slot(c_.data() + std::size_t(d) * w, w);
    if (!tower_->span_is_zero(slot))
      out.emplace_back(d, ExtElem{std::vector<u64>(slot.begin(), slot.end())});
  }
  return out;
}

bool CyclicPoly::is_zero() const { return tower_->span_is_zero(c_); }

void CyclicPoly::require_compatible(const CyclicPoly& a, const CyclicPoly& b) {
  if (a.tower_ != b.tower_)
    throw std::invalid_argument("cyclic op: operands use different field towers");
  if (a.p_ != b.p_) throw std::invalid_argument("cyclic op: modulus mismatch");
}

CyclicPoly operator+(const CyclicPoly& a, const CyclicPoly& b) {
  CyclicPoly::require_compatible(a, b);
  CyclicPoly r(*a.tower_, a.p_);
  a.tower_->ext_add_into(r.c_, a.c_, b.c_);
  return r;
}

CyclicPoly operator-(const CyclicPoly& a, const CyclicPoly& b) {
  CyclicPoly::require_compatible(a, b);
  CyclicPoly r(*a.tower_, a.p_);
  a.tower_->ext_sub_into(r.c_, a.c_, b.c_);
  return r;
}

// Cyclic convolution.  Naive in the worst case (O(p^2) coefficient
// products) but skips zero slots, so monomial-heavy probe workloads cost
// O(p) per product.  Replace this function to change the convolution
// algorithm.
CyclicPoly operator*(const CyclicPoly& a, const CyclicPoly& b) {
  CyclicPoly::require_compatible(a, b);
  const FieldTowerSpec& tw = *a.tower_;
  const u32 w = tw.ext_len();
  const u64 p = a.p_;
  CyclicPoly r(tw, p);

  std::vector<u64> ia, ib;
  for (u64 d = 0; d < p; ++d)
    if (!tw.span_is_zero(std::span<const u64>(a.c_.data() + std::size_t(d) * w, w))) ia.push_back(d);
  for (u64 d = 0; d < p; ++d)
    if (!tw.span_is_zero(std::span<const u64>(b.c_.data() + std::size_t(d) * w, w))) ib.push_back(d);

  std::vector<u64> scratch;
  for (u64 i : ia) {
    std::span<const u64> ca(a.c_.data() + std::size_t(i) * w, w);
    for (u64 j : ib) {
      u64 k = i + j;
      if (k >= p) k -= p;
      std::span<u64> slot(r.c_.data() + std::size_t(k) * w, w);
      tw.ext_mul_acc(slot, ca, std::span<const u64>(b.c_.data() + std::size_t(j) * w, w), scratch);
    }
  }
  return r;
}

bool CyclicPoly::operator==(const CyclicPoly& b) const {
  return tower_ == b.tower_ && p_ == b.p_ && c_ == b.c_;
}

}  // namespace slpi
