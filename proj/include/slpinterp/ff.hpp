#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slpinterp/rng.hpp"

namespace slpi {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using u128 = unsigned __int128;

// Deterministic Miller-Rabin, exact for all 64-bit inputs.
bool is_prime(u64 n);

// Prime modulus p with p < 2^62 so residue products fit in a double word.
struct PrimeFieldSpec {
  u64 p;
  explicit PrimeFieldSpec(u64 modulus);
};

// Element of F_q = Z_p[x]/(phi): v residues mod p, lowest degree first.
using FqElem = std::vector<u64>;

// Element of F_{q^u} = F_q[y]/(psi): u*v residues, grouped as u blocks of v.
// Block k holds the F_q coefficient of y^k.
struct ExtElem {
  std::vector<u64> c;
  bool operator==(const ExtElem&) const = default;
  auto operator<=>(const ExtElem&) const = default;
};

// Two-level tower F_{q^u} / F_q / Z_p with q = p^v.  phi is monic of degree
// v and irreducible over Z_p; psi is monic of degree u and irreducible over
// F_q.  v = 1 and u = 1 are identity layers (phi = x, psi = y) so elements
// degrade gracefully to plain residues.  Instances are immutable; rings and
// polynomials refer to a tower by address, so keep it alive while in use.
class FieldTowerSpec {
 public:
  // Constructs phi and psi by Las Vegas search: random monic candidates
  // tested for irreducibility until one passes.
  FieldTowerSpec(u64 p, u32 v, u32 u, Rng& rng);
  // As above but with phi supplied (length v+1, monic, irreducible).
  FieldTowerSpec(u64 p, std::vector<u64> phi, u32 u, Rng& rng);

  u64 p() const { return p_; }
  u32 v() const { return v_; }
  u32 u() const { return u_; }
  u64 q() const { return q_; }  // p^v
  const std::vector<u64>& phi() const { return phi_; }
  const std::vector<FqElem>& psi() const { return psi_; }
  u32 ext_len() const { return u_ * v_; }

  // ----- F_{q^u} element operations -----
  ExtElem zero() const;
  ExtElem one() const;
  bool is_zero(const ExtElem& a) const;
  bool is_one(const ExtElem& a) const;
  ExtElem add(const ExtElem& a, const ExtElem& b) const;
  ExtElem sub(const ExtElem& a, const ExtElem& b) const;
  ExtElem neg(const ExtElem& a) const;
  ExtElem mul(const ExtElem& a, const ExtElem& b) const;
  ExtElem inv(const ExtElem& a) const;  // throws std::domain_error on zero
  ExtElem pow(const ExtElem& a, u128 e) const;

  ExtElem embed_fq(const FqElem& a) const;
  ExtElem embed_int(u64 c) const;
  // Projection onto F_q; throws std::logic_error if a has a nonzero
  // coefficient on y^k for k >= 1.
  FqElem as_fq(const ExtElem& a) const;
  bool in_fq(const ExtElem& a) const;
  // Validates length u*v and residues < p.
  ExtElem from_residues(std::vector<u64> residues) const;

  ExtElem random_elem(Rng& rng) const;
  ExtElem random_nonzero(Rng& rng) const;  // rejection on zero

  // Injective fixed-width encoding: each residue as 8 little-endian bytes,
  // in coordinate order.  Byte-lexicographic comparison of encodings gives
  // a total order on elements, used for deterministic dictionary iteration.
  std::string canonical_encode(const ExtElem& a) const;
  ExtElem canonical_decode(std::string_view bytes) const;

  // ----- F_q layer -----
  FqElem fq_zero() const;
  FqElem fq_one() const;
  bool fq_is_zero(const FqElem& a) const;
  FqElem fq_add(const FqElem& a, const FqElem& b) const;
  FqElem fq_sub(const FqElem& a, const FqElem& b) const;
  FqElem fq_neg(const FqElem& a) const;
  FqElem fq_mul(const FqElem& a, const FqElem& b) const;
  FqElem fq_inv(const FqElem& a) const;
  FqElem fq_pow(const FqElem& a, u128 e) const;
  FqElem fq_from_int(u64 c) const;
  FqElem fq_from_residues(std::vector<u64> residues) const;
  FqElem fq_random_elem(Rng& rng) const;
  FqElem fq_random_nonzero(Rng& rng) const;

  // ----- flat-buffer kernels (spans of length u*v), used by ring code -----
  // Addition in the tower is coordinatewise mod p, so these run without
  // scratch; mul_acc needs scratch it resizes itself.
  void ext_add_into(std::span<u64> dst, std::span<const u64> a, std::span<const u64> b) const;
  void ext_sub_into(std::span<u64> dst, std::span<const u64> a, std::span<const u64> b) const;
  void ext_neg_into(std::span<u64> dst, std::span<const u64> a) const;
  // acc += a * b
  void ext_mul_acc(std::span<u64> acc, std::span<const u64> a, std::span<const u64> b,
                   std::vector<u64>& scratch) const;
  bool span_is_zero(std::span<const u64> a) const;

  // "p^v:u:phi:psi" with decimal residues, lowest degree first.  phi is a
  // comma list; psi coefficients are comma-separated, each one a dot list
  // of v residues when v > 1.
  std::string serialize() const;
  static FieldTowerSpec deserialize(std::string_view text);

 private:
  FieldTowerSpec() = default;
  void init_layout();
  void validate() const;

  u64 p_ = 0;
  u32 v_ = 0;
  u32 u_ = 0;
  u64 q_ = 0;
  std::vector<u64> phi_;       // length v+1
  std::vector<FqElem> psi_;    // length u+1
};

// Spec-level constructor name; identical to the two-argument constructor.
FieldTowerSpec make_tower(u64 p, u32 v, u32 u, Rng& rng);

// Irreducibility over the tower's F_q layer via the gcd-with-Frobenius
// test: x^(q^(d/l)) - x coprime to f for each prime l | d, and
// x^(q^d) == x mod f.
bool is_irreducible(const std::vector<FqElem>& f, const FieldTowerSpec& tower);

}  // namespace slpi
