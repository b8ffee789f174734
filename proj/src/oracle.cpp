#include "slpinterp/oracle.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <utility>

#include "slpinterp/errors.hpp"

namespace slpi {

namespace {

// Exact sparse-polynomial arithmetic for eval_in_ring; the map keeps terms
// canonically ordered and never holds a zero coefficient.
struct PolyElem {
  std::map<std::vector<u64>, FqElem> terms;
};

struct ExpandRing {
  const FieldTowerSpec& tower;
  u32 n;
  ExpansionCap cap;

  using Elem = PolyElem;

  void check_size(const Elem& e) const {
    if (e.terms.size() > cap.max_terms)
      throw ResourceError("expansion: intermediate term count exceeds the cap");
  }

  void accumulate(Elem& acc, const std::vector<u64>& exps, const FqElem& c) const {
    auto it = acc.terms.find(exps);
    if (it == acc.terms.end()) {
      if (!tower.fq_is_zero(c)) {
        acc.terms.emplace(exps, c);
        check_size(acc);
      }
      return;
    }
    it->second = tower.fq_add(it->second, c);
    if (tower.fq_is_zero(it->second)) acc.terms.erase(it);
  }

  Elem embed_const(std::span<const u64> digits) const {
    Elem out;
    FqElem c = tower.as_fq(embed_const_digits(tower, digits));
    if (!tower.fq_is_zero(c)) out.terms.emplace(std::vector<u64>(n, 0), std::move(c));
    return out;
  }

  Elem add(const Elem& a, const Elem& b) const {
    Elem out = a;
    for (const auto& [e, c] : b.terms) accumulate(out, e, c);
    return out;
  }

  Elem sub(const Elem& a, const Elem& b) const {
    Elem out = a;
    for (const auto& [e, c] : b.terms) accumulate(out, e, tower.fq_neg(c));
    return out;
  }

  Elem mul(const Elem& a, const Elem& b) const {
    Elem out;
    std::vector<u64> e(n, 0);
    for (const auto& [ea, ca] : a.terms) {
      for (const auto& [eb, cb] : b.terms) {
        for (u32 j = 0; j < n; ++j) {
          e[j] = ea[j] + eb[j];  // both <= max_degree <= 2^62, no overflow
          if (e[j] > cap.max_degree)
            throw ResourceError("expansion: intermediate degree exceeds the cap");
        }
        accumulate(out, e, tower.fq_mul(ca, cb));
      }
    }
    return out;
  }
};

}  // namespace

SparsePolynomial brute_force_expand(const Slp& slp, u32 n, const FieldTowerSpec& field,
                                    const ExpansionCap& cap) {
  if (n < slp.arity())
    throw std::invalid_argument("expansion: fewer variables than the program arity");
  if (cap.max_terms == 0) throw std::invalid_argument("expansion: term cap must be positive");
  if (cap.max_degree > (u64{1} << 62))
    throw std::invalid_argument("expansion: degree cap above 2^62");
  ExpandRing ring{field, n, cap};
  std::vector<PolyElem> inputs(n);
  for (u32 j = 0; j < n; ++j) {
    std::vector<u64> e(n, 0);
    e[j] = 1;
    inputs[j].terms.emplace(std::move(e), field.fq_one());
  }
  PolyElem value = eval_in_ring(slp, std::span<const PolyElem>(inputs), ring);
  std::vector<Term> terms;
  terms.reserve(value.terms.size());
  for (auto& [e, c] : value.terms) terms.push_back(Term{std::move(c), e});
  return SparsePolynomial::from_terms(n, std::move(terms), field);
}

SparsePolynomial reduce_mod_ideal(const SparsePolynomial& f, u64 modulus,
                                  const FieldTowerSpec& field) {
  if (modulus == 0) throw std::invalid_argument("reduce: modulus must be positive");
  std::vector<Term> terms;
  terms.reserve(f.terms().size());
  for (const Term& t : f.terms()) {
    std::vector<u64> e = t.exps;
    for (u64& x : e) x %= modulus;
    terms.push_back(Term{t.coeff, std::move(e)});
  }
  return SparsePolynomial::from_terms(f.arity(), std::move(terms), field);
}

ExtElem evaluate_at(const SparsePolynomial& f, std::span<const ExtElem> point,
                    const FieldTowerSpec& field) {
  if (point.size() < f.arity())
    throw std::invalid_argument("evaluate: fewer point coordinates than variables");
  ExtElem acc = field.zero();
  for (const Term& t : f.terms()) {
    ExtElem prod = field.embed_fq(t.coeff);
    for (u32 j = 0; j < f.arity(); ++j)
      if (t.exps[j] != 0) prod = field.mul(prod, field.pow(point[j], t.exps[j]));
    acc = field.add(acc, prod);
  }
  return acc;
}

CyclicPoly apply_substitution(const SparsePolynomial& f, std::span<const ExtElem> a,
                              std::span<const u64> v, u64 p, const FieldTowerSpec& field) {
  if (p == 0) throw std::invalid_argument("substitution: modulus must be positive");
  if (a.size() != v.size() || a.size() < f.arity())
    throw std::invalid_argument("substitution: need one (a_j, v_j) pair per variable");
  CyclicPoly out(field, p);
  for (const Term& t : f.terms()) {
    ExtElem coeff = field.embed_fq(t.coeff);
    u64 degree = 0;
    for (u32 j = 0; j < f.arity(); ++j) {
      if (t.exps[j] != 0) coeff = field.mul(coeff, field.pow(a[j], t.exps[j]));
      degree = static_cast<u64>((degree + u128(v[j] % p) * (t.exps[j] % p)) % p);
    }
    out.add_to_coeff(degree, std::span<const u64>(coeff.c));
  }
  return out;
}

std::vector<std::pair<ImageTermRef, ImageTermRef>> find_deceptive_pairs(
    const SparsePolynomial& f, const RandomChoices& choices, std::size_t diversifier_count,
    const FieldTowerSpec& field) {
  if (diversifier_count > choices.diversifiers.size())
    throw std::invalid_argument("deceptive pairs: not enough diversifier vectors");
  for (std::size_t k = 0; k < diversifier_count; ++k)
    if (choices.diversifiers[k].size() < f.arity())
      throw std::invalid_argument("deceptive pairs: short diversifier vector");
  const std::size_t t = f.terms().size();
  const u32 n = f.arity();

  // Diversified coefficient of each term of f under each a_k (slot 0 is the
  // undiversified coefficient); image terms sum these over their subsets.
  std::vector<std::vector<ExtElem>> divc(t);
  for (std::size_t l = 0; l < t; ++l) {
    const Term& tm = f.terms()[l];
    divc[l].reserve(diversifier_count + 1);
    divc[l].push_back(field.embed_fq(tm.coeff));
    for (std::size_t k = 0; k < diversifier_count; ++k) {
      ExtElem c = divc[l][0];
      for (u32 j = 0; j < n; ++j)
        if (tm.exps[j] != 0) c = field.mul(c, field.pow(choices.diversifiers[k][j], tm.exps[j]));
      divc[l].push_back(std::move(c));
    }
  }

  struct ImageTerm {
    ImageTermRef ref;
    std::vector<std::size_t> subset;  // contributing terms of f, ascending
  };
  std::map<std::string, std::vector<ImageTerm>> groups;  // by fingerprint
  for (std::size_t i = 0; i < choices.primes.size(); ++i) {
    const u64 p = choices.primes[i];
    for (std::size_t j = 0; j < choices.subs[i].size(); ++j) {
      const std::vector<u64>& v = choices.subs[i][j];
      std::map<u64, std::vector<std::size_t>> by_degree;
      for (std::size_t l = 0; l < t; ++l) {
        const Term& tm = f.terms()[l];
        u64 d = 0;
        for (u32 c = 0; c < n; ++c)
          d = static_cast<u64>((d + u128(v[c] % p) * (tm.exps[c] % p)) % p);
        by_degree[d].push_back(l);
      }
      for (auto& [d, subset] : by_degree) {
        ExtElem b0 = field.zero();
        for (std::size_t l : subset) b0 = field.add(b0, divc[l][0]);
        if (field.span_is_zero(b0.c)) continue;  // coefficients cancelled, not a term
        std::string fp = field.canonical_encode(b0);
        for (std::size_t k = 1; k <= diversifier_count; ++k) {
          ExtElem b = field.zero();
          for (std::size_t l : subset) b = field.add(b, divc[l][k]);
          fp += field.canonical_encode(b);
        }
        groups[std::move(fp)].push_back(ImageTerm{ImageTermRef{i, j, d}, std::move(subset)});
      }
    }
  }

  std::vector<std::pair<ImageTermRef, ImageTermRef>> pairs;
  for (const auto& [key, members] : groups)
    for (std::size_t x = 0; x < members.size(); ++x)
      for (std::size_t y = x + 1; y < members.size(); ++y)
        if (members[x].subset != members[y].subset)
          pairs.emplace_back(members[x].ref, members[y].ref);
  return pairs;
}

}  // namespace slpi
