#include "slpinterp/ff.hpp"

#include <algorithm>
#include <cstring>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace slpi {

namespace {

constexpr u64 kModulusLimit = u64(1) << 62;

u64 addmod(u64 a, u64 b, u64 p) {
  u64 s = a + b;
  return s >= p ? s - p : s;
}

u64 submod(u64 a, u64 b, u64 p) { return a >= b ? a - b : a + (p - b); }

u64 mulmod(u64 a, u64 b, u64 p) { return u64(u128(a) * b % p); }

u64 powmod(u64 a, u128 e, u64 p) {
  u64 r = 1 % p;
  u64 base = a % p;
  while (e) {
    if (e & 1) r = mulmod(r, base, p);
    base = mulmod(base, base, p);
    e >>= 1;
  }
  return r;
}

u64 invmod(u64 a, u64 p) {
  if (a == 0) throw std::domain_error("division by zero in Z_p");
  __int128 t = 0, newt = 1;
  __int128 r = p, newr = a % p;
  while (newr != 0) {
    __int128 quot = r / newr;
    t = std::exchange(newt, t - quot * newt);
    r = std::exchange(newr, r - quot * newr);
  }
  if (r != 1) throw std::logic_error("invmod: modulus not prime");
  if (t < 0) t += p;
  return u64(t);
}

// ----- raw F_q kernels (length-v residue blocks, phi monic of degree v) ---

// Reduces t (length len >= v) in place by phi; valid result in t[0..v).
void phi_reduce_raw(u64* t, std::size_t len, const u64* phi, u32 v, u64 p) {
  for (std::size_t k = len; k-- > v;) {
    u64 c = t[k];
    if (c == 0) continue;
    t[k] = 0;
    for (u32 j = 0; j < v; ++j) t[k - v + j] = submod(t[k - v + j], mulmod(c, phi[j], p), p);
  }
}

// out = a * b in F_q; tmp must hold 2v-1 slots, out may not alias inputs.
void fq_mul_raw(u64* out, const u64* a, const u64* b, const u64* phi, u32 v, u64 p, u64* tmp) {
  if (v == 1) {
    out[0] = mulmod(a[0], b[0], p);
    return;
  }
  std::size_t plen = 2 * std::size_t(v) - 1;
  std::fill(tmp, tmp + plen, 0);
  for (u32 i = 0; i < v; ++i) {
    if (a[i] == 0) continue;
    for (u32 j = 0; j < v; ++j) tmp[i + j] = addmod(tmp[i + j], mulmod(a[i], b[j], p), p);
  }
  phi_reduce_raw(tmp, plen, phi, v, p);
  std::copy(tmp, tmp + v, out);
}

// ----- generic field layers for construction-time polynomial work -----

struct ZpF {
  u64 p;
  using Elem = u64;
  Elem zero() const { return 0; }
  Elem one() const { return 1; }
  bool is_zero(Elem a) const { return a == 0; }
  bool eq(Elem a, Elem b) const { return a == b; }
  Elem add(Elem a, Elem b) const { return addmod(a, b, p); }
  Elem sub(Elem a, Elem b) const { return submod(a, b, p); }
  Elem neg(Elem a) const { return a == 0 ? 0 : p - a; }
  Elem mul(Elem a, Elem b) const { return mulmod(a, b, p); }
  Elem inv(Elem a) const { return invmod(a, p); }
  Elem random(Rng& rng) const { return rng.below(p); }
};

struct FqF {
  u64 p;
  u32 v;
  const u64* phi;  // length v+1
  using Elem = std::vector<u64>;
  Elem zero() const { return Elem(v, 0); }
  Elem one() const {
    Elem e(v, 0);
    e[0] = 1;
    return e;
  }
  bool is_zero(const Elem& a) const {
    return std::all_of(a.begin(), a.end(), [](u64 x) { return x == 0; });
  }
  bool eq(const Elem& a, const Elem& b) const { return a == b; }
  Elem add(const Elem& a, const Elem& b) const {
    Elem r(v);
    for (u32 i = 0; i < v; ++i) r[i] = addmod(a[i], b[i], p);
    return r;
  }
  Elem sub(const Elem& a, const Elem& b) const {
    Elem r(v);
    for (u32 i = 0; i < v; ++i) r[i] = submod(a[i], b[i], p);
    return r;
  }
  Elem neg(const Elem& a) const {
    Elem r(v);
    for (u32 i = 0; i < v; ++i) r[i] = a[i] == 0 ? 0 : p - a[i];
    return r;
  }
  Elem mul(const Elem& a, const Elem& b) const {
    Elem r(v);
    std::vector<u64> tmp(2 * std::size_t(v) - 1);
    fq_mul_raw(r.data(), a.data(), b.data(), phi, v, p, tmp.data());
    return r;
  }
  Elem inv(const Elem& a) const;
  Elem random(Rng& rng) const {
    Elem r(v);
    for (u32 i = 0; i < v; ++i) r[i] = rng.below(p);
    return r;
  }
};

template <class F>
using Poly = std::vector<typename F::Elem>;

template <class F>
void p_trim(Poly<F>& a, const F& f) {
  while (!a.empty() && f.is_zero(a.back())) a.pop_back();
}

template <class E>
int p_deg(const std::vector<E>& a) {
  return int(a.size()) - 1;  // trimmed representation, -1 for zero
}

template <class F>
Poly<F> p_mul(const Poly<F>& a, const Poly<F>& b, const F& f) {
  if (a.empty() || b.empty()) return {};
  Poly<F> r(a.size() + b.size() - 1, f.zero());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (f.is_zero(a[i])) continue;
    for (std::size_t j = 0; j < b.size(); ++j)
      r[i + j] = f.add(r[i + j], f.mul(a[i], b[j]));
  }
  p_trim(r, f);
  return r;
}

// a mod m, m nonzero (any leading coefficient).
template <class F>
Poly<F> p_mod(Poly<F> a, const Poly<F>& m, const F& f) {
  auto lead_inv = f.inv(m.back());
  while (a.size() >= m.size()) {
    auto c = f.mul(a.back(), lead_inv);
    std::size_t off = a.size() - m.size();
    if (!f.is_zero(c))
      for (std::size_t j = 0; j + 1 < m.size(); ++j)
        a[off + j] = f.sub(a[off + j], f.mul(c, m[j]));
    a.pop_back();
    p_trim(a, f);
  }
  return a;
}

template <class F>
Poly<F> p_mulmod(const Poly<F>& a, const Poly<F>& b, const Poly<F>& m, const F& f) {
  return p_mod(p_mul(a, b, f), m, f);
}

template <class F>
Poly<F> p_powmod(Poly<F> base, u64 e, const Poly<F>& m, const F& f) {
  Poly<F> r{f.one()};
  base = p_mod(std::move(base), m, f);
  while (e) {
    if (e & 1) r = p_mulmod(r, base, m, f);
    base = p_mulmod(base, base, m, f);
    e >>= 1;
  }
  return r;
}

template <class F>
Poly<F> p_gcd(Poly<F> a, Poly<F> b, const F& f) {
  p_trim(a, f);
  p_trim(b, f);
  while (!b.empty()) {
    a = p_mod(std::move(a), b, f);
    std::swap(a, b);
  }
  if (!a.empty()) {
    auto li = f.inv(a.back());
    for (auto& c : a) c = f.mul(c, li);
  }
  return a;
}

template <class F>
std::optional<Poly<F>> p_invmod(const Poly<F>& a0, const Poly<F>& m, const F& f) {
  Poly<F> r0 = m, r1 = p_mod(a0, m, f);
  Poly<F> t0, t1{f.one()};
  while (!r1.empty()) {
    // q = r0 div r1 via repeated leading-term elimination
    auto lead_inv = f.inv(r1.back());
    Poly<F> q(r0.size() >= r1.size() ? r0.size() - r1.size() + 1 : 0, f.zero());
    while (r0.size() >= r1.size() && !r0.empty()) {
      auto c = f.mul(r0.back(), lead_inv);
      std::size_t off = r0.size() - r1.size();
      q[off] = c;
      for (std::size_t j = 0; j + 1 < r1.size(); ++j)
        r0[off + j] = f.sub(r0[off + j], f.mul(c, r1[j]));
      r0.pop_back();
      p_trim(r0, f);
    }
    std::swap(r0, r1);  // r0 <- r1, r1 <- remainder
    auto qt1 = p_mul(q, t1, f);
    if (qt1.size() < t0.size()) qt1.resize(t0.size(), f.zero());
    for (std::size_t i = 0; i < t0.size(); ++i) qt1[i] = f.sub(t0[i], qt1[i]);
    for (std::size_t i = t0.size(); i < qt1.size(); ++i) qt1[i] = f.neg(qt1[i]);
    p_trim(qt1, f);
    t0 = std::move(t1);
    t1 = std::move(qt1);
  }
  if (r0.size() != 1) return std::nullopt;  // gcd has positive degree
  auto li = f.inv(r0[0]);
  for (auto& c : t0) c = f.mul(c, li);
  p_trim(t0, f);
  return t0;
}

std::vector<u32> prime_factors(u32 d) {
  std::vector<u32> fs;
  for (u32 l = 2; l * l <= d; ++l)
    if (d % l == 0) {
      fs.push_back(l);
      while (d % l == 0) d /= l;
    }
  if (d > 1) fs.push_back(d);
  return fs;
}

// Irreducibility of monic f over a field of size char_p^w: the Frobenius
// ladder g_k = x^(char_p^k) mod f is advanced one char_p-power at a time,
// with gcd checks at steps w*(d/l) and the fixed-point check at w*d.
template <class F>
bool p_is_irreducible_monic(const Poly<F>& fpoly, u64 char_p, u32 w, const F& f) {
  int d = p_deg(fpoly);
  if (d <= 0) return false;
  if (d == 1) return true;
  Poly<F> x{f.zero(), f.one()};
  std::vector<u64> gcd_steps;
  for (u32 l : prime_factors(u32(d))) gcd_steps.push_back(u64(w) * (u32(d) / l));
  std::sort(gcd_steps.begin(), gcd_steps.end());
  u64 total = u64(w) * u32(d);
  Poly<F> g = x;
  std::size_t next = 0;
  for (u64 step = 1; step <= total; ++step) {
    g = p_powmod(std::move(g), char_p, fpoly, f);
    while (next < gcd_steps.size() && gcd_steps[next] == step) {
      Poly<F> diff = g;
      if (diff.size() < 2) diff.resize(2, f.zero());
      diff[1] = f.sub(diff[1], f.one());
      p_trim(diff, f);
      if (p_deg(p_gcd(diff, fpoly, f)) != 0) return false;
      ++next;
    }
  }
  return g == x;
}

template <class F>
Poly<F> random_monic(u32 d, const F& f, Rng& rng) {
  Poly<F> c(d + 1, f.zero());
  for (u32 i = 0; i < d; ++i) c[i] = f.random(rng);
  c[d] = f.one();
  return c;
}

template <class F>
Poly<F> find_irreducible(u32 d, u64 char_p, u32 w, const F& f, Rng& rng) {
  for (;;) {
    Poly<F> cand = random_monic(d, f, rng);
    if (p_is_irreducible_monic(cand, char_p, w, f)) return cand;
  }
}

FqF::Elem FqF::inv(const Elem& a) const {
  if (is_zero(a)) throw std::domain_error("division by zero in F_q");
  ZpF zp{p};
  Poly<ZpF> ap(a.begin(), a.end());
  p_trim(ap, zp);
  Poly<ZpF> m(phi, phi + v + 1);
  auto r = p_invmod(ap, m, zp);
  if (!r) throw std::logic_error("F_q inverse failed: phi not irreducible");
  r->resize(v, 0);
  return *r;
}

}  // namespace

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 s : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % s == 0) return n == s;
  }
  u64 d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int i = 1; i < r; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

PrimeFieldSpec::PrimeFieldSpec(u64 modulus) : p(modulus) {
  if (p >= kModulusLimit)
    throw std::invalid_argument("PrimeFieldSpec: modulus must be < 2^62");
  if (!is_prime(p)) throw std::invalid_argument("PrimeFieldSpec: modulus is not prime");
}

// ----- FieldTowerSpec -----

FieldTowerSpec::FieldTowerSpec(u64 p, u32 v, u32 u, Rng& rng) {
  PrimeFieldSpec{p};
  if (v == 0 || u == 0) throw std::invalid_argument("FieldTowerSpec: degrees must be >= 1");
  p_ = p;
  v_ = v;
  u_ = u;
  ZpF zp{p};
  if (v == 1) {
    phi_ = {0, 1};
  } else {
    phi_ = find_irreducible(v, p, 1, zp, rng);
  }
  init_layout();
  if (u == 1) {
    psi_ = {fq_zero(), fq_one()};
  } else {
    FqF fq{p, v, phi_.data()};
    auto found = find_irreducible(u, p, v, fq, rng);
    psi_.assign(found.begin(), found.end());
  }
  validate();
}

FieldTowerSpec::FieldTowerSpec(u64 p, std::vector<u64> phi, u32 u, Rng& rng) {
  PrimeFieldSpec{p};
  if (phi.size() < 2) throw std::invalid_argument("FieldTowerSpec: phi must have degree >= 1");
  if (u == 0) throw std::invalid_argument("FieldTowerSpec: degrees must be >= 1");
  p_ = p;
  v_ = u32(phi.size()) - 1;
  u_ = u;
  for (u64 c : phi)
    if (c >= p) throw std::invalid_argument("FieldTowerSpec: phi coefficients must be reduced mod p");
  if (phi.back() != 1) throw std::invalid_argument("FieldTowerSpec: phi must be monic");
  ZpF zp{p};
  Poly<ZpF> phip(phi.begin(), phi.end());
  if (!p_is_irreducible_monic(phip, p, 1, zp))
    throw std::invalid_argument("FieldTowerSpec: phi is not irreducible over Z_p");
  phi_ = std::move(phi);
  init_layout();
  if (u == 1) {
    psi_ = {fq_zero(), fq_one()};
  } else {
    FqF fq{p_, v_, phi_.data()};
    auto found = find_irreducible(u, p_, v_, fq, rng);
    psi_.assign(found.begin(), found.end());
  }
  validate();
}

void FieldTowerSpec::init_layout() {
  u128 q = 1;
  for (u32 i = 0; i < v_; ++i) {
    q *= p_;
    if (q >= kModulusLimit)
      throw std::invalid_argument("FieldTowerSpec: base field size p^v must be < 2^62");
  }
  q_ = u64(q);
}

void FieldTowerSpec::validate() const {
  if (phi_.size() != std::size_t(v_) + 1 || phi_.back() != 1)
    throw std::logic_error("FieldTowerSpec: malformed phi");
  if (psi_.size() != std::size_t(u_) + 1)
    throw std::logic_error("FieldTowerSpec: malformed psi");
  for (const auto& c : psi_) {
    if (c.size() != v_) throw std::logic_error("FieldTowerSpec: malformed psi coefficient");
    for (u64 r : c)
      if (r >= p_) throw std::logic_error("FieldTowerSpec: psi coefficient not reduced");
  }
  FqF fq{p_, v_, phi_.data()};
  if (!fq.eq(psi_.back(), fq.one()))
    throw std::logic_error("FieldTowerSpec: psi must be monic");
}

ExtElem FieldTowerSpec::zero() const { return ExtElem{std::vector<u64>(ext_len(), 0)}; }

ExtElem FieldTowerSpec::one() const {
  ExtElem e{std::vector<u64>(ext_len(), 0)};
  e.c[0] = 1;
  return e;
}

bool FieldTowerSpec::is_zero(const ExtElem& a) const { return span_is_zero(a.c); }

bool FieldTowerSpec::is_one(const ExtElem& a) const {
  if (a.c.size() != ext_len() || a.c[0] != 1) return false;
  return std::all_of(a.c.begin() + 1, a.c.end(), [](u64 x) { return x == 0; });
}

ExtElem FieldTowerSpec::add(const ExtElem& a, const ExtElem& b) const {
  ExtElem r{std::vector<u64>(ext_len())};
  ext_add_into(r.c, a.c, b.c);
  return r;
}

ExtElem FieldTowerSpec::sub(const ExtElem& a, const ExtElem& b) const {
  ExtElem r{std::vector<u64>(ext_len())};
  ext_sub_into(r.c, a.c, b.c);
  return r;
}

ExtElem FieldTowerSpec::neg(const ExtElem& a) const {
  ExtElem r{std::vector<u64>(ext_len())};
  ext_neg_into(r.c, a.c);
  return r;
}

ExtElem FieldTowerSpec::mul(const ExtElem& a, const ExtElem& b) const {
  ExtElem r = zero();
  std::vector<u64> scratch;
  ext_mul_acc(r.c, a.c, b.c, scratch);
  return r;
}

ExtElem FieldTowerSpec::inv(const ExtElem& a) const {
  if (is_zero(a)) throw std::domain_error("division by zero in F_{q^u}");
  FqF fq{p_, v_, phi_.data()};
  Poly<FqF> ap(u_);
  for (u32 k = 0; k < u_; ++k) ap[k].assign(a.c.begin() + std::size_t(k) * v_, a.c.begin() + std::size_t(k + 1) * v_);
  p_trim(ap, fq);
  Poly<FqF> m(psi_.begin(), psi_.end());
  auto r = p_invmod(ap, m, fq);
  if (!r) throw std::logic_error("F_{q^u} inverse failed: psi not irreducible");
  r->resize(u_, fq.zero());
  ExtElem out{std::vector<u64>(ext_len())};
  for (u32 k = 0; k < u_; ++k) std::copy((*r)[k].begin(), (*r)[k].end(), out.c.begin() + std::size_t(k) * v_);
  return out;
}

ExtElem FieldTowerSpec::pow(const ExtElem& a, u128 e) const {
  ExtElem r = one();
  ExtElem base = a;
  std::vector<u64> scratch;
  while (e) {
    if (e & 1) {
      ExtElem t = zero();
      ext_mul_acc(t.c, r.c, base.c, scratch);
      r = std::move(t);
    }
    ExtElem t = zero();
    ext_mul_acc(t.c, base.c, base.c, scratch);
    base = std::move(t);
    e >>= 1;
  }
  return r;
}

ExtElem FieldTowerSpec::embed_fq(const FqElem& a) const {
  if (a.size() != v_) throw std::invalid_argument("embed_fq: wrong length");
  ExtElem r = zero();
  for (u32 i = 0; i < v_; ++i) {
    if (a[i] >= p_) throw std::invalid_argument("embed_fq: residue not reduced");
    r.c[i] = a[i];
  }
  return r;
}

ExtElem FieldTowerSpec::embed_int(u64 c) const {
  ExtElem r = zero();
  r.c[0] = c % p_;
  return r;
}

bool FieldTowerSpec::in_fq(const ExtElem& a) const {
  return std::all_of(a.c.begin() + v_, a.c.end(), [](u64 x) { return x == 0; });
}

FqElem FieldTowerSpec::as_fq(const ExtElem& a) const {
  if (!in_fq(a)) throw std::logic_error("as_fq: element not in the F_q subfield");
  return FqElem(a.c.begin(), a.c.begin() + v_);
}

ExtElem FieldTowerSpec::from_residues(std::vector<u64> residues) const {
  if (residues.size() != ext_len()) throw std::invalid_argument("from_residues: wrong length");
  for (u64 r : residues)
    if (r >= p_) throw std::invalid_argument("from_residues: residue not reduced");
  return ExtElem{std::move(residues)};
}

ExtElem FieldTowerSpec::random_elem(Rng& rng) const {
  ExtElem r{std::vector<u64>(ext_len())};
  for (auto& x : r.c) x = rng.below(p_);
  return r;
}

ExtElem FieldTowerSpec::random_nonzero(Rng& rng) const {
  for (;;) {
    ExtElem r = random_elem(rng);
    if (!is_zero(r)) return r;
  }
}

std::string FieldTowerSpec::canonical_encode(const ExtElem& a) const {
  if (a.c.size() != ext_len()) throw std::invalid_argument("canonical_encode: wrong length");
  std::string out(std::size_t(ext_len()) * 8, '\0');
  for (std::size_t i = 0; i < a.c.size(); ++i) {
    u64 r = a.c[i];
    for (int b = 0; b < 8; ++b) out[i * 8 + b] = char(r >> (8 * b) & 0xff);
  }
  return out;
}

ExtElem FieldTowerSpec::canonical_decode(std::string_view bytes) const {
  if (bytes.size() != std::size_t(ext_len()) * 8)
    throw std::invalid_argument("canonical_decode: wrong length");
  ExtElem a{std::vector<u64>(ext_len())};
  for (std::size_t i = 0; i < a.c.size(); ++i) {
    u64 r = 0;
    for (int b = 7; b >= 0; --b) r = r << 8 | u64(static_cast<unsigned char>(bytes[i * 8 + b]));
    if (r >= p_) throw std::invalid_argument("canonical_decode: residue not reduced");
    a.c[i] = r;
  }
  return a;
}

FqElem FieldTowerSpec::fq_zero() const { return FqElem(v_, 0); }

FqElem FieldTowerSpec::fq_one() const {
  FqElem e(v_, 0);
  e[0] = 1;
  return e;
}

bool FieldTowerSpec::fq_is_zero(const FqElem& a) const {
  return std::all_of(a.begin(), a.end(), [](u64 x) { return x == 0; });
}

FqElem FieldTowerSpec::fq_add(const FqElem& a, const FqElem& b) const {
  FqF fq{p_, v_, phi_.data()};
  return fq.add(a, b);
}

FqElem FieldTowerSpec::fq_sub(const FqElem& a, const FqElem& b) const {
  FqF fq{p_, v_, phi_.data()};
  return fq.sub(a, b);
}

FqElem FieldTowerSpec::fq_neg(const FqElem& a) const {
  FqF fq{p_, v_, phi_.data()};
  return fq.neg(a);
}

FqElem FieldTowerSpec::fq_mul(const FqElem& a, const FqElem& b) const {
  FqF fq{p_, v_, phi_.data()};
  return fq.mul(a, b);
}

FqElem FieldTowerSpec::fq_inv(const FqElem& a) const {
  FqF fq{p_, v_, phi_.data()};
  return fq.inv(a);
}

FqElem FieldTowerSpec::fq_pow(const FqElem& a, u128 e) const {
  FqF fq{p_, v_, phi_.data()};
  FqElem r = fq.one();
  FqElem base = a;
  while (e) {
    if (e & 1) r = fq.mul(r, base);
    base = fq.mul(base, base);
    e >>= 1;
  }
  return r;
}

FqElem FieldTowerSpec::fq_from_int(u64 c) const {
  FqElem e(v_, 0);
  e[0] = c % p_;
  return e;
}

FqElem FieldTowerSpec::fq_from_residues(std::vector<u64> residues) const {
  if (residues.size() != v_) throw std::invalid_argument("fq_from_residues: wrong length");
  for (u64 r : residues)
    if (r >= p_) throw std::invalid_argument("fq_from_residues: residue not reduced");
  return residues;
}

FqElem FieldTowerSpec::fq_random_elem(Rng& rng) const {
  FqElem r(v_);
  for (auto& x : r) x = rng.below(p_);
  return r;
}

FqElem FieldTowerSpec::fq_random_nonzero(Rng& rng) const {
  for (;;) {
    FqElem r = fq_random_elem(rng);
    if (!fq_is_zero(r)) return r;
  }
}

void FieldTowerSpec::ext_add_into(std::span<u64> dst, std::span<const u64> a,
                                  std::span<const u64> b) const {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = addmod(a[i], b[i], p_);
}

void FieldTowerSpec::ext_sub_into(std::span<u64> dst, std::span<const u64> a,
                                  std::span<const u64> b) const {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = submod(a[i], b[i], p_);
}

void FieldTowerSpec::ext_neg_into(std::span<u64> dst, std::span<const u64> a) const {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = a[i] == 0 ? 0 : p_ - a[i];
}

bool FieldTowerSpec::span_is_zero(std::span<const u64> a) const {
  for (u64 x : a)
    if (x) return false;
  return true;
}

// acc += a * b.  Layout of scratch: the unreduced product as 2u-1 blocks of
// 2v-1 slots, then one 2v-1 slot temporary for psi-reduction products.
void FieldTowerSpec::ext_mul_acc(std::span<u64> acc, std::span<const u64> a,
                                 std::span<const u64> b, std::vector<u64>& scratch) const {
  const u32 u = u_, v = v_;
  const u64 p = p_;
  if (u == 1 && v == 1) {
    acc[0] = addmod(acc[0], mulmod(a[0], b[0], p), p);
    return;
  }
  const std::size_t bw = 2 * std::size_t(v) - 1;       // unreduced block width
  const std::size_t nblocks = 2 * std::size_t(u) - 1;
  scratch.assign(nblocks * bw + 3 * std::size_t(v), 0);  // + room for one fq product and its temp
  u64* t = scratch.data();
  u64* fqtmp = scratch.data() + nblocks * bw;
  for (u32 i = 0; i < u; ++i)
    for (u32 ai = 0; ai < v; ++ai) {
      u64 av = a[std::size_t(i) * v + ai];
      if (av == 0) continue;
      for (u32 j = 0; j < u; ++j) {
        u64* blk = t + (std::size_t(i) + j) * bw + ai;
        const u64* bj = b.data() + std::size_t(j) * v;
        for (u32 bi = 0; bi < v; ++bi) blk[bi] = addmod(blk[bi], mulmod(av, bj[bi], p), p);
      }
    }
  for (std::size_t k = 0; k < nblocks; ++k) phi_reduce_raw(t + k * bw, bw, phi_.data(), v, p);
  // y-degree reduction by monic psi
  for (std::size_t k = nblocks; k-- > u;) {
    u64* ck = t + k * bw;
    bool zero = true;
    for (u32 i = 0; i < v; ++i)
      if (ck[i]) {
        zero = false;
        break;
      }
    if (zero) continue;
    for (u32 j = 0; j < u; ++j) {
      if (fq_is_zero(psi_[j])) continue;
      fq_mul_raw(fqtmp, ck, psi_[j].data(), phi_.data(), v, p, fqtmp + v);
      u64* blk = t + (k - u + j) * bw;
      for (u32 i = 0; i < v; ++i) blk[i] = submod(blk[i], fqtmp[i], p);
    }
    std::fill(ck, ck + v, 0);
  }
  for (u32 k = 0; k < u; ++k)
    for (u32 i = 0; i < v; ++i)
      acc[std::size_t(k) * v + i] = addmod(acc[std::size_t(k) * v + i], t[std::size_t(k) * bw + i], p);
}

std::string FieldTowerSpec::serialize() const {
  std::ostringstream os;
  os << p_ << '^' << v_ << ':' << u_ << ':';
  for (u32 i = 0; i <= v_; ++i) {
    if (i) os << ',';
    os << phi_[i];
  }
  os << ':';
  for (u32 k = 0; k <= u_; ++k) {
    if (k) os << ',';
    for (u32 i = 0; i < v_; ++i) {
      if (i) os << '.';
      os << psi_[k][i];
    }
  }
  return os.str();
}

namespace {

std::vector<std::string_view> split_on(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      parts.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return parts;
}

u64 parse_u64(std::string_view s, const char* what) {
  if (s.empty()) throw std::invalid_argument(std::string(what) + ": empty number");
  u64 value = 0;
  for (char ch : s) {
    if (ch < '0' || ch > '9') throw std::invalid_argument(std::string(what) + ": invalid digit");
    u64 d = u64(ch - '0');
    if (value > (~u64(0) - d) / 10) throw std::invalid_argument(std::string(what) + ": overflow");
    value = value * 10 + d;
  }
  return value;
}

}  // namespace

FieldTowerSpec FieldTowerSpec::deserialize(std::string_view text) {
  auto parts = split_on(text, ':');
  if (parts.size() != 4) throw std::invalid_argument("field spec: expected p^v:u:phi:psi");
  auto head = split_on(parts[0], '^');
  if (head.size() != 2) throw std::invalid_argument("field spec: expected p^v");
  u64 p = parse_u64(head[0], "field spec p");
  u64 v = parse_u64(head[1], "field spec v");
  u64 u = parse_u64(parts[1], "field spec u");
  if (v == 0 || u == 0 || v > 1u << 16 || u > 1u << 16)
    throw std::invalid_argument("field spec: bad degrees");
  std::vector<u64> phi;
  for (auto c : split_on(parts[2], ',')) phi.push_back(parse_u64(c, "field spec phi"));
  if (phi.size() != v + 1) throw std::invalid_argument("field spec: phi degree mismatch");
  std::vector<FqElem> psi;
  for (auto c : split_on(parts[3], ',')) {
    FqElem e;
    for (auto r : split_on(c, '.')) e.push_back(parse_u64(r, "field spec psi"));
    if (e.size() != v) throw std::invalid_argument("field spec: psi coefficient length mismatch");
    psi.push_back(std::move(e));
  }
  if (psi.size() != u + 1) throw std::invalid_argument("field spec: psi degree mismatch");

  FieldTowerSpec t;
  PrimeFieldSpec{p};
  t.p_ = p;
  t.v_ = u32(v);
  t.u_ = u32(u);
  for (u64 c : phi)
    if (c >= p) throw std::invalid_argument("field spec: phi residue not reduced");
  if (phi.back() != 1) throw std::invalid_argument("field spec: phi must be monic");
  ZpF zp{p};
  Poly<ZpF> phip(phi.begin(), phi.end());
  if (!p_is_irreducible_monic(phip, p, 1, zp))
    throw std::invalid_argument("field spec: phi is not irreducible");
  t.phi_ = std::move(phi);
  t.init_layout();
  for (const auto& c : psi)
    for (u64 r : c)
      if (r >= p) throw std::invalid_argument("field spec: psi residue not reduced");
  if (u > 1) {
    FqF fq{t.p_, t.v_, t.phi_.data()};
    Poly<FqF> psip(psi.begin(), psi.end());
    if (!p_is_irreducible_monic(psip, t.p_, t.v_, fq))
      throw std::invalid_argument("field spec: psi is not irreducible");
  }
  t.psi_ = std::move(psi);
  t.validate();
  return t;
}

FieldTowerSpec make_tower(u64 p, u32 v, u32 u, Rng& rng) { return FieldTowerSpec(p, v, u, rng); }

bool is_irreducible(const std::vector<FqElem>& f, const FieldTowerSpec& tower) {
  for (const auto& c : f) {
    if (c.size() != tower.v()) throw std::invalid_argument("is_irreducible: coefficient length mismatch");
    for (u64 r : c)
      if (r >= tower.p()) throw std::invalid_argument("is_irreducible: residue not reduced");
  }
  FqF fq{tower.p(), tower.v(), tower.phi().data()};
  Poly<FqF> fp(f.begin(), f.end());
  p_trim(fp, fq);
  if (p_deg(fp) <= 0) return false;
  if (!fq.eq(fp.back(), fq.one())) {
    auto li = fq.inv(fp.back());
    for (auto& c : fp) c = fq.mul(c, li);
  }
  return p_is_irreducible_monic(fp, tower.p(), tower.v(), fq);
}

}  // namespace slpi
