#include "slpinterp/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string_view>
#include <thread>
#include <utility>

#include "slpinterp/errors.hpp"

namespace slpi {

namespace {

u64 submod(u64 a, u64 b, u64 p) { return a >= b ? a - b : a + (p - b); }

u64 mulmod(u64 a, u64 b, u64 p) { return static_cast<u64>(u128(a) * b % p); }

u64 invmod(u64 a, u64 p, const char* context) {
  std::int64_t t = 0, new_t = 1;
  std::int64_t r = static_cast<std::int64_t>(p), new_r = static_cast<std::int64_t>(a % p);
  while (new_r != 0) {
    std::int64_t quot = r / new_r;
    t = std::exchange(new_t, t - quot * new_t);
    r = std::exchange(new_r, r - quot * new_r);
  }
  if (r != 1) throw std::domain_error(std::string(context) + ": modulus pair not coprime");
  if (t < 0) t += static_cast<std::int64_t>(p);
  return static_cast<u64>(t);
}

// Runs fn(0), .., fn(count-1), each exactly once; with threads > 1 the
// indices are distributed over a small pool.  fn must write only to its own
// index's slot so the outcome is independent of the thread count.
template <typename Fn>
void parallel_for(std::size_t count, u32 threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::size_t workers = std::min<std::size_t>(threads, count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

u64 FieldSpec::q() const {
  PrimeFieldSpec{p};
  if (v == 0) throw std::invalid_argument("field: extension degree v must be >= 1");
  if (!phi.empty() && phi.size() != std::size_t(v) + 1)
    throw std::invalid_argument("field: phi degree differs from v");
  u128 acc = 1;
  for (u32 i = 0; i < v; ++i) {
    acc *= p;
    if (acc >= (u128{1} << 62)) throw std::invalid_argument("field: q = p^v must be < 2^62");
  }
  return static_cast<u64>(acc);
}

RandomChoices make_random_choices(const ParamSet& params, u32 n, const FieldTowerSpec& tower,
                                  Rng& rng) {
  if (n != params.n) throw std::invalid_argument("random choices: arity differs from parameters");
  RandomChoices out;
  out.primes = draw_primes(params, rng);
  out.subs.resize(params.m);
  for (u32 i = 0; i < params.m; ++i) {
    out.subs[i].assign(n, std::vector<u64>(n, 0));
    for (u32 j = 0; j < n; ++j)
      for (u32 k = 0; k < n; ++k) out.subs[i][j][k] = rng.below(out.primes[i]);
  }
  out.diversifiers.resize(params.s);
  for (u32 k = 0; k < params.s; ++k) {
    out.diversifiers[k].reserve(n);
    for (u32 j = 0; j < n; ++j) out.diversifiers[k].push_back(tower.random_nonzero(rng));
  }
  return out;
}

TermDictionary build_term_dictionary(const Slp& slp, const RandomChoices& choices, u32 prime_index,
                                     const FieldTowerSpec& tower) {
  if (prime_index >= choices.primes.size())
    throw std::invalid_argument("term dictionary: prime index out of range");
  u64 p = choices.primes[prime_index];
  const auto& rows = choices.subs[prime_index];
  u32 n = static_cast<u32>(rows.size());
  u32 s = static_cast<u32>(choices.diversifiers.size());
  std::vector<ExtElem> ones(n, tower.one());
  TermDictionary dict;
  std::string key;
  for (u32 j = 0; j < n; ++j) {
    // s+1 univariate images sharing the substitution row: the plain one
    // first, then one per diversifier vector.
    std::vector<CyclicPoly> images;
    images.reserve(s + 1);
    images.push_back(probe_image(slp, ones, rows[j], p, tower));
    for (u32 k = 0; k < s; ++k)
      images.push_back(probe_image(slp, choices.diversifiers[k], rows[j], p, tower));
    std::set<u64> degrees;
    for (const CyclicPoly& img : images)
      for (const auto& [d, c] : img.nonzero_terms()) degrees.insert(d);
    for (u64 d : degrees) {
      key.clear();
      for (const CyclicPoly& img : images) key += tower.canonical_encode(img.coeff_at(d));
      dict.append_to(key, d);
    }
  }
  return dict;
}

std::vector<std::pair<std::string, std::vector<u64>>> recover_congruences(
    const TermDictionary& dict, const MatModP& v_inv, u64 prime) {
  if (v_inv.p != prime) throw std::invalid_argument("congruences: inverse is over a different prime");
  std::vector<std::pair<std::string, std::vector<u64>>> out;
  std::vector<ResidueVec> ds;
  for (const auto& [key, degrees] : dict.get_items()) {
    if (degrees.size() != v_inv.n) continue;  // term collided in some image
    ds.push_back(ResidueVec{prime, degrees});
    out.emplace_back(key, std::vector<u64>{});
  }
  std::vector<ResidueVec> es = solve_block(v_inv, ds);
  for (std::size_t i = 0; i < es.size(); ++i) out[i].second = std::move(es[i].r);
  return out;
}

void CongruenceStore::append(std::string_view key, Congruence congruence) {
  auto it = store_.get_items().find(key);
  if (it != store_.get_items().end()) {
    for (const Congruence& c : it->second)
      if (c.prime == congruence.prime)
        throw std::logic_error("congruence store: second congruence for one prime");
  }
  store_.append_to(key, std::move(congruence));
}

std::optional<std::vector<u64>> crt_exponent(std::span<const Congruence> congruences, u32 n,
                                             u64 degree_bound) {
  if (congruences.empty()) throw std::invalid_argument("crt: no congruences");
  if (degree_bound == 0) throw std::invalid_argument("crt: degree bound must be positive");
  std::set<u64> seen;
  for (const Congruence& c : congruences) {
    if (c.prime < 2) throw std::invalid_argument("crt: modulus must be >= 2");
    if (c.residues.size() != n) throw std::invalid_argument("crt: residue vector arity mismatch");
    for (u64 r : c.residues)
      if (r >= c.prime) throw std::invalid_argument("crt: residue not reduced");
    if (!seen.insert(c.prime).second) throw std::invalid_argument("crt: duplicate modulus");
  }
  std::vector<u64> e(n, 0);
  for (u32 j = 0; j < n; ++j) {
    // Garner's ladder with the partial modulus kept exact only while it is
    // still <= degree_bound: any nonzero digit after that pushes the value
    // past the bound, so the key is rejected without wide arithmetic.
    u128 x = 0;
    u128 partial = 1;
    bool over = false;
    for (std::size_t i = 0; i < congruences.size(); ++i) {
      u64 p = congruences[i].prime;
      u64 partial_mod = 1;
      for (std::size_t k = 0; k < i; ++k)
        partial_mod = mulmod(partial_mod, congruences[k].prime % p, p);
      u64 digit = mulmod(submod(congruences[i].residues[j], static_cast<u64>(x % p), p),
                         invmod(partial_mod, p, "crt"), p);
      if (digit != 0) {
        if (over) return std::nullopt;
        x += partial * digit;
      }
      if (!over) {
        if (partial > u128(degree_bound) / p) over = true;
        else partial *= p;
      }
    }
    if (x >= degree_bound) return std::nullopt;
    e[j] = static_cast<u64>(x);
  }
  return e;
}

InterpolateResult sparse_interpolate(const Slp& slp, u32 n, u64 degree_bound, u32 term_bound,
                                     const FieldSpec& field, Rng& rng,
                                     const EngineOptions& options) {
  if (n == 0) throw std::invalid_argument("interpolate: need at least one variable");
  if (n < slp.arity())
    throw std::invalid_argument("interpolate: fewer variables than the program arity");
  ParamSet params = compute_params(n, degree_bound, term_bound, field.q());
  if (options.override_s) params.s = *options.override_s;

  // Draw order, all from this generator: tower (phi then psi), primes,
  // substitution rows, diversifiers.  Everything after is deterministic.
  FieldTowerSpec tower = field.phi.empty() ? FieldTowerSpec(field.p, field.v, params.u, rng)
                                           : FieldTowerSpec(field.p, field.phi, params.u, rng);

  // Largest concurrent footprint: s+1 dense images of up to 2*lambda slots.
  u128 image_bytes =
      u128(params.s + 1) * static_cast<u64>(2 * params.lambda + 1) * tower.ext_len() * 8;
  if (image_bytes > (u128(3) << 30))
    throw ResourceError("interpolate: probe images exceed the memory budget");

  RandomChoices choices = make_random_choices(params, n, tower, rng);

  struct PrimeOutcome {
    bool invertible = false;
    std::vector<std::pair<std::string, std::vector<u64>>> congruences;
  };
  std::vector<PrimeOutcome> outcomes(params.m);
  parallel_for(params.m, options.threads, [&](std::size_t i) {
    MatModP vi = MatModP::from_rows(choices.primes[i], choices.subs[i]);
    std::optional<MatModP> inv = invert(vi);
    if (!inv) return;  // substitution not invertible: this prime abstains
    outcomes[i].invertible = true;
    TermDictionary dict = build_term_dictionary(slp, choices, static_cast<u32>(i), tower);
    outcomes[i].congruences = recover_congruences(dict, *inv, choices.primes[i]);
  });

  InterpolateStats stats;
  stats.params = params;
  stats.field_spec = tower.serialize();
  stats.probe_count = u64(params.m) * n * (params.s + 1);
  CongruenceStore store;
  for (u32 i = 0; i < params.m; ++i) {
    if (!outcomes[i].invertible) {
      ++stats.singular_primes;
      continue;
    }
    ++stats.invertible_primes;
    for (auto& [key, e] : outcomes[i].congruences)
      store.append(key, Congruence{choices.primes[i], std::move(e)});
  }

  std::vector<Term> terms;
  for (const auto& [key, congs] : store.get_items()) {
    if (2 * congs.size() < params.m) continue;  // not enough prime evidence
    std::optional<std::vector<u64>> e = crt_exponent(congs, n, degree_bound);
    if (!e) continue;  // artifact: exponent at or past the degree bound
    ExtElem b0 = tower.canonical_decode(std::string_view(key).substr(0, 8 * tower.ext_len()));
    if (!tower.in_fq(b0)) continue;  // artifact: coefficient outside the base field
    terms.push_back(Term{tower.as_fq(b0), std::move(*e)});
  }
  return {SparsePolynomial::from_terms(n, std::move(terms), tower), std::move(stats)};
}

u32 meta_run_count(double epsilon) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0))
    throw std::invalid_argument("meta: epsilon must lie in (0, 1)");
  return static_cast<u32>(std::ceil(8.0 * std::log(1.0 / epsilon)));
}

MetaResult meta_interpolate(const Slp& slp, u32 n, u64 degree_bound, u32 term_bound,
                            const FieldSpec& field, double epsilon, Rng& rng,
                            const EngineOptions& options) {
  u32 r = meta_run_count(epsilon);
  // Votes compare coefficient residues, so the F_q representation must not
  // vary per run: resolve phi here when the caller left it open.
  FieldSpec resolved = field;
  if (resolved.v > 1 && resolved.phi.empty())
    resolved.phi = FieldTowerSpec(resolved.p, resolved.v, 1, rng).phi();
  std::vector<std::optional<InterpolateResult>> runs(r);
  EngineOptions inner = options;
  inner.threads = 1;  // runs parallelize at this level
  parallel_for(r, options.threads, [&](std::size_t k) {
    Rng child = rng.split(static_cast<u64>(k));
    runs[k] = sparse_interpolate(slp, n, degree_bound, term_bound, resolved, child, inner);
  });

  MetaResult out;
  out.runs = r;
  out.stats = runs[0]->stats;
  std::vector<std::string> keys(r);
  std::map<std::string, u32> votes;
  for (u32 k = 0; k < r; ++k) {
    keys[k] = format_polynomial(runs[k]->poly);
    ++votes[keys[k]];
  }
  const std::string* winner = nullptr;
  u32 best = 0;
  for (const auto& [key, count] : votes) {
    if (count > best) best = count;
    if (2 * count > r) winner = &key;
  }
  out.majority_votes = best;
  out.run_matched.assign(r, false);
  if (winner) {
    for (u32 k = 0; k < r; ++k) {
      if (keys[k] == *winner) {
        out.run_matched[k] = true;
        if (!out.majority) out.majority = runs[k]->poly;
      }
    }
  }
  return out;
}

}  // namespace slpi
