#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "slpinterp/ff.hpp"
#include "slpinterp/linalg.hpp"
#include "slpinterp/primes.hpp"
#include "slpinterp/rng.hpp"
#include "slpinterp/slp.hpp"
#include "slpinterp/sparse_poly.hpp"

namespace slpi {

// Base field F_q given as p^v.  phi (length v+1, monic, irreducible) pins
// the representation of F_q; when empty and v > 1, one is drawn at the
// start of the run.  Majority voting needs comparable coefficients, so the
// meta layer resolves phi once and shares it across runs.
struct FieldSpec {
  u64 p = 0;
  u32 v = 1;
  std::vector<u64> phi;
  u64 q() const;  // p^v, validated < 2^62
};

// Per-run random draws, in the fixed order primes, then substitution
// vectors row-major (prime-major, then image, then coordinate), then
// diversifiers (vector-major, then coordinate).  A seed therefore pins the
// whole run.
struct RandomChoices {
  PrimeDraw primes;                         // m primes
  std::vector<std::vector<std::vector<u64>>> subs;  // [m][n] rows of length n, entries mod p_i
  std::vector<std::vector<ExtElem>> diversifiers;   // [s][n] nonzero tower elements
};

RandomChoices make_random_choices(const ParamSet& params, u32 n, const FieldTowerSpec& tower,
                                  Rng& rng);

// Ordered dictionary with deterministic (byte-lexicographic) iteration and
// O(log size) key lookup.  Keys are canonical encodings; values accumulate
// per key in append order.
template <typename Value>
class Dictionary {
 public:
  void append_to(std::string_view key, Value value) {
    items_[std::string(key)].push_back(std::move(value));
  }
  const std::map<std::string, std::vector<Value>, std::less<>>& get_items() const { return items_; }
  std::size_t size() const { return items_.size(); }

 private:
  std::map<std::string, std::vector<Value>, std::less<>> items_;
};

// Keys are the concatenated canonical encodings of (b_0, b_1..b_s); values
// are image degrees in image order (j = 1..n).
using TermDictionary = Dictionary<u64>;

// Probes the n*(s+1) univariate images of prime i and groups image terms by
// coefficient fingerprint.
TermDictionary build_term_dictionary(const Slp& slp, const RandomChoices& choices, u32 prime_index,
                                     const FieldTowerSpec& tower);

struct Congruence {
  u64 prime = 0;
  std::vector<u64> residues;  // length n, entries < prime
  bool operator==(const Congruence&) const = default;
};

// Keys whose degree vector has exactly n entries give one congruence
// e = v_inv * d mod p each (batched through solve_block); other keys are
// collision artifacts and are skipped.
std::vector<std::pair<std::string, std::vector<u64>>> recover_congruences(
    const TermDictionary& dict, const MatModP& v_inv, u64 prime);

// Congruences grouped by coefficient fingerprint, at most one per
// (key, prime); appending a second congruence for the same prime throws
// std::logic_error.
class CongruenceStore {
 public:
  void append(std::string_view key, Congruence congruence);
  const std::map<std::string, std::vector<Congruence>, std::less<>>& get_items() const {
    return store_.get_items();
  }

 private:
  Dictionary<Congruence> store_;
};

// Componentwise CRT over the congruences' primes: the unique e with
// 0 <= e_j < prod(p_i).  Returns nullopt when any coordinate lands at or
// above degree_bound (a collision artifact, not an error).  Duplicate
// primes in the input are a caller bug: std::invalid_argument.
std::optional<std::vector<u64>> crt_exponent(std::span<const Congruence> congruences, u32 n,
                                             u64 degree_bound);

struct EngineOptions {
  u32 threads = 1;
  // Test hook: overrides the derived diversifier count (0 disables
  // diversification so only b_0 distinguishes terms).
  std::optional<u32> override_s;
};

struct InterpolateStats {
  ParamSet params;
  std::string field_spec;    // serialized tower used for the run
  u32 invertible_primes = 0;
  u32 singular_primes = 0;
  u64 probe_count = 0;       // m * n * (s+1)
};

struct InterpolateResult {
  SparsePolynomial poly;
  InterpolateStats stats;
};

// One Monte Carlo run.  Never raises on probabilistic failure: the result
// is simply whatever polynomial the congruence evidence supports (possibly
// wrong or incomplete, with probability <= 1/4 when T >= t and D bounds the
// partial degrees).
InterpolateResult sparse_interpolate(const Slp& slp, u32 n, u64 degree_bound, u32 term_bound,
                                     const FieldSpec& field, Rng& rng,
                                     const EngineOptions& options = {});

struct MetaResult {
  std::optional<SparsePolynomial> majority;  // empty = no-majority failure
  u32 runs = 0;
  u32 majority_votes = 0;
  std::vector<bool> run_matched;  // per run, whether it produced the majority output
  InterpolateStats stats;         // from the first run (all runs share parameters)
};

// ceil(8*ln(1/epsilon)) independent runs on split RNG streams; returns the
// output occurring in more than half of them, or a no-majority result.
MetaResult meta_interpolate(const Slp& slp, u32 n, u64 degree_bound, u32 term_bound,
                            const FieldSpec& field, double epsilon, Rng& rng,
                            const EngineOptions& options = {});

u32 meta_run_count(double epsilon);

}  // namespace slpi
