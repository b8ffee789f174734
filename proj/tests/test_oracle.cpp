#include <set>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "doctest.h"
#include "slpinterp/engine.hpp"
#include "slpinterp/errors.hpp"
#include "slpinterp/oracle.hpp"
#include "slpinterp/rng.hpp"
#include "slpinterp/sparse_poly.hpp"
#include "test_util.hpp"

using namespace slpi;
using test::WorkedExample;
using test::prime_tower;

namespace {

using RefPair = std::pair<std::tuple<std::size_t, std::size_t, u64>,
                          std::tuple<std::size_t, std::size_t, u64>>;

std::set<RefPair> as_tuples(const std::vector<std::pair<ImageTermRef, ImageTermRef>>& pairs) {
  std::set<RefPair> out;
  for (const auto& [a, b] : pairs)
    out.insert({{a.prime_index, a.image_index, a.degree},
                {b.prime_index, b.image_index, b.degree}});
  return out;
}

}  // namespace

TEST_CASE("expansion goldens") {
  WorkedExample ex;
  CHECK(brute_force_expand(slp_from_sparse(ex.f, ex.field), 2, ex.field) == ex.f);

  // characteristic-2 cancellation
  Rng trng(5);
  FieldTowerSpec f2(2, 1, 1, trng);
  CHECK(brute_force_expand(parse_slp("b1 = z1 + z1"), 1, f2, {}).is_zero());

  // squaring a sum expands the cross term
  FieldTowerSpec f13 = prime_tower(13);
  SparsePolynomial square = SparsePolynomial::from_terms(
      2, {Term{{1}, {2, 0}}, Term{{2}, {1, 1}}, Term{{1}, {0, 2}}}, f13);
  CHECK(brute_force_expand(parse_slp("b1 = z1 + z2\nb2 = b1 * b1"), 2, f13) == square);

  // constants fold; extra variables widen the arity
  SparsePolynomial five = SparsePolynomial::from_terms(3, {Term{{5}, {0, 0, 0}}}, f13);
  CHECK(brute_force_expand(parse_slp("b1 = z1 * 0\nb2 = b1 + 5"), 3, f13) == five);

  CHECK_THROWS_AS(brute_force_expand(parse_slp("b1 = z1 + z2"), 1, f13),
                  std::invalid_argument);  // n below program arity
}

TEST_CASE("expansion caps are hard limits") {
  FieldTowerSpec f13 = prime_tower(13);

  // (z1 + 1)^16 has 17 terms over F_101 (the characteristic exceeds 16, so
  // no binomial coefficient vanishes)
  FieldTowerSpec f101 = prime_tower(101);
  Slp wide = parse_slp(
      "b1 = z1 + 1\nb2 = b1 * b1\nb3 = b2 * b2\nb4 = b3 * b3\nb5 = b4 * b4");
  ExpansionCap two_terms;
  two_terms.max_terms = 16;
  CHECK_THROWS_AS(brute_force_expand(wide, 1, f101, two_terms), ResourceError);
  ExpansionCap enough;
  enough.max_terms = 17;
  CHECK(brute_force_expand(wide, 1, f101, enough).terms().size() == 17);

  // z1^16 exceeds a degree cap of 15
  Slp tall = parse_slp("b1 = z1 * z1\nb2 = b1 * b1\nb3 = b2 * b2\nb4 = b3 * b3");
  ExpansionCap low_degree;
  low_degree.max_degree = 15;
  CHECK_THROWS_AS(brute_force_expand(tall, 1, f13, low_degree), ResourceError);

  // the default degree cap stops runaway squaring towers
  std::string text;
  text += "b1 = z1 * z1\n";
  for (int k = 2; k <= 33; ++k)
    text += "b" + std::to_string(k) + " = b" + std::to_string(k - 1) + " * b" +
            std::to_string(k - 1) + "\n";
  CHECK_THROWS_AS(brute_force_expand(parse_slp(text), 1, f13, {}), ResourceError);
}

TEST_CASE("exponent reduction goldens") {
  WorkedExample ex;
  SparsePolynomial mod5 = SparsePolynomial::from_terms(
      2, {Term{{2}, {1, 1}}, Term{{2}, {4, 0}}, Term{{4}, {3, 0}}}, ex.field);
  CHECK(reduce_mod_ideal(ex.f, 5, ex.field) == mod5);

  SparsePolynomial mod7 = SparsePolynomial::from_terms(
      2,
      {Term{{1}, {1, 1}}, Term{{1}, {6, 6}}, Term{{2}, {4, 3}}, Term{{4}, {3, 6}}},
      ex.field);
  CHECK(reduce_mod_ideal(ex.f, 7, ex.field) == mod7);

  // a modulus above every exponent changes nothing
  CHECK(reduce_mod_ideal(ex.f, 23, ex.field) == ex.f);
  // idempotent
  CHECK(reduce_mod_ideal(mod5, 5, ex.field) == mod5);
  // zero input, zero output
  CHECK(reduce_mod_ideal(SparsePolynomial(2), 5, ex.field).is_zero());
}

TEST_CASE("point evaluation goldens") {
  WorkedExample ex;
  CHECK(evaluate_at(ex.f, ex.ones, ex.field) == ExtElem{{8}});
  std::vector<ExtElem> origin{ex.field.zero(), ex.field.zero()};
  CHECK(evaluate_at(ex.f, origin, ex.field) == ex.field.zero());
  CHECK(evaluate_at(SparsePolynomial(2), ex.ones, ex.field) == ex.field.zero());
}

TEST_CASE("substitution images reproduce the worked example") {
  WorkedExample ex;
  auto image = [&](const std::vector<ExtElem>& a, const std::vector<u64>& v, u64 p) {
    return ex.image_of(apply_substitution(ex.f, a, v, p, ex.field));
  };
  CHECK(image(ex.ones, {4, 1}, 5) == ex.f11);
  CHECK(image(ex.ones, {2, 0}, 5) == ex.f12);
  CHECK(image(ex.ones, {2, 4}, 7) == ex.f21);
  CHECK(image(ex.ones, {1, 6}, 7) == ex.f22);
  CHECK(image(ex.a1, {4, 1}, 5) == ex.f111);
  CHECK(image(ex.a1, {2, 0}, 5) == ex.f121);
  CHECK(image(ex.a1, {2, 4}, 7) == ex.f211);
  CHECK(image(ex.a1, {1, 6}, 7) == ex.f221);

  std::vector<u64> v{4, 1};
  CHECK(apply_substitution(SparsePolynomial(2), ex.a1, v, 5, ex.field).is_zero());
  std::vector<ExtElem> short_a{ExtElem{{1}}};
  CHECK_THROWS_AS(apply_substitution(ex.f, short_a, v, 5, ex.field),
                  std::invalid_argument);
}

TEST_CASE("reducing exponents first preserves undiversified images") {
  // with unit multipliers only the degrees matter, and they agree mod p
  FieldTowerSpec f13 = prime_tower(13);
  Rng rng(59);
  for (int i = 0; i < 200; ++i) {
    u32 n = 1 + u32(rng.below(3));
    SparsePolynomial f = random_sparse_polynomial(n, 500, 1 + u32(rng.below(6)), f13, rng);
    u64 p = 5 + 2 * rng.below(30);
    if (!is_prime(p)) p = 11;
    std::vector<ExtElem> ones(n, f13.one());
    std::vector<u64> v;
    for (u32 j = 0; j < n; ++j) v.push_back(rng.below(p));
    CHECK(apply_substitution(reduce_mod_ideal(f, p, f13), ones, v, p, f13) ==
          apply_substitution(f, ones, v, p, f13));
  }
}

TEST_CASE("probe agrees with the oracle over an extension tower") {
  Rng trng(61);
  FieldTowerSpec t(5, 1, 2, trng);  // F_25 over F_5
  Rng rng(67);
  for (int i = 0; i < 60; ++i) {
    u32 n = 1 + u32(rng.below(2));
    SparsePolynomial f = random_sparse_polynomial(n, 100, 1 + u32(rng.below(5)), t, rng);
    Slp slp = slp_from_sparse(f, t);
    u64 p = 7;
    std::vector<ExtElem> a;
    std::vector<u64> v;
    for (u32 j = 0; j < n; ++j) {
      a.push_back(t.random_nonzero(rng));
      v.push_back(rng.below(p));
    }
    CHECK(probe_image(slp, a, v, p, t) == apply_substitution(f, a, v, p, t));
  }
}

TEST_CASE("deceptive pairs in the worked example") {
  WorkedExample ex;
  RandomChoices choices{ex.primes, ex.subs, {ex.a1}};

  // Without diversification one coefficient group is deceptive: the images
  // of {z1 z2 + z1^6 z2^6} and of {2 z1^4 z2^10} share the coefficient 2.
  // Three image terms of each kind give nine unrevealed pairs.
  auto pairs = find_deceptive_pairs(ex.f, choices, 0, ex.field);
  CHECK(pairs.size() == 9);
  std::set<RefPair> got = as_tuples(pairs);
  REQUIRE(got.size() == 9);
  // the flagship pair: constant term of the first image of prime 5 vs the
  // degree-1 term of the second image of prime 7
  CHECK(got.count({{0, 0, 0}, {1, 1, 1}}) == 1);
  // merged-pair terms: (prime, image, degree, subset) with b0 = 2:
  // pair terms {0,0,0},{0,1,2},{1,1,0} image the first two terms of f and
  // {0,0,1},{0,1,3},{1,1,1} image the third; all cross pairs are deceptive
  std::set<RefPair> expected;
  std::vector<std::tuple<std::size_t, std::size_t, u64>> merged{
      {0, 0, 0}, {0, 1, 2}, {1, 1, 0}};
  std::vector<std::tuple<std::size_t, std::size_t, u64>> lone{
      {0, 0, 1}, {0, 1, 3}, {1, 1, 1}};
  for (const auto& a : merged)
    for (const auto& b : lone) expected.insert(a < b ? RefPair{a, b} : RefPair{b, a});
  std::set<RefPair> got_norm;
  for (const RefPair& pr : got)
    got_norm.insert(pr.first < pr.second ? pr : RefPair{pr.second, pr.first});
  CHECK(got_norm == expected);

  // the diversifier (6, 8) separates the two subsets, revealing every pair
  CHECK(find_deceptive_pairs(ex.f, choices, 1, ex.field).empty());

  CHECK_THROWS_AS(find_deceptive_pairs(ex.f, choices, 2, ex.field),
                  std::invalid_argument);  // more diversifiers than drawn
}

TEST_CASE("polynomials without coefficient repeats have no deceptive pairs") {
  // two terms with coefficients 1 and 2: merged image terms have coefficient
  // 3, so no two image terms of different subsets can agree
  FieldTowerSpec f13 = prime_tower(13);
  SparsePolynomial f = SparsePolynomial::from_terms(
      2, {Term{{1}, {3, 1}}, Term{{2}, {0, 2}}}, f13);
  ParamSet params = compute_params(2, 8, 2, 13);
  Rng rng(71);
  for (int i = 0; i < 50; ++i) {
    RandomChoices choices = make_random_choices(params, 2, f13, rng);
    CHECK(find_deceptive_pairs(f, choices, 0, f13).empty());
  }
  // a single term has no pairs at all
  SparsePolynomial mono = SparsePolynomial::from_terms(2, {Term{{5}, {1, 2}}}, f13);
  Rng rng2(73);
  RandomChoices choices = make_random_choices(params, 2, f13, rng2);
  CHECK(find_deceptive_pairs(mono, choices, 0, f13).empty());
}

TEST_CASE("exponent collisions are as rare as the prime interval promises") {
  // random 8-term supports with exponents below 2^16 in two variables;
  // fraction of (term, prime) incidences where another term agrees
  // entrywise mod the prime must stay within 1/40 + 3 sigma
  FieldTowerSpec f101 = prime_tower(101);
  ParamSet params = compute_params(2, u64{1} << 16, 8, 101);
  Rng rng(79);
  const int draws = 1000;
  long long incidences = 0, collided = 0;
  for (int d = 0; d < draws; ++d) {
    SparsePolynomial f = random_sparse_polynomial(2, u64{1} << 16, 8, f101, rng);
    PrimeDraw primes = draw_primes(params, rng);
    const auto& terms = f.terms();
    for (u64 p : primes) {
      for (std::size_t l = 0; l < terms.size(); ++l) {
        ++incidences;
        for (std::size_t o = 0; o < terms.size(); ++o) {
          if (o == l) continue;
          bool same = true;
          for (u32 j = 0; j < 2; ++j)
            same = same && terms[l].exps[j] % p == terms[o].exps[j] % p;
          if (same) {
            ++collided;
            break;
          }
        }
      }
    }
  }
  double rate = double(collided) / double(incidences);
  double bound = 1.0 / 40.0 + test::three_sigma(1.0 / 40.0, double(incidences));
  INFO("collided ", collided, " of ", incidences, " rate ", rate);
  CHECK(rate <= bound);
}

TEST_CASE("terms survive the substitution stage at the promised rate") {
  // joint event per (term, prime): the substitution matrix is invertible
  // and the term collides in none of the n univariate images
  FieldTowerSpec f101 = prime_tower(101);
  ParamSet params = compute_params(2, u64{1} << 16, 8, 101);
  Rng rng(83);
  const int draws = 1000;
  long long incidences = 0, good = 0;
  for (int d = 0; d < draws; ++d) {
    SparsePolynomial f = random_sparse_polynomial(2, u64{1} << 16, 8, f101, rng);
    RandomChoices choices = make_random_choices(params, 2, f101, rng);
    const auto& terms = f.terms();
    for (u32 i = 0; i < params.m; ++i) {
      u64 p = choices.primes[i];
      bool invertible = invert(MatModP::from_rows(p, choices.subs[i])).has_value();
      std::vector<std::vector<u64>> degree(2, std::vector<u64>(terms.size()));
      for (u32 j = 0; j < 2; ++j)
        for (std::size_t l = 0; l < terms.size(); ++l) {
          u128 acc = 0;
          for (u32 k = 0; k < 2; ++k)
            acc += u128(choices.subs[i][j][k]) * (terms[l].exps[k] % p) % p;
          degree[j][l] = u64(acc % p);
        }
      for (std::size_t l = 0; l < terms.size(); ++l) {
        ++incidences;
        if (!invertible) continue;
        bool clean = true;
        for (u32 j = 0; j < 2 && clean; ++j)
          for (std::size_t o = 0; o < terms.size() && clean; ++o)
            if (o != l && degree[j][o] == degree[j][l]) clean = false;
        if (clean) ++good;
      }
    }
  }
  double rate = double(good) / double(incidences);
  double floor_rate = 19.0 / 20.0 - 1.0 / 40.0;
  double bound = floor_rate - test::three_sigma(floor_rate, double(incidences));
  INFO("clean ", good, " of ", incidences, " rate ", rate);
  CHECK(rate >= bound);
}

TEST_CASE("full diversification reveals almost every deceptive pair") {
  // base field small enough that coefficient repeats are the norm; the
  // drawn diversifier count must leave no unrevealed pair in all but a
  // 1/40 fraction of trials
  Rng trng(89);
  ParamSet params = compute_params(2, 256, 8, 13);
  REQUIRE(params.s >= 21);
  REQUIRE(params.u >= 2);  // diversifiers range over a proper extension
  FieldTowerSpec tower(13, 1, params.u, trng);
  Rng rng(97);
  const int trials = 1000;
  int clean = 0;
  for (int i = 0; i < trials; ++i) {
    SparsePolynomial f = random_sparse_polynomial(2, 256, 8, tower, rng);
    RandomChoices choices = make_random_choices(params, 2, tower, rng);
    if (find_deceptive_pairs(f, choices, params.s, tower).empty()) ++clean;
  }
  double rate = double(clean) / trials;
  double floor_rate = 1.0 - 1.0 / 40.0;
  double bound = floor_rate - test::three_sigma(floor_rate, trials);
  INFO("clean ", clean, " of ", trials);
  CHECK(rate >= bound);
}
