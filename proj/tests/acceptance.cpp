// Acceptance gate: prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.  Takes the CLI binary path as its only argument.

#include <sys/wait.h>

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "slpinterp/cyclic.hpp"
#include "slpinterp/engine.hpp"
#include "slpinterp/ff.hpp"
#include "slpinterp/linalg.hpp"
#include "slpinterp/oracle.hpp"
#include "slpinterp/primes.hpp"
#include "slpinterp/rng.hpp"
#include "slpinterp/slp.hpp"
#include "slpinterp/sparse_poly.hpp"
#include "test_util.hpp"

using namespace slpi;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void criterion(int idx, const std::function<std::pair<bool, std::string>()>& body) {
  bool pass = false;
  std::string detail;
  try {
    auto [p, d] = body();
    pass = p;
    detail = d;
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  std::printf("criterion %d %s: %s\n", idx, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
  va_list args;
  va_start(args, f);
  char buf[512];
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

// ----- criterion bodies -----

std::pair<bool, std::string> worked_example_images() {
  auto t0 = std::chrono::steady_clock::now();
  test::WorkedExample ex;
  Slp slp = slp_from_sparse(ex.f, ex.field);
  struct Probe {
    const std::vector<ExtElem>& a;
    const std::vector<u64>& v;
    u64 p;
    const test::WorkedExample::Image& want;
  };
  std::vector<Probe> probes{
      {ex.ones, ex.subs[0][0], 5, ex.f11},  {ex.ones, ex.subs[0][1], 5, ex.f12},
      {ex.ones, ex.subs[1][0], 7, ex.f21},  {ex.ones, ex.subs[1][1], 7, ex.f22},
      {ex.a1, ex.subs[0][0], 5, ex.f111},   {ex.a1, ex.subs[0][1], 5, ex.f121},
      {ex.a1, ex.subs[1][0], 7, ex.f211},   {ex.a1, ex.subs[1][1], 7, ex.f221},
  };
  int exact = 0;
  for (const Probe& pr : probes)
    if (ex.image_of(probe_image(slp, pr.a, pr.v, pr.p, ex.field)) == pr.want) ++exact;
  double secs = seconds_since(t0);
  bool pass = exact == 8 && secs < 1.0;
  return {pass, fmt("substitution image goldens %d/8 exact in %.3fs (limit 1s)", exact, secs)};
}

std::pair<bool, std::string> linear_algebra_goldens() {
  std::optional<MatModP> inv5 = invert(MatModP::from_rows(5, {{4, 1}, {2, 0}}));
  std::optional<MatModP> inv7 = invert(MatModP::from_rows(7, {{2, 4}, {1, 6}}));
  bool ok = inv5 && mat_vec(*inv5, std::vector<u64>{2, 1}) == std::vector<u64>{3, 0};
  ok = ok && inv7 && mat_vec(*inv7, std::vector<u64>{2, 4}) == std::vector<u64>{3, 6};
  std::vector<Congruence> congs{{5, {3, 0}}, {7, {3, 6}}};
  std::optional<std::vector<u64>> e = crt_exponent(congs, 2, 21);
  ok = ok && e && *e == std::vector<u64>{3, 20};
  return {ok, "modular solves (3,0) and (3,6), reconstruction (3,20)"};
}

double single_run_elapsed = 0.0;  // read by the runtime criterion

std::pair<bool, std::string> single_run_success_rate() {
  auto t0 = std::chrono::steady_clock::now();
  Rng gen(301);
  const int total = 200;
  int good = 0;
  for (int i = 0; i < total; ++i) {
    u32 n = u32(1 + gen.below(4));
    u64 d = 16 + gen.below(1009);
    u32 t = u32(1 + gen.below(8));
    FieldTowerSpec tower = test::prime_tower(101);
    SparsePolynomial f = random_sparse_polynomial(n, d, t, tower, gen);
    Slp slp = slp_from_sparse(f, tower);
    Rng run(Rng::mix(401, u64(i)));
    InterpolateResult res = sparse_interpolate(slp, n, d, t, FieldSpec{101, 1, {}}, run);
    if (res.poly == f) ++good;
  }
  single_run_elapsed = seconds_since(t0);
  return {good >= 140,
          fmt("single-run success %d/%d (need >= 140) in %.1fs", good, total, single_run_elapsed)};
}

std::pair<bool, std::string> majority_vote_success_rate() {
  Rng gen(303);
  const int total = 100;
  int good = 0;
  for (int i = 0; i < total; ++i) {
    u32 n = u32(1 + gen.below(2));
    u64 d = 16 + gen.below(49);
    u32 t = u32(1 + gen.below(4));
    FieldTowerSpec tower = test::prime_tower(257);
    SparsePolynomial f = random_sparse_polynomial(n, d, t, tower, gen);
    Slp slp = slp_from_sparse(f, tower);
    Rng run(Rng::mix(503, u64(i)));
    MetaResult res = meta_interpolate(slp, n, d, t, FieldSpec{257, 1, {}}, 0.05, run);
    if (res.majority && *res.majority == f) ++good;
  }
  return {good >= 90, fmt("majority-vote success %d/%d (need >= 90)", good, total)};
}

std::pair<bool, std::string> prime_supply_grid() {
  std::map<double, std::size_t> count_by_lambda;
  u64 combos = 0, short_supply = 0;
  for (u32 n = 1; n <= 8; ++n)
    for (u32 e = 4; e <= 32; ++e)
      for (u32 t = 1; t <= 64; ++t) {
        ParamSet ps = compute_params(n, u64{1} << e, t, 101);
        auto [it, fresh] = count_by_lambda.try_emplace(ps.lambda, 0);
        if (fresh) it->second = sieve_interval(ps.lambda).size();
        ++combos;
        if (it->second < ps.m) ++short_supply;
      }
  return {short_supply == 0,
          fmt("%llu grid points, %zu distinct intervals, %llu below the required prime count",
              static_cast<unsigned long long>(combos), count_by_lambda.size(),
              static_cast<unsigned long long>(short_supply))};
}

std::pair<bool, std::string> collision_rate_bounds() {
  // exponent collisions per (term, prime) incidence
  FieldTowerSpec f101 = test::prime_tower(101);
  ParamSet params = compute_params(2, u64{1} << 16, 8, 101);
  Rng rng(79);
  long long incidences = 0, collided = 0;
  for (int d = 0; d < 1000; ++d) {
    SparsePolynomial f = random_sparse_polynomial(2, u64{1} << 16, 8, f101, rng);
    PrimeDraw primes = draw_primes(params, rng);
    const auto& terms = f.terms();
    for (u64 p : primes)
      for (std::size_t l = 0; l < terms.size(); ++l) {
        ++incidences;
        for (std::size_t o = 0; o < terms.size(); ++o) {
          if (o == l) continue;
          if (terms[l].exps[0] % p == terms[o].exps[0] % p &&
              terms[l].exps[1] % p == terms[o].exps[1] % p) {
            ++collided;
            break;
          }
        }
      }
  }
  double col_rate = double(collided) / double(incidences);
  double col_limit = 1.0 / 40.0 + test::three_sigma(1.0 / 40.0, double(incidences));
  bool col_ok = col_rate <= col_limit;

  // substitution matrix singularity for p >= 23
  Rng mrng(47);
  const int mat_trials = 10000;
  int singular = 0;
  for (int i = 0; i < mat_trials; ++i) {
    std::vector<std::vector<u64>> rows(4, std::vector<u64>(4));
    for (auto& row : rows)
      for (u64& x : row) x = mrng.below(23);
    if (!invert(MatModP::from_rows(23, rows)).has_value()) ++singular;
  }
  double sing_rate = double(singular) / mat_trials;
  double sing_limit = 1.0 / 20.0 + test::three_sigma(1.0 / 20.0, mat_trials);
  bool sing_ok = sing_rate <= sing_limit;

  // unrevealed deceptive pairs after full diversification
  Rng trng(89);
  ParamSet dp = compute_params(2, 256, 8, 13);
  FieldTowerSpec tower(13, 1, dp.u, trng);
  Rng drng(97);
  const int trials = 1000;
  int clean = 0;
  for (int i = 0; i < trials; ++i) {
    SparsePolynomial f = random_sparse_polynomial(2, 256, 8, tower, drng);
    RandomChoices choices = make_random_choices(dp, 2, tower, drng);
    if (find_deceptive_pairs(f, choices, dp.s, tower).empty()) ++clean;
  }
  double unrevealed_rate = 1.0 - double(clean) / trials;
  double unrevealed_limit = 1.0 / 40.0 + test::three_sigma(1.0 / 40.0, trials);
  bool pair_ok = unrevealed_rate <= unrevealed_limit;

  return {col_ok && sing_ok && pair_ok,
          fmt("exponent collisions %.4f <= %.4f, singular matrices %.4f <= %.4f, "
              "unrevealed pairs %.4f <= %.4f",
              col_rate, col_limit, sing_rate, sing_limit, unrevealed_rate, unrevealed_limit)};
}

std::pair<bool, std::string> probe_oracle_equivalence() {
  Rng trng(11);
  FieldTowerSpec ext13(13, 1, 2, trng);
  FieldTowerSpec f101 = test::prime_tower(101);
  const u64 pool[] = {5, 7, 11, 13, 17, 19, 23, 29};
  Rng gen(701);
  int checked = 0, agreed = 0;
  bool expand_ok = true;
  for (int i = 0; i < 100; ++i) {
    const FieldTowerSpec& tower = (i % 2 == 0) ? ext13 : f101;
    u32 n = u32(1 + gen.below(3));
    u64 d = 2 + gen.below(31);
    u64 cap = 1;
    for (u32 j = 0; j < n && cap < 6; ++j) cap *= d;
    u32 t = u32(1 + gen.below(std::min<u64>(6, cap)));
    SparsePolynomial f = random_sparse_polynomial(n, d, t, tower, gen);
    Slp slp = slp_from_sparse(f, tower);
    SparsePolynomial expanded = brute_force_expand(slp, n, tower, ExpansionCap{});
    expand_ok = expand_ok && expanded == f;
    for (int k = 0; k < 20; ++k) {
      u64 p = pool[gen.below(8)];
      std::vector<u64> v(n);
      for (u64& x : v) x = gen.below(p);
      std::vector<ExtElem> a(n);
      for (ExtElem& x : a) x = tower.random_nonzero(gen);
      ++checked;
      if (probe_image(slp, a, v, p, tower) == apply_substitution(expanded, a, v, p, tower))
        ++agreed;
    }
  }
  return {expand_ok && agreed == checked,
          fmt("probe/oracle agreement %d/%d images across 100 programs", agreed, checked)};
}

std::pair<bool, std::string> algebra_property_suites() {
  Rng rng(801);
  bool ok = true;

  // field axioms and the a^(q^u) = a identity over four towers
  struct Cfg {
    u64 p;
    u32 v, u;
  };
  for (Cfg cfg : {Cfg{13, 1, 1}, Cfg{5, 2, 2}, Cfg{2, 1, 3}, Cfg{7, 3, 1}}) {
    FieldTowerSpec tw(cfg.p, cfg.v, cfg.u, rng);
    u128 order = 1;
    for (u32 i = 0; i < tw.u(); ++i) order *= tw.q();
    for (int i = 0; i < 150; ++i) {
      ExtElem a = tw.random_elem(rng), b = tw.random_elem(rng), c = tw.random_elem(rng);
      ok = ok && tw.add(a, b) == tw.add(b, a);
      ok = ok && tw.add(tw.add(a, b), c) == tw.add(a, tw.add(b, c));
      ok = ok && tw.mul(a, b) == tw.mul(b, a);
      ok = ok && tw.mul(tw.mul(a, b), c) == tw.mul(a, tw.mul(b, c));
      ok = ok && tw.mul(a, tw.add(b, c)) == tw.add(tw.mul(a, b), tw.mul(a, c));
      ok = ok && tw.is_zero(tw.add(a, tw.neg(a)));
      if (!tw.is_zero(a)) ok = ok && tw.is_one(tw.mul(a, tw.inv(a)));
      ok = ok && tw.pow(a, order) == a;
      FqElem fa = tw.fq_random_elem(rng);
      ok = ok && tw.fq_pow(fa, tw.q()) == fa;
    }
  }

  // cyclic convolution ring axioms, modulus 7 over an extension tower
  FieldTowerSpec tw(13, 1, 2, rng);
  auto random_cyclic = [&](u64 p) {
    CyclicPoly out(tw, p);
    for (u64 e = 0; e < p; ++e) out.set_coeff(e, tw.random_elem(rng));
    return out;
  };
  for (int i = 0; i < 100; ++i) {
    CyclicPoly a = random_cyclic(7), b = random_cyclic(7), c = random_cyclic(7);
    ok = ok && (a + b) + c == a + (b + c);
    ok = ok && a * b == b * a;
    ok = ok && (a * b) * c == a * (b * c);
    ok = ok && a * (b + c) == a * b + a * c;
    ok = ok && (a - a).is_zero();
  }
  CyclicPoly x1 = CyclicPoly::monomial(tw, tw.one(), 1, 7);
  CyclicPoly x6 = CyclicPoly::monomial(tw, tw.one(), 6, 7);
  ok = ok && x1 * x6 == CyclicPoly::monomial(tw, tw.one(), 0, 7);

  // encoding is injective over all 625 elements of the (5, 2, 2) tower
  FieldTowerSpec t5(5, 2, 2, rng);
  std::set<std::string> seen;
  bool decode_ok = true;
  for (u64 w = 0; w < 625; ++w) {
    ExtElem a = t5.from_residues({w % 5, w / 5 % 5, w / 25 % 5, w / 125 % 5});
    std::string enc = t5.canonical_encode(a);
    seen.insert(enc);
    decode_ok = decode_ok && t5.canonical_decode(enc) == a;
  }
  ok = ok && seen.size() == 625 && decode_ok;

  return {ok, fmt("field axioms over 4 towers, convolution ring axioms, "
                  "%zu/625 distinct encodings",
                  seen.size())};
}

std::pair<bool, std::string> runtime_and_probe_count(const std::string& cli) {
  bool time_ok = single_run_elapsed > 0.0 && single_run_elapsed < 600.0;

  std::string tmpl = (fs::temp_directory_path() / "slpi_acc_XXXXXX").string();
  char* dir = mkdtemp(tmpl.data());
  if (dir == nullptr) throw std::runtime_error("mkdtemp failed");
  fs::path prog = fs::path(dir) / "prog.slp", csv = fs::path(dir) / "bench.csv";

  auto run = [&](const std::string& cmd) {
    int rc = std::system(cmd.c_str());
    if (rc == -1 || !WIFEXITED(rc) || WEXITSTATUS(rc) != 0)
      throw std::runtime_error("command failed: " + cmd);
  };
  run('"' + cli + "\" generate -n 2 -D 64 -T 4 -q 101 --seed 5 -o " + prog.string());
  run('"' + cli + "\" bench " + prog.string() + " -D 64 -T 4 -q 101 --seed 5 --repeat 2 > " +
      csv.string());

  std::ifstream in(csv);
  std::string header, line;
  std::getline(in, header);
  bool header_ok = header == "n,D,T,q,seed,m,lambda,s,u,probes,micros,success";
  ParamSet ps = compute_params(2, 64, 4, 101);
  u64 want = u64(ps.m) * ps.n * (ps.s + 1);
  int rows = 0, probe_ok = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::istringstream ls(line);
    std::string col;
    for (int i = 0; i < 10 && std::getline(ls, col, ','); ++i) {
    }
    if (col == std::to_string(want)) ++probe_ok;
  }
  bool pass = time_ok && header_ok && rows == 2 && probe_ok == 2;
  return {pass, fmt("statistical suite ran in %.1fs (limit 600s), reported probe count "
                    "matches m*n*(s+1)=%llu in %d/2 rows",
                    single_run_elapsed, static_cast<unsigned long long>(want), probe_ok)};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <cli-binary>\n");
    return 2;
  }
  std::string cli = argv[1];

  criterion(1, worked_example_images);
  criterion(2, linear_algebra_goldens);
  criterion(3, single_run_success_rate);
  criterion(4, majority_vote_success_rate);
  criterion(5, prime_supply_grid);
  criterion(6, collision_rate_bounds);
  criterion(7, probe_oracle_equivalence);
  criterion(8, algebra_property_suites);
  criterion(9, [&] { return runtime_and_probe_count(cli); });

  if (failures == 0) {
    std::printf("all 9 criteria passed\n");
    return 0;
  }
  std::printf("%d criteria failed\n", failures);
  return 1;
}
