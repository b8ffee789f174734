#include <charconv>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "slpinterp/engine.hpp"
#include "slpinterp/errors.hpp"
#include "slpinterp/oracle.hpp"
#include "slpinterp/primes.hpp"
#include "slpinterp/rng.hpp"
#include "slpinterp/slp.hpp"
#include "slpinterp/sparse_poly.hpp"

namespace {

using slpi::u32;
using slpi::u64;

constexpr int kExitNoMajority = 2;
constexpr int kExitInputError = 3;
constexpr int kExitResourceCap = 4;

std::string read_input(const std::string& path) {
  std::ostringstream os;
  if (path == "-") {
    os << std::cin.rdbuf();
  } else {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    os << in.rdbuf();
  }
  return os.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open " + path);
  out << text;
}

// Field spec "p" or "p^v".
struct FieldArg {
  u64 p = 0;
  u32 v = 1;
};

FieldArg parse_field_arg(const std::string& text) {
  auto parse_num = [&](std::string_view part, auto& out) {
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
    if (ec != std::errc() || ptr != part.data() + part.size())
      throw std::invalid_argument("field spec must be p or p^v, got '" + text + "'");
  };
  FieldArg f;
  std::string_view sv = text;
  auto caret = sv.find('^');
  parse_num(sv.substr(0, caret), f.p);
  if (caret != std::string_view::npos) parse_num(sv.substr(caret + 1), f.v);
  return f;
}

nlohmann::json params_json(const slpi::ParamSet& ps) {
  return {{"n", ps.n},           {"degree_bound", ps.degree_bound},
          {"term_bound", ps.term_bound}, {"q", ps.q},
          {"m", ps.m},           {"lambda", ps.lambda},
          {"s", ps.s},           {"u", ps.u},
          {"probes_per_run", u64(ps.m) * ps.n * (ps.s + 1)}};
}

struct InterpolateOptions {
  std::string program = "-";
  u32 arity = 0;  // 0: use the program arity
  u64 degree_bound = 0;
  u32 term_bound = 0;
  std::string field;
  u64 seed = 0;
  std::optional<double> epsilon;  // present: majority vote over that failure bound
  u32 threads = 1;
  bool json = false;
  std::string output = "-";
};

int run_interpolate(const InterpolateOptions& opt) {
  slpi::Slp slp = slpi::parse_slp(read_input(opt.program));
  u32 n = opt.arity ? opt.arity : slp.arity();
  FieldArg fa = parse_field_arg(opt.field);
  slpi::FieldSpec field{fa.p, fa.v, {}};
  slpi::Rng rng(opt.seed);
  slpi::EngineOptions eopt;
  eopt.threads = opt.threads;

  std::string poly_text;
  slpi::InterpolateStats stats;
  u32 runs = 1, votes = 1;
  std::vector<bool> run_matched{true};
  if (opt.epsilon) {
    slpi::MetaResult res = slpi::meta_interpolate(slp, n, opt.degree_bound, opt.term_bound, field,
                                                  *opt.epsilon, rng, eopt);
    if (!res.majority) {
      std::cerr << "no majority among " << res.runs << " runs (largest agreement "
                << res.majority_votes << ")\n";
      return kExitNoMajority;
    }
    poly_text = slpi::format_polynomial(*res.majority);
    stats = std::move(res.stats);
    runs = res.runs;
    votes = res.majority_votes;
    run_matched = std::move(res.run_matched);
  } else {
    slpi::InterpolateResult res =
        slpi::sparse_interpolate(slp, n, opt.degree_bound, opt.term_bound, field, rng, eopt);
    poly_text = slpi::format_polynomial(res.poly);
    stats = std::move(res.stats);
  }

  if (opt.json) {
    nlohmann::json out{{"polynomial", poly_text},
                       {"params", params_json(stats.params)},
                       {"field", stats.field_spec},
                       {"seed", opt.seed},
                       {"runs", runs},
                       {"majority_votes", votes},
                       {"run_matched", run_matched},
                       {"invertible_primes", stats.invertible_primes},
                       {"singular_primes", stats.singular_primes}};
    write_output(opt.output, out.dump(2) + "\n");
  } else {
    write_output(opt.output, poly_text);
  }
  return 0;
}

struct GenerateOptions {
  u32 n = 1;
  u64 degree_bound = 0;
  u32 terms = 0;
  std::string field;
  u64 seed = 0;
  std::string output = "-";
  std::string poly_out;
};

int run_generate(const GenerateOptions& opt) {
  FieldArg fa = parse_field_arg(opt.field);
  slpi::Rng rng(opt.seed);
  slpi::FieldTowerSpec tower(fa.p, fa.v, 1, rng);
  slpi::SparsePolynomial f =
      slpi::random_sparse_polynomial(opt.n, opt.degree_bound, opt.terms, tower, rng);
  slpi::Slp slp = slpi::slp_from_sparse(f, tower);
  write_output(opt.output, slpi::format_slp(slp));
  if (!opt.poly_out.empty()) write_output(opt.poly_out, slpi::format_polynomial(f));
  return 0;
}

struct VerifyOptions {
  std::string program = "-";
  std::string polynomial;
  u32 arity = 0;
  std::string field;
  u64 seed = 0;
  u64 max_terms = slpi::ExpansionCap{}.max_terms;
  u64 max_degree = slpi::ExpansionCap{}.max_degree;
};

int run_verify(const VerifyOptions& opt) {
  slpi::Slp slp = slpi::parse_slp(read_input(opt.program));
  FieldArg fa = parse_field_arg(opt.field);
  slpi::Rng rng(opt.seed);
  slpi::FieldTowerSpec tower(fa.p, fa.v, 1, rng);
  std::optional<u32> hint;
  if (opt.arity) hint = opt.arity;
  slpi::SparsePolynomial expected = slpi::parse_polynomial(read_input(opt.polynomial), tower, hint);
  slpi::ExpansionCap cap{opt.max_terms, opt.max_degree};
  slpi::SparsePolynomial expanded = slpi::brute_force_expand(slp, expected.arity(), tower, cap);
  bool match = expanded == expected;
  std::cout << (match ? "MATCH\n" : "MISMATCH\n");
  return match ? 0 : 1;
}

struct ParamsOptions {
  u32 n = 1;
  u64 degree_bound = 0;
  u32 term_bound = 0;
  std::string field;
  double epsilon = 0.05;
  bool json = false;
};

int run_params(const ParamsOptions& opt) {
  FieldArg fa = parse_field_arg(opt.field);
  slpi::FieldSpec field{fa.p, fa.v, {}};
  slpi::ParamSet ps = slpi::compute_params(opt.n, opt.degree_bound, opt.term_bound, field.q());
  u32 runs = slpi::meta_run_count(opt.epsilon);
  if (opt.json) {
    nlohmann::json out = params_json(ps);
    out["epsilon"] = opt.epsilon;
    out["runs"] = runs;
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "q               " << ps.q << "\n"
              << "m               " << ps.m << "\n"
              << "lambda          " << std::fixed << std::setprecision(3) << ps.lambda << "\n"
              << "s               " << ps.s << "\n"
              << "u               " << ps.u << "\n"
              << "runs            " << runs << "\n"
              << "probes per run  " << u64(ps.m) * ps.n * (ps.s + 1) << "\n";
  }
  return 0;
}

struct BenchOptions {
  std::string program = "-";
  u32 arity = 0;
  u64 degree_bound = 0;
  u32 term_bound = 0;
  std::string field;
  u64 seed = 0;
  u32 repeat = 1;
  std::string expect;
  u32 threads = 1;
  bool no_header = false;
};

int run_bench(const BenchOptions& opt) {
  slpi::Slp slp = slpi::parse_slp(read_input(opt.program));
  u32 n = opt.arity ? opt.arity : slp.arity();
  FieldArg fa = parse_field_arg(opt.field);
  std::string expect_text = opt.expect.empty() ? std::string() : read_input(opt.expect);
  if (!opt.no_header) std::cout << "n,D,T,q,seed,m,lambda,s,u,probes,micros,success\n";
  for (u32 i = 0; i < opt.repeat; ++i) {
    u64 seed = opt.seed + i;
    slpi::FieldSpec field{fa.p, fa.v, {}};
    slpi::Rng rng(seed);
    slpi::EngineOptions eopt;
    eopt.threads = opt.threads;
    auto start = std::chrono::steady_clock::now();
    slpi::InterpolateResult res =
        slpi::sparse_interpolate(slp, n, opt.degree_bound, opt.term_bound, field, rng, eopt);
    auto micros =
        std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - start)
            .count();
    int success = 1;
    if (!expect_text.empty()) {
      // the run's field representation: phi is the first thing drawn from the seed
      slpi::Rng parse_rng(seed);
      slpi::FieldTowerSpec tower(fa.p, fa.v, 1, parse_rng);
      slpi::SparsePolynomial expected = slpi::parse_polynomial(expect_text, tower, n);
      success = res.poly == expected ? 1 : 0;
    }
    const slpi::ParamSet& ps = res.stats.params;
    std::cout << ps.n << ',' << ps.degree_bound << ',' << ps.term_bound << ',' << ps.q << ','
              << seed << ',' << ps.m << ',' << std::fixed << std::setprecision(3) << ps.lambda
              << ',' << ps.s << ',' << ps.u << ',' << res.stats.probe_count << ',' << micros << ','
              << success << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse multivariate polynomial interpolation of straight-line programs"};
  app.require_subcommand(1);

  InterpolateOptions iopt;
  CLI::App* interp = app.add_subcommand("interpolate", "recover the polynomial a program computes");
  interp->add_option("program", iopt.program, "program file, - for stdin")->capture_default_str();
  interp->add_option("-D,--degree-bound", iopt.degree_bound, "strict bound on every exponent")
      ->required();
  interp->add_option("-T,--term-bound", iopt.term_bound, "bound on the term count")->required();
  interp->add_option("-q,--field", iopt.field, "base field, p or p^v")->required();
  interp->add_option("-n,--nvars", iopt.arity, "number of variables (default: program arity)");
  interp->add_option("--seed", iopt.seed, "random seed")->capture_default_str();
  interp->add_option("-e,--epsilon", iopt.epsilon,
                     "failure bound; majority vote over 8*ln(1/e) runs (default: one run)");
  interp->add_option("--threads", iopt.threads, "worker threads")->capture_default_str();
  interp->add_flag("--json", iopt.json, "emit a JSON report");
  interp->add_option("-o,--output", iopt.output, "output file, - for stdout")
      ->capture_default_str();

  GenerateOptions gopt;
  CLI::App* gen = app.add_subcommand("generate", "emit a program for a random sparse polynomial");
  gen->add_option("-n,--nvars", gopt.n, "number of variables")->required();
  gen->add_option("-D,--degree-bound", gopt.degree_bound, "strict bound on every exponent")
      ->required();
  gen->add_option("-T,--term-bound", gopt.terms, "number of terms (generated exactly)")
      ->required();
  gen->add_option("-q,--field", gopt.field, "base field, p or p^v")->required();
  gen->add_option("--seed", gopt.seed, "random seed")->capture_default_str();
  gen->add_option("-o,--output", gopt.output, "program output file, - for stdout")
      ->capture_default_str();
  gen->add_option("--poly-out", gopt.poly_out, "also write the polynomial itself");

  VerifyOptions vopt;
  CLI::App* verify = app.add_subcommand("verify", "expand a program and compare with a polynomial");
  verify->add_option("program", vopt.program, "program file, - for stdin")->capture_default_str();
  verify->add_option("-f,--polynomial", vopt.polynomial, "polynomial file")->required();
  verify->add_option("-n,--nvars", vopt.arity, "number of variables (default: from the file)");
  verify->add_option("-q,--field", vopt.field, "base field, p or p^v")->required();
  verify->add_option("--seed", vopt.seed, "random seed (fixes the field representation)")
      ->capture_default_str();
  verify->add_option("--max-terms", vopt.max_terms, "expansion term cap")->capture_default_str();
  verify->add_option("--max-degree", vopt.max_degree, "expansion degree cap")
      ->capture_default_str();

  ParamsOptions popt;
  CLI::App* params = app.add_subcommand("params", "print the derived run parameters");
  params->add_option("-n,--nvars", popt.n, "number of variables")->required();
  params->add_option("-D,--degree-bound", popt.degree_bound, "strict bound on every exponent")
      ->required();
  params->add_option("-T,--term-bound", popt.term_bound, "bound on the term count")->required();
  params->add_option("-q,--field", popt.field, "base field, p or p^v")->required();
  params->add_option("-e,--epsilon", popt.epsilon, "failure bound for the run count")
      ->capture_default_str();
  params->add_flag("--json", popt.json, "emit a JSON report");

  BenchOptions bopt;
  CLI::App* bench = app.add_subcommand("bench", "time single runs and print CSV rows");
  bench->add_option("program", bopt.program, "program file, - for stdin")->capture_default_str();
  bench->add_option("-D,--degree-bound", bopt.degree_bound, "strict bound on every exponent")
      ->required();
  bench->add_option("-T,--term-bound", bopt.term_bound, "bound on the term count")->required();
  bench->add_option("-q,--field", bopt.field, "base field, p or p^v")->required();
  bench->add_option("-n,--nvars", bopt.arity, "number of variables (default: program arity)");
  bench->add_option("--seed", bopt.seed, "seed of the first row; row i uses seed+i")
      ->capture_default_str();
  bench->add_option("--repeat", bopt.repeat, "number of rows")->capture_default_str();
  bench->add_option("--expect", bopt.expect, "polynomial file; success column compares against it");
  bench->add_option("--threads", bopt.threads, "worker threads")->capture_default_str();
  bench->add_flag("--no-header", bopt.no_header, "suppress the CSV header row");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) return app.exit(e);
    app.exit(e);
    return kExitInputError;
  }

  try {
    if (app.got_subcommand(interp)) return run_interpolate(iopt);
    if (app.got_subcommand(gen)) return run_generate(gopt);
    if (app.got_subcommand(verify)) return run_verify(vopt);
    if (app.got_subcommand(params)) return run_params(popt);
    if (app.got_subcommand(bench)) return run_bench(bopt);
  } catch (const slpi::ResourceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitResourceCap;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return 0;
}
