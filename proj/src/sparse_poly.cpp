#include "slpinterp/sparse_poly.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "slpinterp/slp.hpp"

namespace slpi {

SparsePolynomial SparsePolynomial::from_terms(u32 arity, std::vector<Term> terms,
                                              const FieldTowerSpec& field) {
  std::map<std::vector<u64>, FqElem> acc;
  for (Term& t : terms) {
    if (t.exps.size() != arity)
      throw std::invalid_argument("SparsePolynomial: exponent vector length != arity");
    if (t.coeff.size() != field.v())
      throw std::invalid_argument("SparsePolynomial: coefficient length mismatch");
    for (u64 r : t.coeff)
      if (r >= field.p()) throw std::invalid_argument("SparsePolynomial: coefficient not reduced");
    auto [it, fresh] = acc.emplace(std::move(t.exps), t.coeff);
    if (!fresh) it->second = field.fq_add(it->second, t.coeff);
  }
  SparsePolynomial out(arity);
  for (auto& [e, c] : acc)
    if (!field.fq_is_zero(c)) out.terms_.push_back(Term{std::move(c), e});
  return out;
}

std::string format_polynomial(const SparsePolynomial& f) {
  std::ostringstream os;
  for (const Term& t : f.terms()) {
    for (std::size_t i = 0; i < t.coeff.size(); ++i) {
      if (i) os << ',';
      os << t.coeff[i];
    }
    for (u64 e : t.exps) os << ' ' << e;
    os << '\n';
  }
  return os.str();
}

namespace {

u64 parse_num(std::string_view tok, std::size_t line) {
  u64 value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    std::ostringstream os;
    os << "polynomial line " << line << ": invalid number '" << std::string(tok) << "'";
    throw std::invalid_argument(os.str());
  }
  return value;
}

}  // namespace

SparsePolynomial parse_polynomial(std::string_view text, const FieldTowerSpec& field,
                                  std::optional<u32> arity_hint) {
  std::vector<Term> terms;
  std::optional<u32> arity = arity_hint;
  std::size_t line_no = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i != text.size() && text[i] != '\n') continue;
    ++line_no;
    std::string_view line = text.substr(start, i - start);
    start = i + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::vector<std::string_view> toks;
    std::size_t t = 0;
    while (t < line.size()) {
      while (t < line.size() && (line[t] == ' ' || line[t] == '\t' || line[t] == '\r')) ++t;
      std::size_t e = t;
      while (e < line.size() && line[e] != ' ' && line[e] != '\t' && line[e] != '\r') ++e;
      if (e > t) toks.push_back(line.substr(t, e - t));
      t = e;
    }
    if (toks.empty()) continue;
    Term term;
    std::size_t cstart = 0;
    std::string_view ctok = toks[0];
    for (std::size_t j = 0; j <= ctok.size(); ++j) {
      if (j == ctok.size() || ctok[j] == ',') {
        term.coeff.push_back(parse_num(ctok.substr(cstart, j - cstart), line_no) % field.p());
        cstart = j + 1;
      }
    }
    if (term.coeff.size() > field.v()) {
      std::ostringstream os;
      os << "polynomial line " << line_no << ": coefficient has too many residues";
      throw std::invalid_argument(os.str());
    }
    term.coeff.resize(field.v(), 0);
    for (std::size_t j = 1; j < toks.size(); ++j) term.exps.push_back(parse_num(toks[j], line_no));
    if (!arity) arity = u32(term.exps.size());
    if (term.exps.size() != *arity) {
      std::ostringstream os;
      os << "polynomial line " << line_no << ": expected " << *arity << " exponents";
      throw std::invalid_argument(os.str());
    }
    terms.push_back(std::move(term));
  }
  if (!arity) throw std::invalid_argument("polynomial: no terms and no arity hint");
  return SparsePolynomial::from_terms(*arity, std::move(terms), field);
}

SparsePolynomial random_sparse_polynomial(u32 n, u64 degree_bound, u32 term_count,
                                          const FieldTowerSpec& field, Rng& rng) {
  if (n < 1) throw std::invalid_argument("random_sparse_polynomial: n must be >= 1");
  if (degree_bound < 1) throw std::invalid_argument("random_sparse_polynomial: degree bound must be >= 1");
  // enough room for term_count distinct exponent vectors?
  u128 space = 1;
  for (u32 j = 0; j < n && space <= term_count; ++j) space *= degree_bound;
  if (space < term_count)
    throw std::invalid_argument("random_sparse_polynomial: fewer than term_count exponent vectors exist");

  std::set<std::vector<u64>> used;
  std::vector<Term> terms;
  while (used.size() < term_count) {
    std::vector<u64> e(n);
    for (auto& x : e) x = rng.below(degree_bound);
    if (!used.insert(e).second) continue;
    terms.push_back(Term{field.fq_random_nonzero(rng), std::move(e)});
  }
  return SparsePolynomial::from_terms(n, std::move(terms), field);
}

Slp slp_from_sparse(const SparsePolynomial& f, const FieldTowerSpec& field) {
  std::vector<Instruction> instrs;
  // emits one instruction, returns the 1-based register holding its value
  auto emit = [&](OpCode op, Operand a, Operand b) -> u32 {
    instrs.push_back(Instruction{op, std::move(a), std::move(b)});
    return static_cast<u32>(instrs.size());
  };
  auto trimmed = [](const FqElem& c) {
    std::vector<u64> d = c;
    while (d.size() > 1 && d.back() == 0) d.pop_back();
    return d;
  };
  // operand for z_{j+1}^e by square and multiply (e >= 1)
  auto power_operand = [&](u32 j, u64 e) -> Operand {
    Operand result;
    bool have_result = false;
    Operand square = Operand::input(j + 1);
    for (;;) {
      if (e & 1) {
        if (!have_result) {
          result = square;
          have_result = true;
        } else {
          result = Operand::reg(emit(OpCode::mul, result, square));
        }
      }
      e >>= 1;
      if (e == 0) return result;
      square = Operand::reg(emit(OpCode::mul, square, square));
    }
  };

  if (f.is_zero() && f.arity() >= 1) {
    // canonical zero program
    std::vector<Instruction> zero{
        Instruction{OpCode::sub, Operand::input(1), Operand::input(1)}};
    return Slp(f.arity(), std::move(zero));
  }
  std::optional<Operand> sum;
  for (const Term& t : f.terms()) {
    std::vector<Operand> factors;
    if (t.coeff != field.fq_one()) factors.push_back(Operand::constant(trimmed(t.coeff)));
    for (u32 j = 0; j < f.arity(); ++j)
      if (t.exps[j] != 0) factors.push_back(power_operand(j, t.exps[j]));
    Operand term = factors.empty() ? Operand::constant({1}) : factors[0];
    for (std::size_t i = 1; i < factors.size(); ++i)
      term = Operand::reg(emit(OpCode::mul, term, factors[i]));
    sum = sum ? Operand::reg(emit(OpCode::add, *sum, term)) : term;
  }
  if (!sum) sum = Operand::constant({0});
  // the output is the last instruction, so materialize a bare operand
  bool is_last_reg = sum->kind == Operand::Kind::reg && sum->index == instrs.size();
  if (!is_last_reg) emit(OpCode::add, *sum, Operand::constant({0}));
  return Slp(f.arity(), std::move(instrs));
}

}  // namespace slpi
