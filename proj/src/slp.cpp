#include "slpinterp/slp.hpp"

#include <algorithm>
#include <charconv>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace slpi {

namespace {

void validate_operand(const Operand& o, std::size_t pos, u32 arity) {
  switch (o.kind) {
    case Operand::Kind::input:
      if (o.index == 0 || o.index > arity)
        throw std::invalid_argument("Slp: input index out of range");
      break;
    case Operand::Kind::reg:
      if (o.index == 0 || o.index > pos)
        throw std::invalid_argument("Slp: register operand must reference an earlier instruction");
      break;
    case Operand::Kind::constant:
      if (o.digits.empty()) throw std::invalid_argument("Slp: empty constant");
      break;
  }
}

}  // namespace

Slp::Slp(u32 arity, std::vector<Instruction> instructions)
    : arity_(arity), instrs_(std::move(instructions)) {
  if (instrs_.empty()) throw std::invalid_argument("Slp: program must have at least one instruction");
  for (std::size_t k = 0; k < instrs_.size(); ++k) {
    validate_operand(instrs_[k].lhs, k, arity_);
    validate_operand(instrs_[k].rhs, k, arity_);
  }
}

namespace {

[[noreturn]] void parse_fail(std::size_t line, const std::string& msg) {
  std::ostringstream os;
  os << "line " << line << ": " << msg;
  throw std::invalid_argument(os.str());
}

u64 parse_number(std::string_view tok, std::size_t line, const char* what) {
  u64 value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    parse_fail(line, std::string("invalid ") + what + " '" + std::string(tok) + "'");
  return value;
}

Operand parse_operand(std::string_view tok, std::size_t line, std::size_t instr_index) {
  if (tok.empty()) parse_fail(line, "missing operand");
  if (tok[0] == 'z' || tok[0] == 'b') {
    u64 idx = parse_number(tok.substr(1), line, "operand index");
    if (idx == 0) parse_fail(line, "operand index must be >= 1");
    if (tok[0] == 'z') return Operand::input(u32(idx));
    if (idx > instr_index)
      parse_fail(line, "operand '" + std::string(tok) + "' references a later instruction");
    return Operand::reg(u32(idx));
  }
  if (tok[0] >= '0' && tok[0] <= '9') {
    std::vector<u64> digits;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= tok.size(); ++i) {
      if (i == tok.size() || tok[i] == ',') {
        digits.push_back(parse_number(tok.substr(start, i - start), line, "constant"));
        start = i + 1;
      }
    }
    return Operand::constant(std::move(digits));
  }
  parse_fail(line, "unknown operand '" + std::string(tok) + "'");
}

}  // namespace

Slp parse_slp(std::string_view text) {
  std::vector<Instruction> instrs;
  u32 max_input = 0;
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
    if (toks.size() != 5) parse_fail(line_no, "expected 'b<k> = <operand> <op> <operand>'");
    std::size_t k = instrs.size() + 1;
    if (toks[0].size() < 2 || toks[0][0] != 'b')
      parse_fail(line_no, "expected register name 'b" + std::to_string(k) + "'");
    if (parse_number(toks[0].substr(1), line_no, "register index") != k)
      parse_fail(line_no, "register must be 'b" + std::to_string(k) + "' (instructions are numbered in order)");
    if (toks[1] != "=") parse_fail(line_no, "expected '='");
    Operand lhs = parse_operand(toks[2], line_no, instrs.size());
    OpCode op;
    if (toks[3] == "+") op = OpCode::add;
    else if (toks[3] == "-") op = OpCode::sub;
    else if (toks[3] == "*") op = OpCode::mul;
    else parse_fail(line_no, "unknown operator '" + std::string(toks[3]) + "'");
    Operand rhs = parse_operand(toks[4], line_no, instrs.size());
    for (const Operand* o : {&lhs, &rhs})
      if (o->kind == Operand::Kind::input) max_input = std::max(max_input, o->index);
    instrs.push_back(Instruction{op, std::move(lhs), std::move(rhs)});
  }
  if (instrs.empty()) throw std::invalid_argument("line 1: program has no instructions");
  return Slp(max_input, std::move(instrs));
}

namespace {

void format_operand(std::ostringstream& os, const Operand& o) {
  switch (o.kind) {
    case Operand::Kind::input:
      os << 'z' << o.index;
      break;
    case Operand::Kind::reg:
      os << 'b' << o.index;
      break;
    case Operand::Kind::constant:
      for (std::size_t i = 0; i < o.digits.size(); ++i) {
        if (i) os << ',';
        os << o.digits[i];
      }
      break;
  }
}

}  // namespace

std::string format_slp(const Slp& slp) {
  std::ostringstream os;
  for (std::size_t k = 0; k < slp.length(); ++k) {
    const Instruction& ins = slp.instructions()[k];
    os << 'b' << (k + 1) << " = ";
    format_operand(os, ins.lhs);
    switch (ins.op) {
      case OpCode::add: os << " + "; break;
      case OpCode::sub: os << " - "; break;
      case OpCode::mul: os << " * "; break;
    }
    format_operand(os, ins.rhs);
    os << '\n';
  }
  return os.str();
}

ExtElem embed_const_digits(const FieldTowerSpec& tower, std::span<const u64> digits) {
  if (digits.empty() || digits.size() > tower.v())
    throw std::invalid_argument("constant has more residues than the base field degree");
  FqElem e(tower.v(), 0);
  for (std::size_t i = 0; i < digits.size(); ++i) e[i] = digits[i] % tower.p();
  return tower.embed_fq(e);
}

ExtElem TowerRing::embed_const(std::span<const u64> digits) const {
  return embed_const_digits(tower, digits);
}

CyclicPoly CyclicRing::embed_const(std::span<const u64> digits) const {
  return CyclicPoly::monomial(tower, embed_const_digits(tower, digits), 0, p);
}

namespace {

// Internal fast path for probe_image.  A value starts as a sorted sparse
// term list (degree, coefficient) and is promoted to a dense CyclicPoly
// once sparse arithmetic would cost more than dense arithmetic.  Probe
// workloads built from sparse polynomials keep every intermediate tiny,
// so the dense promotion only triggers on genuinely dense programs.
struct ProbeValue {
  std::vector<u64> degs;                // sorted, distinct, each < p
  std::vector<u64> coeffs;              // ext_len residues per degree
  std::optional<CyclicPoly> dense;      // engaged once promoted

  bool is_dense() const { return dense.has_value(); }
};

struct ProbeRing {
  const FieldTowerSpec& tower;
  u64 p;
  using Elem = ProbeValue;

  u32 w() const { return tower.ext_len(); }

  Elem monomial(const ExtElem& c, u64 d) const {
    Elem out;
    if (!tower.span_is_zero(c.c)) {
      out.degs.push_back(d % p);
      out.coeffs.assign(c.c.begin(), c.c.end());
    }
    return out;
  }

  Elem embed_const(std::span<const u64> digits) const {
    return monomial(embed_const_digits(tower, digits), 0);
  }

  CyclicPoly to_dense(const Elem& x) const {
    if (x.is_dense()) return *x.dense;
    CyclicPoly out(tower, p);
    for (std::size_t i = 0; i < x.degs.size(); ++i)
      out.add_to_coeff(x.degs[i], std::span<const u64>(x.coeffs.data() + i * w(), w()));
    return out;
  }

  Elem from_dense(CyclicPoly poly) const {
    Elem out;
    out.dense = std::move(poly);
    return out;
  }

  // Merges two sorted sparse term lists with the coefficient op, dropping
  // zero results.
  template <typename CoeffOp>
  Elem merge(const Elem& a, const Elem& b, CoeffOp&& op) const {
    const u32 width = w();
    Elem out;
    out.degs.reserve(a.degs.size() + b.degs.size());
    out.coeffs.reserve((a.degs.size() + b.degs.size()) * width);
    std::vector<u64> buf(width);
    std::size_t i = 0, j = 0;
    auto push = [&](u64 d, std::span<const u64> c) {
      if (tower.span_is_zero(c)) return;
      out.degs.push_back(d);
      out.coeffs.insert(out.coeffs.end(), c.begin(), c.end());
    };
    while (i < a.degs.size() || j < b.degs.size()) {
      std::span<const u64> ca(a.coeffs.data() + i * width, i < a.degs.size() ? width : 0);
      std::span<const u64> cb(b.coeffs.data() + j * width, j < b.degs.size() ? width : 0);
      if (j >= b.degs.size() || (i < a.degs.size() && a.degs[i] < b.degs[j])) {
        op(std::span<u64>(buf), ca, std::span<const u64>());
        push(a.degs[i], buf);
        ++i;
      } else if (i >= a.degs.size() || b.degs[j] < a.degs[i]) {
        op(std::span<u64>(buf), std::span<const u64>(), cb);
        push(b.degs[j], buf);
        ++j;
      } else {
        op(std::span<u64>(buf), ca, cb);
        push(a.degs[i], buf);
        ++i;
        ++j;
      }
    }
    return out;
  }

  template <typename DenseOp, typename CoeffOp>
  Elem linear(const Elem& a, const Elem& b, DenseOp&& dense_op, CoeffOp&& op) const {
    if (a.is_dense() || b.is_dense()) return from_dense(dense_op(to_dense(a), to_dense(b)));
    return merge(a, b, op);
  }

  Elem add(const Elem& a, const Elem& b) const {
    std::vector<u64> zero(w(), 0);
    return linear(
        a, b, [](const CyclicPoly& x, const CyclicPoly& y) { return x + y; },
        [&](std::span<u64> out, std::span<const u64> x, std::span<const u64> y) {
          tower.ext_add_into(out, x.empty() ? std::span<const u64>(zero) : x,
                             y.empty() ? std::span<const u64>(zero) : y);
        });
  }

  Elem sub(const Elem& a, const Elem& b) const {
    std::vector<u64> zero(w(), 0);
    return linear(
        a, b, [](const CyclicPoly& x, const CyclicPoly& y) { return x - y; },
        [&](std::span<u64> out, std::span<const u64> x, std::span<const u64> y) {
          tower.ext_sub_into(out, x.empty() ? std::span<const u64>(zero) : x,
                             y.empty() ? std::span<const u64>(zero) : y);
        });
  }

  Elem mul(const Elem& a, const Elem& b) const {
    if (a.is_dense() || b.is_dense() ||
        u128(a.degs.size()) * b.degs.size() >= u128(p))
      return from_dense(to_dense(a) * to_dense(b));
    const u32 width = w();
    // Products sorted by result degree, then accumulated.
    std::vector<std::pair<u64, std::size_t>> order;
    order.reserve(a.degs.size() * b.degs.size());
    std::vector<u64> prods(a.degs.size() * b.degs.size() * width, 0);
    std::vector<u64> scratch;
    std::size_t next = 0;
    for (std::size_t i = 0; i < a.degs.size(); ++i) {
      std::span<const u64> ca(a.coeffs.data() + i * width, width);
      for (std::size_t j = 0; j < b.degs.size(); ++j) {
        u64 d = a.degs[i] + b.degs[j];
        if (d >= p) d -= p;
        std::span<u64> slot(prods.data() + next * width, width);
        tower.ext_mul_acc(slot, ca, std::span<const u64>(b.coeffs.data() + j * width, width),
                          scratch);
        order.emplace_back(d, next);
        ++next;
      }
    }
    std::sort(order.begin(), order.end());
    Elem out;
    out.degs.reserve(order.size());
    out.coeffs.reserve(order.size() * width);
    std::vector<u64> buf(width);
    std::size_t k = 0;
    while (k < order.size()) {
      u64 d = order[k].first;
      std::copy_n(prods.data() + order[k].second * width, width, buf.data());
      ++k;
      for (; k < order.size() && order[k].first == d; ++k)
        tower.ext_add_into(buf, buf,
                           std::span<const u64>(prods.data() + order[k].second * width, width));
      if (!tower.span_is_zero(buf)) {
        out.degs.push_back(d);
        out.coeffs.insert(out.coeffs.end(), buf.begin(), buf.end());
      }
    }
    return out;
  }
};

}  // namespace

CyclicPoly probe_image(const Slp& slp, std::span<const ExtElem> a, std::span<const u64> v, u64 p,
                       const FieldTowerSpec& tower) {
  if (a.size() != v.size()) throw std::invalid_argument("probe_image: |a| != |v|");
  if (a.size() < slp.arity()) throw std::invalid_argument("probe_image: not enough substitution entries");
  if (p == 0) throw std::invalid_argument("probe_image: modulus must be positive");
  ProbeRing ring{tower, p};
  std::vector<ProbeValue> inputs;
  inputs.reserve(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) inputs.push_back(ring.monomial(a[j], v[j]));
  return ring.to_dense(eval_in_ring(slp, std::span<const ProbeValue>(inputs), ring));
}

}  // namespace slpi
