#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slpinterp/cyclic.hpp"
#include "slpinterp/ff.hpp"

namespace slpi {

enum class OpCode { add, sub, mul };

// Instruction operand: an input z_j (1-based j), an earlier register b_i
// (1-based i, strictly before the current instruction), or a base-field
// constant given as residues (reduced mod p when embedded; a plain decimal
// constant is a single residue).
struct Operand {
  enum class Kind { input, reg, constant };
  Kind kind = Kind::constant;
  u32 index = 0;             // z_j or b_i, 1-based
  std::vector<u64> digits;   // constant residues, lowest degree first

  static Operand input(u32 j) { return {Kind::input, j, {}}; }
  static Operand reg(u32 i) { return {Kind::reg, i, {}}; }
  static Operand constant(std::vector<u64> d) { return {Kind::constant, 0, std::move(d)}; }
  bool operator==(const Operand&) const = default;
};

struct Instruction {
  OpCode op = OpCode::add;
  Operand lhs, rhs;
  bool operator==(const Instruction&) const = default;
};

// Division-free straight-line program over F_q[z_1..z_n].  The value of the
// final instruction is the program output.
class Slp {
 public:
  Slp(u32 arity, std::vector<Instruction> instructions);

  u32 arity() const { return arity_; }
  const std::vector<Instruction>& instructions() const { return instrs_; }
  std::size_t length() const { return instrs_.size(); }

  bool operator==(const Slp&) const = default;

 private:
  u32 arity_;
  std::vector<Instruction> instrs_;
};

// Text form: one instruction per line, "b<k> = <operand> <op> <operand>"
// with k sequential from 1, operands z<j>, b<i> (i < k), or a decimal
// constant (comma-separated residues when the base field is an extension).
// '#' starts a comment; blank lines are skipped.  The last instruction is
// the output.  parse_slp(format_slp(s)) == s for every valid program.
Slp parse_slp(std::string_view text);
std::string format_slp(const Slp& slp);

// Evaluates the program over any ring exposing:
//   using Elem;  Elem add/sub/mul(const Elem&, const Elem&);
//   Elem embed_const(std::span<const u64> digits);
// inputs supplies ring values for z_1..z_n (extra entries are ignored).
template <typename Ring>
typename Ring::Elem eval_in_ring(const Slp& slp, std::span<const typename Ring::Elem> inputs,
                                 Ring& ring) {
  if (inputs.size() < slp.arity())
    throw std::invalid_argument("eval_in_ring: not enough inputs for program arity");
  using Elem = typename Ring::Elem;
  std::vector<Elem> regs;
  regs.reserve(slp.length());
  std::vector<Elem> consts;  // keeps embedded constants alive for the fetch references
  for (const Instruction& ins : slp.instructions()) {
    auto fetch = [&](const Operand& o) -> const Elem& {
      switch (o.kind) {
        case Operand::Kind::input:
          return inputs[o.index - 1];
        case Operand::Kind::reg:
          return regs[o.index - 1];
        default:
          consts.push_back(ring.embed_const(o.digits));
          return consts.back();
      }
    };
    consts.clear();
    consts.reserve(2);
    const Elem& a = fetch(ins.lhs);
    const Elem& b = fetch(ins.rhs);
    switch (ins.op) {
      case OpCode::add:
        regs.push_back(ring.add(a, b));
        break;
      case OpCode::sub:
        regs.push_back(ring.sub(a, b));
        break;
      case OpCode::mul:
        regs.push_back(ring.mul(a, b));
        break;
    }
  }
  return std::move(regs.back());
}

// Scalar evaluation ring over F_{q^u}.
struct TowerRing {
  const FieldTowerSpec& tower;
  using Elem = ExtElem;
  Elem embed_const(std::span<const u64> digits) const;
  Elem add(const Elem& a, const Elem& b) const { return tower.add(a, b); }
  Elem sub(const Elem& a, const Elem& b) const { return tower.sub(a, b); }
  Elem mul(const Elem& a, const Elem& b) const { return tower.mul(a, b); }
};

// Ring of univariate images F_{q^u}[x]/(x^p - 1).
struct CyclicRing {
  const FieldTowerSpec& tower;
  u64 p;
  using Elem = CyclicPoly;
  Elem embed_const(std::span<const u64> digits) const;
  Elem add(const Elem& a, const Elem& b) const { return a + b; }
  Elem sub(const Elem& a, const Elem& b) const { return a - b; }
  Elem mul(const Elem& a, const Elem& b) const { return a * b; }
};

// Embeds a written constant (residues of an F_q element) into the tower.
ExtElem embed_const_digits(const FieldTowerSpec& tower, std::span<const u64> digits);

// Univariate image of the program's polynomial: evaluates at
// z_j = a_j * x^(v_j mod p) over F_{q^u}[x]/(x^p - 1).
CyclicPoly probe_image(const Slp& slp, std::span<const ExtElem> a, std::span<const u64> v, u64 p,
                       const FieldTowerSpec& tower);

}  // namespace slpi
