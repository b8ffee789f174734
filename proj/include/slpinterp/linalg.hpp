#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "slpinterp/ff.hpp"

namespace slpi {

// Residue vector mod p.
struct ResidueVec {
  u64 p = 0;
  std::vector<u64> r;
  bool operator==(const ResidueVec&) const = default;
};

// Square matrix over Z_p, row-major, entries reduced.
struct MatModP {
  u64 p = 0;
  u32 n = 0;
  std::vector<u64> a;  // n*n entries

  static MatModP from_rows(u64 p, const std::vector<std::vector<u64>>& rows);
  u64 at(u32 i, u32 j) const { return a[std::size_t(i) * n + j]; }
  bool operator==(const MatModP&) const = default;
};

// Gauss-Jordan inverse with partial pivoting mod p.  A singular matrix is a
// normal outcome, reported as nullopt, never an exception.
std::optional<MatModP> invert(const MatModP& m);

// x = m * v mod p
std::vector<u64> mat_vec(const MatModP& m, std::span<const u64> v);

// Applies v_inv to every vector of ds, batched as one matrix-matrix product
// per ceil(|ds|/n) blocks of n columns.  Equivalent to per-vector mat_vec.
std::vector<ResidueVec> solve_block(const MatModP& v_inv, std::span<const ResidueVec> ds);

}  // namespace slpi
