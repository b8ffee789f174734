#include "slpinterp/linalg.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace slpi {

namespace {

u64 mulmod(u64 a, u64 b, u64 p) { return u64(u128(a) * b % p); }

u64 invmod(u64 a, u64 p) {
  __int128 t = 0, newt = 1;
  __int128 r = p, newr = a % p;
  while (newr != 0) {
    __int128 quot = r / newr;
    t = std::exchange(newt, t - quot * newt);
    r = std::exchange(newr, r - quot * newr);
  }
  if (r != 1) throw std::logic_error("invmod: not invertible");
  if (t < 0) t += p;
  return u64(t);
}

}  // namespace

MatModP MatModP::from_rows(u64 p, const std::vector<std::vector<u64>>& rows) {
  if (p < 2) throw std::invalid_argument("MatModP: modulus must be >= 2");
  if (rows.empty()) throw std::invalid_argument("MatModP: matrix must be nonempty");
  MatModP m;
  m.p = p;
  m.n = u32(rows.size());
  m.a.reserve(std::size_t(m.n) * m.n);
  for (const auto& row : rows) {
    if (row.size() != rows.size()) throw std::invalid_argument("MatModP: matrix must be square");
    for (u64 x : row) m.a.push_back(x % p);
  }
  return m;
}

std::optional<MatModP> invert(const MatModP& m) {
  const u32 n = m.n;
  const u64 p = m.p;
  if (n == 0) throw std::invalid_argument("invert: empty matrix");
  // augmented [A | I], row-reduced in place
  std::vector<u64> w(std::size_t(n) * 2 * n, 0);
  for (u32 i = 0; i < n; ++i) {
    for (u32 j = 0; j < n; ++j) w[std::size_t(i) * 2 * n + j] = m.a[std::size_t(i) * n + j] % p;
    w[std::size_t(i) * 2 * n + n + i] = 1;
  }
  auto row = [&](u32 i) { return w.data() + std::size_t(i) * 2 * n; };
  for (u32 col = 0; col < n; ++col) {
    u32 pivot = col;
    while (pivot < n && row(pivot)[col] == 0) ++pivot;
    if (pivot == n) return std::nullopt;
    if (pivot != col)
      for (u32 j = 0; j < 2 * n; ++j) std::swap(row(pivot)[j], row(col)[j]);
    u64 inv = invmod(row(col)[col], p);
    for (u32 j = col; j < 2 * n; ++j) row(col)[j] = mulmod(row(col)[j], inv, p);
    for (u32 i = 0; i < n; ++i) {
      if (i == col) continue;
      u64 f = row(i)[col];
      if (f == 0) continue;
      for (u32 j = col; j < 2 * n; ++j) {
        u64 sub = mulmod(f, row(col)[j], p);
        u64 cur = row(i)[j];
        row(i)[j] = cur >= sub ? cur - sub : cur + (p - sub);
      }
    }
  }
  MatModP out;
  out.p = p;
  out.n = n;
  out.a.resize(std::size_t(n) * n);
  for (u32 i = 0; i < n; ++i)
    for (u32 j = 0; j < n; ++j) out.a[std::size_t(i) * n + j] = row(i)[n + j];
  return out;
}

std::vector<u64> mat_vec(const MatModP& m, std::span<const u64> v) {
  if (v.size() != m.n) throw std::invalid_argument("mat_vec: dimension mismatch");
  std::vector<u64> out(m.n, 0);
  for (u32 i = 0; i < m.n; ++i) {
    u128 acc = 0;
    for (u32 j = 0; j < m.n; ++j) {
      acc += u128(m.at(i, j)) * (v[j] % m.p) % m.p;
    }
    out[i] = u64(acc % m.p);
  }
  return out;
}

std::vector<ResidueVec> solve_block(const MatModP& v_inv, std::span<const ResidueVec> ds) {
  const u32 n = v_inv.n;
  const u64 p = v_inv.p;
  std::vector<ResidueVec> out(ds.size());
  for (std::size_t base = 0; base < ds.size(); base += n) {
    std::size_t cols = std::min<std::size_t>(n, ds.size() - base);
    // B holds the block's vectors as columns; E = v_inv * B
    std::vector<u64> B(std::size_t(n) * cols);
    for (std::size_t c = 0; c < cols; ++c) {
      const ResidueVec& d = ds[base + c];
      if (d.p != p) throw std::invalid_argument("solve_block: modulus mismatch");
      if (d.r.size() != n) throw std::invalid_argument("solve_block: dimension mismatch");
      for (u32 i = 0; i < n; ++i) B[std::size_t(i) * cols + c] = d.r[i] % p;
    }
    std::vector<u64> E(std::size_t(n) * cols, 0);
    for (u32 i = 0; i < n; ++i)
      for (std::size_t c = 0; c < cols; ++c) {
        u128 acc = 0;
        for (u32 k = 0; k < n; ++k) acc += u128(v_inv.at(i, k)) * B[std::size_t(k) * cols + c] % p;
        E[std::size_t(i) * cols + c] = u64(acc % p);
      }
    for (std::size_t c = 0; c < cols; ++c) {
      ResidueVec rv;
      rv.p = p;
      rv.r.resize(n);
      for (u32 i = 0; i < n; ++i) rv.r[i] = E[std::size_t(i) * cols + c];
      out[base + c] = std::move(rv);
    }
  }
  return out;
}

}  // namespace slpi
