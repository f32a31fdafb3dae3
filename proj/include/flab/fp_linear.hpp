#pragma once

// Dense linear algebra over Z/pZ for small primes p.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flab/error.hpp"

namespace flab {

using Residue = std::uint32_t;
using FpVector = std::vector<Residue>;

inline constexpr std::uint32_t kMaxPrime = 1u << 15;

inline bool is_prime(std::uint32_t n) {
  if (n < 2) return false;
  for (std::uint32_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline void check_modulus(std::uint32_t p) {
  if (p > kMaxPrime) throw SizeGuard("modulus " + std::to_string(p) + " exceeds 2^15");
  if (!is_prime(p)) throw Error("modulus " + std::to_string(p) + " is not prime");
}

inline Residue mod_mul(Residue a, Residue b, std::uint32_t p) { return a * b % p; }
inline Residue mod_add(Residue a, Residue b, std::uint32_t p) { return (a + b) % p; }
inline Residue mod_sub(Residue a, Residue b, std::uint32_t p) { return (a + p - b) % p; }
inline Residue mod_neg(Residue a, std::uint32_t p) { return (p - a) % p; }

inline Residue mod_inv(Residue a, std::uint32_t p) {
  if (a % p == 0) throw Error("inverse of zero mod p");
  Residue result = 1, base = a % p;
  for (std::uint32_t e = p - 2; e; e >>= 1) {
    if (e & 1) result = mod_mul(result, base, p);
    base = mod_mul(base, base, p);
  }
  return result;
}

class FpMatrix {
 public:
  FpMatrix() = default;
  FpMatrix(std::uint32_t p, std::size_t rows, std::size_t cols) : p_(p), rows_(rows), cols_(cols), data_(rows * cols, 0) {
    check_modulus(p);
  }
  FpMatrix(std::uint32_t p, const std::vector<std::vector<long long>>& entries)
      : FpMatrix(p, entries.size(), entries.empty() ? 0 : entries.front().size()) {
    for (std::size_t i = 0; i < rows_; ++i) {
      if (entries[i].size() != cols_) throw Error("ragged matrix rows");
      for (std::size_t j = 0; j < cols_; ++j) set(i, j, entries[i][j]);
    }
  }

  static FpMatrix identity(std::uint32_t p, std::size_t n) {
    FpMatrix m(p, n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1);
    return m;
  }

  std::uint32_t modulus() const { return p_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Residue at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  void set(std::size_t i, std::size_t j, long long v) {
    const long long p = p_;
    data_[i * cols_ + j] = static_cast<Residue>(((v % p) + p) % p);
  }
  void add(std::size_t i, std::size_t j, Residue v) { data_[i * cols_ + j] = mod_add(at(i, j), v % p_, p_); }

  Residue* row(std::size_t i) { return data_.data() + i * cols_; }
  const Residue* row(std::size_t i) const { return data_.data() + i * cols_; }

  FpMatrix transpose() const {
    FpMatrix t(p_, cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t.data_[j * rows_ + i] = at(i, j);
    return t;
  }

  /// Columns in the given order.
  FpMatrix select_columns(const std::vector<std::size_t>& order) const {
    FpMatrix out(p_, rows_, order.size());
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < order.size(); ++k) out.data_[i * order.size() + k] = at(i, order[k]);
    return out;
  }

  FpVector apply(const FpVector& x) const {
    if (x.size() != cols_) throw Error("vector length does not match matrix columns");
    FpVector y(rows_, 0);
    for (std::size_t i = 0; i < rows_; ++i) {
      std::uint64_t acc = 0;
      for (std::size_t j = 0; j < cols_; ++j) acc += static_cast<std::uint64_t>(at(i, j)) * x[j];
      y[i] = static_cast<Residue>(acc % p_);
    }
    return y;
  }

  friend bool operator==(const FpMatrix&, const FpMatrix&) = default;

 private:
  std::uint32_t p_ = 2;
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Residue> data_;
};

/// In-place reduced row echelon form over the first `pivot_cols` columns;
/// pivots are the first nonzero entry in column order. Returns the pivot
/// column of each nonzero row, top to bottom.
inline std::vector<std::size_t> rref(FpMatrix& m, std::size_t pivot_cols) {
  const auto p = m.modulus();
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < pivot_cols && r < m.rows(); ++c) {
    std::size_t sel = r;
    while (sel < m.rows() && m.at(sel, c) == 0) ++sel;
    if (sel == m.rows()) continue;
    if (sel != r) std::swap_ranges(m.row(sel), m.row(sel) + m.cols(), m.row(r));
    const Residue inv = mod_inv(m.at(r, c), p);
    Residue* pr = m.row(r);
    for (std::size_t j = c; j < m.cols(); ++j) pr[j] = mod_mul(pr[j], inv, p);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r) continue;
      Residue* pi = m.row(i);
      const Residue f = pi[c];
      if (f == 0) continue;
      for (std::size_t j = c; j < m.cols(); ++j) {
        if (pr[j]) pi[j] = mod_sub(pi[j], mod_mul(f, pr[j], p), p);
      }
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

inline std::vector<std::size_t> rref(FpMatrix& m) { return rref(m, m.cols()); }

inline std::size_t rank(FpMatrix m) { return rref(m).size(); }

/// Affine subspace {particular + span(basis)} of (Z/p)^n, stored canonically:
/// basis in reduced row echelon form and the particular point reduced to
/// zero at the basis pivots, so equal sets compare equal.
class AffineSolutionSet {
 public:
  AffineSolutionSet() = default;

  static AffineSolutionSet empty_set(std::uint32_t p, std::size_t n) {
    AffineSolutionSet s;
    s.p_ = p;
    s.n_ = n;
    return s;
  }

  static AffineSolutionSet from_generators(std::uint32_t p, FpVector particular, const std::vector<FpVector>& gens) {
    AffineSolutionSet s;
    s.p_ = p;
    s.n_ = particular.size();
    FpMatrix m(p, gens.size(), s.n_);
    for (std::size_t i = 0; i < gens.size(); ++i) {
      if (gens[i].size() != s.n_) throw Error("generator length mismatch");
      for (std::size_t j = 0; j < s.n_; ++j) m.set(i, j, gens[i][j]);
    }
    s.pivots_ = rref(m);
    for (std::size_t i = 0; i < s.pivots_.size(); ++i) s.basis_.emplace_back(m.row(i), m.row(i) + s.n_);
    for (std::size_t i = 0; i < s.pivots_.size(); ++i) {
      const Residue f = particular[s.pivots_[i]];
      if (!f) continue;
      for (std::size_t j = 0; j < s.n_; ++j) particular[j] = mod_sub(particular[j], mod_mul(f, s.basis_[i][j], p), p);
    }
    s.particular_ = std::move(particular);
    return s;
  }

  std::uint32_t modulus() const { return p_; }
  std::size_t ambient_dimension() const { return n_; }
  bool empty() const { return !particular_.has_value(); }
  std::size_t dimension() const {
    if (empty()) throw Error("dimension of an empty solution set");
    return basis_.size();
  }
  const FpVector& particular() const { return *particular_; }
  const std::vector<FpVector>& basis() const { return basis_; }

  bool contains(const FpVector& x) const {
    if (empty() || x.size() != n_) return false;
    FpVector d(n_);
    for (std::size_t j = 0; j < n_; ++j) d[j] = mod_sub(x[j], (*particular_)[j], p_);
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      const Residue f = d[pivots_[i]];
      if (!f) continue;
      for (std::size_t j = 0; j < n_; ++j) d[j] = mod_sub(d[j], mod_mul(f, basis_[i][j], p_), p_);
    }
    return std::all_of(d.begin(), d.end(), [](Residue v) { return v == 0; });
  }

  /// Every member; refuses sets with more than `limit` points.
  std::vector<FpVector> enumerate(std::size_t limit = std::size_t{1} << 16) const {
    if (empty()) return {};
    std::size_t count = 1;
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      count *= p_;
      if (count > limit) throw SizeGuard("solution set too large to enumerate");
    }
    std::vector<FpVector> out;
    std::vector<Residue> coeff(basis_.size(), 0);
    for (std::size_t k = 0; k < count; ++k) {
      FpVector x = *particular_;
      for (std::size_t i = 0; i < basis_.size(); ++i)
        for (std::size_t j = 0; j < n_; ++j) x[j] = mod_add(x[j], mod_mul(coeff[i], basis_[i][j], p_), p_);
      out.push_back(std::move(x));
      for (std::size_t i = 0; i < coeff.size(); ++i) {
        if (++coeff[i] < p_) break;
        coeff[i] = 0;
      }
    }
    return out;
  }

  friend bool operator==(const AffineSolutionSet&, const AffineSolutionSet&) = default;

 private:
  std::uint32_t p_ = 2;
  std::size_t n_ = 0;
  std::optional<FpVector> particular_;
  std::vector<FpVector> basis_;
  std::vector<std::size_t> pivots_;
};

/// Full solution set of m·x = b.
inline AffineSolutionSet solve(const FpMatrix& m, const FpVector& b) {
  if (b.size() != m.rows()) throw Error("right-hand side length does not match matrix rows");
  const auto p = m.modulus();
  FpMatrix aug(p, m.rows(), m.cols() + 1);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) aug.set(i, j, m.at(i, j));
    aug.set(i, m.cols(), b[i]);
  }
  const auto pivots = rref(aug, m.cols() + 1);
  if (!pivots.empty() && pivots.back() == m.cols()) return AffineSolutionSet::empty_set(p, m.cols());
  FpVector particular(m.cols(), 0);
  std::vector<bool> is_pivot(m.cols(), false);
  for (std::size_t i = 0; i < pivots.size(); ++i) {
    particular[pivots[i]] = aug.at(i, m.cols());
    is_pivot[pivots[i]] = true;
  }
  std::vector<FpVector> basis;
  for (std::size_t f = 0; f < m.cols(); ++f) {
    if (is_pivot[f]) continue;
    FpVector v(m.cols(), 0);
    v[f] = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = mod_neg(aug.at(i, f), p);
    basis.push_back(std::move(v));
  }
  return AffineSolutionSet::from_generators(p, std::move(particular), basis);
}

inline AffineSolutionSet nullspace(const FpMatrix& m) { return solve(m, FpVector(m.rows(), 0)); }

/// Image of s under the coordinate projection onto `coords` (in that order).
inline AffineSolutionSet project_solution_set(const AffineSolutionSet& s, const std::vector<std::size_t>& coords) {
  for (auto c : coords)
    if (c >= s.ambient_dimension()) throw Error("projection coordinate out of range");
  if (s.empty()) return AffineSolutionSet::empty_set(s.modulus(), coords.size());
  auto restrict = [&](const FpVector& v) {
    FpVector out;
    for (auto c : coords) out.push_back(v[c]);
    return out;
  };
  std::vector<FpVector> gens;
  for (const auto& b : s.basis()) gens.push_back(restrict(b));
  return AffineSolutionSet::from_generators(s.modulus(), restrict(s.particular()), gens);
}

/// Projection of {x : m·x = b} onto `keep`, by eliminating the other
/// variables first: rows whose pivot falls among the kept columns are the
/// implicit equations of the image.
inline AffineSolutionSet project_system(const FpMatrix& m, const FpVector& b, const std::vector<std::size_t>& keep) {
  if (b.size() != m.rows()) throw Error("right-hand side length does not match matrix rows");
  std::vector<bool> kept(m.cols(), false);
  for (auto c : keep) {
    if (c >= m.cols()) throw Error("projection coordinate out of range");
    kept[c] = true;
  }
  std::vector<std::size_t> order;
  for (std::size_t c = 0; c < m.cols(); ++c)
    if (!kept[c]) order.push_back(c);
  const std::size_t eliminated = order.size();
  order.insert(order.end(), keep.begin(), keep.end());
  FpMatrix aug(m.modulus(), m.rows(), order.size() + 1);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t k = 0; k < order.size(); ++k) aug.set(i, k, m.at(i, order[k]));
    aug.set(i, order.size(), b[i]);
  }
  const auto pivots = rref(aug, order.size() + 1);
  std::vector<std::size_t> implicit;
  for (std::size_t i = 0; i < pivots.size(); ++i)
    if (pivots[i] >= eliminated) implicit.push_back(i);
  FpMatrix reduced(m.modulus(), implicit.size(), keep.size());
  FpVector rhs(implicit.size());
  for (std::size_t k = 0; k < implicit.size(); ++k) {
    for (std::size_t j = 0; j < keep.size(); ++j) reduced.set(k, j, aug.at(implicit[k], eliminated + j));
    rhs[k] = aug.at(implicit[k], order.size());
  }
  return solve(reduced, rhs);
}

}  // namespace flab
