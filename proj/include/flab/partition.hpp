#pragma once

// Finite probability spaces with rational weights and their partitions.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <numeric>
#include <unordered_map>
#include <vector>

#include "flab/entropy_value.hpp"
#include "flab/error.hpp"

namespace flab {

inline constexpr std::size_t kMaxAtoms = std::size_t{1} << 20;

inline void guard_atoms(std::size_t n) {
  if (n > kMaxAtoms) throw SizeGuard("atom space of size " + std::to_string(n) + " exceeds 2^20");
}

/// Atom weights mass[i] / total with integer masses.
class FiniteMeasure {
 public:
  static std::shared_ptr<const FiniteMeasure> uniform(std::size_t n) {
    guard_atoms(n);
    if (n == 0) throw Error("empty probability space");
    return std::shared_ptr<const FiniteMeasure>(new FiniteMeasure(std::vector<std::uint64_t>(n, 1), n));
  }

  /// Rational weights; must be nonnegative and sum to exactly 1.
  static std::shared_ptr<const FiniteMeasure> from_weights(const std::vector<Rational>& w) {
    guard_atoms(w.size());
    BigInt lcm = 1;
    Rational sum = 0;
    for (const auto& q : w) {
      if (q < 0) throw Error("negative atom weight");
      sum += q;
      const BigInt d = boost::multiprecision::denominator(q);
      lcm = lcm / boost::multiprecision::gcd(lcm, d) * d;
    }
    if (sum != 1) throw Error("atom weights do not sum to 1");
    if (lcm > (BigInt(1) << 62)) throw SizeGuard("weight denominators too large");
    std::vector<std::uint64_t> mass;
    for (const auto& q : w) {
      mass.push_back((boost::multiprecision::numerator(q) * (lcm / boost::multiprecision::denominator(q)))
                         .convert_to<std::uint64_t>());
    }
    return std::shared_ptr<const FiniteMeasure>(new FiniteMeasure(std::move(mass), lcm.convert_to<std::uint64_t>()));
  }

  std::size_t size() const { return mass_.size(); }
  std::uint64_t mass(std::size_t i) const { return mass_[i]; }
  std::uint64_t total() const { return total_; }
  Rational weight(std::size_t i) const { return Rational(mass_[i], total_); }
  bool is_uniform() const {
    return std::all_of(mass_.begin(), mass_.end(), [&](auto m) { return m == mass_.front(); });
  }

  friend bool operator==(const FiniteMeasure& a, const FiniteMeasure& b) {
    return a.total_ == b.total_ && a.mass_ == b.mass_;
  }

 private:
  FiniteMeasure(std::vector<std::uint64_t> mass, std::uint64_t total) : mass_(std::move(mass)), total_(total) {}

  std::vector<std::uint64_t> mass_;
  std::uint64_t total_;
};

using MeasurePtr = std::shared_ptr<const FiniteMeasure>;

/// Relabels to 0, 1, 2, ... in order of first occurrence.
inline std::vector<std::uint32_t> canonical_labels(const std::vector<std::uint64_t>& raw) {
  std::unordered_map<std::uint64_t, std::uint32_t> seen;
  std::vector<std::uint32_t> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto [it, fresh] = seen.emplace(raw[i], static_cast<std::uint32_t>(seen.size()));
    out[i] = it->second;
  }
  return out;
}

class FinitePartition {
 public:
  FinitePartition() = default;

  FinitePartition(MeasurePtr measure, const std::vector<std::uint64_t>& raw_labels) : measure_(std::move(measure)) {
    if (!measure_ || raw_labels.size() != measure_->size()) throw Error("partition labels do not match the space");
    labels_ = canonical_labels(raw_labels);
    blocks_ = labels_.empty() ? 0 : *std::max_element(labels_.begin(), labels_.end()) + 1;
  }

  static FinitePartition trivial(MeasurePtr m) { return FinitePartition(m, std::vector<std::uint64_t>(m->size(), 0)); }
  static FinitePartition points(MeasurePtr m) {
    std::vector<std::uint64_t> raw(m->size());
    std::iota(raw.begin(), raw.end(), 0);
    return FinitePartition(m, raw);
  }

  const MeasurePtr& measure() const { return measure_; }
  std::size_t space_size() const { return labels_.size(); }
  std::size_t blocks() const { return blocks_; }
  std::uint32_t block_of(std::size_t atom) const { return labels_[atom]; }
  const std::vector<std::uint32_t>& labels() const { return labels_; }

  bool same_space(const FinitePartition& o) const {
    return measure_ == o.measure_ || (measure_ && o.measure_ && *measure_ == *o.measure_);
  }

  /// Equality as partitions of the same space.
  friend bool operator==(const FinitePartition& a, const FinitePartition& b) {
    return a.same_space(b) && a.labels_ == b.labels_;
  }

 private:
  MeasurePtr measure_;
  std::vector<std::uint32_t> labels_;
  std::uint32_t blocks_ = 0;
};

namespace detail {

/// H = log T - (1/T) sum_B M_B log M_B over block masses M_B.
inline EntropyValue entropy_of_block_masses(const std::vector<std::uint64_t>& block_mass, std::uint64_t total) {
  std::unordered_map<std::uint64_t, std::uint64_t> multiplicity;
  for (auto m : block_mass)
    if (m) ++multiplicity[m];
  std::map<std::uint64_t, BigInt> weighted;  // prime -> sum M_B * v_p(M_B)
  for (const auto& [m, count] : multiplicity) {
    if (m == 1) continue;
    for (auto [p, e] : factorize(m)) weighted[p] += BigInt(m) * count * e;
  }
  EntropyValue h = EntropyValue::log_of(total);
  EntropyValue::Terms sub;
  for (const auto& [p, s] : weighted) sub[p] = Rational(s, BigInt(total));
  h -= EntropyValue::from_terms(sub);
  return h;
}

inline std::vector<std::uint64_t> block_masses(const FinitePartition& p) {
  std::vector<std::uint64_t> mass(p.blocks(), 0);
  for (std::size_t i = 0; i < p.space_size(); ++i) mass[p.block_of(i)] += p.measure()->mass(i);
  return mass;
}

}  // namespace detail

/// -sum nu(P) log nu(P), with 0 log 0 = 0.
inline EntropyValue shannon_entropy(const FinitePartition& p) {
  return detail::entropy_of_block_masses(detail::block_masses(p), p.measure()->total());
}

inline FinitePartition join(const FinitePartition& p, const FinitePartition& q) {
  if (!p.same_space(q)) throw Error("join of partitions on different spaces");
  std::vector<std::uint64_t> raw(p.space_size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    raw[i] = (static_cast<std::uint64_t>(p.block_of(i)) << 32) | q.block_of(i);
  }
  return FinitePartition(p.measure(), raw);
}

/// True when every block of `fine` lies inside a block of `coarse`.
inline bool refines(const FinitePartition& fine, const FinitePartition& coarse) {
  if (!fine.same_space(coarse)) throw Error("refinement test across spaces");
  std::vector<std::int64_t> image(fine.blocks(), -1);
  for (std::size_t i = 0; i < fine.space_size(); ++i) {
    auto& slot = image[fine.block_of(i)];
    if (slot < 0) slot = coarse.block_of(i);
    if (slot != coarse.block_of(i)) return false;
  }
  return true;
}

/// H(p | f) = H(p ∨ f) - H(f).
inline EntropyValue conditional_entropy(const FinitePartition& p, const FinitePartition& f) {
  if (!p.same_space(f)) throw Error("conditional entropy across spaces");
  return shannon_entropy(join(p, f)) - shannon_entropy(f);
}

/// Pointwise I(p|f)(x) = -log( nu(P_x ∩ F_x) / nu(F_x) ), computed from
/// conditional measures rather than from the join-difference formula.
inline std::vector<EntropyValue> information_function(const FinitePartition& p, const FinitePartition& f) {
  if (!p.same_space(f)) throw Error("information function across spaces");
  const auto& m = *p.measure();
  std::vector<std::uint64_t> f_mass(f.blocks(), 0);
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> cell_mass;
  for (std::size_t i = 0; i < p.space_size(); ++i) {
    f_mass[f.block_of(i)] += m.mass(i);
    cell_mass[{p.block_of(i), f.block_of(i)}] += m.mass(i);
  }
  std::vector<EntropyValue> out(p.space_size());
  for (std::size_t i = 0; i < p.space_size(); ++i) {
    const auto cell = cell_mass[{p.block_of(i), f.block_of(i)}];
    if (cell == 0) continue;  // null atom
    out[i] = -EntropyValue::log_of(Rational(cell, f_mass[f.block_of(i)]));
  }
  return out;
}

/// Integral of a pointwise function against the measure.
inline EntropyValue integrate(const std::vector<EntropyValue>& values, const FiniteMeasure& m) {
  EntropyValue sum;
  for (std::size_t i = 0; i < values.size(); ++i) sum += values[i] * m.weight(i);
  return sum;
}

/// Partition moved by a bijection t:  (t P) has blocks t(B), so the label
/// of x is the P-label of t^{-1}(x).
inline FinitePartition push_forward(const FinitePartition& p, const std::vector<std::uint32_t>& t) {
  std::vector<std::uint64_t> raw(p.space_size());
  for (std::size_t x = 0; x < t.size(); ++x) raw[t[x]] = p.block_of(x);
  return FinitePartition(p.measure(), raw);
}

struct FiniteRate {
  EntropyValue value;         // always zero
  std::size_t stabilized_at;  // first n >= 1 with J_n == J_{n-1}
};

/// Entropy rate of a finite Z-system: the two-sided joins J_n stop refining
/// after finitely many steps, so H(J_n)/(2n+1) -> 0. Returns the step at
/// which the join stabilized as the certificate.
inline FiniteRate z_entropy_rate_finite(const std::vector<std::uint32_t>& t, const FinitePartition& p) {
  const auto& m = *p.measure();
  if (t.size() != p.space_size()) throw Error("map and partition on different spaces");
  std::vector<bool> hit(t.size(), false);
  for (std::size_t x = 0; x < t.size(); ++x) {
    if (t[x] >= t.size() || hit[t[x]]) throw Error("map is not a bijection");
    hit[t[x]] = true;
    if (m.mass(t[x]) != m.mass(x)) throw Error("map does not preserve the measure");
  }
  std::vector<std::uint32_t> inv(t.size());
  for (std::size_t x = 0; x < t.size(); ++x) inv[t[x]] = static_cast<std::uint32_t>(x);
  FinitePartition forward = p, backward = p, joined = p;
  for (std::size_t n = 1;; ++n) {
    forward = push_forward(forward, t);
    backward = push_forward(backward, inv);
    FinitePartition next = join(join(joined, forward), backward);
    if (next == joined) return {EntropyValue{}, n};
    joined = std::move(next);
  }
}

}  // namespace flab
