#pragma once

// Skew products (α ×_σ β)_g (x, y) = (α_g x, (β_g y)·σ(g, x)) over finite
// bases and Bernoulli bases, section cocycles for invariant normal
// subgroups, special partitions and exhaustive verifiers for the partition
// identities used in the addition formula.

#include <algorithm>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "flab/entropy_value.hpp"
#include "flab/error.hpp"
#include "flab/finite_group.hpp"
#include "flab/free_group.hpp"
#include "flab/partition.hpp"
#include "flab/process.hpp"

namespace flab {

/// σ: Γ × X → G given on generators and extended to reduced words through
/// σ(t·g, x) = β_t(σ(g, x))·σ(t, α_g x).
class Cocycle {
 public:
  Cocycle() = default;
  /// table[i-1][x] = σ(s_i, x).
  Cocycle(FinitePermAction base, FiniteGroupAction fiber, std::vector<std::vector<std::uint32_t>> table)
      : base_(std::move(base)), fiber_(std::move(fiber)), table_(std::move(table)) {
    if (base_.rank() != fiber_.rank()) throw RankMismatch(base_.rank(), fiber_.rank());
    if (static_cast<int>(table_.size()) != base_.rank()) throw Error("one cocycle row per generator is required");
    for (const auto& row : table_) {
      if (row.size() != base_.size()) throw Error("cocycle row does not cover the base");
      for (auto v : row)
        if (v >= fiber_.group().order()) throw Error("cocycle value outside the fiber group");
    }
  }

  static Cocycle trivial(FinitePermAction base, FiniteGroupAction fiber) {
    std::vector<std::vector<std::uint32_t>> t(static_cast<std::size_t>(base.rank()),
                                              std::vector<std::uint32_t>(base.size(), 0));
    return Cocycle(std::move(base), std::move(fiber), std::move(t));
  }

  const FinitePermAction& base() const { return base_; }
  const FiniteGroupAction& fiber() const { return fiber_; }
  int rank() const { return base_.rank(); }
  const std::vector<std::vector<std::uint32_t>>& table() const { return table_; }

  /// Deliberate fault for the verifier suite: every word-level value is
  /// multiplied by z on the left, so σ(e, x) = z.
  void inject_fault(std::uint32_t z) { fault_ = z; }

  /// σ(s, x) for a signed letter; σ(s⁻¹, x) = β_{s⁻¹}(σ(s, α_{s⁻¹}x))⁻¹.
  std::uint32_t at_letter(int letter, std::uint32_t x) const {
    const auto i = static_cast<std::size_t>(std::abs(letter) - 1);
    if (letter > 0) return table_[i][x];
    const auto y = base_.apply_letter(letter, x);
    const auto v = fiber_.action().apply_letter(letter, table_[i][y]);
    return fiber_.group().inv(v);
  }

  std::uint32_t at(const FreeWord& w, std::uint32_t x) const {
    const auto& g = fiber_.group();
    std::uint32_t value = g.identity();
    std::uint32_t moved = x;  // α_{suffix} x
    const auto& ls = w.letters();
    for (auto it = ls.rbegin(); it != ls.rend(); ++it) {
      value = g.mul(fiber_.action().apply_letter(*it, value), at_letter(*it, moved));
      moved = base_.apply_letter(*it, moved);
    }
    return fault_ ? g.mul(*fault_, value) : value;
  }

 private:
  FinitePermAction base_;
  FiniteGroupAction fiber_;
  std::vector<std::vector<std::uint32_t>> table_;
  std::optional<std::uint32_t> fault_;
};

/// The skew product as a finite action on X × G, point (x, y) ↦ x·|G| + y.
class SkewProduct {
 public:
  explicit SkewProduct(Cocycle sigma) : sigma_(std::move(sigma)) {
    const auto& base = sigma_.base();
    const auto& fib = sigma_.fiber();
    const std::size_t ng = fib.group().order();
    guard_atoms(base.size() * ng);
    std::vector<Rational> weights;
    for (std::size_t x = 0; x < base.size(); ++x)
      for (std::size_t y = 0; y < ng; ++y) weights.push_back(base.measure()->weight(x) / Rational(ng));
    auto measure = base.measure()->is_uniform() ? FiniteMeasure::uniform(weights.size()) : FiniteMeasure::from_weights(weights);
    std::vector<Perm> gens;
    for (int i = 1; i <= sigma_.rank(); ++i) {
      Perm t(weights.size());
      for (std::uint32_t x = 0; x < base.size(); ++x) {
        for (std::uint32_t y = 0; y < ng; ++y) {
          const auto fy = fib.group().mul(fib.action().generator(i)[y], sigma_.at_letter(i, x));
          t[point(x, y)] = point(base.generator(i)[x], fy);
        }
      }
      gens.push_back(std::move(t));
    }
    action_ = FinitePermAction(sigma_.rank(), std::move(gens), measure);
  }

  const Cocycle& cocycle() const { return sigma_; }
  const FinitePermAction& action() const { return action_; }
  const FinitePermAction& base() const { return sigma_.base(); }
  const FiniteGroupAction& fiber() const { return sigma_.fiber(); }
  std::size_t fiber_order() const { return sigma_.fiber().group().order(); }

  std::uint32_t point(std::uint32_t x, std::uint32_t y) const {
    return static_cast<std::uint32_t>(x * fiber_order() + y);
  }
  std::uint32_t base_of(std::uint32_t pt) const { return static_cast<std::uint32_t>(pt / fiber_order()); }
  std::uint32_t fiber_of(std::uint32_t pt) const { return static_cast<std::uint32_t>(pt % fiber_order()); }

  /// P × Q on X × G from a base partition and fiber labels.
  FinitePartition product(const FinitePartition& p, const FinitePartition& q) const {
    std::vector<std::uint64_t> raw(action_.size());
    for (std::uint32_t pt = 0; pt < raw.size(); ++pt)
      raw[pt] = (static_cast<std::uint64_t>(p.block_of(base_of(pt))) << 32) | q.block_of(fiber_of(pt));
    return FinitePartition(action_.measure(), raw);
  }

  /// The base algebra B_X lifted to X × G.
  FinitePartition base_algebra() const {
    return product(FinitePartition::points(base().measure()),
                   FinitePartition::trivial(fiber().action().measure()));
  }

 private:
  Cocycle sigma_;
  FinitePermAction action_;
};

/// Process on X × G observing P × Q and conditioning on the base algebra.
inline FiniteActionProcess skew_process(const SkewProduct& sp, const FinitePartition& p, const FinitePartition& q,
                                        std::string label) {
  return FiniteActionProcess(sp.action(), sp.product(p, q), std::move(label), sp.base_algebra());
}

/// Cosets {gN} of a normal subgroup as a partition of G.
inline FinitePartition special_partition(const FiniteGroup& g, const std::vector<std::uint32_t>& n) {
  if (!g.is_normal(n)) throw Error("special partitions need a normal subgroup");
  const auto lab = g.coset_labels(n);
  return FinitePartition(FiniteMeasure::uniform(g.order()), std::vector<std::uint64_t>(lab.begin(), lab.end()));
}

struct IdentityCheck {
  std::size_t checked = 0;
  std::size_t failures = 0;
  std::optional<std::string> witness;

  bool ok() const { return failures == 0; }
  void fail(const std::string& what) {
    if (!witness) witness = what;
    ++failures;
  }
};

/// σ(e, x) = 1 and σ(gh, x) = β_g(σ(h, x))·σ(g, α_h x) for all words g, h
/// of length ≤ max_len and every base point.
inline IdentityCheck verify_cocycle_identity(const Cocycle& c, std::size_t max_len = 3) {
  IdentityCheck out;
  const auto& g = c.fiber().group();
  const auto e = FreeWord::identity(c.rank());
  const auto words = ball(c.rank(), max_len);
  for (std::uint32_t x = 0; x < c.base().size(); ++x) {
    ++out.checked;
    if (c.at(e, x) != g.identity()) out.fail("σ(e, x=" + std::to_string(x) + ") = " + g.label(c.at(e, x)));
    for (const auto& a : words) {
      for (const auto& b : words) {
        ++out.checked;
        const auto lhs = c.at(a * b, x);
        const auto rhs = g.mul(c.fiber().action().apply(a, c.at(b, x)), c.at(a, c.base().apply(b, x)));
        if (lhs != rhs) {
          out.fail("g=" + a.to_string() + ", h=" + b.to_string() + ", x=" + std::to_string(x) + ": σ(gh,x)=" +
                   g.label(lhs) + " but β_g(σ(h,x))·σ(g,α_h x)=" + g.label(rhs));
        }
      }
    }
  }
  return out;
}

/// The generator-built action agrees with (α_w x, β_w(y)·σ(w, x)) on all words.
inline IdentityCheck verify_skew_action(const SkewProduct& sp, std::size_t max_len = 3) {
  IdentityCheck out;
  const auto& g = sp.fiber().group();
  for (const auto& w : ball(sp.action().rank(), max_len)) {
    for (std::uint32_t pt = 0; pt < sp.action().size(); ++pt) {
      ++out.checked;
      const auto x = sp.base_of(pt), y = sp.fiber_of(pt);
      const auto expect = sp.point(sp.base().apply(w, x), g.mul(sp.fiber().action().apply(w, y), sp.cocycle().at(w, x)));
      if (sp.action().apply(w, pt) != expect) out.fail("word " + w.to_string() + " at point " + std::to_string(pt));
    }
  }
  return out;
}

/// Realization of an action on G through its invariant normal subgroup N:
/// base G/N, fiber N, and σ(g, c) = α_g(s(c))·s(α_g c)⁻¹ for the section s
/// choosing the least element of each coset.
struct SectionCocycle {
  FiniteGroupAction whole;
  std::vector<std::uint32_t> normal;
  std::vector<std::uint32_t> reps;  // s(c), increasing
  FinitePermAction quotient;
  Cocycle cocycle;

  std::uint32_t section(std::uint32_t c) const { return reps[c]; }
  /// Φ(c, n) = n·s(c), with n given by its index in `normal`.
  std::uint32_t phi(std::uint32_t c, std::uint32_t n) const { return whole.group().mul(normal[n], reps[c]); }
};

inline SectionCocycle cocycle_from_section(const FiniteGroupAction& g, const std::vector<std::uint32_t>& n) {
  const auto& grp = g.group();
  if (!grp.is_normal(n)) throw Error("subgroup is not normal");
  if (!g.preserves(n)) throw Error("subgroup is not invariant under the action");
  SectionCocycle out{g, n, {}, {}, {}};
  std::sort(out.normal.begin(), out.normal.end());
  const auto lab = grp.coset_labels(n);
  std::set<std::uint32_t> reps(lab.begin(), lab.end());
  out.reps.assign(reps.begin(), reps.end());
  std::map<std::uint32_t, std::uint32_t> coset_index;
  for (std::size_t i = 0; i < out.reps.size(); ++i) coset_index[out.reps[i]] = static_cast<std::uint32_t>(i);
  std::map<std::uint32_t, std::uint32_t> local;
  for (std::size_t i = 0; i < out.normal.size(); ++i) local[out.normal[i]] = static_cast<std::uint32_t>(i);

  std::vector<Perm> qgens;
  std::vector<std::vector<std::uint32_t>> table;
  for (int i = 1; i <= g.rank(); ++i) {
    const auto& a = g.action().generator(i);
    Perm q(out.reps.size());
    std::vector<std::uint32_t> row(out.reps.size());
    for (std::uint32_t c = 0; c < out.reps.size(); ++c) {
      const auto image = a[out.reps[c]];
      q[c] = coset_index.at(lab[image]);
      row[c] = local.at(grp.mul(image, grp.inv(out.reps[q[c]])));
    }
    qgens.push_back(std::move(q));
    table.push_back(std::move(row));
  }
  out.quotient = FinitePermAction(g.rank(), std::move(qgens));
  out.cocycle = Cocycle(out.quotient, g.restrict_to(out.normal), std::move(table));
  return out;
}

/// Φ is a bijection X × N → G with Φ ∘ (α ×_σ β)_w = α_w ∘ Φ, and the word
/// extension of σ matches the closed section formula.
inline IdentityCheck verify_conjugacy(const SectionCocycle& sc, std::size_t max_len = 3) {
  IdentityCheck out;
  const auto& grp = sc.whole.group();
  const SkewProduct sp(sc.cocycle);
  std::vector<bool> hit(grp.order(), false);
  for (std::uint32_t pt = 0; pt < sp.action().size(); ++pt) {
    const auto img = sc.phi(sp.base_of(pt), sp.fiber_of(pt));
    if (hit[img]) out.fail("Φ is not injective at point " + std::to_string(pt));
    hit[img] = true;
  }
  std::map<std::uint32_t, std::uint32_t> local;
  for (std::size_t i = 0; i < sc.normal.size(); ++i) local[sc.normal[i]] = static_cast<std::uint32_t>(i);
  for (const auto& w : ball(sc.whole.rank(), max_len)) {
    for (std::uint32_t pt = 0; pt < sp.action().size(); ++pt) {
      ++out.checked;
      const auto c = sp.base_of(pt), n = sp.fiber_of(pt);
      const auto moved = sp.action().apply(w, pt);
      if (sc.phi(sp.base_of(moved), sp.fiber_of(moved)) != sc.whole.action().apply(w, sc.phi(c, n))) {
        out.fail("Φ does not intertwine at word " + w.to_string() + ", point (" + std::to_string(c) + "," +
                 grp.label(sc.normal[n]) + ")");
      }
    }
    for (std::uint32_t c = 0; c < sc.reps.size(); ++c) {
      ++out.checked;
      const auto aw = sc.whole.action().apply(w, sc.section(c));
      const auto closed = grp.mul(aw, grp.inv(sc.section(sc.quotient.apply(w, c))));
      const auto it = local.find(closed);
      if (it == local.end() || sc.cocycle.at(w, c) != it->second) {
        out.fail("σ(" + w.to_string() + ", c=" + std::to_string(c) + ") differs from the section formula");
      }
    }
  }
  return out;
}

/// Right translate Qg = {Bg}: the label of y is the Q-label of y g⁻¹.
inline FinitePartition right_translate(const FinitePartition& q, const FiniteGroup& g, std::uint32_t h) {
  std::vector<std::uint64_t> raw(g.order());
  for (std::uint32_t y = 0; y < g.order(); ++y) raw[y] = q.block_of(g.mul(y, g.inv(h)));
  return FinitePartition(q.measure(), raw);
}

/// K(Q) = max over g of H(Qg | Q) + H(Q | Qg).
inline EntropyValue K_of(const FinitePartition& q, const FiniteGroup& g) {
  if (q.space_size() != g.order()) throw Error("partition does not live on the group");
  EntropyValue best;
  for (std::uint32_t h = 0; h < g.order(); ++h) {
    const auto qh = right_translate(q, g, h);
    best = std::max(best, conditional_entropy(qh, q) + conditional_entropy(q, qh));
  }
  return best;
}

/// Single transformation T on a finite uniform base, automorphism S of the
/// fiber and cocycle values σ(1, x).
struct ZSkewSystem {
  Perm t;
  FiniteGroup group;
  Perm s;
  std::vector<std::uint32_t> sigma1;

  /// σ(n, x), with σ(k+1, x) = S(σ(k, x))·σ(1, T^k x).
  std::uint32_t sigma(std::size_t n, std::uint32_t x) const {
    std::uint32_t v = group.identity();
    std::uint32_t tx = x;
    for (std::size_t k = 0; k < n; ++k) {
      v = group.mul(s[v], sigma1[tx]);
      tx = t[tx];
    }
    return v;
  }
};

struct TwistGapRecord {
  std::size_t m = 0;
  std::uint32_t x = 0;
  EntropyValue gap;    // |H(Q^m) - H(Q_x^m)|
  EntropyValue bound;  // m·K(Q)
};

struct TwistGapCheck {
  EntropyValue K;
  std::vector<TwistGapRecord> records;
  std::size_t violations = 0;
  std::optional<std::string> witness;
  bool ok() const { return violations == 0; }
};

/// Compares Q^m = ∨_{k<m} S^{-k}Q with Q_x^m = ∨_{k<m} S^{-k}(Q σ(k,x)⁻¹)
/// for every base point; requires equality when K(Q) = 0.
inline TwistGapCheck verify_lemma_5_1_step(const ZSkewSystem& sys, const FinitePartition& q, std::size_t m) {
  const auto& g = sys.group;
  if (!g.is_automorphism(sys.s)) throw Error("fiber map is not an automorphism");
  if (!is_permutation_of(sys.t, sys.sigma1.size())) throw Error("base map is not a permutation");
  TwistGapCheck out;
  out.K = K_of(q, g);
  auto s_power = [&](std::size_t k, std::uint32_t y) {
    for (std::size_t i = 0; i < k; ++i) y = sys.s[y];
    return y;
  };
  std::vector<std::uint64_t> plain(g.order(), 0);
  std::vector<std::vector<std::uint32_t>> plain_labels(g.order());
  for (std::uint32_t y = 0; y < g.order(); ++y)
    for (std::size_t k = 0; k < m; ++k) plain_labels[y].push_back(q.block_of(s_power(k, y)));
  auto from_tuples = [&](const std::vector<std::vector<std::uint32_t>>& tuples) {
    std::map<std::vector<std::uint32_t>, std::uint64_t> ids;
    std::vector<std::uint64_t> raw;
    for (const auto& t : tuples) raw.push_back(ids.emplace(t, ids.size()).first->second);
    return FinitePartition(q.measure(), raw);
  };
  const EntropyValue h_plain = shannon_entropy(from_tuples(plain_labels));
  for (std::uint32_t x = 0; x < sys.sigma1.size(); ++x) {
    std::vector<std::vector<std::uint32_t>> twisted(g.order());
    for (std::uint32_t y = 0; y < g.order(); ++y)
      for (std::size_t k = 0; k < m; ++k) twisted[y].push_back(q.block_of(g.mul(s_power(k, y), sys.sigma(k, x))));
    EntropyValue gap = h_plain - shannon_entropy(from_tuples(twisted));
    if (gap.sign() < 0) gap = -gap;
    TwistGapRecord rec{m, x, gap, out.K * static_cast<long long>(m)};
    const bool bad = rec.gap > rec.bound || (out.K.is_zero() && !rec.gap.is_zero());
    if (bad) {
      ++out.violations;
      if (!out.witness) out.witness = "m=" + std::to_string(m) + ", x=" + std::to_string(x) + ": gap " + gap.to_string();
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

/// Smallest invariant partition coarser than everything generated by Q:
/// joins with generator images until nothing changes.
inline FinitePartition sigma_generated(const FinitePermAction& a, const FinitePartition& q) {
  FinitePartition cur = q;
  while (true) {
    FinitePartition next = cur;
    for (int i = 1; i <= a.rank(); ++i) {
      next = join(next, a.translate(cur, FreeWord(a.rank(), {i})));
      next = join(next, a.translate(cur, FreeWord(a.rank(), {-i})));
    }
    if (next.blocks() == cur.blocks()) return cur;
    cur = std::move(next);
  }
}

struct PartitionCheck {
  bool equal = false;
  std::size_t atoms = 0;
  std::optional<std::string> witness;
};

inline PartitionCheck compare_partitions(const FinitePartition& a, const FinitePartition& b) {
  PartitionCheck out{a == b, a.space_size(), std::nullopt};
  if (!out.equal) {
    for (std::size_t i = 0; i < a.space_size(); ++i) {
      if (a.block_of(i) != b.block_of(i)) {
        out.witness = "first disagreement at atom " + std::to_string(i);
        break;
      }
    }
  }
  return out;
}

/// P_g on the base: x is labelled by the β_g(N)-coset containing σ(g, x).
inline FinitePartition pulled_back_partition(const SkewProduct& sp, const FreeWord& g, const std::vector<std::uint32_t>& n) {
  const auto& grp = sp.fiber().group();
  const auto q = special_partition(grp, n);
  const auto bq = sp.fiber().action().translate(q, g);
  std::vector<std::uint64_t> raw(sp.base().size());
  for (std::uint32_t x = 0; x < raw.size(); ++x) raw[x] = bq.block_of(sp.cocycle().at(g, x));
  return FinitePartition(sp.base().measure(), raw);
}

/// (α ×_σ β)_g((P_g ∨ P′) × Q) = α_g(P_g ∨ P′) × β_g(Q), atom by atom.
inline PartitionCheck verify_lemma_6_3(const SkewProduct& sp, const FreeWord& g, const std::vector<std::uint32_t>& n,
                                       const FinitePartition& p_prime) {
  const auto q = special_partition(sp.fiber().group(), n);
  const auto r = join(pulled_back_partition(sp, g, n), p_prime);
  const auto lhs = sp.action().translate(sp.product(r, q), g);
  const auto rhs = sp.product(sp.base().translate(r, g), sp.fiber().action().translate(q, g));
  return compare_partitions(lhs, rhs);
}

/// Σ(P × Q) = B_X × Σ(Q) for P generating on the base and special Q.
inline PartitionCheck verify_lemma_6_4(const SkewProduct& sp, const FinitePartition& p, const std::vector<std::uint32_t>& n) {
  if (!(sigma_generated(sp.base(), p) == FinitePartition::points(sp.base().measure()))) {
    throw Error("base partition is not generating");
  }
  const auto q = special_partition(sp.fiber().group(), n);
  const auto lhs = sigma_generated(sp.action(), sp.product(p, q));
  const auto rhs = sp.product(FinitePartition::points(sp.base().measure()), sigma_generated(sp.fiber().action(), q));
  return compare_partitions(lhs, rhs);
}

/// ((P ∨ R_n) × Q)^{B(n)} = (P ∨ R_n)^{B(n)} × Q^{B(n)} with R_n = ∨_{g∈B(n)} P_g.
inline PartitionCheck verify_chain_step(const SkewProduct& sp, const FinitePartition& p, const std::vector<std::uint32_t>& n,
                                        std::size_t radius) {
  const int r = sp.action().rank();
  const auto q = special_partition(sp.fiber().group(), n);
  const auto b = ball(r, radius);
  FinitePartition pr = p;
  for (const auto& g : b) pr = join(pr, pulled_back_partition(sp, g, n));
  const auto lhs = sp.action().window_join(sp.product(pr, q), b);
  const auto rhs = sp.product(sp.base().window_join(pr, b), sp.fiber().action().window_join(q, b));
  return compare_partitions(lhs, rhs);
}

struct SpecialJoin {
  std::vector<std::uint32_t> intersection;
  FinitePartition joined;
  bool special = false;
};

/// ∨_i T_i(Q_i) for special Q_i = cosets of N_i and automorphisms T_i; it is
/// special, with blocks the cosets of ∩_i T_i(N_i).
inline SpecialJoin join_special(const FiniteGroup& g, const std::vector<std::vector<std::uint32_t>>& normals,
                                const std::vector<Perm>& autos) {
  if (normals.size() != autos.size() || normals.empty()) throw Error("one automorphism per special partition is required");
  SpecialJoin out;
  const auto measure = FiniteMeasure::uniform(g.order());
  out.joined = FinitePartition::trivial(measure);
  std::vector<int> count(g.order(), 0);
  for (std::size_t i = 0; i < normals.size(); ++i) {
    if (!g.is_automorphism(autos[i])) throw Error("map is not an automorphism");
    const auto q = special_partition(g, normals[i]);
    const auto back = inverse_perm(autos[i]);
    std::vector<std::uint64_t> raw(g.order());
    for (std::uint32_t y = 0; y < g.order(); ++y) raw[y] = q.block_of(back[y]);
    out.joined = join(out.joined, FinitePartition(measure, raw));
    for (auto x : normals[i]) ++count[autos[i][x]];
  }
  for (std::uint32_t y = 0; y < g.order(); ++y)
    if (count[y] == static_cast<int>(normals.size())) out.intersection.push_back(y);
  out.special = g.is_normal(out.intersection) && out.joined == special_partition(g, out.intersection);
  return out;
}

/// Skew product over the Bernoulli shift (Z/k)^Γ, (α_g x)(h) = x(g⁻¹h),
/// with σ(s_i, x) read from x on a declared finite window D. Observes the
/// coordinate at e and fiber labels Q; conditions on the whole base.
class BernoulliSkewProcess : public FiniteProcess {
 public:
  /// tables[i-1][pattern] = σ(s_i, x), pattern = Σ_j x(d_j)·k^j over D in order.
  BernoulliSkewProcess(std::size_t k, WordSet dependence, FiniteGroupAction fiber,
                       std::vector<std::vector<std::uint32_t>> tables, FinitePartition q, std::string label)
      : k_(k), d_(std::move(dependence)), fiber_(std::move(fiber)), tables_(std::move(tables)), q_(std::move(q)),
        label_(std::move(label)) {
    if (d_.rank() != fiber_.rank()) throw RankMismatch(d_.rank(), fiber_.rank());
    if (static_cast<int>(tables_.size()) != fiber_.rank()) throw Error("one cocycle table per generator is required");
    std::size_t patterns = 1;
    for (std::size_t i = 0; i < d_.size(); ++i) patterns *= k_;
    for (const auto& t : tables_) {
      if (t.size() != patterns) throw Error("cocycle table does not cover every pattern on the dependence window");
      for (auto v : t)
        if (v >= fiber_.group().order()) throw Error("cocycle value outside the fiber group");
    }
    if (q_.space_size() != fiber_.group().order()) throw Error("fiber partition does not live on the fiber group");
  }

  int rank() const override { return fiber_.rank(); }
  std::string name() const override { return label_; }
  bool has_base() const override { return true; }

  /// Base coordinates read when labelling points for window W.
  WordSet dependency(const WordSet& w) const {
    WordSet u(rank());
    auto record = [&](const FreeWord& c) {
      u.insert(c);
      return std::uint32_t{0};
    };
    for (const auto& g : w) {
      u.insert(g);
      sigma(g.inverse(), FreeWord::identity(rank()), record);
    }
    return u;
  }

  /// σ(w, α_{a⁻¹}x) where the configuration is read through `x`.
  template <typename Reader>
  std::uint32_t sigma(const FreeWord& w, const FreeWord& a, Reader&& x) const {
    const auto& g = fiber_.group();
    std::uint32_t value = g.identity();
    FreeWord view = a;  // α_{suffix} x seen from `view`: coordinate d is x(view·d)
    const auto& ls = w.letters();
    for (auto it = ls.rbegin(); it != ls.rend(); ++it) {
      value = g.mul(fiber_.action().apply_letter(*it, value), letter_value(*it, view, x));
      view = view * FreeWord(rank(), {-*it});
    }
    return value;
  }

 protected:
  EntropyValue compute_entropy(const WordSet& w) const override { return labels(w, false); }
  EntropyValue compute_conditional(const WordSet& w) const override { return labels(w, true); }

 private:
  template <typename Reader>
  std::uint32_t letter_value(int letter, const FreeWord& view, Reader&& x) const {
    const auto i = static_cast<std::size_t>(std::abs(letter) - 1);
    if (letter > 0) return tables_[i][pattern_index(view, x)];
    const FreeWord moved = view * FreeWord::generator(rank(), std::abs(letter));
    const auto v = fiber_.action().apply_letter(letter, tables_[i][pattern_index(moved, x)]);
    return fiber_.group().inv(v);
  }

  template <typename Reader>
  std::size_t pattern_index(const FreeWord& view, Reader&& x) const {
    std::size_t idx = 0, scale = 1;
    for (const auto& d : d_) {
      idx += static_cast<std::size_t>(x(view * d)) * scale;
      scale *= k_;
    }
    return idx;
  }

  EntropyValue labels(const WordSet& w, bool conditional) const {
    const WordSet u = dependency(w);
    const auto col = u.index();
    std::size_t patterns = 1;
    for (std::size_t i = 0; i < u.size(); ++i) {
      patterns *= k_;
      guard_atoms(patterns * fiber_.group().order());
    }
    const std::size_t ng = fiber_.group().order();
    std::vector<std::uint64_t> joint(patterns * ng), base(patterns * ng);
    std::map<std::vector<std::uint64_t>, std::uint64_t> ids;
    std::vector<std::uint32_t> cfg(u.size());
    for (std::size_t pat = 0; pat < patterns; ++pat) {
      std::size_t rest = pat;
      for (auto& c : cfg) {
        c = static_cast<std::uint32_t>(rest % k_);
        rest /= k_;
      }
      auto read = [&](const FreeWord& c) { return cfg[col.at(c)]; };
      std::vector<std::uint32_t> shift_values;
      for (const auto& g : w) shift_values.push_back(sigma(g.inverse(), FreeWord::identity(rank()), read));
      std::vector<bool> seen(ng, false);
      for (std::uint32_t y = 0; y < ng; ++y) {
        std::vector<std::uint64_t> key;
        std::size_t j = 0;
        for (const auto& g : w) {
          const auto fy = fiber_.group().mul(fiber_.action().apply(g.inverse(), y), shift_values[j]);
          if (j == 0) {
            // fiber maps are bijections for each fixed base pattern
            if (seen[fy]) throw Error("skew product does not preserve the fiber measure");
            seen[fy] = true;
          }
          key.push_back(read(g));
          key.push_back(q_.block_of(fy));
          ++j;
        }
        joint[pat * ng + y] = ids.emplace(key, ids.size()).first->second;
        base[pat * ng + y] = pat;
      }
    }
    const auto measure = FiniteMeasure::uniform(patterns * ng);
    const FinitePartition pj(measure, joint);
    if (!conditional) return shannon_entropy(pj);
    return flab::conditional_entropy(pj, FinitePartition(measure, base));
  }

  std::size_t k_;
  WordSet d_;
  FiniteGroupAction fiber_;
  std::vector<std::vector<std::uint32_t>> tables_;
  FinitePartition q_;
  std::string label_;
};

}  // namespace flab
