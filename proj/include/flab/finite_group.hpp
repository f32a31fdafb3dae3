#pragma once

// Small finite groups given by multiplication tables, their automorphisms
// and subgroups, and finite measure-preserving actions of F_r.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "flab/error.hpp"
#include "flab/free_group.hpp"
#include "flab/partition.hpp"

namespace flab {

using Perm = std::vector<std::uint32_t>;

inline bool is_permutation_of(const Perm& p, std::size_t n) {
  if (p.size() != n) return false;
  std::vector<bool> hit(n, false);
  for (auto v : p) {
    if (v >= n || hit[v]) return false;
    hit[v] = true;
  }
  return true;
}

inline Perm inverse_perm(const Perm& p) {
  Perm inv(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) inv[p[i]] = static_cast<std::uint32_t>(i);
  return inv;
}

inline Perm identity_perm(std::size_t n) {
  Perm p(n);
  std::iota(p.begin(), p.end(), 0u);
  return p;
}

/// Elements are 0..order-1; element 0 is the identity.
class FiniteGroup {
 public:
  FiniteGroup() = default;

  /// From a full Cayley table; checks the group axioms.
  FiniteGroup(std::string name, std::vector<std::vector<std::uint32_t>> table, std::vector<std::string> labels = {})
      : name_(std::move(name)), n_(table.size()), labels_(std::move(labels)) {
    if (n_ == 0) throw Error("empty group table");
    guard_atoms(n_ * n_);
    mul_.resize(n_ * n_);
    for (std::size_t a = 0; a < n_; ++a) {
      if (table[a].size() != n_) throw Error("group table is not square");
      for (std::size_t b = 0; b < n_; ++b) {
        if (table[a][b] >= n_) throw Error("group table entry out of range");
        mul_[a * n_ + b] = table[a][b];
      }
    }
    validate();
    if (labels_.empty()) {
      for (std::size_t i = 0; i < n_; ++i) labels_.push_back(std::to_string(i));
    }
  }

  static FiniteGroup cyclic(std::uint32_t n) { return abelian({n}); }

  /// Z/n1 x Z/n2 x ..., elements in mixed radix with the first factor fastest.
  static FiniteGroup abelian(const std::vector<std::uint32_t>& orders) {
    std::size_t n = 1;
    for (auto o : orders) {
      if (o == 0) throw Error("cyclic factor of order 0");
      n *= o;
      guard_atoms(n * n);
    }
    auto digits = [&](std::size_t x) {
      std::vector<std::uint32_t> d;
      for (auto o : orders) {
        d.push_back(static_cast<std::uint32_t>(x % o));
        x /= o;
      }
      return d;
    };
    std::vector<std::vector<std::uint32_t>> t(n, std::vector<std::uint32_t>(n));
    std::vector<std::string> labels;
    for (std::size_t a = 0; a < n; ++a) {
      const auto da = digits(a);
      for (std::size_t b = 0; b < n; ++b) {
        const auto db = digits(b);
        std::size_t v = 0, scale = 1;
        for (std::size_t i = 0; i < orders.size(); ++i) {
          v += (da[i] + db[i]) % orders[i] * scale;
          scale *= orders[i];
        }
        t[a][b] = static_cast<std::uint32_t>(v);
      }
      if (orders.size() == 1) {
        labels.push_back(std::to_string(a));
      } else {
        std::string s = "(";
        for (std::size_t i = 0; i < da.size(); ++i) s += (i ? "," : "") + std::to_string(da[i]);
        labels.push_back(s + ")");
      }
    }
    std::string name;
    for (std::size_t i = 0; i < orders.size(); ++i) name += (i ? "xZ/" : "Z/") + std::to_string(orders[i]);
    return FiniteGroup(name, std::move(t), std::move(labels));
  }

  /// Symmetries of the square: r^i s^j stored as i + 4j.
  static FiniteGroup dihedral4() {
    std::vector<std::vector<std::uint32_t>> t(8, std::vector<std::uint32_t>(8));
    std::vector<std::string> labels;
    for (std::uint32_t a = 0; a < 8; ++a) {
      const std::uint32_t i = a % 4, j = a / 4;
      for (std::uint32_t b = 0; b < 8; ++b) {
        const std::uint32_t k = b % 4, l = b / 4;
        const std::uint32_t rot = (j == 0 ? i + k : i + 4 - k) % 4;
        t[a][b] = rot + 4 * ((j + l) % 2);
      }
      labels.push_back(i == 0 && j == 0 ? "1" : (i ? "r" + (i > 1 ? std::to_string(i) : "") : "") + (j ? "s" : ""));
    }
    return FiniteGroup("D4", std::move(t), std::move(labels));
  }

  /// Quaternion units ±1, ±i, ±j, ±k stored as unit + 4·[negative].
  static FiniteGroup quaternion() {
    // unit products: {sign flip, unit}
    static constexpr std::array<std::array<std::pair<int, int>, 4>, 4> kUnit{{
        {{{0, 0}, {0, 1}, {0, 2}, {0, 3}}},
        {{{0, 1}, {1, 0}, {0, 3}, {1, 2}}},
        {{{0, 2}, {1, 3}, {1, 0}, {0, 1}}},
        {{{0, 3}, {0, 2}, {1, 1}, {1, 0}}},
    }};
    std::vector<std::vector<std::uint32_t>> t(8, std::vector<std::uint32_t>(8));
    std::vector<std::string> labels;
    static const char* kNames[] = {"1", "i", "j", "k"};
    for (std::uint32_t a = 0; a < 8; ++a) {
      for (std::uint32_t b = 0; b < 8; ++b) {
        const auto [flip, unit] = kUnit[a % 4][b % 4];
        const int sign = (static_cast<int>(a / 4) + static_cast<int>(b / 4) + flip) % 2;
        t[a][b] = static_cast<std::uint32_t>(unit + 4 * sign);
      }
      labels.push_back(std::string(a >= 4 ? "-" : "") + kNames[a % 4]);
    }
    return FiniteGroup("Q8", std::move(t), std::move(labels));
  }

  /// "Z/4", "Z/2xZ/2", "D4", "Q8".
  static FiniteGroup preset(const std::string& name) {
    if (name == "D4") return dihedral4();
    if (name == "Q8") return quaternion();
    std::vector<std::uint32_t> orders;
    std::size_t pos = 0;
    while (pos < name.size()) {
      if (name.compare(pos, 2, "Z/") != 0) throw Error("unknown group preset '" + name + "'");
      pos += 2;
      std::size_t end = pos;
      while (end < name.size() && std::isdigit(static_cast<unsigned char>(name[end]))) ++end;
      if (end == pos) throw Error("unknown group preset '" + name + "'");
      orders.push_back(static_cast<std::uint32_t>(std::stoul(name.substr(pos, end - pos))));
      pos = end;
      if (pos < name.size()) {
        if (name[pos] != 'x') throw Error("unknown group preset '" + name + "'");
        ++pos;
      }
    }
    if (orders.empty()) throw Error("unknown group preset '" + name + "'");
    return abelian(orders);
  }

  const std::string& name() const { return name_; }
  std::size_t order() const { return n_; }
  std::uint32_t identity() const { return 0; }
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const { return mul_[a * n_ + b]; }
  std::uint32_t inv(std::uint32_t a) const { return inv_[a]; }
  const std::string& label(std::uint32_t a) const { return labels_[a]; }

  bool is_abelian() const {
    for (std::uint32_t a = 0; a < n_; ++a)
      for (std::uint32_t b = 0; b < n_; ++b)
        if (mul(a, b) != mul(b, a)) return false;
    return true;
  }

  bool is_automorphism(const Perm& f) const {
    if (!is_permutation_of(f, n_)) return false;
    for (std::uint32_t a = 0; a < n_; ++a)
      for (std::uint32_t b = 0; b < n_; ++b)
        if (f[mul(a, b)] != mul(f[a], f[b])) return false;
    return true;
  }

  /// Subgroup generated by `gens`, as a sorted element list.
  std::vector<std::uint32_t> generated(const std::vector<std::uint32_t>& gens) const {
    std::vector<bool> in(n_, false);
    std::vector<std::uint32_t> frontier{identity()};
    in[identity()] = true;
    while (!frontier.empty()) {
      const auto x = frontier.back();
      frontier.pop_back();
      for (auto g : gens) {
        const auto y = mul(x, g);
        if (!in[y]) {
          in[y] = true;
          frontier.push_back(y);
        }
      }
    }
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < n_; ++i)
      if (in[i]) out.push_back(i);
    return out;
  }

  bool is_subgroup(const std::vector<std::uint32_t>& h) const {
    std::vector<bool> in(n_, false);
    for (auto x : h) {
      if (x >= n_) return false;
      in[x] = true;
    }
    if (!in[identity()]) return false;
    for (auto a : h)
      for (auto b : h)
        if (!in[mul(a, inv(b))]) return false;
    return true;
  }

  bool is_normal(const std::vector<std::uint32_t>& h) const {
    if (!is_subgroup(h)) return false;
    std::vector<bool> in(n_, false);
    for (auto x : h) in[x] = true;
    for (std::uint32_t g = 0; g < n_; ++g)
      for (auto x : h)
        if (!in[mul(mul(g, x), inv(g))]) return false;
    return true;
  }

  /// Every subgroup, each as a sorted element list, in a fixed order.
  std::vector<std::vector<std::uint32_t>> subgroups() const {
    std::set<std::vector<std::uint32_t>> found;
    found.insert(generated({}));
    bool grew = true;
    while (grew) {
      grew = false;
      const std::vector<std::vector<std::uint32_t>> current(found.begin(), found.end());
      for (const auto& h : current) {
        for (std::uint32_t g = 0; g < n_; ++g) {
          if (std::binary_search(h.begin(), h.end(), g)) continue;
          auto gens = h;
          gens.push_back(g);
          if (found.insert(generated(gens)).second) grew = true;
        }
      }
    }
    std::vector<std::vector<std::uint32_t>> out(found.begin(), found.end());
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.size() < b.size(); });
    return out;
  }

  std::vector<std::vector<std::uint32_t>> normal_subgroups() const {
    std::vector<std::vector<std::uint32_t>> out;
    for (auto& h : subgroups())
      if (is_normal(h)) out.push_back(std::move(h));
    return out;
  }

  /// A short generating set, chosen greedily in element order.
  std::vector<std::uint32_t> generating_set() const {
    std::vector<std::uint32_t> gens;
    auto span = generated(gens);
    for (std::uint32_t g = 0; g < n_ && span.size() < n_; ++g) {
      if (std::binary_search(span.begin(), span.end(), g)) continue;
      gens.push_back(g);
      span = generated(gens);
    }
    return gens;
  }

  /// All automorphisms, found by trying every image of a generating set.
  std::vector<Perm> automorphisms() const {
    const auto gens = generating_set();
    std::vector<Perm> out;
    std::vector<std::uint32_t> images(gens.size(), 0);
    while (true) {
      if (auto f = extend_homomorphism(gens, images); f && is_automorphism(*f)) out.push_back(std::move(*f));
      std::size_t i = 0;
      for (; i < images.size(); ++i) {
        if (++images[i] < n_) break;
        images[i] = 0;
      }
      if (i == images.size()) break;
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Label of g's coset gH (= Hg for normal H): its least element.
  std::vector<std::uint32_t> coset_labels(const std::vector<std::uint32_t>& h) const {
    std::vector<std::uint32_t> lab(n_);
    for (std::uint32_t g = 0; g < n_; ++g) {
      std::uint32_t least = g;
      for (auto x : h) least = std::min(least, mul(g, x));
      lab[g] = least;
    }
    return lab;
  }

  /// The subgroup h as a group in its own right, elements renumbered in order.
  FiniteGroup subgroup(const std::vector<std::uint32_t>& h) const {
    if (!is_subgroup(h)) throw Error("not a subgroup");
    std::map<std::uint32_t, std::uint32_t> local;
    for (std::size_t i = 0; i < h.size(); ++i) local[h[i]] = static_cast<std::uint32_t>(i);
    std::vector<std::vector<std::uint32_t>> t(h.size(), std::vector<std::uint32_t>(h.size()));
    std::vector<std::string> labels;
    for (std::size_t a = 0; a < h.size(); ++a) {
      for (std::size_t b = 0; b < h.size(); ++b) t[a][b] = local.at(mul(h[a], h[b]));
      labels.push_back(label(h[a]));
    }
    return FiniteGroup(name_ + "<" + std::to_string(h.size()) + ">", std::move(t), std::move(labels));
  }

 private:
  void validate() {
    for (std::uint32_t a = 0; a < n_; ++a) {
      if (mul(0, a) != a || mul(a, 0) != a) throw Error("element 0 is not the identity");
    }
    inv_.assign(n_, 0);
    for (std::uint32_t a = 0; a < n_; ++a) {
      std::uint32_t found = static_cast<std::uint32_t>(n_);
      for (std::uint32_t b = 0; b < n_; ++b)
        if (mul(a, b) == 0) found = b;
      if (found == n_ || mul(found, a) != 0) throw Error("group table lacks inverses");
      inv_[a] = found;
    }
    for (std::uint32_t a = 0; a < n_; ++a)
      for (std::uint32_t b = 0; b < n_; ++b)
        for (std::uint32_t c = 0; c < n_; ++c)
          if (mul(mul(a, b), c) != mul(a, mul(b, c))) throw Error("group table is not associative");
  }

  std::optional<Perm> extend_homomorphism(const std::vector<std::uint32_t>& gens,
                                          const std::vector<std::uint32_t>& images) const {
    constexpr auto kUnset = static_cast<std::uint32_t>(-1);
    Perm f(n_, kUnset);
    f[identity()] = identity();
    std::vector<std::uint32_t> frontier{identity()};
    while (!frontier.empty()) {
      const auto x = frontier.back();
      frontier.pop_back();
      for (std::size_t i = 0; i < gens.size(); ++i) {
        const auto y = mul(x, gens[i]);
        const auto fy = mul(f[x], images[i]);
        if (f[y] == kUnset) {
          f[y] = fy;
          frontier.push_back(y);
        } else if (f[y] != fy) {
          return std::nullopt;
        }
      }
    }
    return f;
  }

  std::string name_;
  std::size_t n_ = 0;
  std::vector<std::uint32_t> mul_, inv_;
  std::vector<std::string> labels_;
};

/// F_r acting on a finite probability space by measure-preserving
/// permutations; a word acts letter by letter from the right.
class FinitePermAction {
 public:
  FinitePermAction() = default;
  FinitePermAction(int rank, std::vector<Perm> generators, MeasurePtr measure = nullptr)
      : rank_(rank), gens_(std::move(generators)) {
    if (static_cast<int>(gens_.size()) != rank_) throw Error("one permutation per generator is required");
    if (gens_.empty()) throw Error("rank must be positive");
    const auto n = gens_.front().size();
    measure_ = measure ? std::move(measure) : FiniteMeasure::uniform(n);
    if (measure_->size() != n) throw Error("measure does not match the action's space");
    for (const auto& g : gens_) {
      if (!is_permutation_of(g, n)) throw Error("generator map is not a permutation");
      for (std::size_t x = 0; x < n; ++x)
        if (measure_->mass(g[x]) != measure_->mass(x)) throw Error("generator map does not preserve the measure");
      invs_.push_back(inverse_perm(g));
    }
  }

  int rank() const { return rank_; }
  std::size_t size() const { return measure_->size(); }
  const MeasurePtr& measure() const { return measure_; }
  const Perm& generator(int i) const { return gens_[static_cast<std::size_t>(i - 1)]; }

  std::uint32_t apply_letter(int letter, std::uint32_t x) const {
    const auto i = static_cast<std::size_t>(std::abs(letter) - 1);
    return letter > 0 ? gens_[i][x] : invs_[i][x];
  }

  std::uint32_t apply(const FreeWord& w, std::uint32_t x) const {
    if (w.rank() != rank_) throw RankMismatch(rank_, w.rank());
    const auto& ls = w.letters();
    for (auto it = ls.rbegin(); it != ls.rend(); ++it) x = apply_letter(*it, x);
    return x;
  }

  Perm permutation(const FreeWord& w) const {
    Perm p(size());
    for (std::uint32_t x = 0; x < size(); ++x) p[x] = apply(w, x);
    return p;
  }

  /// α_w P: the label of x is the P-label of α_w^{-1} x.
  FinitePartition translate(const FinitePartition& p, const FreeWord& w) const {
    const auto back = permutation(w.inverse());
    std::vector<std::uint64_t> raw(size());
    for (std::uint32_t x = 0; x < size(); ++x) raw[x] = p.block_of(back[x]);
    return FinitePartition(p.measure(), raw);
  }

  /// P^W = join of α_w P over w in W.
  FinitePartition window_join(const FinitePartition& p, const WordSet& w) const {
    FinitePartition out = FinitePartition::trivial(p.measure());
    for (const auto& g : w) out = join(out, translate(p, g));
    return out;
  }

 private:
  int rank_ = 0;
  std::vector<Perm> gens_, invs_;
  MeasurePtr measure_;
};

/// F_r acting on a finite group G by automorphisms; Haar measure is uniform.
class FiniteGroupAction {
 public:
  FiniteGroupAction() = default;
  FiniteGroupAction(FiniteGroup group, std::vector<Perm> autos) : group_(std::move(group)) {
    for (const auto& f : autos)
      if (!group_.is_automorphism(f)) throw Error("generator map is not an automorphism of " + group_.name());
    const int rank = static_cast<int>(autos.size());
    action_ = FinitePermAction(rank, std::move(autos));
  }

  static FiniteGroupAction trivial(FiniteGroup group, int rank) {
    const auto n = group.order();
    return FiniteGroupAction(std::move(group), std::vector<Perm>(static_cast<std::size_t>(rank), identity_perm(n)));
  }

  const FiniteGroup& group() const { return group_; }
  const FinitePermAction& action() const { return action_; }
  int rank() const { return action_.rank(); }

  /// True when every generator maps the subgroup onto itself.
  bool preserves(const std::vector<std::uint32_t>& h) const {
    std::set<std::uint32_t> hs(h.begin(), h.end());
    for (int i = 1; i <= rank(); ++i)
      for (auto x : h)
        if (!hs.count(action_.generator(i)[x])) return false;
    return true;
  }

  /// Restriction to an invariant subgroup, renumbered as in FiniteGroup::subgroup.
  FiniteGroupAction restrict_to(const std::vector<std::uint32_t>& h) const {
    if (!preserves(h)) throw Error("subgroup is not invariant under the action");
    std::map<std::uint32_t, std::uint32_t> local;
    for (std::size_t i = 0; i < h.size(); ++i) local[h[i]] = static_cast<std::uint32_t>(i);
    std::vector<Perm> autos;
    for (int i = 1; i <= rank(); ++i) {
      Perm f(h.size());
      for (std::size_t k = 0; k < h.size(); ++k) f[k] = local.at(action_.generator(i)[h[k]]);
      autos.push_back(std::move(f));
    }
    return FiniteGroupAction(group_.subgroup(h), std::move(autos));
  }

 private:
  FiniteGroup group_;
  FinitePermAction action_;
};

}  // namespace flab
