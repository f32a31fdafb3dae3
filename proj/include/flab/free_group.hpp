#pragma once

// Reduced words in the free group F_r and the geometry of its Cayley tree.
//
// Letters are signed generator indices: +i is s_i and -i is s_i^{-1}
// (1 <= i <= r). Words are reduced eagerly, so length() is the word metric.
// Edges of the Cayley graph are {g, g s_i}; left multiplication is an
// isometry.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "flab/error.hpp"

namespace flab {

/// Text alphabet for generators. 'e' is skipped because the string "e"
/// names the identity.
inline constexpr std::string_view kGeneratorLetters = "abcdfghijklmnopqrstuvwxyz";
inline constexpr int kMaxTextRank = static_cast<int>(kGeneratorLetters.size());

/// Position of a letter in the generator order s1, s1^-1, s2, s2^-1, ...
constexpr int letter_key(int letter) { return letter > 0 ? 2 * (letter - 1) : 2 * (-letter - 1) + 1; }
constexpr int key_letter(int key) { return key % 2 == 0 ? key / 2 + 1 : -(key / 2 + 1); }

class FreeWord {
 public:
  FreeWord() = default;
  explicit FreeWord(int rank) : rank_(rank) {
    if (rank < 1) throw Error("free group rank must be positive");
  }

  /// Builds the reduced form of an arbitrary letter sequence.
  FreeWord(int rank, const std::vector<int>& letters) : FreeWord(rank) {
    for (int l : letters) push_back(l);
  }

  static FreeWord identity(int rank) { return FreeWord(rank); }
  static FreeWord generator(int rank, int i) { return FreeWord(rank, {i}); }

  /// Parses "abA" style text; "e" and "" are the identity.
  static FreeWord parse(int rank, std::string_view text) {
    FreeWord w(rank);
    if (text == "e") return w;
    for (char c : text) {
      const bool upper = c >= 'A' && c <= 'Z';
      const char lower = upper ? static_cast<char>(c - 'A' + 'a') : c;
      const auto pos = kGeneratorLetters.find(lower);
      if (pos == std::string_view::npos || static_cast<int>(pos) >= rank) {
        throw Error("bad word letter '" + std::string(1, c) + "' for rank " + std::to_string(rank));
      }
      const int i = static_cast<int>(pos) + 1;
      w.push_back(upper ? -i : i);
    }
    return w;
  }

  std::string to_string() const {
    if (letters_.empty()) return "e";
    std::string out;
    for (int l : letters_) {
      if (std::abs(l) > kMaxTextRank) throw Error("generator index beyond text alphabet");
      const char c = kGeneratorLetters[static_cast<std::size_t>(std::abs(l) - 1)];
      out.push_back(l > 0 ? c : static_cast<char>(c - 'a' + 'A'));
    }
    return out;
  }

  int rank() const { return rank_; }
  std::size_t length() const { return letters_.size(); }
  bool is_identity() const { return letters_.empty(); }
  const std::vector<int>& letters() const { return letters_; }
  int first() const { return letters_.front(); }
  int last() const { return letters_.back(); }

  /// Appends one letter with free cancellation.
  void push_back(int letter) {
    if (letter == 0 || std::abs(letter) > rank_) throw Error("letter out of range for rank");
    if (!letters_.empty() && letters_.back() == -letter) {
      letters_.pop_back();
    } else {
      letters_.push_back(letter);
    }
  }

  FreeWord inverse() const {
    FreeWord w(*this);
    std::reverse(w.letters_.begin(), w.letters_.end());
    for (int& l : w.letters_) l = -l;
    return w;
  }

  /// First k letters.
  FreeWord prefix(std::size_t k) const {
    FreeWord w(rank_);
    w.letters_.assign(letters_.begin(), letters_.begin() + static_cast<std::ptrdiff_t>(k));
    return w;
  }

  friend FreeWord operator*(const FreeWord& a, const FreeWord& b) {
    if (a.rank_ != b.rank_) throw RankMismatch(a.rank_, b.rank_);
    FreeWord w(a);
    for (int l : b.letters_) w.push_back(l);
    return w;
  }

  friend bool operator==(const FreeWord& a, const FreeWord& b) {
    return a.rank_ == b.rank_ && a.letters_ == b.letters_;
  }

  /// Length-lexicographic order with letters ordered s1 < s1^-1 < s2 < ...
  friend std::strong_ordering operator<=>(const FreeWord& a, const FreeWord& b) {
    if (auto c = a.rank_ <=> b.rank_; c != 0) return c;
    if (auto c = a.letters_.size() <=> b.letters_.size(); c != 0) return c;
    for (std::size_t i = 0; i < a.letters_.size(); ++i) {
      if (auto c = letter_key(a.letters_[i]) <=> letter_key(b.letters_[i]); c != 0) return c;
    }
    return std::strong_ordering::equal;
  }

 private:
  int rank_ = 0;
  std::vector<int> letters_;
};

inline std::size_t distance(const FreeWord& v, const FreeWord& w) { return (v.inverse() * w).length(); }

/// The 2r letters in generator order s1, s1^-1, ..., sr, sr^-1.
inline std::vector<int> generator_letters(int rank) {
  std::vector<int> out;
  for (int k = 0; k < 2 * rank; ++k) out.push_back(key_letter(k));
  return out;
}

inline std::vector<FreeWord> neighbors(const FreeWord& w) {
  std::vector<FreeWord> out;
  for (int l : generator_letters(w.rank())) out.push_back(w * FreeWord(w.rank(), {l}));
  return out;
}

/// Finite set of words of one rank, iterated in length-lexicographic order.
class WordSet {
 public:
  using const_iterator = std::set<FreeWord>::const_iterator;

  WordSet() = default;
  explicit WordSet(int rank) : rank_(rank) {}
  WordSet(int rank, std::initializer_list<FreeWord> words) : rank_(rank) {
    for (const auto& w : words) insert(w);
  }
  template <typename It>
  WordSet(int rank, It first, It last) : rank_(rank) {
    for (; first != last; ++first) insert(*first);
  }

  /// Parses whitespace- or comma-separated word text.
  static WordSet parse(int rank, std::string_view text) {
    WordSet s(rank);
    std::string token;
    auto flush = [&] {
      if (!token.empty()) s.insert(FreeWord::parse(rank, token));
      token.clear();
    };
    for (char c : text) {
      if (c == ',' || c == ' ' || c == '{' || c == '}') {
        flush();
      } else {
        token.push_back(c);
      }
    }
    flush();
    return s;
  }

  int rank() const { return rank_; }
  std::size_t size() const { return elems_.size(); }
  bool empty() const { return elems_.empty(); }
  const_iterator begin() const { return elems_.begin(); }
  const_iterator end() const { return elems_.end(); }
  const FreeWord& front() const { return *elems_.begin(); }

  void insert(const FreeWord& w) {
    if (w.rank() != rank_) throw RankMismatch(rank_, w.rank());
    elems_.insert(w);
  }
  void insert(const WordSet& other) {
    for (const auto& w : other) insert(w);
  }
  bool contains(const FreeWord& w) const { return elems_.count(w) != 0; }

  bool includes(const WordSet& other) const {
    return std::includes(elems_.begin(), elems_.end(), other.elems_.begin(), other.elems_.end());
  }

  /// Left translate g·S.
  WordSet translated(const FreeWord& g) const {
    WordSet out(rank_);
    for (const auto& w : elems_) out.insert(g * w);
    return out;
  }

  /// Position of each element in iteration order.
  std::map<FreeWord, std::size_t> index() const {
    std::map<FreeWord, std::size_t> idx;
    std::size_t i = 0;
    for (const auto& w : elems_) idx.emplace(w, i++);
    return idx;
  }

  std::string to_string() const {
    std::string out = "{";
    bool first = true;
    for (const auto& w : elems_) {
      if (!first) out += ", ";
      out += w.to_string();
      first = false;
    }
    return out + "}";
  }

  friend bool operator==(const WordSet& a, const WordSet& b) = default;
  friend auto operator<=>(const WordSet& a, const WordSet& b) {
    if (auto c = a.rank_ <=> b.rank_; c != 0) return c;
    return a.elems_ <=> b.elems_;
  }

 private:
  int rank_ = 0;
  std::set<FreeWord> elems_;
};

inline WordSet set_union(const WordSet& a, const WordSet& b) {
  WordSet out(a);
  out.insert(b);
  return out;
}

/// Product set {a·b : a in A, b in B}.
inline WordSet product(const WordSet& a, const WordSet& b) {
  WordSet out(a.rank());
  for (const auto& x : a)
    for (const auto& y : b) out.insert(x * y);
  return out;
}

/// Ball B(center, n) in the word metric.
inline WordSet ball(const FreeWord& center, std::size_t n) {
  const int r = center.rank();
  WordSet out(r);
  std::vector<FreeWord> frontier{FreeWord::identity(r)};
  out.insert(center);
  for (std::size_t len = 1; len <= n; ++len) {
    std::vector<FreeWord> next;
    for (const auto& w : frontier) {
      for (int l : generator_letters(r)) {
        if (!w.is_identity() && w.last() == -l) continue;
        FreeWord v = w;
        v.push_back(l);
        next.push_back(v);
        out.insert(center * v);
      }
    }
    frontier = std::move(next);
  }
  return out;
}

inline WordSet ball(int rank, std::size_t n) { return ball(FreeWord::identity(rank), n); }

/// Closed-form |B(n)| for the 2r-regular tree.
inline std::size_t ball_size(int rank, std::size_t n) {
  if (rank == 1) return 2 * n + 1;
  std::size_t pow = 1;
  for (std::size_t i = 0; i < n; ++i) pow *= static_cast<std::size_t>(2 * rank - 1);
  return 1 + static_cast<std::size_t>(2 * rank) * (pow - 1) / static_cast<std::size_t>(2 * rank - 2);
}

/// Vertices of the tree path from v to w, inclusive.
inline WordSet geodesic_interval(const FreeWord& v, const FreeWord& w) {
  const FreeWord u = v.inverse() * w;
  WordSet out(v.rank());
  for (std::size_t k = 0; k <= u.length(); ++k) out.insert(v * u.prefix(k));
  return out;
}

/// Union-find connectivity of the induced subgraph.
inline bool is_connected(const WordSet& s) {
  if (s.size() <= 1) return true;
  const auto idx = s.index();
  std::vector<std::size_t> parent(s.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = s.size();
  for (const auto& [w, i] : idx) {
    for (int k = 1; k <= s.rank(); ++k) {
      auto it = idx.find(w * FreeWord::generator(s.rank(), k));
      if (it == idx.end()) continue;
      auto a = find(i), b = find(it->second);
      if (a != b) {
        parent[a] = b;
        --components;
      }
    }
  }
  return components == 1;
}

/// Smallest connected superset. In a tree this is the union of the
/// geodesics from one element to all others.
inline WordSet convex_hull(const WordSet& s) {
  if (s.empty()) throw Error("convex hull of an empty set");
  WordSet out(s.rank());
  const FreeWord& root = s.front();
  for (const auto& w : s) out.insert(geodesic_interval(root, w));
  return out;
}

inline std::size_t induced_degree(const WordSet& s, const FreeWord& w) {
  std::size_t d = 0;
  for (const auto& n : neighbors(w)) d += s.contains(n) ? 1 : 0;
  return d;
}

/// Elements of degree exactly 1 in the induced subgraph. A singleton has none.
inline WordSet extreme_points(const WordSet& s) {
  WordSet out(s.rank());
  for (const auto& w : s)
    if (induced_degree(s, w) == 1) out.insert(w);
  return out;
}

struct RadiusCenter {
  std::size_t radius = 0;
  WordSet centers;
};

/// Smallest rho with B(v, rho) ⊇ s for some v, and all such v. Every center
/// lies in the convex hull, so only hull vertices are candidates.
inline RadiusCenter radius_center(const WordSet& s) {
  if (s.empty()) throw Error("radius of an empty set");
  const WordSet hull = convex_hull(s);
  RadiusCenter rc{static_cast<std::size_t>(-1), WordSet(s.rank())};
  for (const auto& v : hull) {
    std::size_t far = 0;
    for (const auto& w : s) far = std::max(far, distance(v, w));
    if (far < rc.radius) {
      rc.radius = far;
      rc.centers = WordSet(s.rank());
    }
    if (far == rc.radius) rc.centers.insert(v);
  }
  return rc;
}

/// Breadth-first enumeration of B(n) from e in generator order; every
/// prefix is connected.
inline std::vector<FreeWord> spiral_ordering(int rank, std::size_t n) {
  std::vector<FreeWord> order;
  std::queue<FreeWord> queue;
  queue.push(FreeWord::identity(rank));
  while (!queue.empty()) {
    FreeWord w = queue.front();
    queue.pop();
    order.push_back(w);
    if (w.length() == n) continue;
    for (int l : generator_letters(rank)) {
      if (!w.is_identity() && w.last() == -l) continue;
      FreeWord v = w;
      v.push_back(l);
      queue.push(v);
    }
  }
  return order;
}

/// Breadth-first enumeration of a connected set starting from `start`.
inline std::vector<FreeWord> connected_ordering(const WordSet& s, const FreeWord& start) {
  if (!s.contains(start)) throw Error("ordering start outside the set");
  std::vector<FreeWord> order;
  std::set<FreeWord> seen{start};
  std::queue<FreeWord> queue;
  queue.push(start);
  while (!queue.empty()) {
    FreeWord w = queue.front();
    queue.pop();
    order.push_back(w);
    for (const auto& n : neighbors(w)) {
      if (s.contains(n) && seen.insert(n).second) queue.push(n);
    }
  }
  if (order.size() != s.size()) throw Error("set is not connected");
  return order;
}

/// First index n >= 1 at which γ_n·hull ⊆ ∪_{i<n} γ_i·hull, if any.
inline std::optional<std::size_t> first_ordering_violation(const WordSet& hull,
                                                           const std::vector<FreeWord>& ordering) {
  std::set<FreeWord> covered;
  for (std::size_t n = 0; n < ordering.size(); ++n) {
    bool fresh = false;
    for (const auto& f : hull) {
      if (!covered.count(ordering[n] * f)) {
        fresh = true;
        break;
      }
    }
    if (n >= 1 && !fresh) return n;
    for (const auto& f : hull) covered.insert(ordering[n] * f);
  }
  return std::nullopt;
}

inline bool check_ordering_condition(const WordSet& hull, const std::vector<FreeWord>& ordering) {
  return !first_ordering_violation(hull, ordering).has_value();
}

}  // namespace flab
