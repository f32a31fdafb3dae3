#pragma once

// Convolution operators over (Z/pZ)^Γ, their kernels X_{h,p}, exact
// Haar marginals of those kernels on finite windows, the surjectivity
// decision for scalar kernels and a constructive preimage solver.

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "flab/entropy_value.hpp"
#include "flab/error.hpp"
#include "flab/fp_linear.hpp"
#include "flab/free_group.hpp"

namespace flab {

/// h = Σ_u h(u)·δ_u with d_out×d_in matrix coefficients; acts by
/// φ_h(x)(g) = Σ_u h(u)·x(g u⁻¹).
class ConvolutionKernel {
 public:
  using Coeffs = std::map<FreeWord, std::vector<std::vector<long long>>>;

  ConvolutionKernel() = default;
  ConvolutionKernel(std::uint32_t p, int rank, std::size_t d_in, std::size_t d_out, const Coeffs& coeffs)
      : p_(p), rank_(rank), d_in_(d_in), d_out_(d_out) {
    check_modulus(p);
    if (rank < 1) throw Error("rank must be positive");
    if (d_in == 0 || d_out == 0) throw Error("kernel dimensions must be positive");
    for (const auto& [u, rows] : coeffs) {
      if (u.rank() != rank) throw RankMismatch(rank, u.rank());
      if (rows.size() != d_out) throw Error("coefficient at " + u.to_string() + " has the wrong number of rows");
      for (const auto& row : rows)
        if (row.size() != d_in) throw Error("coefficient at " + u.to_string() + " has the wrong number of columns");
      FpMatrix m(p, rows);
      bool nonzero = false;
      for (std::size_t a = 0; a < d_out; ++a)
        for (std::size_t b = 0; b < d_in; ++b) nonzero |= m.at(a, b) != 0;
      if (nonzero) coeffs_.emplace(u, std::move(m));
    }
  }

  static ConvolutionKernel scalar(std::uint32_t p, int rank, const std::map<FreeWord, long long>& h) {
    Coeffs c;
    for (const auto& [u, v] : h) c[u] = {{v}};
    return ConvolutionKernel(p, rank, 1, 1, c);
  }

  /// x ↦ (x(g)+x(g s₁), x(g)+x(g s₂)) over Z/2.
  static ConvolutionKernel ornstein_weiss() {
    const int r = 2;
    return ConvolutionKernel(2, r, 1, 2,
                             {{FreeWord::identity(r), {{1}, {1}}},
                              {FreeWord::parse(r, "A"), {{1}, {0}}},
                              {FreeWord::parse(r, "B"), {{0}, {1}}}});
  }

  /// x ↦ (x(g s_i) − x(g))_i; its kernel is the constant configurations.
  static ConvolutionKernel comparison(std::uint32_t p, int rank) {
    Coeffs c;
    c[FreeWord::identity(rank)] = std::vector<std::vector<long long>>(static_cast<std::size_t>(rank), {-1});
    for (int i = 1; i <= rank; ++i) {
      std::vector<std::vector<long long>> m(static_cast<std::size_t>(rank), {0});
      m[static_cast<std::size_t>(i - 1)][0] = 1;
      c[FreeWord(rank, {-i})] = m;
    }
    return ConvolutionKernel(p, rank, 1, static_cast<std::size_t>(rank), c);
  }

  std::uint32_t modulus() const { return p_; }
  int rank() const { return rank_; }
  std::size_t d_in() const { return d_in_; }
  std::size_t d_out() const { return d_out_; }
  bool is_scalar() const { return d_in_ == 1 && d_out_ == 1; }
  bool is_zero() const { return coeffs_.empty(); }
  const std::map<FreeWord, FpMatrix>& coeffs() const { return coeffs_; }

  /// h(u) for a scalar kernel.
  Residue scalar_at(const FreeWord& u) const {
    auto it = coeffs_.find(u);
    return it == coeffs_.end() ? 0 : it->second.at(0, 0);
  }

  /// F = {g : h(g⁻¹) ≠ 0}: the offsets read by φ_h at the identity.
  WordSet dependence_set() const {
    WordSet f(rank_);
    for (const auto& [u, m] : coeffs_) f.insert(u.inverse());
    return f;
  }

  /// Σ_u h(u); constant configurations in its nullspace lie in ker φ_h.
  FpMatrix total() const {
    FpMatrix s(p_, d_out_, d_in_);
    for (const auto& [u, m] : coeffs_)
      for (std::size_t a = 0; a < d_out_; ++a)
        for (std::size_t b = 0; b < d_in_; ++b) s.add(a, b, m.at(a, b));
    return s;
  }

  /// u ↦ h(u c⁻¹); then φ_{h'}(x)(g) = φ_h(x)(g c⁻¹) and F' = c⁻¹F.
  ConvolutionKernel recentered(const FreeWord& c) const {
    ConvolutionKernel k = *this;
    k.coeffs_.clear();
    for (const auto& [u, m] : coeffs_) k.coeffs_.emplace(u * c, m);
    return k;
  }

  std::string to_string() const {
    std::string out;
    for (const auto& [u, m] : coeffs_) {
      if (!out.empty()) out += " + ";
      if (is_scalar()) {
        out += (m.at(0, 0) == 1 ? "" : std::to_string(m.at(0, 0)) + "·") + "δ_" + u.to_string();
      } else {
        out += "M·δ_" + u.to_string();
      }
    }
    return out.empty() ? "0" : out;
  }

 private:
  std::uint32_t p_ = 2;
  int rank_ = 1;
  std::size_t d_in_ = 1, d_out_ = 1;
  std::map<FreeWord, FpMatrix> coeffs_;
};

/// Partial configuration: coordinate word -> d_in residues.
using Configuration = std::map<FreeWord, FpVector>;

/// φ_h(x)(g); every coordinate it reads must be present.
inline FpVector convolve_at(const ConvolutionKernel& k, const Configuration& x, const FreeWord& g) {
  const auto p = k.modulus();
  FpVector out(k.d_out(), 0);
  for (const auto& [u, m] : k.coeffs()) {
    auto it = x.find(g * u.inverse());
    if (it == x.end()) throw Error("configuration lacks coordinate " + (g * u.inverse()).to_string());
    const auto v = m.apply(it->second);
    for (std::size_t a = 0; a < out.size(); ++a) out[a] = mod_add(out[a], v[a], p);
  }
  return out;
}

struct SupportGeometry {
  WordSet support;     // F
  WordSet hull;        // convex hull of F
  WordSet extremes;    // degree-1 points of the hull
  std::size_t radius = 0;
  WordSet centers;
  FreeWord center;     // length-lex least center
  WordSet centered_hull;  // center⁻¹ · hull, with e as a center
};

inline SupportGeometry support_geometry(const ConvolutionKernel& k) {
  if (k.is_zero()) throw ZeroKernel();
  SupportGeometry g;
  g.support = k.dependence_set();
  g.hull = convex_hull(g.support);
  g.extremes = extreme_points(g.hull);
  auto rc = radius_center(g.hull);
  g.radius = rc.radius;
  g.centers = rc.centers;
  g.center = rc.centers.front();
  g.centered_hull = g.hull.translated(g.center.inverse());
  return g;
}

/// Constraints φ_h(x)(g) = 0 for every g with g·F ⊆ V, over the
/// coordinates of V (d_in columns per word, words in length-lex order).
struct WindowSystem {
  WordSet window;
  std::vector<FreeWord> constraint_sites;
  std::map<FreeWord, std::size_t> column_of;  // first column of each word
  FpMatrix matrix;

  std::vector<std::size_t> columns_for(const WordSet& w, std::size_t d_in) const {
    std::vector<std::size_t> cols;
    for (const auto& v : w) {
      auto it = column_of.find(v);
      if (it == column_of.end()) throw Error("word " + v.to_string() + " is outside the window");
      for (std::size_t j = 0; j < d_in; ++j) cols.push_back(it->second + j);
    }
    return cols;
  }
};

inline WindowSystem window_system(const ConvolutionKernel& k, const WordSet& v) {
  WindowSystem sys;
  sys.window = v;
  std::size_t col = 0;
  for (const auto& w : v) {
    sys.column_of.emplace(w, col);
    col += k.d_in();
  }
  const WordSet f = k.dependence_set();
  std::set<FreeWord> candidates;
  for (const auto& w : v)
    for (const auto& s : f) candidates.insert(w * s.inverse());
  for (const auto& g : candidates) {
    bool inside = true;
    for (const auto& s : f) inside = inside && v.contains(g * s);
    if (inside) sys.constraint_sites.push_back(g);
  }
  sys.matrix = FpMatrix(k.modulus(), sys.constraint_sites.size() * k.d_out(), col);
  for (std::size_t i = 0; i < sys.constraint_sites.size(); ++i) {
    const auto& g = sys.constraint_sites[i];
    for (const auto& [u, m] : k.coeffs()) {
      const std::size_t base = sys.column_of.at(g * u.inverse());
      for (std::size_t a = 0; a < k.d_out(); ++a)
        for (std::size_t b = 0; b < k.d_in(); ++b) sys.matrix.add(i * k.d_out() + a, base + b, m.at(a, b));
    }
  }
  return sys;
}

/// Projection onto W of the window solutions on V ⊇ W.
inline AffineSolutionSet project_window(const ConvolutionKernel& k, const WordSet& v, const WordSet& w) {
  const auto sys = window_system(k, v);
  return project_system(sys.matrix, FpVector(sys.matrix.rows(), 0), sys.columns_for(w, k.d_in()));
}

enum class WindowCertificate {
  Unconstrained,       // zero kernel: every configuration lies in the kernel
  ExtensionCertified,  // window hull(W)·K for a centered scalar kernel
  Sandwiched,          // constants below, window projection above, equal dimensions
  Stabilized,          // two successive enclosing windows agree
  Uncertified,
};

inline std::string to_string(WindowCertificate c) {
  switch (c) {
    case WindowCertificate::Unconstrained: return "UNCONSTRAINED";
    case WindowCertificate::ExtensionCertified: return "EXTENSION-CERTIFIED";
    case WindowCertificate::Sandwiched: return "SANDWICHED";
    case WindowCertificate::Stabilized: return "STABILIZED";
    case WindowCertificate::Uncertified: return "UNCERTIFIED";
  }
  return "?";
}

/// Law of the coordinates on W under Haar measure of X_{h,p}: uniform on
/// an affine (in fact linear) subspace.
struct Marginal {
  WordSet target;
  AffineSolutionSet set;
  WindowCertificate certificate = WindowCertificate::Uncertified;
  std::size_t enclosing_size = 0;
  std::optional<bool> stable_next;  // does the next larger window agree?
  std::size_t lower = 0, upper = 0;  // dimension bounds

  bool proven() const {
    return certificate == WindowCertificate::Unconstrained || certificate == WindowCertificate::ExtensionCertified ||
           certificate == WindowCertificate::Sandwiched;
  }
  bool certified() const { return certificate != WindowCertificate::Uncertified; }
  std::size_t dimension() const {
    if (!certified()) throw Uncertified("marginal on " + target.to_string() + " is uncertified");
    return set.dimension();
  }
};

struct MarginalOptions {
  std::size_t window_cap = 4;         // extra ball layers tried for matrix kernels
  std::size_t column_cap = 1500;      // largest window system attempted
  bool confirm_stability = false;     // also solve on the next window for scalar kernels
};

/// X_{h,p} together with a cache of certified window marginals.
class KernelSubshift {
 public:
  explicit KernelSubshift(ConvolutionKernel k, MarginalOptions opts = {}) : k_(std::move(k)), opts_(opts) {
    if (!k_.is_zero()) geometry_ = support_geometry(k_);
    if (!k_.is_zero()) {
      std::size_t t = 0;
      for (const auto& s : geometry_->support) t = std::max(t, s.length());
      reach_ = t;
      constants_nullity_ = nullspace(k_.total()).dimension();
    }
  }

  const ConvolutionKernel& kernel() const { return k_; }
  const std::optional<SupportGeometry>& geometry() const { return geometry_; }
  const MarginalOptions& options() const { return opts_; }

  Marginal marginal(const WordSet& w) const {
    {
      std::lock_guard<std::mutex> lock(mu_);
      if (auto it = cache_.find(w); it != cache_.end()) return it->second;
    }
    Marginal m = compute(w);
    std::lock_guard<std::mutex> lock(mu_);
    return cache_.emplace(w, std::move(m)).first->second;
  }

  std::size_t projected_dimension(const WordSet& w) const { return marginal(w).dimension(); }

  /// μ(pattern on W); pattern lists d_in residues per word of W in order.
  Rational cylinder_measure(const WordSet& w, const FpVector& pattern) const {
    const auto m = marginal(w);
    if (!m.certified()) throw Uncertified("cylinder on " + w.to_string() + " is uncertified");
    if (!m.set.contains(pattern)) return Rational(0);
    return Rational(1) / Rational(boost::multiprecision::pow(BigInt(k_.modulus()), static_cast<unsigned>(m.set.dimension())));
  }

  /// The window hull(W)·K used for the extension certificate.
  WordSet certified_window(const WordSet& w) const {
    return product(convex_hull(w), geometry_->centered_hull);
  }

 private:
  Marginal compute(const WordSet& w) const {
    Marginal m;
    m.target = w;
    const std::size_t full = w.size() * k_.d_in();
    if (w.empty()) {
      m.set = AffineSolutionSet::from_generators(k_.modulus(), {}, {});
      m.certificate = WindowCertificate::Unconstrained;
      return m;
    }
    if (k_.is_zero()) {
      std::vector<FpVector> basis;
      for (std::size_t i = 0; i < full; ++i) {
        FpVector e(full, 0);
        e[i] = 1;
        basis.push_back(e);
      }
      m.set = AffineSolutionSet::from_generators(k_.modulus(), FpVector(full, 0), basis);
      m.certificate = WindowCertificate::Unconstrained;
      m.lower = m.upper = full;
      return m;
    }
    if (k_.is_scalar()) {
      const WordSet v = certified_window(w);
      guard_columns(v);
      m.set = project_window(k_, v, w);
      m.certificate = WindowCertificate::ExtensionCertified;
      m.enclosing_size = v.size();
      m.lower = m.upper = m.set.dimension();
      if (opts_.confirm_stability) {
        const WordSet next = product(v, ball(k_.rank(), 1));
        if (next.size() * k_.d_in() <= opts_.column_cap) m.stable_next = project_window(k_, next, w) == m.set;
      }
      return m;
    }
    // Matrix kernels: constants give a lower bound, windows an upper bound.
    WordSet v = product(convex_hull(w), ball(k_.rank(), reach_));
    guard_columns(v);
    AffineSolutionSet prev = project_window(k_, v, w);
    m.lower = std::min(constants_nullity_, full);
    m.upper = prev.dimension();
    m.enclosing_size = v.size();
    m.set = prev;
    if (m.upper == m.lower) {
      m.certificate = WindowCertificate::Sandwiched;
      return m;
    }
    for (std::size_t layer = 1; layer <= opts_.window_cap; ++layer) {
      v = product(v, ball(k_.rank(), 1));
      if (v.size() * k_.d_in() > opts_.column_cap) break;
      AffineSolutionSet next = project_window(k_, v, w);
      m.upper = next.dimension();
      m.enclosing_size = v.size();
      const bool same = next == prev;
      m.set = next;
      if (m.upper == m.lower) {
        m.certificate = WindowCertificate::Sandwiched;
        return m;
      }
      if (same) {
        m.certificate = WindowCertificate::Stabilized;
        return m;
      }
      prev = std::move(next);
    }
    m.certificate = WindowCertificate::Uncertified;
    return m;
  }

  void guard_columns(const WordSet& v) const {
    if (v.size() * k_.d_in() > std::max<std::size_t>(opts_.column_cap, 4096)) {
      throw SizeGuard("window of " + std::to_string(v.size()) + " words exceeds the column cap");
    }
  }

  ConvolutionKernel k_;
  MarginalOptions opts_;
  std::optional<SupportGeometry> geometry_;
  std::size_t reach_ = 0;
  std::size_t constants_nullity_ = 0;
  mutable std::mutex mu_;
  mutable std::map<WordSet, Marginal> cache_;
};

struct SurjectivityVerdict {
  bool surjective = false;
  bool theorem_backed = false;
  std::string certificate;
  std::size_t depth = 0;
};

/// The linear map x|_{T·F} ↦ φ_h(x)|_T as a matrix.
inline FpMatrix target_map(const ConvolutionKernel& k, const WordSet& t, std::map<FreeWord, std::size_t>* columns = nullptr) {
  WordSet v(k.rank());
  for (const auto& g : t)
    for (const auto& [u, m] : k.coeffs()) v.insert(g * u.inverse());
  std::map<FreeWord, std::size_t> col;
  std::size_t c = 0;
  for (const auto& w : v) {
    col.emplace(w, c);
    c += k.d_in();
  }
  FpMatrix a(k.modulus(), t.size() * k.d_out(), c);
  std::size_t i = 0;
  for (const auto& g : t) {
    for (const auto& [u, m] : k.coeffs()) {
      const auto base = col.at(g * u.inverse());
      for (std::size_t r = 0; r < k.d_out(); ++r)
        for (std::size_t s = 0; s < k.d_in(); ++s) a.add(i * k.d_out() + r, base + s, m.at(r, s));
    }
    ++i;
  }
  if (columns) *columns = std::move(col);
  return a;
}

/// Every target pattern on T is attained: the target map has full row rank.
inline bool window_surjective(const ConvolutionKernel& k, const WordSet& t) {
  return rank(target_map(k, t)) == t.size() * k.d_out();
}

/// Every target pattern on T, solved one by one.
inline bool exhaustive_window_solvable(const ConvolutionKernel& k, const WordSet& t, std::size_t limit = 1u << 16) {
  const auto a = target_map(k, t);
  const std::size_t n = t.size() * k.d_out();
  std::size_t count = 1;
  for (std::size_t i = 0; i < n; ++i) {
    count *= k.modulus();
    if (count > limit) throw SizeGuard("too many target patterns to enumerate");
  }
  FpVector y(n, 0);
  for (std::size_t c = 0; c < count; ++c) {
    if (solve(a, y).empty()) return false;
    for (std::size_t i = 0; i < n; ++i) {
      if (++y[i] < k.modulus()) break;
      y[i] = 0;
    }
  }
  return true;
}

/// Scalar kernels: nonzero ⇒ onto, certified by the ordering condition for
/// the centered hull along the spiral ordering of B(depth). Matrix kernels:
/// window surjectivity on B(0), ..., B(depth), not backed by a theorem.
inline SurjectivityVerdict is_surjective(const ConvolutionKernel& k, std::size_t depth = 3) {
  SurjectivityVerdict v;
  v.depth = depth;
  if (k.is_scalar()) {
    if (k.is_zero()) {
      v.certificate = "zero kernel";
      return v;
    }
    const auto geo = support_geometry(k);
    v.theorem_backed = true;
    if (geo.hull.size() == 1) {
      v.surjective = true;
      v.certificate = "singleton support: h is an invertible multiple of a translate";
      return v;
    }
    const auto violation = first_ordering_violation(geo.centered_hull, spiral_ordering(k.rank(), depth));
    v.surjective = !violation.has_value();
    v.certificate = v.surjective ? "centered hull " + geo.centered_hull.to_string() + " passes the ordering condition on B(" +
                                       std::to_string(depth) + ")"
                                 : "ordering condition fails at step " + std::to_string(*violation);
    return v;
  }
  if (k.is_zero()) {
    v.certificate = "zero kernel";
    return v;
  }
  v.surjective = true;
  for (std::size_t n = 0; n <= std::min<std::size_t>(depth, 2) && v.surjective; ++n)
    v.surjective = window_surjective(k, ball(k.rank(), n));
  v.certificate = std::string(v.surjective ? "window-surjective" : "not window-surjective") + " on B(0)..B(" +
                  std::to_string(std::min<std::size_t>(depth, 2)) + "); matrix kernel, no theorem";
  return v;
}

struct PreimageResult {
  std::map<FreeWord, Residue> x;
  std::size_t steps = 0;
  bool verified = false;
};

/// Builds x with φ_h(x) = y on B(n) by the extreme-point induction: walk
/// the spiral ordering for the centered kernel and, at each site, solve for
/// one coordinate not covered by any earlier translate of the hull.
inline PreimageResult preimage_on_ball(const ConvolutionKernel& k, const std::map<FreeWord, Residue>& y, std::size_t n) {
  if (!k.is_scalar()) throw Error("preimage solver needs a scalar kernel");
  const auto geo = support_geometry(k);
  const auto p = k.modulus();
  const FreeWord& c = geo.center;
  const ConvolutionKernel hc = k.recentered(c);
  const WordSet fc = hc.dependence_set();
  const WordSet& hull = geo.centered_hull;
  WordSet fresh_candidates = extreme_points(hull);
  if (hull.size() == 1) fresh_candidates = hull;

  PreimageResult out;
  std::set<FreeWord> covered;
  const auto order = spiral_ordering(k.rank(), n + c.length());
  const FreeWord c_inv = c.inverse();
  for (std::size_t step = 0; step < order.size(); ++step) {
    const FreeWord& gamma = order[step];
    const FreeWord site = gamma * c_inv;  // equation of h' at γ is that of h at γc⁻¹
    Residue target = 0;
    if (site.length() <= n) {
      auto it = y.find(site);
      if (it == y.end()) throw Error("target pattern lacks " + site.to_string());
      target = it->second % p;
    }
    std::optional<FreeWord> f;
    for (const auto& e : fresh_candidates) {
      if (!covered.count(gamma * e)) {
        f = e;
        break;
      }
    }
    if (!f) throw OrderingFailure(step, "no fresh extreme point at " + gamma.to_string());
    Residue acc = 0;
    for (const auto& g : fc) {
      if (g == *f) continue;
      auto [it, inserted] = out.x.emplace(gamma * g, 0);
      acc = mod_add(acc, mod_mul(it->second, hc.scalar_at(g.inverse()), p), p);
    }
    const Residue coeff = hc.scalar_at(f->inverse());
    out.x[gamma * *f] = mod_mul(mod_inv(coeff, p), mod_sub(target, acc, p), p);
    for (const auto& e : hull) covered.insert(gamma * e);
    ++out.steps;
  }
  Configuration cfg;
  for (const auto& [w, v] : out.x) cfg[w] = FpVector{v};
  out.verified = true;
  for (const auto& g : ball(k.rank(), n)) {
    auto it = y.find(g);
    if (convolve_at(k, cfg, g)[0] != (it == y.end() ? 0 : it->second % p)) out.verified = false;
  }
  return out;
}

/// Uniformly random pattern on W.
inline std::map<FreeWord, Residue> random_pattern(const WordSet& w, std::uint32_t p, std::mt19937_64& rng) {
  std::map<FreeWord, Residue> out;
  for (const auto& g : w) out[g] = static_cast<Residue>(rng() % p);
  return out;
}

/// Every nonzero scalar kernel with coefficients on the words of `support`.
inline std::vector<ConvolutionKernel> all_scalar_kernels(std::uint32_t p, const WordSet& support) {
  std::vector<ConvolutionKernel> out;
  const std::vector<FreeWord> words(support.begin(), support.end());
  std::vector<long long> coeff(words.size(), 0);
  while (true) {
    std::size_t i = 0;
    for (; i < coeff.size(); ++i) {
      if (++coeff[i] < static_cast<long long>(p)) break;
      coeff[i] = 0;
    }
    if (i == coeff.size()) break;
    std::map<FreeWord, long long> h;
    for (std::size_t j = 0; j < words.size(); ++j)
      if (coeff[j]) h[words[j]] = coeff[j];
    out.push_back(ConvolutionKernel::scalar(p, support.rank(), h));
  }
  return out;
}

}  // namespace flab
