// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <array>
#include <chrono>
#include <cstdint>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "flab/flab.hpp"

using namespace flab;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

EntropyValue L(std::uint64_t n) { return EntropyValue::log_of(n); }

std::string cert(Certificate c) { return to_string(c); }

// ---- criterion 1 ----

Outcome ornstein_weiss() {
  const BernoulliProcess full(2, 2, "Z/2");
  const BernoulliProcess image(2, 4, "Z/2xZ/2");
  const KernelProcess kernel(std::make_shared<KernelSubshift>(ConvolutionKernel::ornstein_weiss()), "N");
  const auto ff = f_report(full, 2), fi = f_report(image, 2), fk = f_report(kernel, 2);
  Outcome o;
  o.pass = ff.f == L(2) && fi.f == L(4) && fk.f == -L(2) && ff.f == fk.f + fi.f && ff.f_cert == Certificate::Exact &&
           fi.f_cert == Certificate::Exact && fk.f_cert == Certificate::Exact;
  o.detail = "f(Z/2)=" + ff.f.to_string() + " [" + cert(ff.f_cert) + "], f(N)=" + fk.f.to_string() + " [" + cert(fk.f_cert) +
             "], f(Z/2xZ/2)=" + fi.f.to_string() + " [" + cert(fi.f_cert) + "]";
  return o;
}

// ---- criterion 2 ----

Outcome finite_groups() {
  Outcome o;
  std::size_t cases = 0;
  for (const char* name : {"Z/4", "Z/2xZ/2", "D4"}) {
    const auto g = FiniteGroup::preset(name);
    for (int r : {2, 3}) {
      const auto actions = preset_actions(g, r);
      std::set<std::string> distinct;
      for (const auto& act : actions) distinct.insert(describe_action(act));
      if (distinct.size() < 2) {
        o.pass = false;
        o.detail += std::string(name) + " has fewer than two assignments; ";
      }
      for (const auto& act : actions) {
        const FiniteActionProcess proc(act.action(), FinitePartition::points(act.action().measure()), name);
        const auto rep = f_report(proc, 2);
        const bool ok = rep.f == L(g.order()) * Rational(1 - r) && rep.f_cert == Certificate::Exact;
        ++cases;
        if (!ok) {
          o.pass = false;
          o.detail += describe_action(act) + " r=" + std::to_string(r) + " gave " + rep.f.to_string() + "; ";
        }
      }
    }
  }
  if (o.pass) o.detail = std::to_string(cases) + " actions, f = -(r-1) log|G| EXACT";
  return o;
}

// ---- criterion 3 ----

Outcome comparison_family() {
  Outcome o;
  std::size_t cases = 0;
  for (std::uint32_t k : {2u, 3u}) {
    for (int r : {2, 3}) {
      const auto g = FiniteGroup::cyclic(k);
      std::uint64_t kr = 1;
      for (int i = 0; i < r; ++i) kr *= k;
      const BernoulliProcess full(r, k, g.name());
      const auto constants = FiniteGroupAction::trivial(g, r);
      const FiniteActionProcess kernel(constants.action(), FinitePartition::points(constants.action().measure()), "constants");
      const BernoulliProcess image(r, kr, "K^r");
      const auto ff = f_report(full, 2), fk = f_report(kernel, 2), fi = f_report(image, 2);
      const auto verdict = addition_report(ff, fk, fi);
      const bool values = ff.f == L(k) && fk.f == L(k) * Rational(1 - r) && fi.f == L(k) * Rational(r);
      KernelSubshift cmp(ConvolutionKernel::comparison(k, r));
      bool dims = true;
      for (std::size_t n = 1; n <= 2; ++n) {
        const auto m = cmp.marginal(ball(r, n));
        dims = dims && m.certified() && m.dimension() == 1;
      }
      ++cases;
      if (!(verdict.verdict == Verdict::Pass && values && dims)) {
        o.pass = false;
        o.detail += "Z/" + std::to_string(k) + " r=" + std::to_string(r) + ": " + verdict.explanation + (dims ? "" : ", window dim != 1") + "; ";
      }
    }
  }
  if (o.pass) o.detail = std::to_string(cases) + " (K, r) pairs EXACT; comparison kernel has window dimension 1 on B(1), B(2)";
  return o;
}

// ---- criterion 4 ----

Outcome algebraic_family() {
  const auto k = ConvolutionKernel::scalar(2, 2, {{FreeWord::identity(2), 1}, {FreeWord::generator(2, 1), 1}});
  const KernelProcess proc(std::make_shared<KernelSubshift>(k), "X_h");
  const auto rep = f_report(proc, 2);
  Outcome o;
  const auto& r0 = rep.rows[0];
  const auto& r1 = rep.rows[1];
  o.pass = r0.F.is_zero() && r1.F.is_zero() && r0.F_cert == Certificate::Exact && r1.F_cert == Certificate::Exact &&
           r0.F_star.is_zero() && rep.f.is_zero() && rep.f_star.is_zero();
  o.detail = "F(0)=" + r0.F.to_string() + " [" + cert(r0.F_cert) + "], F(1)=" + r1.F.to_string() + " [" + cert(r1.F_cert) +
             "], F*(0)=" + r0.F_star.to_string() + " [" + cert(r0.F_star_cert) + ": exact arithmetic, rate along s2 by " +
             std::to_string(r0.rates.at(1).increments.size()) + " equal increments], truncated f=" + rep.f.to_string() +
             " f*=" + rep.f_star.to_string() + " over n<=2";
  return o;
}

// ---- criterion 5 ----

Outcome surjectivity() {
  Outcome o;
  std::size_t count = 0;
  for (std::uint32_t p : {2u, 3u}) {
    for (const auto& k : all_scalar_kernels(p, ball(2, 1))) {
      const bool oracle = is_surjective(k).surjective;
      for (std::size_t n = 0; n <= 1; ++n) {
        const bool brute = exhaustive_window_solvable(k, ball(2, n));
        if (brute != oracle) {
          o.pass = false;
          o.detail += k.to_string() + " on B(" + std::to_string(n) + "); ";
        }
      }
      ++count;
    }
  }
  if (o.pass) o.detail = std::to_string(count) + " kernels (31 for p=2, 242 for p=3), targets on B(0) and B(1)";
  return o;
}

// ---- criterion 6 ----

Outcome preimages() {
  Outcome o;
  std::mt19937_64 rng(default_seed() + 6);
  const auto b1 = ball(2, 1);
  std::vector<ConvolutionKernel> kernels;
  while (kernels.size() < 5) {
    const std::uint32_t p = kernels.size() % 2 ? 3 : 2;
    std::map<FreeWord, long long> h;
    for (const auto& u : ball(2, 2))
      if (draw(rng, 4) == 0) h[u] = 1 + static_cast<long long>(draw(rng, p - 1));
    if (!h.empty()) kernels.push_back(ConvolutionKernel::scalar(p, 2, h));
  }
  std::size_t verified = 0;
  for (int t = 0; t < 100; ++t) {
    const auto& k = kernels[static_cast<std::size_t>(t) % kernels.size()];
    const auto y = random_pattern(b1, k.modulus(), rng);
    const auto res = preimage_on_ball(k, y, 1);
    bool ok = true;
    for (const auto& g : b1) {
      std::uint64_t acc = 0;
      for (const auto& [u, m] : k.coeffs()) {
        auto it = res.x.find(g * u.inverse());
        if (it == res.x.end()) {
          ok = false;
          break;
        }
        acc += static_cast<std::uint64_t>(m.at(0, 0)) * it->second;
      }
      ok = ok && acc % k.modulus() == y.at(g);
    }
    if (ok && res.verified) ++verified;
  }
  o.pass = verified == 100;
  o.detail = std::to_string(verified) + "/100 targets re-verified across 5 kernels";
  return o;
}

// ---- criterion 7 ----

Outcome cocycles() {
  Outcome o;
  std::size_t pairs = 0, checked = 0, failures = 0;
  for (const auto& name : group_presets()) {
    const auto g = FiniteGroup::preset(name);
    for (const auto& act : preset_actions(g, 2)) {
      for (const auto& n : invariant_normal_subgroups(act)) {
        const auto sc = cocycle_from_section(act, n);
        const auto id = verify_cocycle_identity(sc.cocycle, 3);
        const auto conj = verify_conjugacy(sc, 3);
        checked += id.checked + conj.checked;
        failures += id.failures + conj.failures;
        ++pairs;
        if (!id.ok() || !conj.ok()) o.detail += describe_action(act) + " over " + describe_subgroup(g, n) + "; ";
      }
    }
  }
  o.pass = failures == 0 && pairs > 0;
  o.detail = std::to_string(pairs) + " (G, N) pairs, " + std::to_string(checked) + " identities, " + std::to_string(failures) +
             " failures" + (o.detail.empty() ? "" : ": " + o.detail);
  return o;
}

// ---- criterion 8 ----

Outcome relative_rates() {
  Outcome o;
  std::size_t rows = 0, nontrivial = 0;
  for (const auto& inst : verifier_skew_instances(default_seed(), 6)) {
    bool twisted = false;
    for (const auto& row : inst.skew.cocycle().table())
      for (auto v : row) twisted = twisted || v != 0;
    nontrivial += twisted ? 1 : 0;
    for (const auto& n : inst.skew.fiber().group().normal_subgroups()) {
      for (const auto& row : relative_rate_rows(inst.skew, n, 2)) {
        ++rows;
        if (!row.equal) {
          o.pass = false;
          o.detail += inst.label + " n=" + std::to_string(row.n) + "; ";
        }
      }
    }
  }
  o.pass = o.pass && nontrivial > 0;
  if (o.pass) o.detail = std::to_string(rows) + " rows EXACT, " + std::to_string(nontrivial) + " instances with nontrivial cocycles";
  return o;
}

// ---- criterion 9 ----

Outcome twist_gap() {
  Outcome o;
  std::mt19937_64 rng(default_seed() + 9);
  std::size_t records = 0, equalities = 0;
  for (const auto& sys : random_z_systems(default_seed() + 5, 20)) {
    const auto measure = FiniteMeasure::uniform(sys.group.order());
    std::vector<FinitePartition> qs{random_partition(measure, 3, rng), random_partition(measure, 2, rng)};
    for (const auto& n : sys.group.normal_subgroups()) qs.push_back(special_partition(sys.group, n));
    for (const auto& q : qs) {
      for (std::size_t m = 1; m <= 5; ++m) {
        const auto chk = verify_lemma_5_1_step(sys, q, m);
        records += chk.records.size();
        if (chk.K.is_zero()) equalities += chk.records.size();
        if (!chk.ok()) {
          o.pass = false;
          o.detail += *chk.witness + "; ";
        }
      }
    }
  }
  if (o.pass) o.detail = std::to_string(records) + " (x, m) checks on 20 systems, " + std::to_string(equalities) + " equalities with K(Q)=0";
  return o;
}

// ---- criterion 10 ----

Outcome abramov_rokhlin() {
  Outcome o;
  std::mt19937_64 rng(default_seed() + 42);
  std::size_t held = 0;
  for (std::size_t i = 0; i < 10; ++i) {
    const auto a = random_action(2, 3 + draw(rng, 4), rng);
    const auto p = random_partition(a.measure(), 2, rng);
    const auto q = random_partition(a.measure(), 2, rng);
    const auto c = abramov_rokhlin_case(a, p, q);
    if (c.holds) {
      ++held;
    } else {
      o.pass = false;
      o.detail += "action #" + std::to_string(i) + ": " + c.joint.f.to_string() + " vs " + c.q_only.f.to_string() + " + " +
                  c.relative.f.to_string() + (c.exact ? "" : " (not all EXACT)") + "; ";
    }
  }
  if (o.pass) o.detail = std::to_string(held) + "/10 actions EXACT";
  return o;
}

// ---- criterion 11 ----

// Rank over GF(2) of 64-bit rows.
std::size_t gf2_rank(std::vector<std::uint64_t> rows) {
  std::size_t rank = 0;
  for (int bit = 63; bit >= 0 && rank < rows.size(); --bit) {
    const std::uint64_t mask = std::uint64_t{1} << bit;
    std::size_t piv = rank;
    while (piv < rows.size() && !(rows[piv] & mask)) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[rank], rows[piv]);
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (i != rank && (rows[i] & mask)) rows[i] ^= rows[rank];
    ++rank;
  }
  return rank;
}

// Window V as bit columns; site g carries the constraint Σ_u x(g u⁻¹) = 0
// whenever every g u⁻¹ lies in V.
struct BitWindow {
  std::vector<FreeWord> support;      // words of B(2), bit j of a kernel mask
  std::vector<std::vector<int>> col;  // col[site][j] = column of site·support[j]⁻¹ or -1

  BitWindow(const WordSet& v, const WordSet& sites_from) {
    const auto b2 = ball(2, 2);
    support.assign(b2.begin(), b2.end());
    const auto index = v.index();
    for (const auto& g : sites_from) {
      std::vector<int> row;
      for (const auto& u : support) {
        auto it = index.find(g * u.inverse());
        row.push_back(it == index.end() ? -1 : static_cast<int>(it->second));
      }
      col.push_back(std::move(row));
    }
  }

  // dim of the projection onto the columns in `w_mask`.
  std::size_t projected_dimension(std::uint32_t kernel, std::uint64_t w_mask) const {
    std::vector<std::uint64_t> rows, outside;
    for (const auto& site : col) {
      std::uint64_t r = 0;
      bool inside = true;
      for (std::size_t j = 0; j < support.size() && inside; ++j) {
        if (!(kernel >> j & 1)) continue;
        if (site[j] < 0) inside = false;
        else r ^= std::uint64_t{1} << site[j];
      }
      if (!inside || !r) continue;
      rows.push_back(r);
      outside.push_back(r & ~w_mask);
    }
    const std::size_t w = static_cast<std::size_t>(__builtin_popcountll(w_mask));
    return w - gf2_rank(rows) + gf2_rank(outside);
  }
};

Outcome properties() {
  Outcome o;
  std::mt19937_64 rng(default_seed() + 11);
  std::ostringstream notes;
  auto fail = [&](const std::string& what) {
    o.pass = false;
    notes << what << "; ";
  };

  // Kolmogorov consistency and shift invariance of cylinder measures.
  const auto b2 = ball(2, 2);
  const std::vector<FreeWord> b2w(b2.begin(), b2.end());
  std::size_t cylinders = 0;
  for (int trial = 0; trial < 30; ++trial) {
    std::map<FreeWord, long long> h;
    while (h.empty())
      for (const auto& u : ball(2, 1))
        if (draw(rng, 2)) h[u] = 1;
    KernelSubshift x(ConvolutionKernel::scalar(2, 2, h));
    WordSet big(2);
    const std::size_t size = 2 + draw(rng, 11);
    while (big.size() < size) big.insert(b2w[draw(rng, b2w.size())]);
    WordSet small(2);
    for (const auto& w : big)
      if (small.size() + 1 < big.size()) small.insert(w);
    const auto idx = big.index();
    std::map<FpVector, Rational> summed;
    for (const auto& v : x.marginal(big).set.enumerate()) {
      FpVector r;
      for (const auto& w : small) r.push_back(v[idx.at(w)]);
      summed[r] += x.cylinder_measure(big, v);
      ++cylinders;
    }
    for (const auto& v : x.marginal(small).set.enumerate())
      if (summed[v] != x.cylinder_measure(small, v)) fail("Kolmogorov consistency on " + big.to_string());
    const auto g = b2w[draw(rng, b2w.size())];
    const auto moved = big.translated(g);
    const auto midx = moved.index();
    for (const auto& v : x.marginal(big).set.enumerate()) {
      FpVector t(v.size());
      std::size_t i = 0;
      for (const auto& w : big) t[midx.at(g * w)] = v[i++];
      if (x.cylinder_measure(moved, t) != x.cylinder_measure(big, v)) fail("shift invariance on " + big.to_string());
    }
  }
  notes << cylinders << " cylinders checked; ";

  // Monotone and subadditive entropy over windows, nonincreasing increments.
  std::size_t pairs = 0, rates = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_action(2, 3 + draw(rng, 8), rng);
    const FiniteActionProcess fin(a, random_partition(a.measure(), 3, rng), "finite");
    std::map<FreeWord, long long> h{{FreeWord::identity(2), 1}};
    h[b2w[1 + draw(rng, 4)]] = 1;
    const KernelProcess ker(std::make_shared<KernelSubshift>(ConvolutionKernel::scalar(2, 2, h)), "kernel");
    for (const FiniteProcess* proc : {static_cast<const FiniteProcess*>(&fin), static_cast<const FiniteProcess*>(&ker)}) {
      WordSet u(2), v(2);
      for (int i = 0; i < 3; ++i) {
        u.insert(b2w[draw(rng, b2w.size())]);
        v.insert(b2w[draw(rng, b2w.size())]);
      }
      const auto uv = set_union(u, v);
      if (proc->entropy(u) > proc->entropy(uv) || proc->entropy(uv) > proc->entropy(u) + proc->entropy(v)) fail(proc->name() + " entropy");
      ++pairs;
      for (int i = 1; i <= 2; ++i) {
        const auto r = generator_entropy_rate(*proc, i, u);
        if (!r.nonincreasing) fail(proc->name() + " increments increased");
        ++rates;
      }
    }
  }
  notes << pairs << " window pairs, " << rates << " rate sequences; ";

  // Ball sizes: 1 + 2r((2r-1)^n - 1)/(2r-2).
  for (int r : {2, 3}) {
    for (std::size_t n = 0; n <= 5; ++n) {
      std::size_t pw = 1;
      for (std::size_t i = 0; i < n; ++i) pw *= static_cast<std::size_t>(2 * r - 1);
      const std::size_t closed = 1 + static_cast<std::size_t>(2 * r) * (pw - 1) / static_cast<std::size_t>(2 * r - 2);
      if (ball(r, n).size() != closed || ball_size(r, n) != closed) fail("ball size r=" + std::to_string(r));
    }
  }

  // Stabilization by V = B(n+2): every nonzero GF(2) kernel on B(2) at n = 0,
  // compared with V = B(3); a seeded sample at n = 1 and for p = 3.
  const BitWindow v2(ball(2, 2), ball(2, 4)), v3(ball(2, 3), ball(2, 5));
  std::size_t unstable = 0;
  const std::uint32_t all = (1u << 17) - 1;
  for (std::uint32_t mask = 1; mask <= all; ++mask)
    if (v2.projected_dimension(mask, 1) != v3.projected_dimension(mask, 1)) ++unstable;
  if (unstable) fail(std::to_string(unstable) + " GF(2) kernels not stable at n=0");
  // The bitset count against the general solver on a sample.
  for (int t = 0; t < 200; ++t) {
    const std::uint32_t mask = 1 + static_cast<std::uint32_t>(draw(rng, all));
    std::map<FreeWord, long long> h;
    for (std::size_t j = 0; j < 17; ++j)
      if (mask >> j & 1) h[v2.support[j]] = 1;
    const auto k = ConvolutionKernel::scalar(2, 2, h);
    if (project_window(k, ball(2, 2), ball(2, 0)).dimension() != v2.projected_dimension(mask, 1)) fail("bitset rank disagrees");
  }
  std::size_t sampled = 0;
  for (int t = 0; t < 120; ++t) {
    const std::uint32_t p = t % 2 ? 3 : 2;
    const std::size_t n = t % 3 == 0 ? 0 : 1;
    std::map<FreeWord, long long> h;
    while (h.empty())
      for (const auto& u : b2w)
        if (draw(rng, 3) == 0) h[u] = 1 + static_cast<long long>(draw(rng, p - 1));
    const auto k = ConvolutionKernel::scalar(p, 2, h);
    const auto w = ball(2, n);
    const auto near = project_window(k, ball(2, n + 2), w);
    const auto far = project_window(k, ball(2, n + 3), w);
    KernelSubshift x(k);
    if (!(near == far) || near.dimension() != x.marginal(w).dimension()) fail("not stable: " + k.to_string());
    ++sampled;
  }
  notes << (all) << " GF(2) kernels exhaustive at n=0, " << sampled << " sampled at n<=1, p in {2,3}";
  o.detail = notes.str();
  return o;
}

}  // namespace

int main() {
  const std::array<std::pair<const char*, std::function<Outcome()>>, 11> criteria{{
      {"Ornstein-Weiss triple log 2 = -log 2 + log 4", ornstein_weiss},
      {"finite groups f = -(r-1) log|G|", finite_groups},
      {"comparison-map family log|K| = -(r-1) log|K| + r log|K|", comparison_family},
      {"algebraic family h = e + a, p = 2", algebraic_family},
      {"surjectivity oracle vs exhaustive solving", surjectivity},
      {"preimage solver re-verification", preimages},
      {"cocycle identity and section conjugacy", cocycles},
      {"relative F* over skew products equals fiber F*", relative_rates},
      {"twisted-join gap bounded by m K(Q)", twist_gap},
      {"Abramov-Rokhlin addition on finite actions", abramov_rokhlin},
      {"property suites", properties},
  }};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("error: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (o.pass ? "[PASS]" : "[FAIL]") << " criterion " << (i + 1) << ": " << criteria[i].first << " -- " << o.detail
              << " (" << static_cast<int>(secs * 1000) << " ms)" << std::endl;
    failures += o.pass ? 0 : 1;
  }
  std::cout << (failures ? "FAILED " : "ALL PASSED ") << (criteria.size() - static_cast<std::size_t>(failures)) << "/"
            << criteria.size() << std::endl;
  return failures ? 1 : 0;
}
