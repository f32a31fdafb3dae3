#pragma once

// Example families, kernel runs and the verifier suite, each producing a
// JSON report plus an exit status (0 all pass, 1 any failure, 2 any
// uncertified quantity).

#include <cstdlib>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "flab/algebraic_shift.hpp"
#include "flab/f_invariant.hpp"
#include "flab/finite_group.hpp"
#include "flab/process.hpp"
#include "flab/report.hpp"
#include "flab/skew_product.hpp"

namespace flab {

inline constexpr std::uint64_t kDefaultSeed = 20110417;

/// FLAB_SEED when set, else a fixed default.
inline std::uint64_t default_seed() {
  if (const char* s = std::getenv("FLAB_SEED"); s && *s) return std::stoull(s);
  return kDefaultSeed;
}

struct RunConfig {
  int rank = 2;
  std::size_t n_max = 2;
  std::uint32_t p = 2;
  std::string group = "Z/3";
  std::optional<Json> kernel;  // kernel JSON; the δ_e + δ_{s1} kernel when absent
  std::size_t window_cap = 4;
  std::size_t stable_threshold = 3;
  std::vector<std::string> suites{"all"};
  bool inject_fault = false;
  std::uint64_t seed = kDefaultSeed;
  std::string process;

  void validate() const {
    if (rank < 1) throw Error("rank must be positive");
    if (n_max < 1) throw Error("n_max must be at least 1");
    if (stable_threshold < 1) throw Error("stabilization threshold must be positive");
  }
  RateOptions rate_options() const { return RateOptions{stable_threshold, std::max<std::size_t>(8, stable_threshold + 2)}; }
  MarginalOptions marginal_options() const { return MarginalOptions{window_cap, 1500, false}; }
};

struct RunResult {
  Json report;
  int exit_code = 0;
};

/// Collects verdict strings and turns them into an exit status.
class StatusLog {
 public:
  void add(const std::string& status) { seen_.insert(status); }
  void add(Certificate c) {
    if (c == Certificate::Uncertified) seen_.insert("UNCERTIFIED");
  }
  void add(Verdict v) {
    if (v == Verdict::Fail || v == Verdict::BoundGap) seen_.insert("FAIL");
  }
  int exit_code() const {
    if (seen_.count("FAIL")) return 1;
    if (seen_.count("UNCERTIFIED")) return 2;
    return 0;
  }

 private:
  std::set<std::string> seen_;
};

inline std::string pass_fail(bool ok) { return ok ? "PASS" : "FAIL"; }

/// Uniform draw in [0, n) that does not depend on the standard library's
/// distribution implementation.
inline std::uint64_t draw(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

inline Perm random_perm(std::size_t n, std::mt19937_64& rng) {
  Perm p = identity_perm(n);
  for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[draw(rng, i)]);
  return p;
}

inline FinitePartition random_partition(MeasurePtr m, std::size_t max_blocks, std::mt19937_64& rng) {
  std::vector<std::uint64_t> raw(m->size());
  for (auto& v : raw) v = draw(rng, max_blocks);
  return FinitePartition(std::move(m), raw);
}

inline FinitePermAction random_action(int rank, std::size_t n, std::mt19937_64& rng) {
  std::vector<Perm> gens;
  for (int i = 0; i < rank; ++i) gens.push_back(random_perm(n, rng));
  return FinitePermAction(rank, std::move(gens));
}

inline FiniteGroupAction random_group_action(const FiniteGroup& g, int rank, std::mt19937_64& rng) {
  const auto autos = g.automorphisms();
  std::vector<Perm> pick;
  for (int i = 0; i < rank; ++i) pick.push_back(autos[draw(rng, autos.size())]);
  return FiniteGroupAction(g, std::move(pick));
}

inline Cocycle random_cocycle(const FinitePermAction& base, const FiniteGroupAction& fiber, std::mt19937_64& rng) {
  std::vector<std::vector<std::uint32_t>> t(static_cast<std::size_t>(base.rank()), std::vector<std::uint32_t>(base.size()));
  for (auto& row : t)
    for (auto& v : row) v = static_cast<std::uint32_t>(draw(rng, fiber.group().order()));
  return Cocycle(base, fiber, std::move(t));
}

inline const std::vector<std::string>& group_presets() {
  static const std::vector<std::string> names{"Z/4", "Z/2xZ/2", "D4", "Q8"};
  return names;
}

/// Rank-r actions of a group by automorphisms: the trivial one, one
/// generator moved, and (when available) two distinct nontrivial maps.
inline std::vector<FiniteGroupAction> preset_actions(const FiniteGroup& g, int rank) {
  const auto autos = g.automorphisms();
  const Perm id = identity_perm(g.order());
  std::vector<Perm> nontrivial;
  for (const auto& a : autos)
    if (a != id) nontrivial.push_back(a);
  std::vector<std::vector<Perm>> choices;
  choices.push_back(std::vector<Perm>(static_cast<std::size_t>(rank), id));
  if (!nontrivial.empty()) {
    std::vector<Perm> one(static_cast<std::size_t>(rank), id);
    one[0] = nontrivial.front();
    choices.push_back(one);
    std::vector<Perm> two(static_cast<std::size_t>(rank), nontrivial.back());
    two[0] = nontrivial.front();
    if (two != one) choices.push_back(two);
  }
  std::vector<FiniteGroupAction> out;
  for (auto& c : choices) out.emplace_back(g, std::move(c));
  return out;
}

/// Normal subgroups left invariant by the action.
inline std::vector<std::vector<std::uint32_t>> invariant_normal_subgroups(const FiniteGroupAction& a) {
  std::vector<std::vector<std::uint32_t>> out;
  for (auto& n : a.group().normal_subgroups())
    if (a.preserves(n)) out.push_back(std::move(n));
  return out;
}

inline std::string describe_action(const FiniteGroupAction& a) {
  std::string s = a.group().name() + " [";
  for (int i = 1; i <= a.rank(); ++i) {
    if (i > 1) s += "; ";
    const auto& p = a.action().generator(i);
    for (std::size_t x = 0; x < p.size(); ++x) s += (x ? "," : "") + std::to_string(p[x]);
  }
  return s + "]";
}

inline std::string describe_subgroup(const FiniteGroup& g, const std::vector<std::uint32_t>& n) {
  std::string s = "{";
  for (std::size_t i = 0; i < n.size(); ++i) s += (i ? "," : "") + g.label(n[i]);
  return s + "}";
}

inline Json addition_block(const FReport& total, const FReport& a, const FReport& b, StatusLog& log) {
  const auto v = addition_report(total, a, b);
  log.add(v.verdict);
  return to_json(v);
}

/// f((Z/2)^Γ) = f(N) + f((Z/2 × Z/2)^Γ) for the map x ↦ (x(g)+x(g s₁), x(g)+x(g s₂)).
inline RunResult run_ornstein_weiss(const RunConfig& cfg) {
  cfg.validate();
  StatusLog log;
  Json rep{{"run", "ornstein-weiss"}, {"rank", 2}, {"n_max", cfg.n_max}};
  const auto k = ConvolutionKernel::ornstein_weiss();
  auto sub = std::make_shared<KernelSubshift>(k, cfg.marginal_options());
  rep["kernel"] = kernel_to_json(k);

  Json dims = Json::array();
  bool all_one = true;
  for (std::size_t n = 0; n <= 2; ++n) {
    const auto m = sub->marginal(ball(2, n));
    log.add(m.certified() ? "PASS" : "UNCERTIFIED");
    all_one = all_one && m.certified() && m.dimension() == 1;
    dims.push_back(to_json(m));
  }
  rep["kernel_dimensions"] = dims;
  rep["kernel_dimension_verdict"] = pass_fail(all_one);
  log.add(pass_fail(all_one));

  const auto sv = is_surjective(k);
  rep["surjectivity"] = Json{{"window_surjective", sv.surjective}, {"certificate", sv.certificate}};
  log.add(pass_fail(sv.surjective));

  const auto ro = cfg.rate_options();
  const BernoulliProcess full(2, 2, "Z/2");
  const BernoulliProcess image(2, 4, "Z/2xZ/2");
  const KernelProcess kernel(sub, "N");
  const auto f_full = f_report(full, cfg.n_max, ro);
  const auto f_kernel = f_report(kernel, cfg.n_max, ro);
  const auto f_image = f_report(image, cfg.n_max, ro);
  for (const auto* r : {&f_full, &f_kernel, &f_image}) log.add(r->f_cert);
  rep["columns"] = Json{{"full", to_json(f_full)}, {"kernel", to_json(f_kernel)}, {"image", to_json(f_image)}};
  rep["addition"] = addition_block(f_full, f_kernel, f_image, log);
  return {rep, log.exit_code()};
}

/// Splits an abelian group name into cyclic factor orders.
inline std::vector<std::uint32_t> cyclic_factors(const FiniteGroup& g, const std::string& name) {
  if (!g.is_abelian()) throw Error(name + " is not abelian; the comparison-map realization needs an abelian group");
  std::vector<std::uint32_t> out;
  std::size_t pos = 0;
  while ((pos = name.find("Z/", pos)) != std::string::npos) {
    pos += 2;
    out.push_back(static_cast<std::uint32_t>(std::stoul(name.substr(pos))));
  }
  return out;
}

/// f(K^Γ) = f(K) + f((K^r)^Γ) for the constants K ⊂ K^Γ, finite abelian K.
inline RunResult run_generalization(const RunConfig& cfg) {
  cfg.validate();
  StatusLog log;
  const auto g = FiniteGroup::preset(cfg.group);
  const auto factors = cyclic_factors(g, cfg.group);
  const int r = cfg.rank;
  const auto n = g.order();
  Json rep{{"run", "generalization"}, {"group", g.name()}, {"order", n}, {"rank", r}, {"n_max", cfg.n_max}};

  const auto ro = cfg.rate_options();
  std::size_t image_size = 1;
  for (int i = 0; i < r; ++i) image_size *= n;
  guard_atoms(image_size);
  const BernoulliProcess full(r, n, g.name());
  const auto constants = FiniteGroupAction::trivial(g, r);
  const FiniteActionProcess kernel(constants.action(), FinitePartition::points(constants.action().measure()), "constants " + g.name());
  const BernoulliProcess image(r, image_size, "(" + g.name() + ")^" + std::to_string(r));
  const auto f_full = f_report(full, cfg.n_max, ro);
  const auto f_kernel = f_report(kernel, cfg.n_max, ro);
  const auto f_image = f_report(image, cfg.n_max, ro);
  for (const auto* x : {&f_full, &f_kernel, &f_image}) log.add(x->f_cert);
  rep["columns"] = Json{{"full", to_json(f_full)}, {"kernel", to_json(f_kernel)}, {"image", to_json(f_image)}};
  rep["addition"] = addition_block(f_full, f_kernel, f_image, log);

  const EntropyValue logk = EntropyValue::log_of(n);
  const bool formula = f_kernel.f == (1LL - r) * logk && f_image.f == static_cast<long long>(r) * logk && f_full.f == logk;
  rep["closed_form"] = Json{{"expected_kernel", to_json((1LL - r) * logk)}, {"verdict", pass_fail(formula)}};
  log.add(pass_fail(formula));

  // The kernel of x ↦ (x(g s_i) - x(g))_i is the constants, per prime factor.
  Json comp = Json::array();
  for (auto p : factors) {
    if (!is_prime(p)) {
      comp.push_back(Json{{"factor", "Z/" + std::to_string(p)}, {"verdict", "NOT_APPLICABLE"},
                          {"reason", "comparison map is realized over prime fields only"}});
      continue;
    }
    auto sub = std::make_shared<KernelSubshift>(ConvolutionKernel::comparison(p, r), cfg.marginal_options());
    Json windows = Json::array();
    bool ok = true;
    for (std::size_t m = 1; m <= 2; ++m) {
      const auto mg = sub->marginal(ball(r, m));
      log.add(mg.certified() ? "PASS" : "UNCERTIFIED");
      ok = ok && mg.certified() && mg.dimension() == 1;
      windows.push_back(to_json(mg));
    }
    const KernelProcess kp(sub, "ker comparison Z/" + std::to_string(p));
    const auto fk = f_report(kp, cfg.n_max, ro);
    log.add(fk.f_cert);
    const bool f_ok = fk.f_cert == Certificate::Exact && fk.f == (1LL - r) * EntropyValue::log_of(p);
    comp.push_back(Json{{"factor", "Z/" + std::to_string(p)},
                        {"windows", windows},
                        {"f", to_json(fk.f)},
                        {"f_certificate", to_string(fk.f_cert)},
                        {"verdict", pass_fail(ok && f_ok)}});
    log.add(pass_fail(ok && f_ok));
  }
  rep["comparison_kernel"] = comp;
  return {rep, log.exit_code()};
}

inline ConvolutionKernel default_algebraic_kernel(std::uint32_t p, int rank) {
  return ConvolutionKernel::scalar(p, rank, {{FreeWord::identity(rank), 1}, {FreeWord::generator(rank, 1), 1}});
}

/// X_{h,p} = ker φ_h: surjectivity, the f-table and the value forced by
/// f(full) = f(X_{h,p}) + f(full).
inline RunResult run_algebraic(const RunConfig& cfg) {
  cfg.validate();
  StatusLog log;
  const auto k = cfg.kernel ? kernel_from_json(*cfg.kernel) : default_algebraic_kernel(cfg.p, cfg.rank);
  if (k.is_zero()) throw ZeroKernel();
  if (!k.is_scalar()) throw Error("algebraic runs need a scalar kernel");
  Json rep{{"run", "algebraic"}, {"kernel", kernel_to_json(k)}, {"kernel_text", k.to_string()}, {"n_max", cfg.n_max}};

  const auto sv = is_surjective(k);
  rep["surjectivity"] = Json{{"surjective", sv.surjective}, {"theorem_backed", sv.theorem_backed}, {"certificate", sv.certificate}};
  log.add(pass_fail(sv.surjective));

  const auto ro = cfg.rate_options();
  auto sub = std::make_shared<KernelSubshift>(k, cfg.marginal_options());
  const KernelProcess kernel(sub, "X_{h,p}");
  const BernoulliProcess full(k.rank(), k.modulus(), "Z/" + std::to_string(k.modulus()));
  FReport f_kernel;
  try {
    f_kernel = f_report(kernel, cfg.n_max, ro);
  } catch (const Uncertified& e) {
    rep["error"] = e.what();
    log.add("UNCERTIFIED");
    return {rep, log.exit_code()};
  }
  const auto f_full = f_report(full, cfg.n_max, ro);
  rep["columns"] = Json{{"full", to_json(f_full)}, {"kernel", to_json(f_kernel)}, {"image", to_json(f_full)}};
  rep["addition"] = addition_block(f_full, f_kernel, f_full, log);

  const auto pc = predicted_column(f_full, f_full, f_kernel);
  rep["kernel_column"] = Json{{"forced", to_json(pc.predicted)},
                              {"truncated_infimum", to_json(pc.upper)},
                              {"certificate", to_string(f_kernel.f_cert)},
                              {"consistent", pc.consistent},
                              {"attained", pc.attained}};
  log.add(pass_fail(pc.consistent));
  return {rep, log.exit_code()};
}

struct VerifierOutcome {
  explicit VerifierOutcome(std::string n) : name(std::move(n)) {}

  std::string name;
  std::size_t instances = 0;
  std::size_t checked = 0;
  std::size_t failures = 0;
  std::vector<std::string> witnesses;

  void record(bool ok, std::size_t n_checked, const std::optional<std::string>& witness, const std::string& where) {
    ++instances;
    checked += n_checked;
    if (!ok) {
      ++failures;
      if (witnesses.size() < 5) witnesses.push_back(where + (witness ? ": " + *witness : std::string()));
    }
  }
  Json json() const {
    return Json{{"verifier", name},
                {"verdict", pass_fail(failures == 0)},
                {"instances", instances},
                {"checked", checked},
                {"failures", failures},
                {"counterexamples", witnesses}};
  }
};

/// Finite skew products used by the verifiers: section cocycles of the
/// preset actions and seeded random cocycles over small bases.
struct SkewInstance {
  std::string label;
  SkewProduct skew;
};

inline std::vector<SkewInstance> verifier_skew_instances(std::uint64_t seed, std::size_t random_count = 6) {
  std::vector<SkewInstance> out;
  for (const auto& name : group_presets()) {
    const auto g = FiniteGroup::preset(name);
    for (const auto& act : preset_actions(g, 2)) {
      for (const auto& n : invariant_normal_subgroups(act)) {
        if (n.size() == 1 || n.size() == g.order()) continue;
        auto sc = cocycle_from_section(act, n);
        out.push_back({"section " + describe_action(act) + " over " + describe_subgroup(g, n), SkewProduct(sc.cocycle)});
      }
    }
  }
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < random_count; ++i) {
    const auto g = FiniteGroup::preset(group_presets()[draw(rng, group_presets().size())]);
    const auto base = random_action(2, 2 + draw(rng, 2), rng);
    const auto fiber = random_group_action(g, 2, rng);
    out.push_back({"random cocycle #" + std::to_string(i) + " " + describe_action(fiber), SkewProduct(random_cocycle(base, fiber, rng))});
  }
  return out;
}

/// Seeded Z-skew systems over bases of 2 to 4 points.
inline std::vector<ZSkewSystem> random_z_systems(std::uint64_t seed, std::size_t count) {
  std::mt19937_64 rng(seed);
  const std::vector<std::string> groups{"Z/3", "Z/4", "Z/2xZ/2", "D4", "Q8", "Z/6"};
  std::vector<ZSkewSystem> out;
  for (std::size_t i = 0; i < count; ++i) {
    auto g = FiniteGroup::preset(groups[draw(rng, groups.size())]);
    const auto autos = g.automorphisms();
    const std::size_t nx = 2 + draw(rng, 3);
    ZSkewSystem sys{random_perm(nx, rng), g, autos[draw(rng, autos.size())], {}};
    for (std::size_t x = 0; x < nx; ++x) sys.sigma1.push_back(static_cast<std::uint32_t>(draw(rng, g.order())));
    out.push_back(std::move(sys));
  }
  return out;
}

/// f(α, P∨Q), f(α, Q) and f(α, P | Σ(Q)) on one finite action, each with
/// n_max raised until the window partitions stabilize.
struct AbramovRokhlinCase {
  FReport joint, q_only, relative;
  bool exact = false;
  bool holds = false;
};

inline FReport stabilized_report(const FiniteProcess& proc, bool relative, const RateOptions& ro, std::size_t cap = 8) {
  FReport rep;
  for (std::size_t n = 2; n <= cap; n += 2) {
    rep = f_report(proc, n, ro, relative);
    if (rep.f_cert == Certificate::Exact) break;
  }
  return rep;
}

inline AbramovRokhlinCase abramov_rokhlin_case(const FinitePermAction& a, const FinitePartition& p, const FinitePartition& q,
                                               const RateOptions& ro = {}) {
  AbramovRokhlinCase c;
  const auto sq = sigma_generated(a, q);
  const FiniteActionProcess joint(a, join(p, q), "P v Q");
  const FiniteActionProcess q_only(a, q, "Q");
  const FiniteActionProcess rel(a, p, "P | Sigma(Q)", sq);
  c.joint = stabilized_report(joint, false, ro);
  c.q_only = stabilized_report(q_only, false, ro);
  c.relative = stabilized_report(rel, true, ro);
  c.exact = c.joint.f_cert == Certificate::Exact && c.q_only.f_cert == Certificate::Exact &&
            c.relative.f_cert == Certificate::Exact;
  c.holds = c.exact && c.joint.f == c.q_only.f + c.relative.f;
  return c;
}

/// Relative F*(n) of the skew process on P×Q against F*(β, Q^{B(n)}).
struct RelativeRateRow {
  std::size_t n = 0;
  FStarValue relative, fiber;
  bool equal = false;
};

inline std::vector<RelativeRateRow> relative_rate_rows(const SkewProduct& sp, const std::vector<std::uint32_t>& n_sub, std::size_t n_max,
                                              const RateOptions& ro = {}) {
  const auto q = special_partition(sp.fiber().group(), n_sub);
  const auto skew = skew_process(sp, FinitePartition::points(sp.base().measure()), q, "skew");
  const FiniteActionProcess fiber(sp.fiber().action(), q, "fiber");
  std::vector<RelativeRateRow> rows;
  for (std::size_t n = 0; n <= n_max; ++n) {
    RelativeRateRow row;
    row.n = n;
    row.relative = relative_F_star(skew, n, ro);
    row.fiber = F_star_of(fiber, n, ro);
    row.equal = row.relative.value == row.fiber.value && row.relative.certificate == Certificate::Exact &&
                row.fiber.certificate == Certificate::Exact;
    rows.push_back(std::move(row));
  }
  return rows;
}

inline const std::vector<std::string>& verifier_names() {
  static const std::vector<std::string> names{"cocycle",  "conjugacy", "twist_gap", "relative_rate",        "pullback",
                                              "generation",  "chain",     "join_special", "abramov_rokhlin"};
  return names;
}

/// Runs the selected verifiers ("all" selects every one).
inline RunResult run_verifier_suite(const RunConfig& cfg) {
  std::set<std::string> chosen;
  for (const auto& s : cfg.suites) {
    if (s == "all") {
      chosen.insert(verifier_names().begin(), verifier_names().end());
    } else if (std::find(verifier_names().begin(), verifier_names().end(), s) != verifier_names().end()) {
      chosen.insert(s);
    } else if (!s.empty()) {
      throw Error("unknown verifier '" + s + "'");
    }
  }
  StatusLog log;
  Json rep{{"run", "verify"}, {"seed", cfg.seed}, {"inject_fault", cfg.inject_fault}};
  Json results = Json::array();
  const auto ro = cfg.rate_options();
  auto selected = [&](const std::string& n) { return chosen.count(n) != 0; };
  auto finish = [&](const VerifierOutcome& v) {
    log.add(pass_fail(v.failures == 0));
    results.push_back(v.json());
  };

  std::vector<SkewInstance> skews;
  if (selected("cocycle") || selected("relative_rate") || selected("pullback") || selected("generation") || selected("chain")) {
    skews = verifier_skew_instances(cfg.seed);
  }

  if (selected("cocycle")) {
    VerifierOutcome v("cocycle");
    for (const auto& inst : skews) {
      Cocycle c = inst.skew.cocycle();
      if (cfg.inject_fault) {
        if (c.fiber().group().order() < 2) continue;
        c.inject_fault(1);
      }
      const auto chk = verify_cocycle_identity(c);
      v.record(chk.ok(), chk.checked, chk.witness, inst.label);
      const auto act = verify_skew_action(SkewProduct(c));
      v.record(act.ok(), act.checked, act.witness, inst.label + " (action)");
    }
    finish(v);
  }
  if (selected("conjugacy")) {
    VerifierOutcome v("conjugacy");
    for (const auto& name : group_presets()) {
      const auto g = FiniteGroup::preset(name);
      for (const auto& act : preset_actions(g, 2)) {
        for (const auto& n : invariant_normal_subgroups(act)) {
          const auto sc = cocycle_from_section(act, n);
          const auto chk = verify_conjugacy(sc);
          v.record(chk.ok(), chk.checked, chk.witness, describe_action(act) + " over " + describe_subgroup(g, n));
        }
      }
    }
    finish(v);
  }
  if (selected("twist_gap")) {
    VerifierOutcome v("twist_gap");
    std::mt19937_64 rng(cfg.seed + 51);
    std::size_t idx = 0;
    for (const auto& sys : random_z_systems(cfg.seed + 5, 20)) {
      const auto measure = FiniteMeasure::uniform(sys.group.order());
      std::vector<FinitePartition> qs{random_partition(measure, 3, rng)};
      const auto normals = sys.group.normal_subgroups();
      qs.push_back(special_partition(sys.group, normals[draw(rng, normals.size())]));
      for (const auto& q : qs) {
        for (std::size_t m = 1; m <= 5; ++m) {
          const auto chk = verify_lemma_5_1_step(sys, q, m);
          v.record(chk.ok(), chk.records.size(), chk.witness, "system #" + std::to_string(idx));
        }
      }
      ++idx;
    }
    finish(v);
  }
  if (selected("relative_rate")) {
    VerifierOutcome v("relative_rate");
    for (const auto& inst : skews) {
      for (const auto& n : inst.skew.fiber().group().normal_subgroups()) {
        for (const auto& row : relative_rate_rows(inst.skew, n, 2, ro)) {
          v.record(row.equal, 1,
                   "n=" + std::to_string(row.n) + ": " + row.relative.value.to_string() + " vs " + row.fiber.value.to_string(),
                   inst.label);
        }
      }
    }
    finish(v);
  }
  if (selected("pullback")) {
    VerifierOutcome v("pullback");
    std::mt19937_64 rng(cfg.seed + 63);
    for (const auto& inst : skews) {
      const auto normals = inst.skew.fiber().group().normal_subgroups();
      const auto& n = normals[draw(rng, normals.size())];
      const auto pp = random_partition(inst.skew.base().measure(), 2, rng);
      for (const auto& g : ball(2, 2)) {
        const auto chk = verify_lemma_6_3(inst.skew, g, n, pp);
        v.record(chk.equal, chk.atoms, chk.witness, inst.label + " g=" + g.to_string());
      }
    }
    finish(v);
  }
  if (selected("generation")) {
    VerifierOutcome v("generation");
    for (const auto& inst : skews) {
      const auto pts = FinitePartition::points(inst.skew.base().measure());
      for (const auto& n : inst.skew.fiber().group().normal_subgroups()) {
        const auto chk = verify_lemma_6_4(inst.skew, pts, n);
        v.record(chk.equal, chk.atoms, chk.witness, inst.label);
      }
    }
    finish(v);
  }
  if (selected("chain")) {
    VerifierOutcome v("chain");
    std::mt19937_64 rng(cfg.seed + 6);
    for (const auto& inst : skews) {
      const auto normals = inst.skew.fiber().group().normal_subgroups();
      const auto& n = normals[draw(rng, normals.size())];
      const auto pp = random_partition(inst.skew.base().measure(), 2, rng);
      for (std::size_t radius = 0; radius <= 2; ++radius) {
        const auto chk = verify_chain_step(inst.skew, pp, n, radius);
        v.record(chk.equal, chk.atoms, chk.witness, inst.label + " n=" + std::to_string(radius));
      }
    }
    finish(v);
  }
  if (selected("join_special")) {
    VerifierOutcome v("join_special");
    const auto z8 = FiniteGroup::cyclic(8);
    Perm triple(8);
    for (std::uint32_t x = 0; x < 8; ++x) triple[x] = (3 * x) % 8;
    const auto j = join_special(z8, {{0, 4}, {0, 2, 4, 6}}, {triple, identity_perm(8)});
    v.record(j.special && j.intersection == std::vector<std::uint32_t>{0, 4}, 8, std::nullopt, "Z/8");
    std::mt19937_64 rng(cfg.seed + 61);
    for (const auto& name : group_presets()) {
      const auto g = FiniteGroup::preset(name);
      const auto normals = g.normal_subgroups();
      const auto autos = g.automorphisms();
      for (std::size_t t = 0; t < 4; ++t) {
        const std::vector<std::vector<std::uint32_t>> ns{normals[draw(rng, normals.size())], normals[draw(rng, normals.size())]};
        const std::vector<Perm> ts{autos[draw(rng, autos.size())], autos[draw(rng, autos.size())]};
        const auto js = join_special(g, ns, ts);
        v.record(js.special, g.order(), std::nullopt, name);
      }
    }
    finish(v);
  }
  if (selected("abramov_rokhlin")) {
    VerifierOutcome v("abramov_rokhlin");
    std::mt19937_64 rng(cfg.seed + 42);
    for (std::size_t i = 0; i < 10; ++i) {
      const auto a = random_action(2, 3 + draw(rng, 4), rng);
      const auto p = random_partition(a.measure(), 2, rng);
      const auto q = random_partition(a.measure(), 2, rng);
      const auto c = abramov_rokhlin_case(a, p, q, ro);
      v.record(c.holds, 1,
               c.joint.f.to_string() + " vs " + c.q_only.f.to_string() + " + " + c.relative.f.to_string() +
                   (c.exact ? "" : " (not all exact)"),
               "action #" + std::to_string(i));
    }
    finish(v);
  }
  rep["verifiers"] = results;
  return {rep, log.exit_code()};
}

/// Process descriptors: "bernoulli:K", "group:G" (trivial action, points),
/// "ow", "kernel:<path>".
inline std::unique_ptr<FiniteProcess> process_from_spec(const std::string& spec, int rank, const MarginalOptions& mo) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "bernoulli") {
    const auto g = FiniteGroup::preset(arg.empty() ? "Z/2" : arg);
    return std::make_unique<BernoulliProcess>(rank, g.order(), g.name());
  }
  if (kind == "group") {
    const auto act = FiniteGroupAction::trivial(FiniteGroup::preset(arg), rank);
    return std::make_unique<FiniteActionProcess>(act.action(), FinitePartition::points(act.action().measure()),
                                                 "Haar on " + act.group().name());
  }
  if (kind == "ow") {
    return std::make_unique<KernelProcess>(std::make_shared<KernelSubshift>(ConvolutionKernel::ornstein_weiss(), mo), "N");
  }
  if (kind == "kernel") {
    return std::make_unique<KernelProcess>(std::make_shared<KernelSubshift>(kernel_from_json(read_json_file(arg)), mo));
  }
  throw Error("unknown process '" + spec + "'");
}

inline RunResult run_compute_f(const RunConfig& cfg) {
  cfg.validate();
  StatusLog log;
  const auto proc = process_from_spec(cfg.process, cfg.rank, cfg.marginal_options());
  Json rep{{"run", "compute-f"}, {"process", cfg.process}};
  try {
    const auto f = f_report(*proc, cfg.n_max, cfg.rate_options());
    log.add(f.f_cert);
    rep["report"] = to_json(f);
  } catch (const Uncertified& e) {
    rep["error"] = e.what();
    log.add("UNCERTIFIED");
  }
  return {rep, log.exit_code()};
}

}  // namespace flab
