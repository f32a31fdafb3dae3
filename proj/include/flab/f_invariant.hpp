#pragma once

// The functionals F, F*, their infima f, f*, relative versions given an
// invariant base algebra, and the addition-formula verdicts.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "flab/entropy_value.hpp"
#include "flab/free_group.hpp"
#include "flab/process.hpp"

namespace flab {

/// Strongest first; the weakest of several certificates is the minimum.
enum class Certificate { Exact = 3, Stable = 2, UpperBound = 1, Uncertified = 0 };

inline std::string to_string(Certificate c) {
  switch (c) {
    case Certificate::Exact: return "EXACT";
    case Certificate::Stable: return "STABLE";
    case Certificate::UpperBound: return "UPPER_BOUND";
    case Certificate::Uncertified: return "UNCERTIFIED";
  }
  return "?";
}

inline Certificate weakest(Certificate a, Certificate b) { return static_cast<int>(a) < static_cast<int>(b) ? a : b; }

struct RateOptions {
  std::size_t stable_threshold = 3;  // equal consecutive increments for STABLE
  std::size_t max_steps = 8;
};

/// Window entropy certificate: exact marginals or only window-stabilized ones.
inline Certificate marginal_certificate(const FiniteProcess& proc) {
  return proc.exact_marginals() ? Certificate::Exact : Certificate::Stable;
}

/// (1-2r) H(P^{B(n)}) + Σ_i H(P^{B(n) ∪ s_i B(n)}), optionally given the base.
inline EntropyValue F_of(const FiniteProcess& proc, std::size_t n, bool relative = false) {
  const int r = proc.rank();
  const WordSet b = ball(r, n);
  EntropyValue v = proc.entropy(b, relative) * Rational(1 - 2 * r);
  for (int i = 1; i <= r; ++i) v += proc.entropy(set_union(b, b.translated(FreeWord::generator(r, i))), relative);
  return v;
}

struct RateResult {
  int generator = 1;
  EntropyValue value;
  Certificate certificate = Certificate::UpperBound;
  std::vector<EntropyValue> increments;  // H(U_m) - H(U_{m-1}), m = 1, 2, ...
  bool nonincreasing = true;
  std::string evidence;
};

/// Entropy rate of α_{s_i} on P^W via increments of the windows
/// U_m = W ∪ s_i W ∪ ... ∪ s_i^m W.
inline RateResult generator_entropy_rate(const FiniteProcess& proc, int i, const WordSet& w, const RateOptions& opts = {},
                                         bool relative = false) {
  const int r = proc.rank();
  const FreeWord s = FreeWord::generator(r, i);
  RateResult out;
  out.generator = i;

  auto increments_until = [&](auto stop) {
    WordSet u = w;
    FreeWord shift = FreeWord::identity(r);
    EntropyValue prev = proc.entropy(u, relative);
    for (std::size_t m = 1; m <= opts.max_steps; ++m) {
      shift = shift * s;
      u.insert(w.translated(shift));
      const EntropyValue cur = proc.entropy(u, relative);
      out.increments.push_back(cur - prev);
      if (out.increments.size() >= 2 && out.increments.back() > out.increments[out.increments.size() - 2]) {
        out.nonincreasing = false;
      }
      prev = cur;
      if (stop()) return;
    }
  };

  if (auto site = proc.site_entropy(); site && !relative) {
    // i.i.d.: the rate is H(P^W | coordinates on s^k W, k ≥ 1).
    std::size_t reach = 0;
    for (const auto& v : w) reach = std::max(reach, v.length());
    std::size_t fresh = 0;
    for (const auto& v : w) {
      bool seen = false;
      FreeWord back = v;
      for (std::size_t k = 1; k <= v.length() + reach + 1 && !seen; ++k) {
        back = s.inverse() * back;
        seen = w.contains(back);
      }
      fresh += seen ? 0 : 1;
    }
    out.value = *site * static_cast<long long>(fresh);
    out.certificate = Certificate::Exact;
    out.evidence = "i.i.d. sites: " + std::to_string(fresh) + " coordinates not determined by the shifted window";
    increments_until([&] { return out.increments.size() >= opts.stable_threshold; });
    return out;
  }
  if (auto fr = proc.finite_rate(i, w, relative)) {
    out.value = fr->value;
    out.certificate = Certificate::Exact;
    out.evidence = "finite Z-system: two-sided join stabilized at n=" + std::to_string(fr->stabilized_at);
    increments_until([&] { return out.increments.size() >= opts.stable_threshold; });
    return out;
  }
  const std::size_t t = std::max<std::size_t>(opts.stable_threshold, 1);
  auto equal_tail = [&] {
    if (out.increments.size() < t) return false;
    for (std::size_t j = out.increments.size() - t; j < out.increments.size(); ++j)
      if (!(out.increments[j] == out.increments.back())) return false;
    return true;
  };
  increments_until([&] { return out.increments.back().is_zero() || equal_tail(); });
  out.value = out.increments.back();
  const Certificate marg = marginal_certificate(proc);
  if (out.increments.back().is_zero()) {
    out.certificate = marg;
    out.evidence = "increment 0 at m=" + std::to_string(out.increments.size()) + "; later increments are squeezed to 0";
  } else if (equal_tail()) {
    out.certificate = weakest(Certificate::Stable, marg);
    out.evidence = "STABLE(" + std::to_string(t) + "): last " + std::to_string(t) + " increments equal";
  } else {
    out.certificate = Certificate::UpperBound;
    out.evidence = "no stabilization within " + std::to_string(opts.max_steps) + " steps; last increment is an upper bound";
  }
  if (!out.nonincreasing) out.evidence += "; WARNING increments increased";
  return out;
}

struct FStarValue {
  EntropyValue value;
  Certificate certificate = Certificate::Exact;
  std::vector<RateResult> rates;
};

/// (1-r) H(P^{B(n)}) + Σ_i h(α_{s_i}, P^{B(n)}), optionally given the base.
inline FStarValue F_star_of(const FiniteProcess& proc, std::size_t n, const RateOptions& opts = {}, bool relative = false) {
  const int r = proc.rank();
  const WordSet b = ball(r, n);
  FStarValue out;
  out.value = proc.entropy(b, relative) * Rational(1 - r);
  out.certificate = marginal_certificate(proc);
  for (int i = 1; i <= r; ++i) {
    auto rate = generator_entropy_rate(proc, i, b, opts, relative);
    out.value += rate.value;
    out.certificate = weakest(out.certificate, rate.certificate);
    out.rates.push_back(std::move(rate));
  }
  return out;
}

struct FRow {
  std::size_t n = 0;
  EntropyValue window_entropy;  // H(P^{B(n)}) (given the base when relative)
  EntropyValue F, F_star;
  Certificate F_cert = Certificate::Exact, F_star_cert = Certificate::Exact;
  std::optional<EntropyValue> running_f, running_f_star;  // over 1 ≤ m ≤ n
  std::vector<RateResult> rates;
};

struct FReport {
  std::string process;
  int rank = 0;
  bool relative = false;
  std::vector<FRow> rows;
  EntropyValue f, f_star;
  Certificate f_cert = Certificate::UpperBound, f_star_cert = Certificate::UpperBound;
  std::string f_evidence, f_star_evidence;
  std::optional<std::size_t> stabilized_at;
};

/// Both columns for n = 0..n_max. The infima use n ≥ 1 only; they are
/// EXACT when the tail is provably constant, else upper bounds.
inline FReport f_report(const FiniteProcess& proc, std::size_t n_max, const RateOptions& opts = {}, bool relative = false) {
  if (n_max < 1) throw Error("n_max must be at least 1");
  FReport rep;
  rep.process = proc.name();
  rep.rank = proc.rank();
  rep.relative = relative;
  const Certificate marg = marginal_certificate(proc);
  for (std::size_t n = 0; n <= n_max; ++n) {
    FRow row;
    row.n = n;
    row.window_entropy = proc.entropy(ball(proc.rank(), n), relative);
    row.F = F_of(proc, n, relative);
    row.F_cert = marginal_certificate(proc);
    auto fs = F_star_of(proc, n, opts, relative);
    row.F_star = fs.value;
    row.F_star_cert = fs.certificate;
    row.rates = std::move(fs.rates);
    if (n >= 1) {
      const auto& prev = rep.rows.back();
      row.running_f = prev.running_f ? min(*prev.running_f, row.F) : row.F;
      row.running_f_star = prev.running_f_star ? min(*prev.running_f_star, row.F_star) : row.F_star;
    }
    rep.rows.push_back(std::move(row));
  }
  rep.f = *rep.rows.back().running_f;
  rep.f_star = *rep.rows.back().running_f_star;

  if (proc.site_entropy() && !relative) {
    rep.f_cert = rep.f_star_cert = Certificate::Exact;
    rep.f_evidence = rep.f_star_evidence = "i.i.d. sites: every row equals the site entropy";
    for (const auto& row : rep.rows) {
      if (!(row.F == *proc.site_entropy()) || !(row.F_star == *proc.site_entropy())) {
        rep.f_cert = rep.f_star_cert = Certificate::UpperBound;
        rep.f_evidence = rep.f_star_evidence = "i.i.d. identity violated at n=" + std::to_string(row.n);
      }
    }
    return rep;
  }

  // H(B(n+1)) = H(B(n)) forces P^{B(n)} (joined with the base) to be
  // invariant, so every later row repeats row n.
  for (std::size_t n = 0; n <= n_max; ++n) {
    const auto next = proc.entropy(ball(proc.rank(), n + 1), relative);
    if (next == rep.rows[n].window_entropy) {
      rep.stabilized_at = n;
      break;
    }
  }
  rep.f_evidence = rep.f_star_evidence = "truncated infimum over 1 ≤ n ≤ " + std::to_string(n_max);
  if (rep.stabilized_at && marg == Certificate::Exact) {
    const std::size_t s = *rep.stabilized_at;
    rep.f_cert = Certificate::Exact;
    rep.f_evidence = "window partition invariant from n=" + std::to_string(s);
    Certificate fs = Certificate::Exact;
    for (std::size_t n = 1; n <= std::max<std::size_t>(s, 1); ++n) fs = weakest(fs, rep.rows[n].F_star_cert);
    if (fs == Certificate::Exact) {
      rep.f_star_cert = Certificate::Exact;
      rep.f_star_evidence = rep.f_evidence;
    }
  }
  return rep;
}

inline FReport f_truncated(const FiniteProcess& proc, std::size_t n_max, const RateOptions& opts = {}) {
  return f_report(proc, n_max, opts, false);
}
inline FReport f_star_truncated(const FiniteProcess& proc, std::size_t n_max, const RateOptions& opts = {}) {
  return f_report(proc, n_max, opts, false);
}
inline FReport relative_f_truncated(const FiniteProcess& proc, std::size_t n_max, const RateOptions& opts = {}) {
  return f_report(proc, n_max, opts, true);
}
inline EntropyValue relative_F(const FiniteProcess& proc, std::size_t n) { return F_of(proc, n, true); }
inline FStarValue relative_F_star(const FiniteProcess& proc, std::size_t n, const RateOptions& opts = {}) {
  return F_star_of(proc, n, opts, true);
}

enum class Verdict { Pass, Fail, BoundConsistent, BoundGap, Incomparable };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::BoundConsistent: return "BOUND_CONSISTENT";
    case Verdict::BoundGap: return "BOUND_GAP";
    case Verdict::Incomparable: return "INCOMPARABLE";
  }
  return "?";
}

struct AdditionVerdict {
  Verdict verdict = Verdict::Incomparable;
  EntropyValue total, part_a, part_b;
  Certificate total_cert, a_cert, b_cert;
  std::string explanation;
};

/// f(total) = f(a) + f(b): exact comparison for EXACT triples, a check of
/// the same identity on the truncated values for all-upper-bound triples.
inline AdditionVerdict addition_report(const FReport& total, const FReport& a, const FReport& b) {
  AdditionVerdict v{Verdict::Incomparable, total.f, a.f, b.f, total.f_cert, a.f_cert, b.f_cert, {}};
  const bool all_exact = total.f_cert == Certificate::Exact && a.f_cert == Certificate::Exact && b.f_cert == Certificate::Exact;
  const bool none_exact = total.f_cert != Certificate::Exact && a.f_cert != Certificate::Exact && b.f_cert != Certificate::Exact;
  const bool same_n = total.rows.size() == a.rows.size() && a.rows.size() == b.rows.size();
  const bool holds = total.f == a.f + b.f;
  if (all_exact) {
    v.verdict = holds ? Verdict::Pass : Verdict::Fail;
    v.explanation = total.f.to_string() + (holds ? " = " : " != ") + a.f.to_string() + " + " + b.f.to_string();
  } else if (none_exact && same_n) {
    v.verdict = holds ? Verdict::BoundConsistent : Verdict::BoundGap;
    v.explanation = "upper bounds: " + total.f.to_string() + (holds ? " = " : " vs ") + a.f.to_string() + " + " + b.f.to_string();
  } else {
    v.explanation = "certificate levels differ";
  }
  return v;
}

/// A column known only by an upper bound u, checked against the value the
/// addition formula forces from two exact columns.
struct PredictedColumn {
  EntropyValue predicted, upper;
  bool consistent = false;  // predicted ≤ upper
  bool attained = false;    // predicted = upper
};

inline PredictedColumn predicted_column(const FReport& total, const FReport& other, const FReport& bounded) {
  if (total.f_cert != Certificate::Exact || other.f_cert != Certificate::Exact) {
    throw Error("predicted column needs two exact columns");
  }
  PredictedColumn c;
  c.predicted = total.f - other.f;
  c.upper = bounded.f;
  c.consistent = c.predicted <= c.upper;
  c.attained = c.predicted == c.upper;
  return c;
}

}  // namespace flab
