#include <gtest/gtest.h>

#include <random>
#include <set>

#include "flab/algebraic_shift.hpp"
#include "flab/runs.hpp"

using namespace flab;

namespace {

FreeWord W(const char* s, int r = 2) { return FreeWord::parse(r, s); }
WordSet S(const char* s, int r = 2) { return WordSet::parse(r, s); }

ConvolutionKernel e_plus_a(std::uint32_t p = 2, long long c0 = 1, long long c1 = 1) {
  return ConvolutionKernel::scalar(p, 2, {{W("e"), c0}, {W("a"), c1}});
}

// For c0 δe + c1 δa the constraint links x(g) and x(gA), so a point of X is
// one free value per coset g<a>. The coset label drops trailing a-letters.
std::size_t coset_count(const WordSet& w) {
  std::set<std::vector<int>> reps;
  for (const auto& g : w) {
    auto l = g.letters();
    while (!l.empty() && std::abs(l.back()) == 1) l.pop_back();
    reps.insert(l);
  }
  return reps.size();
}

WordSet random_window(std::size_t k, std::size_t radius, std::mt19937_64& rng) {
  const auto b = ball(2, radius);
  const std::vector<FreeWord> words(b.begin(), b.end());
  WordSet s(2);
  for (std::size_t i = 0; i < k; ++i) s.insert(words[draw(rng, words.size())]);
  return s;
}

ConvolutionKernel random_scalar_kernel(std::uint32_t p, std::mt19937_64& rng) {
  const auto b = ball(2, 1);
  std::map<FreeWord, long long> h;
  while (h.empty()) {
    for (const auto& u : b)
      if (draw(rng, 2)) h[u] = 1 + static_cast<long long>(draw(rng, p - 1));
  }
  return ConvolutionKernel::scalar(p, 2, h);
}

}  // namespace

TEST(Kernel, ConstructionAndSupport) {
  const auto k = e_plus_a();
  EXPECT_TRUE(k.is_scalar());
  EXPECT_EQ(k.dependence_set(), S("e,A"));
  EXPECT_EQ(ConvolutionKernel::scalar(3, 2, {{W("a"), 3}}).is_zero(), true);
  EXPECT_THROW(ConvolutionKernel::scalar(4, 2, {{W("a"), 1}}), Error);
  EXPECT_THROW(ConvolutionKernel(2, 2, 1, 2, {{W("e"), {{1}}}}), Error);
  EXPECT_THROW(ConvolutionKernel::scalar(2, 2, {{W("a", 3), 1}}), RankMismatch);
  const auto ow = ConvolutionKernel::ornstein_weiss();
  EXPECT_EQ(ow.d_in(), 1u);
  EXPECT_EQ(ow.d_out(), 2u);
  EXPECT_EQ(ow.dependence_set(), S("e,a,b"));
}

TEST(Kernel, ConvolutionFormula) {
  // φ(x)(g) = Σ h(u) x(g u⁻¹).
  const auto k = ConvolutionKernel::scalar(5, 2, {{W("e"), 2}, {W("b"), 3}});
  Configuration x{{W("a"), {1}}, {W("aB"), {4}}};
  EXPECT_EQ(convolve_at(k, x, W("a")), (FpVector{(2 * 1 + 3 * 4) % 5}));
  EXPECT_THROW(convolve_at(k, x, W("b")), Error);
}

TEST(Kernel, ZeroKernelRejected) {
  const auto zero = ConvolutionKernel::scalar(2, 2, {});
  EXPECT_THROW(support_geometry(zero), ZeroKernel);
  EXPECT_FALSE(is_surjective(zero).surjective);
  KernelSubshift x(zero);
  EXPECT_EQ(x.marginal(S("e,a")).dimension(), 2u);
  EXPECT_EQ(x.marginal(S("e,a")).certificate, WindowCertificate::Unconstrained);
}

TEST(Marginal, EPlusAWindowDimensions) {
  KernelSubshift x(e_plus_a());
  const auto b1 = ball(2, 1);
  EXPECT_EQ(x.projected_dimension(S("e")), 1u);
  EXPECT_EQ(x.projected_dimension(S("e,a")), 1u);
  EXPECT_EQ(x.projected_dimension(S("e,b")), 2u);
  EXPECT_EQ(x.projected_dimension(b1), 3u);
  auto with_a = b1;
  for (const auto& w : b1.translated(W("a"))) with_a.insert(w);
  EXPECT_EQ(x.projected_dimension(with_a), 5u);
  auto with_b = b1;
  for (const auto& w : b1.translated(W("b"))) with_b.insert(w);
  EXPECT_EQ(x.projected_dimension(with_b), 4u);
  EXPECT_EQ(x.marginal(b1).certificate, WindowCertificate::ExtensionCertified);
}

TEST(Marginal, EPlusAMatchesCosetOracle) {
  std::mt19937_64 rng(default_seed());
  for (std::uint32_t p : {2u, 3u}) {
    KernelSubshift x(e_plus_a(p, 1, p - 1));
    for (int trial = 0; trial < 80; ++trial) {
      const auto w = random_window(1 + draw(rng, 7), 3, rng);
      EXPECT_EQ(x.projected_dimension(w), coset_count(w)) << w.to_string();
    }
  }
}

TEST(Marginal, OrnsteinWeissAndComparisonAreConstants) {
  KernelSubshift ow(ConvolutionKernel::ornstein_weiss());
  for (std::size_t n = 0; n <= 2; ++n) {
    const auto m = ow.marginal(ball(2, n));
    EXPECT_EQ(m.dimension(), 1u);
    EXPECT_EQ(m.certificate, WindowCertificate::Sandwiched);
  }
  KernelSubshift cmp(ConvolutionKernel::comparison(3, 2));
  EXPECT_EQ(cmp.marginal(ball(2, 2)).dimension(), 1u);
}

TEST(Marginal, KolmogorovConsistency) {
  std::mt19937_64 rng(default_seed() + 1);
  for (int trial = 0; trial < 25; ++trial) {
    const std::uint32_t p = draw(rng, 2) ? 2 : 3;
    KernelSubshift x(random_scalar_kernel(p, rng));
    const auto small = random_window(1 + draw(rng, 3), 1, rng);
    auto big = small;
    big.insert(random_window(1, 2, rng).front());
    const auto ms = x.marginal(small), mb = x.marginal(big);
    // Summing the big cylinders over the extra coordinate gives the small one.
    const auto cols = [&] {
      std::vector<std::size_t> c;
      const auto idx = big.index();
      for (const auto& g : small) c.push_back(idx.at(g));
      return c;
    }();
    std::map<FpVector, Rational> summed;
    for (const auto& v : mb.set.enumerate()) {
      FpVector r;
      for (auto c : cols) r.push_back(v[c]);
      summed[r] += x.cylinder_measure(big, v);
    }
    for (const auto& v : ms.set.enumerate()) EXPECT_EQ(summed[v], x.cylinder_measure(small, v));
    EXPECT_EQ(summed.size(), ms.set.enumerate().size());
  }
}

TEST(Marginal, TranslationInvariance) {
  std::mt19937_64 rng(default_seed() + 2);
  for (int trial = 0; trial < 25; ++trial) {
    KernelSubshift x(random_scalar_kernel(2, rng));
    const auto w = random_window(1 + draw(rng, 4), 1, rng);
    const auto g = random_window(1, 2, rng).front();
    const auto gw = w.translated(g);
    const auto mw = x.marginal(w), mg = x.marginal(gw);
    EXPECT_EQ(mw.dimension(), mg.dimension());
    // Transport each pattern on W to gW coordinate by coordinate.
    const auto idx = gw.index();
    for (const auto& v : mw.set.enumerate()) {
      FpVector moved(v.size());
      std::size_t i = 0;
      for (const auto& u : w) moved[idx.at(g * u)] = v[i++];
      EXPECT_TRUE(mg.set.contains(moved));
    }
  }
}

TEST(Geometry, ExtremePointsLieInSupport) {
  for (std::uint32_t p : {2u, 3u}) {
    for (const auto& k : all_scalar_kernels(p, ball(2, 1))) {
      const auto g = support_geometry(k);
      EXPECT_TRUE(g.support.includes(g.extremes)) << k.to_string();
      EXPECT_TRUE(g.centered_hull.contains(FreeWord::identity(2)));
      EXPECT_LE(g.radius, 1u);
    }
  }
  EXPECT_EQ(all_scalar_kernels(2, ball(2, 1)).size(), 31u);
  EXPECT_EQ(all_scalar_kernels(3, ball(2, 1)).size(), 242u);
}

TEST(Surjectivity, CertificateAgreesWithExhaustiveSolving) {
  for (std::uint32_t p : {2u, 3u}) {
    for (const auto& k : all_scalar_kernels(p, ball(2, 1))) {
      const auto v = is_surjective(k);
      EXPECT_TRUE(v.surjective) << k.to_string();
      EXPECT_TRUE(v.theorem_backed);
      EXPECT_TRUE(window_surjective(k, ball(2, 1)));
      if (p == 2) {
        EXPECT_TRUE(exhaustive_window_solvable(k, ball(2, 1)));
      }
    }
  }
  // A matrix kernel that misses patterns: both outputs read the same coordinate.
  const ConvolutionKernel dup(2, 2, 1, 2, {{W("e"), {{1}, {1}}}});
  EXPECT_FALSE(window_surjective(dup, ball(2, 0)));
  EXPECT_FALSE(exhaustive_window_solvable(dup, ball(2, 0)));
  EXPECT_FALSE(is_surjective(dup).surjective);
  EXPECT_FALSE(is_surjective(dup).theorem_backed);
}

TEST(Preimage, SolutionsReverify) {
  std::mt19937_64 rng(default_seed() + 3);
  for (int trial = 0; trial < 40; ++trial) {
    const std::uint32_t p = draw(rng, 2) ? 2 : 5;
    const auto k = random_scalar_kernel(p, rng);
    const std::size_t n = 1 + draw(rng, 2);
    const auto y = random_pattern(ball(2, n), p, rng);
    const auto res = preimage_on_ball(k, y, n);
    EXPECT_TRUE(res.verified) << k.to_string();
    // Independent recomputation of φ(x) on B(n).
    for (const auto& g : ball(2, n)) {
      long long acc = 0;
      for (const auto& [u, m] : k.coeffs()) {
        auto it = res.x.find(g * u.inverse());
        ASSERT_NE(it, res.x.end());
        acc += static_cast<long long>(m.at(0, 0)) * it->second;
      }
      EXPECT_EQ(static_cast<Residue>(acc % p), y.at(g));
    }
  }
  EXPECT_THROW(preimage_on_ball(ConvolutionKernel::ornstein_weiss(), {}, 1), Error);
}
