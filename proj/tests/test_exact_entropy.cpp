#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "flab/entropy_value.hpp"
#include "flab/partition.hpp"
#include "flab/runs.hpp"

using namespace flab;

namespace {

// Floating-point Shannon entropy from block masses, used only as a sanity oracle.
long double float_entropy(const FinitePartition& p) {
  std::map<std::uint32_t, long double> mass;
  const auto& m = *p.measure();
  for (std::size_t i = 0; i < p.space_size(); ++i) mass[p.block_of(i)] += static_cast<long double>(m.mass(i)) / m.total();
  long double h = 0;
  for (auto [b, q] : mass)
    if (q > 0) h -= q * std::log(q);
  return h;
}

MeasurePtr random_measure(std::size_t n, std::mt19937_64& rng) {
  std::vector<Rational> w;
  Rational sum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    w.emplace_back(1 + static_cast<long long>(draw(rng, 5)));
    sum += w.back();
  }
  for (auto& q : w) q /= sum;
  return FiniteMeasure::from_weights(w);
}

}  // namespace

TEST(EntropyValue, ExactCancellation) {
  const auto v = EntropyValue::log_of(2) + EntropyValue::log_of(3) - EntropyValue::log_of(6);
  EXPECT_TRUE(v.is_zero());
  EXPECT_EQ(v.sign(), 0);
  EXPECT_EQ(EntropyValue::log_of(8), 3LL * EntropyValue::log_of(2));
  EXPECT_EQ(EntropyValue::log_of(Rational(3, 4)).to_string(), "-2 log 2 + log 3");
  EXPECT_EQ(EntropyValue::log_of(1).to_string(), "0");
  EXPECT_THROW(EntropyValue::log_of(Rational(0)), Error);
}

TEST(EntropyValue, SignDecidedExactly) {
  // 3 log 2 vs 2 log 3: 8 < 9.
  EXPECT_LT(3LL * EntropyValue::log_of(2), 2LL * EntropyValue::log_of(3));
  // 7 log 2 vs 3 log 5: 128 > 125.
  EXPECT_GT(7LL * EntropyValue::log_of(2), 3LL * EntropyValue::log_of(5));
  // log 2 + log 5 - log 3 - log 3 = log(10/9) > 0, close to zero.
  const auto tiny = EntropyValue::log_of(10) - EntropyValue::log_of(9);
  EXPECT_EQ(tiny.sign(), 1);
  EXPECT_EQ((-tiny).sign(), -1);
  std::mt19937_64 rng(default_seed());
  for (int trial = 0; trial < 300; ++trial) {
    const auto a = 1 + draw(rng, 60), b = 1 + draw(rng, 60);
    const auto ka = static_cast<long long>(1 + draw(rng, 5)), kb = static_cast<long long>(1 + draw(rng, 5));
    const auto v = ka * EntropyValue::log_of(a) - kb * EntropyValue::log_of(b);
    const long double expect = ka * std::log(static_cast<long double>(a)) - kb * std::log(static_cast<long double>(b));
    if (std::fabs(expect) > 1e-12L) {
      EXPECT_EQ(v.sign(), expect > 0 ? 1 : -1) << v.to_string();
    }
    EXPECT_NEAR(static_cast<double>(v.to_long_double()), static_cast<double>(expect), 1e-9);
  }
}

TEST(EntropyValue, TermsRoundTrip) {
  const auto v = EntropyValue::from_terms({{2, Rational(3, 2)}, {3, Rational(-3, 4)}});
  EXPECT_EQ(v.to_string(), "3/2 log 2 - 3/4 log 3");
  EXPECT_EQ(EntropyValue::from_terms(v.terms()), v);
  EXPECT_THROW(EntropyValue::from_terms({{4, Rational(1)}}), Error);
}

TEST(Partition, ShannonExamples) {
  const auto u4 = FiniteMeasure::uniform(4);
  EXPECT_EQ(shannon_entropy(FinitePartition::points(u4)), EntropyValue::log_of(4));
  EXPECT_TRUE(shannon_entropy(FinitePartition::trivial(u4)).is_zero());
  const FinitePartition halves(u4, {0, 0, 1, 1});
  EXPECT_EQ(shannon_entropy(halves), EntropyValue::log_of(2));
  // masses 1/2, 1/4, 1/4: H = 3/2 log 2.
  const FinitePartition skew(u4, {0, 0, 1, 2});
  EXPECT_EQ(shannon_entropy(skew), EntropyValue::from_terms({{2, Rational(3, 2)}}));
  const auto w = FiniteMeasure::from_weights({Rational(1, 3), Rational(2, 3)});
  EXPECT_NEAR(shannon_entropy(FinitePartition::points(w)).to_double(), std::log(3.0) - 2.0 / 3 * std::log(2.0), 1e-12);
}

TEST(Partition, JoinAndRefinement) {
  const auto u4 = FiniteMeasure::uniform(4);
  const FinitePartition a(u4, {0, 0, 1, 1}), b(u4, {0, 1, 0, 1});
  EXPECT_EQ(join(a, b), FinitePartition::points(u4));
  EXPECT_EQ(join(a, a), a);
  EXPECT_TRUE(refines(join(a, b), a));
  EXPECT_FALSE(refines(a, b));
  EXPECT_THROW(join(a, FinitePartition::points(FiniteMeasure::uniform(3))), Error);
}

TEST(Partition, ConditionalExamples) {
  const auto u4 = FiniteMeasure::uniform(4);
  const FinitePartition a(u4, {0, 0, 1, 1}), b(u4, {0, 1, 0, 1});
  EXPECT_EQ(conditional_entropy(a, b), EntropyValue::log_of(2));
  EXPECT_TRUE(conditional_entropy(a, a).is_zero());
  EXPECT_TRUE(conditional_entropy(a, FinitePartition::points(u4)).is_zero());
}

TEST(Partition, ChainRuleSubadditivityMonotonicity) {
  std::mt19937_64 rng(default_seed() + 1);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = 2 + draw(rng, 63);
    const auto m = draw(rng, 2) ? FiniteMeasure::uniform(n) : random_measure(n, rng);
    const auto p = random_partition(m, 4, rng), q = random_partition(m, 4, rng), r = random_partition(m, 3, rng);
    const auto pq = join(p, q);
    EXPECT_EQ(shannon_entropy(pq), shannon_entropy(q) + conditional_entropy(p, q));
    EXPECT_LE(shannon_entropy(pq), shannon_entropy(p) + shannon_entropy(q));
    EXPECT_LE(conditional_entropy(p, join(q, r)), conditional_entropy(p, q));
    EXPECT_NEAR(shannon_entropy(p).to_double(), static_cast<double>(float_entropy(p)), 1e-9);
  }
}

TEST(Partition, InformationFunctionIntegratesToConditionalEntropy) {
  std::mt19937_64 rng(default_seed() + 2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = 2 + draw(rng, 30);
    const auto m = random_measure(n, rng);
    const auto p = random_partition(m, 4, rng), f = random_partition(m, 3, rng);
    const auto info = information_function(p, f);
    EXPECT_EQ(integrate(info, *m), conditional_entropy(p, f));
    // Pointwise: I(p|f)(x) = -log(μ(P_x ∩ F_x)/μ(F_x)), recomputed by direct summation.
    for (std::size_t x = 0; x < n; ++x) {
      Rational cell = 0, fiber = 0;
      for (std::size_t y = 0; y < n; ++y) {
        if (f.block_of(y) != f.block_of(x)) continue;
        fiber += m->weight(y);
        if (p.block_of(y) == p.block_of(x)) cell += m->weight(y);
      }
      EXPECT_EQ(info[x], -EntropyValue::log_of(cell / fiber));
    }
  }
}

TEST(Partition, SizeGuard) {
  EXPECT_THROW(guard_atoms(kMaxAtoms + 1), SizeGuard);
  EXPECT_NO_THROW(guard_atoms(kMaxAtoms));
}

TEST(FiniteRate, FiniteSystemsHaveRateZero) {
  const auto u3 = FiniteMeasure::uniform(3);
  const auto r = z_entropy_rate_finite({1, 2, 0}, FinitePartition(u3, {0, 1, 1}));
  EXPECT_TRUE(r.value.is_zero());
  // J_1 already separates all three points; J_2 == J_1.
  EXPECT_EQ(r.stabilized_at, 2u);
  EXPECT_TRUE(z_entropy_rate_finite({0, 1, 2}, FinitePartition::points(u3)).value.is_zero());
  const auto w = FiniteMeasure::from_weights({Rational(1, 3), Rational(2, 3)});
  EXPECT_THROW(z_entropy_rate_finite({1, 0}, FinitePartition::points(w)), Error);
  EXPECT_THROW(z_entropy_rate_finite({0, 0, 1}, FinitePartition::points(u3)), Error);
}
