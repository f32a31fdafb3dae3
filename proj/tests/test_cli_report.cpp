#include <gtest/gtest.h>

#include <random>

#include "flab/report.hpp"
#include "flab/runs.hpp"

using namespace flab;

namespace {

RunConfig quick() {
  RunConfig cfg;
  cfg.n_max = 1;
  return cfg;
}

}  // namespace

TEST(Json, EntropyValueRoundTrip) {
  std::mt19937_64 rng(default_seed());
  for (int trial = 0; trial < 100; ++trial) {
    EntropyValue v;
    for (int t = 0; t < 3; ++t)
      v += EntropyValue::log_of(1 + draw(rng, 30)) * Rational(static_cast<long long>(draw(rng, 9)) - 4, 1 + static_cast<long long>(draw(rng, 5)));
    const auto j = to_json(v);
    EXPECT_EQ(entropy_from_json(j), v);
    EXPECT_EQ(entropy_from_json(Json::parse(j.dump())), v);
    for (const auto& [p, q] : j.at("terms").items()) EXPECT_TRUE(q.is_string());
    EXPECT_EQ(j.at("text").get<std::string>(), v.to_string());
  }
}

TEST(Json, KernelRoundTrip) {
  const auto ow = ConvolutionKernel::ornstein_weiss();
  const auto back = kernel_from_json(kernel_to_json(ow));
  EXPECT_EQ(back.to_string(), ow.to_string());
  EXPECT_EQ(back.d_out(), 2u);
  const auto j = Json::parse(R"({"p": 3, "rank": 2, "coeffs": {"e": [[1]], "aB": [[2]]}})");
  const auto k = kernel_from_json(j);
  EXPECT_EQ(k.scalar_at(FreeWord::parse(2, "aB")), 2u);
  EXPECT_EQ(kernel_to_json(kernel_from_json(kernel_to_json(k))), kernel_to_json(k));
  EXPECT_THROW(kernel_from_json(Json::parse(R"({"p": 4, "coeffs": {"e": [[1]]}})")), Error);
}

TEST(Runs, ReportsAreByteStable) {
  const auto cfg = quick();
  EXPECT_EQ(run_ornstein_weiss(cfg).report.dump(2), run_ornstein_weiss(cfg).report.dump(2));
  auto vcfg = quick();
  vcfg.suites = {"cocycle", "twist_gap", "join_special"};
  EXPECT_EQ(run_verifier_suite(vcfg).report.dump(2), run_verifier_suite(vcfg).report.dump(2));
}

TEST(Runs, OrnsteinWeissPasses) {
  const auto r = run_ornstein_weiss(quick());
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.report.at("addition").at("verdict"), "PASS");
  EXPECT_EQ(entropy_from_json(r.report.at("columns").at("kernel").at("f").at("value")), -EntropyValue::log_of(2));
}

TEST(Runs, GeneralizationAbelianOnly) {
  auto cfg = quick();
  cfg.group = "Z/2xZ/2";
  const auto r = run_generalization(cfg);
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.report.at("closed_form").at("verdict"), "PASS");
  EXPECT_EQ(r.report.at("comparison_kernel").size(), 2u);
  cfg.group = "D4";
  EXPECT_THROW(run_generalization(cfg), Error);
  cfg.group = "Z/4";
  const auto z4 = run_generalization(cfg);
  EXPECT_EQ(z4.report.at("comparison_kernel").at(0).at("verdict"), "NOT_APPLICABLE");
}

TEST(Runs, ZeroAndMatrixKernelsRejected) {
  auto cfg = quick();
  cfg.kernel = Json::parse(R"({"p": 2, "rank": 2, "coeffs": {}})");
  EXPECT_THROW(run_algebraic(cfg), ZeroKernel);
  cfg.kernel = kernel_to_json(ConvolutionKernel::ornstein_weiss());
  EXPECT_THROW(run_algebraic(cfg), Error);
}

TEST(Runs, AlgebraicDefaultKernel) {
  const auto r = run_algebraic(quick());
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_TRUE(r.report.at("surjectivity").at("surjective").get<bool>());
  EXPECT_TRUE(r.report.at("kernel_column").at("consistent").get<bool>());
  EXPECT_TRUE(r.report.at("kernel_column").at("attained").get<bool>());
}

TEST(Runs, VerifierExitCodes) {
  auto cfg = quick();
  cfg.suites = {"cocycle"};
  EXPECT_EQ(run_verifier_suite(cfg).exit_code, 0);
  cfg.inject_fault = true;
  const auto bad = run_verifier_suite(cfg);
  EXPECT_EQ(bad.exit_code, 1);
  const auto& v = bad.report.at("verifiers").at(0);
  EXPECT_EQ(v.at("verdict"), "FAIL");
  EXPECT_FALSE(v.at("counterexamples").empty());
  cfg.inject_fault = false;
  cfg.suites = {};
  const auto empty = run_verifier_suite(cfg);
  EXPECT_EQ(empty.exit_code, 0);
  EXPECT_TRUE(empty.report.at("verifiers").empty());
  cfg.suites = {"nope"};
  EXPECT_THROW(run_verifier_suite(cfg), Error);
}

TEST(Runs, StatusPrecedence) {
  StatusLog log;
  EXPECT_EQ(log.exit_code(), 0);
  log.add(Certificate::UpperBound);
  EXPECT_EQ(log.exit_code(), 0);
  log.add(Certificate::Uncertified);
  EXPECT_EQ(log.exit_code(), 2);
  log.add(Verdict::Fail);
  EXPECT_EQ(log.exit_code(), 1);
}

TEST(Runs, ComputeF) {
  auto cfg = quick();
  cfg.process = "bernoulli:Z/3";
  const auto b = run_compute_f(cfg);
  EXPECT_EQ(entropy_from_json(b.report.at("report").at("f").at("value")), EntropyValue::log_of(3));
  cfg.process = "group:Q8";
  const auto g = run_compute_f(cfg);
  EXPECT_EQ(entropy_from_json(g.report.at("report").at("f").at("value")), -EntropyValue::log_of(8));
  EXPECT_EQ(g.report.at("report").at("f").at("certificate"), "EXACT");
  cfg.process = "torus";
  EXPECT_THROW(run_compute_f(cfg), Error);
}

TEST(Text, RenderedFromJsonOnly) {
  auto rep = run_ornstein_weiss(quick()).report;
  const auto text = render_text(rep);
  EXPECT_NE(text.find("run: ornstein-weiss"), std::string::npos);
  EXPECT_NE(text.find("-log 2"), std::string::npos);
  rep["addition"]["explanation"] = "edited";
  EXPECT_NE(render_text(rep).find("explanation: edited"), std::string::npos);
}
