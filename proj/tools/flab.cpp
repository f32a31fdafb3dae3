// flab: f-invariant tables, addition-formula checks and verifier runs.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "flab/flab.hpp"

namespace {

int emit(const flab::RunResult& r, const std::string& out, bool text) {
  const std::string body = text ? flab::render_text(r.report) : r.report.dump(2) + "\n";
  if (out.empty() || out == "-") {
    std::cout << body;
  } else {
    std::ofstream f(out);
    if (!f) {
      std::cerr << "flab: cannot write " << out << "\n";
      return 3;
    }
    f << body;
  }
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flab - f-invariant computations for free group actions"};
  app.require_subcommand(1);

  flab::RunConfig cfg;
  cfg.seed = flab::default_seed();
  std::string out;
  bool text = false;
  std::string kernel_path;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--nmax", cfg.n_max, "largest ball radius n")->check(CLI::PositiveNumber);
    sub->add_option("--window-cap", cfg.window_cap, "extra ball layers tried when certifying marginals");
    sub->add_option("--stable-threshold", cfg.stable_threshold, "equal increments needed for STABLE")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", out, "write the report here instead of stdout");
    sub->add_flag("--text", text, "render a plain-text table instead of JSON");
  };

  auto* ow = app.add_subcommand("ow", "Ornstein-Weiss example: log 2 = -log 2 + log 4");
  common(ow);

  auto* gen = app.add_subcommand("gen", "finite abelian K: log|K| = -(r-1)log|K| + r log|K|");
  common(gen);
  gen->add_option("--k", cfg.group, "group, e.g. Z/3 or Z/2xZ/2");
  gen->add_option("--rank", cfg.rank, "number of free generators")->check(CLI::PositiveNumber);

  auto* kernel = app.add_subcommand("kernel", "X_{h,p} for a scalar convolution kernel");
  common(kernel);
  kernel->add_option("--kernel-file", kernel_path, "kernel JSON file (default: h = e + a over Z/p)");
  kernel->add_option("--p", cfg.p, "prime for the default kernel");
  kernel->add_option("--rank", cfg.rank, "rank for the default kernel")->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify", "cocycle, conjugacy and partition-identity verifiers");
  common(verify);
  std::string suites = "all";
  verify->add_option("--suite", suites, "comma-separated verifier names or 'all' ('' selects none)");
  verify->add_flag("--inject-fault", cfg.inject_fault, "multiply every cocycle value by a fixed non-identity element");
  verify->add_option("--seed", cfg.seed, "seed for random instances (default: FLAB_SEED or a fixed value)");

  auto* compute = app.add_subcommand("compute-f", "f and f* columns for one process");
  common(compute);
  compute->add_option("--process", cfg.process, "bernoulli:K | group:G | ow | kernel:<path>")->required();
  compute->add_option("--rank", cfg.rank, "number of free generators")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (ow->parsed()) return emit(flab::run_ornstein_weiss(cfg), out, text);
    if (gen->parsed()) return emit(flab::run_generalization(cfg), out, text);
    if (kernel->parsed()) {
      if (!kernel_path.empty()) cfg.kernel = flab::read_json_file(kernel_path);
      return emit(flab::run_algebraic(cfg), out, text);
    }
    if (verify->parsed()) {
      cfg.suites.clear();
      std::size_t start = 0;
      while (start <= suites.size()) {
        const auto comma = suites.find(',', start);
        const auto piece = suites.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!piece.empty()) cfg.suites.push_back(piece);
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      return emit(flab::run_verifier_suite(cfg), out, text);
    }
    if (compute->parsed()) return emit(flab::run_compute_f(cfg), out, text);
  } catch (const flab::Error& e) {
    std::cerr << "flab: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "flab: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
