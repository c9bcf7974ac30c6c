#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "chs/cli/commands.hpp"
#include "chs/cli/config.hpp"

using namespace chs::cli;

int main(int argc, char** argv) {
  CLI::App app{"Critical Choquard/Hardy-Sobolev harness"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::string> out_dir;
  ProblemOverrides ov;
  bool synthetic = false;

  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--out", out_dir, "output directory (overrides output.dir)");
  app.add_option("--N", ov.N, "dimension");
  app.add_option("--alpha", ov.alpha, "Riesz exponent");
  app.add_option("--s", ov.s, "Hardy weight exponent");
  app.add_option("--p", ov.p, "Choquard power");
  app.add_option("--q", ov.q, "local power");
  app.add_option("--lambda", ov.lambda, "nonlocal coefficient");
  app.add_option("--mu", ov.mu, "local coefficient");
  app.add_option("--radius", ov.radius, "ball radius");

  auto* constants = app.add_subcommand("constants", "exponents, sharp constants, thresholds and regime");
  auto* solve = app.add_subcommand("solve", "mountain pass solve");
  auto* rates = app.add_subcommand("rates", "epsilon sweep and rate fits");
  rates->add_flag("--synthetic", synthetic, "fit 3 eps^1.7 instead of running a sweep");
  auto* threshold = app.add_subcommand("threshold", "level bound check against the compactness threshold");
  auto* selftest = app.add_subcommand("selftest", "quick internal checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
    if (out_dir) cfg.output.dir = *out_dir;
    apply_overrides(cfg, ov);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (*constants) return cmd_constants(cfg, std::cout, std::cerr);
    if (*solve) return cmd_solve(cfg, std::cout, std::cerr);
    if (*rates) return cmd_rates(cfg, synthetic, std::cout, std::cerr);
    if (*threshold) return cmd_threshold(cfg, std::cout, std::cerr);
    if (*selftest) return cmd_selftest(cfg, std::cout, std::cerr);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitConfig;
}
