#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "runner.hpp"

using dgame::cli::Overrides;
using dgame::cli::RunFailure;
using dgame::cli::ValidationError;

int main(int argc, char** argv) {
  CLI::App app{"discounted-game experiment runner"};
  app.require_subcommand(1);

  std::string config_path, manifest_path;
  Overrides over;
  std::uint64_t seed = 0, samples = 0;
  std::string out;

  auto add_run_options = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "experiment config file")
        ->required();
    sub->add_option("--seed", seed, "override the base seed");
    sub->add_option("--samples", samples, "override the sample count");
    sub->add_option("--out", out, "override the output directory");
  };

  // each run subcommand forces the matching experiment kind; `run` takes the
  // kind from the config itself
  const char* kinds[] = {"run",   "eval",           "solve",
                         "sweep", "uniform-check",  "factoring-demo",
                         "largest-integer-demo"};
  std::vector<CLI::App*> run_subs;
  for (const char* k : kinds) {
    auto* sub = app.add_subcommand(k);
    add_run_options(sub);
    run_subs.push_back(sub);
  }

  auto* replay = app.add_subcommand("replay", "re-run a manifest and compare");
  replay->add_option("manifest", manifest_path, "path to manifest.json")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (replay->parsed()) {
      std::string report;
      bool ok = dgame::cli::replay_manifest(manifest_path, report);
      std::cout << report;
      std::cout << (ok ? "replay: identical\n" : "replay: diverged\n");
      return ok ? 0 : 2;
    }
    for (std::size_t i = 0; i < run_subs.size(); ++i) {
      if (!run_subs[i]->parsed()) continue;
      if (run_subs[i]->count("--seed")) over.seed = seed;
      if (run_subs[i]->count("--samples")) over.samples = samples;
      if (run_subs[i]->count("--out")) over.out = out;
      std::string expect = kinds[i];
      if (expect != "run") {
        auto cfg = dgame::cli::Config::parse_file(config_path);
        std::string kind = cfg.get_string_or("experiment", "kind", expect);
        if (kind != expect)
          throw ValidationError("config kind '" + kind +
                                "' does not match subcommand '" + expect + "'");
      }
      dgame::cli::run_experiment(config_path, over);
      std::cout << "done\n";
      return 0;
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const dgame::cli::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
