#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "config.hpp"
#include "dgame/games.hpp"
#include "dgame/vm.hpp"

namespace dgame::cli {

// Config or argument problems: exit code 1.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Failures while executing a valid experiment: exit code 2.
struct RunFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> samples;
  std::optional<std::string> out;
};

// Strategy spec strings: alice_const2 | alice_random | alice_fixed:N |
// bob_halt | spin | trial_division[:budget] | pollard_rho[:budget] |
// emit_ones:N | const_int:V | asm:path
MeteredStrategy make_strategy(const std::string& spec);

std::unique_ptr<GameSpec> make_game(const Config& cfg);

// Executes the experiment named by the config and writes manifest.json plus
// the experiment's CSV/JSON/text outputs into the output directory.
void run_experiment(const std::string& config_path, const Overrides& o);

// Re-runs the manifest's config into a scratch directory and compares
// checksums; returns true when every recorded file is byte-identical.
bool replay_manifest(const std::string& manifest_path, std::string& report);

}  // namespace dgame::cli
