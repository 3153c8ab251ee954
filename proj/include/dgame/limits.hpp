#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dgame/discount.hpp"
#include "dgame/games.hpp"
#include "dgame/vm.hpp"

namespace dgame {

// Sweeps toward eps -> 0 along a declared delta path and tests the
// robustness of a profile by regret against deviation sets.

enum class DeltaRule { Independent, Power, Linear };

struct SweepSchedule {
  std::vector<double> eps_grid;  // strictly decreasing, in (0,1)
  DeltaRule rule = DeltaRule::Linear;
  double exponent = 2.0;           // delta = eps^exponent, exponent >= 1
  std::vector<double> delta_grid;  // Independent rule only

  void validate() const;
  double delta_at(std::size_t i) const;
};

struct TrajectoryPoint {
  double eps = 0, delta = 0;
  PayoffEstimate u1, u2;
};

struct PayoffTrajectory {
  std::vector<TrajectoryPoint> points;
};

struct LimitEstimate {
  double u1 = 0, u2 = 0;        // mean over the trailing window
  double slope1 = 0, slope2 = 0;  // trend across the window, per grid step
};

struct UniformVerdict {
  std::vector<double> gain1, gain2;  // per point, clamped at 0
  std::vector<bool> available;
  double trailing_max1 = 0, trailing_max2 = 0;
  int window = 3;
  double tol = 0, effective_tol = 0, max_stderr = 0;
  bool pass = false;
  std::vector<std::string> dev_labels_1, dev_labels_2;
  std::vector<std::string> warnings;
};

// Deviation generator for strong-uniform testing; may fail at a grid point.
using StrategyFamily =
    std::function<std::optional<MeteredStrategy>(double eps, double delta)>;

PayoffTrajectory sweep_profile(const GameSpec& game, const MeteredStrategy& s1,
                               const MeteredStrategy& s2,
                               const SweepSchedule& schedule,
                               std::uint64_t samples, std::uint64_t seed);

// One row per grid point: eps, delta, u1, u1_stderr, u2, u2_stderr, gain1,
// gain2 (gains zero when no verdict is supplied).
std::string trajectory_csv(const PayoffTrajectory& traj,
                           const UniformVerdict* verdict = nullptr);

// Deviation gain against fixed strategies, verdict over the trailing
// `window` grid points at tolerance tol + 3 * max standard error.
UniformVerdict uniform_regret(const GameSpec& game, const MeteredStrategy& s1,
                              const MeteredStrategy& s2,
                              const std::vector<MeteredStrategy>& dev1,
                              const std::vector<MeteredStrategy>& dev2,
                              const SweepSchedule& schedule,
                              std::uint64_t samples, std::uint64_t seed,
                              double tol);

// As uniform_regret, but deviations are regenerated per grid point and may
// depend on (eps, delta). A failed construction marks the point unavailable.
// With size_budget set, deviations larger than the budget are skipped; this
// turns the resilience question into a toggle.
UniformVerdict strong_uniform_regret(
    const GameSpec& game, const MeteredStrategy& s1, const MeteredStrategy& s2,
    const StrategyFamily& family1, const StrategyFamily& family2,
    const SweepSchedule& schedule, std::uint64_t samples, std::uint64_t seed,
    double tol, std::optional<std::uint64_t> size_budget = std::nullopt);

LimitEstimate limit_payoff(const PayoffTrajectory& traj, std::size_t window);

}  // namespace dgame
