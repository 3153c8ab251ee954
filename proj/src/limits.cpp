#include "dgame/limits.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dgame/rng.hpp"
#include "dgame/solver.hpp"

namespace dgame {

void SweepSchedule::validate() const {
  if (eps_grid.empty())
    throw std::invalid_argument("sweep schedule: empty eps grid");
  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    if (!(eps_grid[i] > 0.0 && eps_grid[i] < 1.0))
      throw std::invalid_argument("sweep schedule: eps outside (0,1)");
    if (i > 0 && eps_grid[i] >= eps_grid[i - 1])
      throw std::invalid_argument(
          "sweep schedule: eps grid must be strictly decreasing");
  }
  switch (rule) {
    case DeltaRule::Independent:
      if (delta_grid.size() != eps_grid.size())
        throw std::invalid_argument(
            "sweep schedule: delta grid size mismatch");
      for (double d : delta_grid)
        if (!(d > 0.0 && d < 1.0))
          throw std::invalid_argument("sweep schedule: delta outside (0,1)");
      break;
    case DeltaRule::Power:
      if (exponent < 1.0)
        throw std::invalid_argument(
            "sweep schedule: power rule exponent must be >= 1");
      break;
    case DeltaRule::Linear:
      break;
  }
}

double SweepSchedule::delta_at(std::size_t i) const {
  switch (rule) {
    case DeltaRule::Independent:
      return delta_grid.at(i);
    case DeltaRule::Power:
      return std::pow(eps_grid.at(i), exponent);
    case DeltaRule::Linear:
      return eps_grid.at(i);
  }
  return eps_grid.at(i);
}

namespace {

std::pair<std::uint64_t, std::uint64_t> point_caps(const GameSpec& game,
                                                   double eps, double delta) {
  auto K = game.bound();
  if (!K)
    throw GameConfigError("sweep: game " + game.name() +
                          " has unbounded payoffs; truncation caps need a "
                          "payoff bound");
  return {truncation_cap(*K, eps), truncation_cap(*K, delta)};
}

}  // namespace

PayoffTrajectory sweep_profile(const GameSpec& game, const MeteredStrategy& s1,
                               const MeteredStrategy& s2,
                               const SweepSchedule& schedule,
                               std::uint64_t samples, std::uint64_t seed) {
  schedule.validate();
  PayoffTrajectory traj;
  for (std::size_t i = 0; i < schedule.eps_grid.size(); ++i) {
    double eps = schedule.eps_grid[i];
    double delta = schedule.delta_at(i);
    auto caps = point_caps(game, eps, delta);
    auto [e1, e2] = evaluate_profile(game, s1, s2, eps, delta, samples,
                                     mix_seed(seed, i, 0), caps);
    traj.points.push_back({eps, delta, e1, e2});
  }
  return traj;
}

std::string trajectory_csv(const PayoffTrajectory& traj,
                           const UniformVerdict* verdict) {
  std::ostringstream os;
  os.precision(17);
  os << "eps,delta,u1,u1_stderr,u2,u2_stderr,gain1,gain2\n";
  for (std::size_t i = 0; i < traj.points.size(); ++i) {
    const auto& pt = traj.points[i];
    double g1 = 0, g2 = 0;
    if (verdict && i < verdict->gain1.size()) {
      g1 = verdict->gain1[i];
      g2 = verdict->gain2[i];
    }
    os << pt.eps << "," << pt.delta << "," << pt.u1.mean << ","
       << pt.u1.std_error << "," << pt.u2.mean << "," << pt.u2.std_error
       << "," << g1 << "," << g2 << "\n";
  }
  return os.str();
}

namespace {

struct PointDeviations {
  std::vector<MeteredStrategy> dev1, dev2;
  bool available = true;
  std::vector<std::string> warnings;
};

UniformVerdict run_regret_sweep(
    const GameSpec& game, const MeteredStrategy& s1, const MeteredStrategy& s2,
    const SweepSchedule& schedule, std::uint64_t samples, std::uint64_t seed,
    double tol,
    const std::function<PointDeviations(double, double)>& deviations_at) {
  schedule.validate();
  UniformVerdict v;
  v.tol = tol;
  double worst_stderr = 0;
  auto track = [&](const PayoffEstimate& e) {
    worst_stderr = std::max(worst_stderr, e.std_error);
  };
  for (std::size_t i = 0; i < schedule.eps_grid.size(); ++i) {
    double eps = schedule.eps_grid[i];
    double delta = schedule.delta_at(i);
    PointDeviations devs = deviations_at(eps, delta);
    for (auto& w : devs.warnings) v.warnings.push_back(std::move(w));
    if (!devs.available) {
      v.gain1.push_back(0);
      v.gain2.push_back(0);
      v.available.push_back(false);
      continue;
    }
    auto caps = point_caps(game, eps, delta);
    auto [b1, b2] = evaluate_profile(game, s1, s2, eps, delta, samples,
                                     mix_seed(seed, i, 0), caps);
    track(b1);
    track(b2);
    double g1 = 0, g2 = 0;
    for (std::size_t d = 0; d < devs.dev1.size(); ++d) {
      auto [u1, u2] =
          evaluate_profile(game, devs.dev1[d], s2, eps, delta, samples,
                           mix_seed(seed, i, 100 + d), caps);
      track(u1);
      g1 = std::max(g1, u1.mean - b1.mean);
    }
    for (std::size_t d = 0; d < devs.dev2.size(); ++d) {
      auto [u1, u2] =
          evaluate_profile(game, s1, devs.dev2[d], eps, delta, samples,
                           mix_seed(seed, i, 200 + d), caps);
      track(u2);
      g2 = std::max(g2, u2.mean - b2.mean);
    }
    v.gain1.push_back(std::max(0.0, g1));
    v.gain2.push_back(std::max(0.0, g2));
    v.available.push_back(true);
    if (i == 0) {
      for (const auto& d : devs.dev1) v.dev_labels_1.push_back(d.name);
      for (const auto& d : devs.dev2) v.dev_labels_2.push_back(d.name);
    }
  }
  v.max_stderr = worst_stderr;
  v.effective_tol = tol + 3 * worst_stderr;
  // trailing-window max over the last `window` available points
  int used = 0;
  for (std::size_t i = v.gain1.size(); i-- > 0 && used < v.window;) {
    if (!v.available[i]) continue;
    v.trailing_max1 = std::max(v.trailing_max1, v.gain1[i]);
    v.trailing_max2 = std::max(v.trailing_max2, v.gain2[i]);
    ++used;
  }
  if (used == 0)
    v.warnings.push_back("no available grid points; verdict fails");
  v.pass = used > 0 && v.trailing_max1 <= v.effective_tol &&
           v.trailing_max2 <= v.effective_tol;
  return v;
}

}  // namespace

UniformVerdict uniform_regret(const GameSpec& game, const MeteredStrategy& s1,
                              const MeteredStrategy& s2,
                              const std::vector<MeteredStrategy>& dev1,
                              const std::vector<MeteredStrategy>& dev2,
                              const SweepSchedule& schedule,
                              std::uint64_t samples, std::uint64_t seed,
                              double tol) {
  return run_regret_sweep(game, s1, s2, schedule, samples, seed, tol,
                          [&](double, double) {
                            PointDeviations d;
                            d.dev1 = dev1;
                            d.dev2 = dev2;
                            return d;
                          });
}

UniformVerdict strong_uniform_regret(
    const GameSpec& game, const MeteredStrategy& s1, const MeteredStrategy& s2,
    const StrategyFamily& family1, const StrategyFamily& family2,
    const SweepSchedule& schedule, std::uint64_t samples, std::uint64_t seed,
    double tol, std::optional<std::uint64_t> size_budget) {
  auto build = [&](const StrategyFamily& fam, double eps, double delta,
                   std::vector<MeteredStrategy>& out, PointDeviations& pd) {
    if (!fam) return;
    std::optional<MeteredStrategy> s;
    try {
      s = fam(eps, delta);
    } catch (const std::exception& e) {
      pd.available = false;
      pd.warnings.push_back("deviation family failed at eps=" +
                            std::to_string(eps) + ": " + e.what());
      return;
    }
    if (!s) {
      pd.available = false;
      pd.warnings.push_back("deviation family unavailable at eps=" +
                            std::to_string(eps));
      return;
    }
    if (size_budget && s->size_bits > *size_budget) {
      pd.warnings.push_back("deviation " + s->name + " at eps=" +
                            std::to_string(eps) + " exceeds size budget (" +
                            std::to_string(s->size_bits) + " bits); skipped");
      return;
    }
    out.push_back(std::move(*s));
  };
  return run_regret_sweep(
      game, s1, s2, schedule, samples, seed, tol,
      [&](double eps, double delta) {
        PointDeviations pd;
        build(family1, eps, delta, pd.dev1, pd);
        if (pd.available) build(family2, eps, delta, pd.dev2, pd);
        return pd;
      });
}

LimitEstimate limit_payoff(const PayoffTrajectory& traj, std::size_t window) {
  if (window == 0) throw std::invalid_argument("limit_payoff: window >= 1");
  if (window > traj.points.size())
    throw std::invalid_argument("limit_payoff: window exceeds trajectory");
  LimitEstimate est;
  std::size_t start = traj.points.size() - window;
  for (std::size_t i = start; i < traj.points.size(); ++i) {
    est.u1 += traj.points[i].u1.mean;
    est.u2 += traj.points[i].u2.mean;
  }
  est.u1 /= static_cast<double>(window);
  est.u2 /= static_cast<double>(window);
  if (window > 1) {
    const auto& first = traj.points[start];
    const auto& last = traj.points.back();
    est.slope1 =
        (last.u1.mean - first.u1.mean) / static_cast<double>(window - 1);
    est.slope2 =
        (last.u2.mean - first.u2.mean) / static_cast<double>(window - 1);
  }
  return est;
}

}  // namespace dgame
