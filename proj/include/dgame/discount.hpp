#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <utility>

#include "dgame/games.hpp"
#include "dgame/vm.hpp"

namespace dgame {

enum class DiscountFamily { Exponential, Hyperbolic };

struct DiscountSpec {
  DiscountFamily family = DiscountFamily::Exponential;
  double rate = 0.0;  // in (0,1)
};

// Exponential: (1-rate)^t, evaluated as exp(t*log1p(-rate)) in long double so
// exponents up to ~1e8 stay accurate. Hyperbolic: 1/(1+rate*t).
double discount_factor(const DiscountSpec& spec, std::uint64_t t);

// Exact rational (1-rate)^t for the exponential family, t <= 10^4; the rate is
// taken as the exact binary rational of the double. Cross-check route.
mpq_class discount_factor_exact(const DiscountSpec& spec, std::uint64_t t);

struct PayoffEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
};

struct ProfileSample {
  ExecutionOutcome outcome1, outcome2;
  std::optional<Action> action1, action2;  // nullopt: non-halting / malformed
  double payoff1 = 0.0, payoff2 = 0.0;
};

// Discounted payoff of `player` when its opponent failed to halt: own
// discount times the sup over opponent actions of the player's payoff.
double nonhalt_opponent_payoff(const GameSpec& game, int player,
                               const Action& played, std::uint64_t own_steps,
                               const DiscountSpec& spec);

// One Monte Carlo path of the discounted metagame.
ProfileSample sample_profile(const GameSpec& game, const MeteredStrategy& s1,
                             const MeteredStrategy& s2, double eps,
                             double delta, std::uint64_t seed1,
                             std::uint64_t seed2,
                             std::pair<std::uint64_t, std::uint64_t> caps);

// Expected discounted payoffs over `samples` replayable paths; per-sample
// seeds derive from (base_seed, index, player) and accumulation runs in fixed
// index order for bit reproducibility.
std::pair<PayoffEstimate, PayoffEstimate> evaluate_profile(
    const GameSpec& game, const MeteredStrategy& s1, const MeteredStrategy& s2,
    double eps, double delta, std::uint64_t samples, std::uint64_t base_seed,
    std::pair<std::uint64_t, std::uint64_t> caps);

}  // namespace dgame
