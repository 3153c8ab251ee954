#include "dgame/discount.hpp"

#include <cmath>
#include <stdexcept>

#include "dgame/rng.hpp"

namespace dgame {

double discount_factor(const DiscountSpec& spec, std::uint64_t t) {
  if (!(spec.rate > 0.0 && spec.rate < 1.0))
    throw std::invalid_argument("discount rate must lie in (0,1)");
  if (t == 0) return 1.0;
  switch (spec.family) {
    case DiscountFamily::Exponential: {
      long double e = static_cast<long double>(t) *
                      std::log1p(-static_cast<long double>(spec.rate));
      return static_cast<double>(std::exp(e));
    }
    case DiscountFamily::Hyperbolic:
      return 1.0 / (1.0 + spec.rate * static_cast<double>(t));
  }
  return 0.0;
}

mpq_class discount_factor_exact(const DiscountSpec& spec, std::uint64_t t) {
  if (spec.family != DiscountFamily::Exponential)
    throw std::invalid_argument("exact evaluation covers the exponential family");
  if (t > 10000)
    throw std::invalid_argument("exact evaluation limited to t <= 10^4");
  mpq_class rate(spec.rate);  // exact binary rational of the double
  mpq_class base = 1 - rate;
  mpq_class acc = 1;
  mpq_class sq = base;
  std::uint64_t e = t;
  while (e > 0) {
    if (e & 1) acc *= sq;
    sq *= sq;
    e >>= 1;
  }
  acc.canonicalize();
  return acc;
}

double nonhalt_opponent_payoff(const GameSpec& game, int player,
                               const Action& played, std::uint64_t own_steps,
                               const DiscountSpec& spec) {
  return discount_factor(spec, own_steps) * game.sup_vs_nonhalt(player, played);
}

ProfileSample sample_profile(const GameSpec& game, const MeteredStrategy& s1,
                             const MeteredStrategy& s2, double eps,
                             double delta, std::uint64_t seed1,
                             std::uint64_t seed2,
                             std::pair<std::uint64_t, std::uint64_t> caps) {
  ExecutionInput in1 = ExecutionInput::from_rates(eps, delta);
  ProfileSample s;
  s.outcome1 = s1.run(in1, seed1, caps.first);

  ExecutionInput in2 = in1;
  if (game.sequential())
    in2.opponent_bits = s.outcome1.halted ? s.outcome1.output_bits : "";
  s.outcome2 = s2.run(in2, seed2, caps.second);

  if (s.outcome1.halted) s.action1 = game.decode(1, s.outcome1.output_bits);
  if (s.outcome2.halted) s.action2 = game.decode(2, s.outcome2.output_bits);

  // Malformed output counts as non-halting (conservative reading).
  bool eff1 = s.action1.has_value();
  bool eff2 = s.action2.has_value();
  DiscountSpec d1{DiscountFamily::Exponential, eps};
  DiscountSpec d2{DiscountFamily::Exponential, delta};

  if (eff1 && eff2) {
    Payoff p = game.payoff(*s.action1, *s.action2);
    s.payoff1 = discount_factor(d1, s.outcome1.steps) * p.u1;
    s.payoff2 = discount_factor(d2, s.outcome2.steps) * p.u2;
  } else if (eff1) {
    s.payoff1 = nonhalt_opponent_payoff(game, 1, *s.action1, s.outcome1.steps, d1);
  } else if (eff2) {
    s.payoff2 = nonhalt_opponent_payoff(game, 2, *s.action2, s.outcome2.steps, d2);
  }
  return s;
}

std::pair<PayoffEstimate, PayoffEstimate> evaluate_profile(
    const GameSpec& game, const MeteredStrategy& s1, const MeteredStrategy& s2,
    double eps, double delta, std::uint64_t samples, std::uint64_t base_seed,
    std::pair<std::uint64_t, std::uint64_t> caps) {
  if (samples == 0) throw std::invalid_argument("samples must be positive");
  // Welford accumulation in fixed sample order.
  double m1 = 0, m2 = 0, q1 = 0, q2 = 0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    ProfileSample s = sample_profile(game, s1, s2, eps, delta,
                                     mix_seed(base_seed, i, 1),
                                     mix_seed(base_seed, i, 2), caps);
    double k = static_cast<double>(i + 1);
    double d1v = s.payoff1 - m1;
    m1 += d1v / k;
    q1 += d1v * (s.payoff1 - m1);
    double d2v = s.payoff2 - m2;
    m2 += d2v / k;
    q2 += d2v * (s.payoff2 - m2);
  }
  auto finish = [&](double m, double q) {
    PayoffEstimate e;
    e.mean = m;
    e.samples = samples;
    e.std_error =
        samples > 1 ? std::sqrt(q / static_cast<double>(samples - 1) /
                                static_cast<double>(samples))
                    : 0.0;
    return e;
  };
  return {finish(m1, q1), finish(m2, q2)};
}

}  // namespace dgame
