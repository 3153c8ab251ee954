// Acceptance gate: one checker per criterion, selected by number on the
// command line (no arguments runs all). Each prints a single [PASS]/[FAIL]
// line; the exit status is nonzero when any selected criterion fails.
// Tolerances are pinned here and nowhere else.

#include <cmath>
#include <cstdio>
#include <cstring>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dgame/discount.hpp"
#include "dgame/factoring.hpp"
#include "dgame/games.hpp"
#include "dgame/limits.hpp"
#include "dgame/rng.hpp"
#include "dgame/solver.hpp"
#include "dgame/vm.hpp"

using namespace dgame;

namespace {

bool g_verbose = true;

void note(const std::string& line) {
  if (g_verbose) std::cout << "  " << line << "\n";
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

MeteredStrategy emit_bits(const std::string& bits, const std::string& name) {
  std::ostringstream os;
  for (char c : bits) os << "emit " << c << "\n";
  os << "halt\n";
  return load_vm_strategy(os.str(), name);
}

MeteredStrategy emit_ones(int k) {
  return emit_bits(std::string(k, '1'), "ones_" + std::to_string(k));
}

SweepSchedule power_schedule(std::vector<double> eps) {
  SweepSchedule s;
  s.eps_grid = std::move(eps);
  s.rule = DeltaRule::Power;
  s.exponent = 2.0;
  s.validate();
  return s;
}

double rnd01(std::uint64_t& state) {
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

std::pair<double, double> bimatrix_value(const Bimatrix& bm,
                                         const MixedProfile& prof) {
  double u1 = 0, u2 = 0;
  for (int i = 0; i < bm.m; ++i)
    for (int j = 0; j < bm.n; ++j) {
      double w = prof.p[i] * prof.q[j];
      u1 += w * bm.a_at(i, j);
      u2 += w * bm.b_at(i, j);
    }
  return {u1, u2};
}

// --------------------------------------------------------------------------
// C1: discount constants at the scales the limit arguments lean on.

bool criterion1() {
  double eps = 1e-4;
  std::uint64_t t = static_cast<std::uint64_t>(std::ceil(1.0 / eps));
  double lhs = 2.0 * discount_factor({DiscountFamily::Exponential, eps}, t);
  double target = 2.0 / std::exp(1.0);
  bool ok1 = std::fabs(lhs - target) <= 0.01;
  note("2(1-eps)^ceil(1/eps) = " + fmt(lhs) + ", 2/e = " + fmt(target));

  double e2 = 1e-3;
  std::uint64_t t2 = static_cast<std::uint64_t>(std::llround(10.0 / e2));
  double v = discount_factor({DiscountFamily::Exponential, e2 * e2}, t2);
  bool ok2 = v >= 0.99;
  note("(1-eps^2)^(10/eps) = " + fmt(v));
  return ok1 && ok2;
}

// --------------------------------------------------------------------------
// C2: hard-case trajectory toward (2,1) plus the deviation certificate at
// the finest grid point.

bool criterion2() {
  FactoringGame fg;
  auto sched = power_schedule({1e-1, 1e-2, 1e-3});
  auto alice = alice_random();
  auto bob = bob_halt();
  auto traj = sweep_profile(fg, alice, bob, sched, 200, 20231002);
  auto lim = limit_payoff(traj, 1);
  bool ok_traj = std::fabs(lim.u1 - 2.0) <= 0.05 &&
                 std::fabs(lim.u2 - 1.0) <= 0.05;
  note("limit payoff = (" + fmt(lim.u1) + ", " + fmt(lim.u2) +
       "), target (2, 1) within 0.05");

  std::uint64_t dev_budget = truncation_cap(2.0, 1e-6);
  std::vector<MeteredStrategy> devs{bob_trial_division(dev_budget),
                                    bob_pollard_rho(dev_budget)};
  auto v = uniform_regret(fg, alice, bob, {}, devs, sched, 200, 20231003, 0.1);
  double final_gain = std::max(v.gain1.back(), v.gain2.back());
  bool ok_dev = final_gain <= v.effective_tol;
  note("deviation gain at eps=1e-3: " + fmt(final_gain) + " vs tol " +
       fmt(v.effective_tol));
  return ok_traj && ok_dev;
}

// --------------------------------------------------------------------------
// C3: easy-case trajectory toward (1,2), constant input and 24-bit random
// input branches.

bool criterion3() {
  FactoringGame fg;
  auto sched = power_schedule({1e-1, 1e-2, 1e-3});
  auto rho = bob_pollard_rho(1ull << 40);

  auto t1 = sweep_profile(fg, alice_const2(), rho, sched, 200, 30001);
  auto l1 = limit_payoff(t1, 1);
  bool ok1 = std::fabs(l1.u1 - 1.0) <= 0.05 && std::fabs(l1.u2 - 2.0) <= 0.05;
  note("const-2 branch limit = (" + fmt(l1.u1) + ", " + fmt(l1.u2) + ")");

  auto t2 = sweep_profile(fg, alice_fixed_length(24), rho, sched, 200, 30002);
  auto l2 = limit_payoff(t2, 1);
  bool ok2 = std::fabs(l2.u1 - 1.0) <= 0.05 && std::fabs(l2.u2 - 2.0) <= 0.05;
  note("24-bit branch limit = (" + fmt(l2.u1) + ", " + fmt(l2.u2) + ")");
  return ok1 && ok2;
}

// --------------------------------------------------------------------------
// C4: scale-matched lookup tables exploit the hard profile (strong check
// fails) while any fixed table misses the moving target (uniform check
// passes).

std::vector<mpz_class> odd_support(int bits) {
  std::vector<mpz_class> out;
  mpz_class lo = mpz_class(1) << (bits - 1);
  mpz_class hi = mpz_class(1) << bits;
  for (mpz_class v = lo + 1; v < hi; v += 2) out.push_back(v);
  return out;
}

bool criterion4() {
  FactoringGame fg;
  auto sched = power_schedule({0.2, 0.1, 0.05});
  auto alice = alice_random();
  auto bob = bob_halt();

  bool ok_magnitude = true;
  for (std::size_t i = 0; i < sched.eps_grid.size(); ++i) {
    double eps = sched.eps_grid[i];
    double delta = sched.delta_at(i);
    int n = n_of_epsilon(eps);
    auto table = build_lookup_table(odd_support(n));
    auto caps = std::make_pair(truncation_cap(2.0, eps),
                               truncation_cap(2.0, delta));
    auto [e1, e2] = evaluate_profile(fg, alice, bob_lookup(table), eps, delta,
                                     400, mix_seed(40001, i), caps);
    bool ok = e2.mean >= 1.9 && e1.mean <= 1.1;
    note("eps=" + fmt(eps) + " lookup deviation payoff = (" + fmt(e1.mean) +
         ", " + fmt(e2.mean) + "), want u2 >= 1.9 and u1 <= 1.1");
    ok_magnitude = ok_magnitude && ok;
  }

  StrategyFamily family = [](double eps, double) {
    auto table = build_lookup_table(odd_support(n_of_epsilon(eps)));
    return std::optional<MeteredStrategy>(bob_lookup(std::move(table)));
  };
  auto strong = strong_uniform_regret(fg, alice, bob, nullptr, family, sched,
                                      400, 40002, 0.1);
  note(std::string("strong-uniform verdict: ") +
       (strong.pass ? "pass" : "fail") + " (must fail)");

  // a table frozen at one scale: 8-bit keys never match the grid's n(eps)
  std::vector<MeteredStrategy> fixed{bob_lookup(build_lookup_table(
      odd_support(8)))};
  auto uniform = uniform_regret(fg, alice, bob, {}, fixed, sched, 400, 40003,
                                0.1);
  note(std::string("uniform verdict: ") + (uniform.pass ? "pass" : "fail") +
       " (must pass)");
  return ok_magnitude && !strong.pass && uniform.pass;
}

// --------------------------------------------------------------------------
// C5: escalation library equilibria in the largest-integer game.

bool criterion5() {
  LargestIntegerGame li;
  StrategyLibrary lib1, lib2;
  for (int k = 0; k <= 10; ++k) {
    lib1.add(emit_ones(4 * k));
    lib2.add(emit_ones(4 * k));
  }
  std::vector<double> grid{0.3, 0.1, 0.03, 0.01};

  bool ok_regret = true, ok_final = true, ok_monotone = true;
  double prev1 = 1e300, prev2 = 1e300, final1 = 0, final2 = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double eps = grid[i];
    auto bm = build_bimatrix(li, lib1, lib2, eps, eps, 4, mix_seed(50001, i));
    auto prof = lemke_howson(bm);
    auto rep = regret(bm, prof);
    auto [u1, u2] = bimatrix_value(bm, prof);
    bool ok = rep.r1 <= eps + eps && rep.r2 <= eps + eps;
    note("eps=delta=" + fmt(eps) + ": eq payoff (" + fmt(u1) + ", " + fmt(u2) +
         "), regret (" + fmt(rep.r1) + ", " + fmt(rep.r2) + ") vs " +
         fmt(2 * eps));
    ok_regret = ok_regret && ok;
    if (u1 > prev1 + 1e-9 || u2 > prev2 + 1e-9) ok_monotone = false;
    prev1 = u1;
    prev2 = u2;
    final1 = u1;
    final2 = u2;
  }
  ok_final = final1 <= 15.0 && final2 <= 15.0;
  note("final point payoff (" + fmt(final1) + ", " + fmt(final2) +
       "), must be <= 15; monotone " + (ok_monotone ? "yes" : "no"));

  bool ok_asym = true;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double eps = grid[i];
    double delta = eps * eps;
    auto bm = build_bimatrix(li, lib1, lib2, eps, delta, 4, mix_seed(50002, i));
    auto prof = lemke_howson(bm);
    auto [u1, u2] = bimatrix_value(bm, prof);
    if (u2 < u1 - 1e-9) ok_asym = false;
    note("eps=" + fmt(eps) + ", delta=eps^2: (" + fmt(u1) + ", " + fmt(u2) +
         "), want u2 >= u1");
  }
  return ok_regret && ok_monotone && ok_final && ok_asym;
}

// --------------------------------------------------------------------------
// C6: lifting finite-game equilibria into programs preserves payoffs and
// approximate optimality.

bool criterion6() {
  const double eps = 1e-4, delta = 1e-4;
  auto caps = std::make_pair(truncation_cap(2.0, eps),
                             truncation_cap(2.0, delta));
  bool all_ok = true;
  for (int g = 0; g < 20; ++g) {
    std::uint64_t state = mix_seed(60001, g);
    std::vector<double> u1(9), u2(9);
    for (int i = 0; i < 9; ++i) u1[i] = 2.0 * rnd01(state);
    for (int i = 0; i < 9; ++i) u2[i] = 2.0 * rnd01(state);
    MatrixGame game(3, 3, u1, u2, "rand3x3_" + std::to_string(g));

    Bimatrix bm;
    bm.m = bm.n = 3;
    bm.a = u1;
    bm.b = u2;
    auto eqs = support_enum(bm);
    if (eqs.empty()) {
      note("game " + std::to_string(g) + ": no support-enum equilibrium");
      all_ok = false;
      continue;
    }
    auto ne = eqs.front();
    auto [v1, v2] = bimatrix_value(bm, ne);
    auto [s1, s2] = lift_finite(game, ne);
    auto [e1, e2] = evaluate_profile(game, s1, s2, eps, delta, 40000,
                                     mix_seed(60002, g), caps);
    bool ok_val = std::fabs(e1.mean - v1) <= 0.02 &&
                  std::fabs(e2.mean - v2) <= 0.02;

    double best1 = e1.mean, best2 = e2.mean;
    for (int a = 0; a < 3; ++a) {
      MixedProfile pure;
      pure.p = {0, 0, 0};
      pure.q = {0, 0, 0};
      pure.p[a] = 1;
      pure.q[a] = 1;
      auto [d1, d2] = lift_finite(game, pure);
      auto [r1, r2] = evaluate_profile(game, d1, s2, eps, delta, 40000,
                                       mix_seed(60003, g * 8 + a), caps);
      best1 = std::max(best1, r1.mean);
      auto [c1, c2] = evaluate_profile(game, s1, d2, eps, delta, 40000,
                                       mix_seed(60004, g * 8 + a), caps);
      best2 = std::max(best2, c2.mean);
    }
    bool ok_reg = best1 - e1.mean <= 0.02 && best2 - e2.mean <= 0.02;
    if (!ok_val || !ok_reg) {
      note("game " + std::to_string(g) + ": payoff (" + fmt(e1.mean) + ", " +
           fmt(e2.mean) + ") vs NE (" + fmt(v1) + ", " + fmt(v2) +
           "), regret (" + fmt(best1 - e1.mean) + ", " +
           fmt(best2 - e2.mean) + ")");
      all_ok = false;
    }
  }
  if (all_ok) note("all 20 lifted equilibria within 0.02 in value and regret");
  return all_ok;
}

// --------------------------------------------------------------------------
// C7: pivoting solver against the support-enumeration oracle.

bool criterion7() {
  bool all_ok = true;
  for (int g = 0; g < 100; ++g) {
    std::uint64_t state = mix_seed(70001, g);
    int m = 1 + static_cast<int>(splitmix64(state) % 5);
    int n = 1 + static_cast<int>(splitmix64(state) % 5);
    Bimatrix bm;
    bm.m = m;
    bm.n = n;
    bm.a.resize(m * n);
    bm.b.resize(m * n);
    for (auto& v : bm.a) v = rnd01(state);
    for (auto& v : bm.b) v = rnd01(state);

    auto lh = lemke_howson_exact(bm);
    auto [r1, r2] = regret_exact(bm, lh);
    mpq_class bound(1, 1000000000);
    bool ok_regret = r1 <= bound && r2 <= bound;

    auto prof = lh.to_double();
    auto eqs = support_enum(bm);
    bool matched = false;
    for (const auto& eq : eqs) {
      double dist = 0;
      for (int i = 0; i < m; ++i)
        dist = std::max(dist, std::fabs(eq.p[i] - prof.p[i]));
      for (int j = 0; j < n; ++j)
        dist = std::max(dist, std::fabs(eq.q[j] - prof.q[j]));
      if (dist <= 1e-6) matched = true;
    }
    if (!ok_regret || !matched) {
      note("game " + std::to_string(g) + " (" + std::to_string(m) + "x" +
           std::to_string(n) + "): regret ok " +
           (ok_regret ? "yes" : "no") + ", oracle match " +
           (matched ? "yes" : "no"));
      all_ok = false;
    }
  }
  if (all_ok) note("100/100 solver outputs match the enumeration oracle");
  return all_ok;
}

// --------------------------------------------------------------------------
// C8: the truncation horizon bounds the discarded discounted payoff.

bool criterion8() {
  bool ok = true;
  for (double K : {1.0, 2.0, 10.0})
    for (double delta : {0.5, 0.1, 0.01}) {
      auto cap = truncation_cap(K, delta);
      double loss =
          discount_factor({DiscountFamily::Exponential, delta}, cap) * K;
      note("K=" + fmt(K) + " delta=" + fmt(delta) + ": loss " + fmt(loss));
      ok = ok && loss <= delta;
    }
  return ok;
}

// --------------------------------------------------------------------------
// C9: unbounded payoffs defeat truncation; escalation never settles.

bool criterion9() {
  ExponentialGame game;
  StrategyLibrary l1, l2;
  l1.add(emit_bits(encode_integer_bits(0), "idx_0"));
  l2.add(emit_bits(encode_integer_bits(0), "idx_0"));
  bool rejected = false;
  try {
    build_bimatrix(game, l1, l2, 0.1, 0.1, 4, 1);
  } catch (const GameConfigError&) {
    rejected = true;
  }
  note(std::string("build_bimatrix rejection: ") + (rejected ? "yes" : "no"));

  // each library extension: best-in-library profile (k, k), deviation to k+1
  const double eps = 0.01;
  auto caps = std::make_pair<std::uint64_t, std::uint64_t>(1000000, 1000000);
  double min_gain = 1e300;
  for (int k = 0; k < 5; ++k) {
    auto cur = emit_bits(encode_integer_bits(k), "idx_" + std::to_string(k));
    auto next =
        emit_bits(encode_integer_bits(k + 1), "idx_" + std::to_string(k + 1));
    auto [b1, b2] = evaluate_profile(game, cur, cur, eps, eps, 1, 9, caps);
    auto [d1, d2] = evaluate_profile(game, next, cur, eps, eps, 1, 9, caps);
    double gain = d1.mean - b1.mean;
    note("extension " + std::to_string(k) + " -> " + std::to_string(k + 1) +
         ": deviation gain " + fmt(gain));
    min_gain = std::min(min_gain, gain);
  }
  bool ok_gain = min_gain >= 0.5;
  note("minimum gain " + fmt(min_gain) + ", must stay >= 0.5");
  return rejected && ok_gain;
}

// --------------------------------------------------------------------------
// C10: the numeric outputs behind criteria 2 and 5 replay byte-identically.

bool criterion10() {
  FactoringGame fg;
  auto sched = power_schedule({1e-1, 1e-2, 1e-3});
  auto run_hard = [&] {
    auto traj =
        sweep_profile(fg, alice_random(), bob_halt(), sched, 200, 20231002);
    return trajectory_csv(traj);
  };
  bool ok_hard = run_hard() == run_hard();
  note(std::string("hard-case trajectory replay: ") +
       (ok_hard ? "identical" : "diverged"));

  LargestIntegerGame li;
  StrategyLibrary lib1, lib2;
  for (int k = 0; k <= 10; ++k) {
    lib1.add(emit_ones(4 * k));
    lib2.add(emit_ones(4 * k));
  }
  auto run_escalation = [&] {
    std::ostringstream os;
    std::vector<double> grid{0.3, 0.1, 0.03, 0.01};
    for (std::size_t i = 0; i < grid.size(); ++i) {
      auto bm = build_bimatrix(li, lib1, lib2, grid[i], grid[i], 4,
                               mix_seed(50001, i));
      os << bm.serialize() << serialize_profile(lemke_howson(bm));
    }
    return os.str();
  };
  bool ok_esc = run_escalation() == run_escalation();
  note(std::string("escalation output replay: ") +
       (ok_esc ? "identical" : "diverged"));
  return ok_hard && ok_esc;
}

}  // namespace

int main(int argc, char** argv) {
  std::map<int, bool (*)()> criteria{
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},
      {5, criterion5}, {6, criterion6}, {7, criterion7}, {8, criterion8},
      {9, criterion9}, {10, criterion10}};
  const char* titles[11] = {
      "",
      "discount constants",
      "hard-case trajectory and deviation certificate",
      "easy-case trajectory",
      "strong-uniform failure vs uniform pass",
      "largest-integer escalation equilibria",
      "finite-game lift fidelity",
      "solver oracle equivalence",
      "truncation inequality",
      "unbounded-game rejection and escalation",
      "replay determinism"};

  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty())
    for (const auto& [k, fn] : criteria) selected.push_back(k);

  bool all_ok = true;
  for (int k : selected) {
    auto it = criteria.find(k);
    if (it == criteria.end()) {
      std::cerr << "unknown criterion " << k << "\n";
      return 2;
    }
    bool ok = it->second();
    std::cout << (ok ? "[PASS]" : "[FAIL]") << " C" << k << " " << titles[k]
              << "\n";
    all_ok = all_ok && ok;
  }
  return all_ok ? 0 : 1;
}
