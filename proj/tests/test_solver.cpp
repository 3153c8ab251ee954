#include <doctest.h>

#include <cmath>

#include "dgame/discount.hpp"
#include "dgame/factoring.hpp"
#include "dgame/rng.hpp"
#include "dgame/solver.hpp"

using namespace dgame;

namespace {

Bimatrix make_bimatrix(int m, int n, std::vector<double> a,
                       std::vector<double> b) {
  Bimatrix g;
  g.m = m;
  g.n = n;
  g.a = std::move(a);
  g.b = std::move(b);
  g.provenance.resize(m * n);
  return g;
}

double linf(const std::vector<double>& x, const std::vector<double>& y) {
  double d = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    d = std::max(d, std::abs(x[i] - y[i]));
  return d;
}

}  // namespace

TEST_CASE("truncation_cap values and loss bound") {
  CHECK(truncation_cap(1, 0.1) == 100);
  CHECK(truncation_cap(2, 0.5) == 16);
  CHECK(truncation_cap(1, 0.9) == 2);
  CHECK_THROWS(truncation_cap(0.5, 0.1));
  for (double K : {1.0, 2.0, 10.0})
    for (double d : {0.5, 0.1, 0.01}) {
      double loss =
          std::pow(1.0 - d, static_cast<double>(truncation_cap(K, d))) * K;
      CHECK(loss <= d);
    }
}

TEST_CASE("miniaturize shrinks on a log scale") {
  CHECK(miniaturize(std::ldexp(1.0, -16), 0.5).first ==
        doctest::Approx(1.0 / 16));
  CHECK(miniaturize(0.25, 0.25).first == doctest::Approx(0.5));
  CHECK(miniaturize(std::ldexp(1.0, -32), 0.5).first ==
        doctest::Approx(1.0 / 32));
}

TEST_CASE("support enumeration on the coordination game") {
  auto g = make_bimatrix(2, 2, {2, 0, 0, 1}, {2, 0, 0, 1});
  auto eqs = support_enum(g);
  REQUIRE(eqs.size() == 3);
  bool pure00 = false, pure11 = false, mixed = false;
  for (const auto& e : eqs) {
    if (e.p[0] == 1.0 && e.q[0] == 1.0) pure00 = true;
    if (e.p[1] == 1.0 && e.q[1] == 1.0) pure11 = true;
    if (std::abs(e.p[0] - 1.0 / 3) < 1e-12 &&
        std::abs(e.q[0] - 1.0 / 3) < 1e-12)
      mixed = true;
  }
  CHECK(pure00);
  CHECK(pure11);
  CHECK(mixed);
}

TEST_CASE("support enumeration degenerate sizes") {
  auto dom = make_bimatrix(2, 2, {3, 1, 2, 0}, {3, 2, 1, 0});
  CHECK(support_enum(dom).size() == 1);
  auto one = make_bimatrix(1, 1, {5}, {7});
  auto eqs = support_enum(one);
  REQUIRE(eqs.size() == 1);
  CHECK(eqs[0].p[0] == 1.0);
  auto big = make_bimatrix(13, 2, std::vector<double>(26, 0.0),
                           std::vector<double>(26, 0.0));
  CHECK_THROWS(support_enum(big));
}

TEST_CASE("lemke_howson solves the frozen examples") {
  auto dom = make_bimatrix(2, 2, {3, 1, 2, 0}, {3, 2, 1, 0});
  auto p1 = lemke_howson(dom);
  CHECK(p1.p[0] == doctest::Approx(1.0));
  CHECK(p1.q[0] == doctest::Approx(1.0));

  auto pennies = make_bimatrix(2, 2, {2, 0, 0, 2}, {0, 2, 2, 0});
  auto p2 = lemke_howson(pennies);
  CHECK(p2.p[0] == doctest::Approx(0.5));
  CHECK(p2.q[0] == doctest::Approx(0.5));

  auto one = make_bimatrix(1, 1, {5}, {7});
  auto p3 = lemke_howson(one);
  CHECK(p3.p[0] == 1.0);
  CHECK(regret(one, p3).r1 == 0.0);
}

TEST_CASE("regret on hand-evaluated profiles") {
  auto coord = make_bimatrix(2, 2, {2, 0, 0, 1}, {2, 0, 0, 1});
  MixedProfile off{{1, 0}, {0, 1}};
  auto rep = regret(coord, off);
  CHECK(rep.r1 == doctest::Approx(1.0));
  CHECK(rep.r2 == doctest::Approx(2.0));
  CHECK(rep.best_response_1 == 1);
  CHECK(rep.best_response_2 == 0);

  auto pennies = make_bimatrix(2, 2, {2, 0, 0, 2}, {0, 2, 2, 0});
  MixedProfile uni{{0.5, 0.5}, {0.5, 0.5}};
  auto rep2 = regret(pennies, uni);
  CHECK(rep2.r1 <= 1e-9);
  CHECK(rep2.r2 <= 1e-9);
}

TEST_CASE("oracle equivalence on 100 random nondegenerate games") {
  std::uint64_t state = 0x5eedULL;
  for (int trial = 0; trial < 100; ++trial) {
    int m = 2 + static_cast<int>(splitmix64(state) % 4);
    int n = 2 + static_cast<int>(splitmix64(state) % 4);
    std::vector<double> a(m * n), b(m * n);
    for (auto& v : a)
      v = static_cast<double>(splitmix64(state) >> 11) / 9007199254740992.0;
    for (auto& v : b)
      v = static_cast<double>(splitmix64(state) >> 11) / 9007199254740992.0;
    auto g = make_bimatrix(m, n, a, b);
    auto lh = lemke_howson_exact(g);
    auto [r1, r2] = regret_exact(g, lh);
    CHECK(r1 <= mpq_class(1, 1000000000));
    CHECK(r2 <= mpq_class(1, 1000000000));
    auto all = support_enum(g);
    REQUIRE(!all.empty());
    auto lhd = lh.to_double();
    bool matched = false;
    for (const auto& e : all) {
      if (linf(e.p, lhd.p) <= 1e-6 && linf(e.q, lhd.q) <= 1e-6) {
        matched = true;
        break;
      }
    }
    CHECK(matched);
  }
}

TEST_CASE("build_bimatrix rejects unbounded games and validates libraries") {
  ExponentialGame g;
  StrategyLibrary lib;
  lib.add(load_vm_strategy("emit 1\nhalt\n", "one"));
  CHECK_THROWS_AS(build_bimatrix(g, lib, lib, 0.1, 0.1, 4, 1),
                  GameConfigError);
  LargestIntegerGame li;
  StrategyLibrary empty;
  CHECK_THROWS(build_bimatrix(li, lib, empty, 0.1, 0.1, 4, 1));
  StrategyLibrary dup;
  dup.add(load_vm_strategy("halt\n", "x"));
  CHECK_THROWS(dup.add(load_vm_strategy("halt\n", "x")));
}

TEST_CASE("1x1 build_bimatrix equals evaluate_profile") {
  LargestIntegerGame li;
  StrategyLibrary l1, l2;
  l1.add(load_vm_strategy("emit 1\nhalt\n", "one"));
  l2.add(load_vm_strategy("emit 1\nhalt\n", "one"));
  auto bm = build_bimatrix(li, l1, l2, 0.1, 0.1, 8, 77);
  auto caps = std::make_pair(truncation_cap(100, 0.1), truncation_cap(100, 0.1));
  auto [e1, e2] = evaluate_profile(li, l1.at(0), l2.at(0), 0.1, 0.1, 8,
                                   mix_seed(77, 0, 0), caps);
  CHECK(bm.a_at(0, 0) == e1.mean);
  CHECK(bm.b_at(0, 0) == e2.mean);
  CHECK(bm.provenance[0].first.samples == 8);
}

TEST_CASE("factoring bimatrix at desk scale shows the two corners") {
  FactoringGame fg;
  StrategyLibrary alices, bobs;
  alices.add(alice_const2());
  alices.add(alice_random());
  bobs.add(bob_halt());
  bobs.add(bob_trial_division(1u << 24));
  auto bm = build_bimatrix(fg, alices, bobs, 0.01, 0.0001, 24, 2024);
  // (const2, trial_division): Bob factors 2 instantly
  CHECK(bm.a_at(0, 1) == doctest::Approx(1.0).epsilon(0.1));
  CHECK(bm.b_at(0, 1) == doctest::Approx(2.0).epsilon(0.05));
  // (alice_random, bob_halt): Alice wins, Bob concedes at cost 1
  CHECK(bm.a_at(1, 0) > bm.b_at(1, 0));
  CHECK(bm.b_at(1, 0) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("lift_finite reproduces payoffs and mixing frequencies") {
  MatrixGame game = MatrixGame::parse(
      "2 2\n0 0 2 2\n0 1 0 0\n1 0 0 0\n1 1 1 1\n", "coord");

  // pure equilibrium lifts to constant programs
  MixedProfile pure{{1, 0}, {1, 0}};
  auto [s1, s2] = lift_finite(game, pure);
  auto [e1, e2] =
      evaluate_profile(game, s1, s2, 1e-4, 1e-4, 4, 1, {100000, 100000});
  CHECK(std::abs(e1.mean - 2.0) <= 0.01);
  CHECK(std::abs(e2.mean - 2.0) <= 0.01);

  // mixed (1/2,1/2) lifts to a sampler with the right frequencies
  MixedProfile mixed{{0.5, 0.5}, {0.5, 0.5}};
  auto [m1, m2] = lift_finite(game, mixed);
  int zeros = 0;
  ExecutionInput in = ExecutionInput::from_rates(1e-4, 1e-4);
  for (int i = 0; i < 1000; ++i) {
    auto out = m1.run(in, mix_seed(9, i), 100000);
    REQUIRE(out.halted);
    if (game.decode(1, out.output_bits)->value == 0) ++zeros;
  }
  // 3 sigma of a fair binomial over 1000 draws is about 47
  CHECK(std::abs(zeros - 500) <= 50);
}

TEST_CASE("profile serialization") {
  MixedProfile p{{0.25, 0.75}, {1.0}};
  auto text = serialize_profile(p);
  CHECK(text.find("profile:") == 0);
  CHECK(text.find("0.25") != std::string::npos);
}
