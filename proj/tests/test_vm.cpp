#include <doctest.h>

#include "dgame/factoring.hpp"
#include "dgame/vm.hpp"

using namespace dgame;

namespace {
ExecutionInput input_at(double eps, double delta) {
  return ExecutionInput::from_rates(eps, delta);
}
}  // namespace

TEST_CASE("from_rates encodes ceil(1/rate)") {
  CHECK(input_at(0.1, 0.01).inv_eps == 10);
  CHECK(input_at(0.1, 0.01).inv_delta == 100);
  CHECK(input_at(0.001, 0.000001).inv_eps == 1000);
  CHECK(input_at(0.3, 0.3).inv_eps == 4);
  CHECK(input_at(0.25, 0.25).inv_eps == 4);
}

TEST_CASE("constant program emits 10 with hand-summed cost") {
  auto p = parse_program("emit 1\nemit 0\nhalt\n", "const2");
  auto out = execute(p, input_at(0.1, 0.1), 7, 1000);
  CHECK(out.halted);
  CHECK(out.output_bits == "10");
  // two emits at 1+1 each, halt at 1
  CHECK(out.steps == 5);
}

TEST_CASE("self-loop caps out with steps equal to the cap") {
  auto p = parse_program("loop:\njmp loop\n", "spin");
  auto out = execute(p, input_at(0.1, 0.1), 7, 1000);
  CHECK_FALSE(out.halted);
  CHECK(out.steps == 1000);
  CHECK(out.output_bits.empty());
}

TEST_CASE("random-number strategy emits n(0.1)=4 bits at eps=0.1") {
  auto alice = alice_random();
  auto out = alice.run(input_at(0.1, 0.01), 42, 100000);
  CHECK(out.halted);
  CHECK(out.output_bits.size() == 4);
  CHECK(out.output_bits.front() == '1');
  CHECK(out.output_bits.back() == '1');
}

TEST_CASE("execution is deterministic in (program, input, seed, cap)") {
  auto p = parse_program(
      "rand r4\nrand r4\nrand r4\njlt r4 4 low\nemit 1\nhalt\nlow:\nemit "
      "0\nhalt\n",
      "coin");
  auto a = execute(p, input_at(0.1, 0.1), 99, 5000);
  auto b = execute(p, input_at(0.1, 0.1), 99, 5000);
  CHECK(a.halted == b.halted);
  CHECK(a.output_bits == b.output_bits);
  CHECK(a.steps == b.steps);
  auto c = execute(p, input_at(0.1, 0.1), 100, 5000);
  // different seed is allowed to differ, but stays deterministic
  auto d = execute(p, input_at(0.1, 0.1), 100, 5000);
  CHECK(c.output_bits == d.output_bits);
}

TEST_CASE("monotone truncation: a larger cap never changes a halted run") {
  auto p = parse_program("set r5 1000000\nadd r5 r5 r5\nemit 1\nhalt\n", "m");
  auto small = execute(p, input_at(0.1, 0.1), 1, 200);
  REQUIRE(small.halted);
  auto big = execute(p, input_at(0.1, 0.1), 1, 20000);
  CHECK(big.halted == small.halted);
  CHECK(big.output_bits == small.output_bits);
  CHECK(big.steps == small.steps);
}

TEST_CASE("malformed programs are rejected at load") {
  CHECK_THROWS_AS(parse_program("jmp 5\n", "bad"), ProgramError);
  CHECK_THROWS_AS(parse_program("", "empty"), ProgramError);
  CHECK_THROWS_AS(parse_program("frob r1\n", "unknown"), ProgramError);
  CHECK_THROWS_AS(parse_program("jmp nowhere\n", "label"), ProgramError);
}

TEST_CASE("divmod by zero yields quotient 0 and remainder a") {
  auto p = parse_program(
      "set r4 13\nset r5 0\ndivmod r6 r7 r4 r5\njeq r6 0 ok\nemit 1\nhalt\n"
      "ok:\njeq r7 13 ok2\nemit 1\nhalt\nok2:\nemit 0\nhalt\n",
      "divzero");
  auto out = execute(p, input_at(0.1, 0.1), 0, 10000);
  REQUIRE(out.halted);
  CHECK(out.output_bits == "0");
}

TEST_CASE("program size is a stable pure function of the code") {
  auto h1 = parse_program("halt\n", "h1");
  auto h2 = parse_program("halt\n", "h2");
  CHECK(program_size_bits(h1) == program_size_bits(h2));
  CHECK(program_size_bits(h1) > 0);
  CHECK(program_size_bits(h1) < 64);
  auto bigger = parse_program("emit 1\nhalt\n", "b");
  CHECK(program_size_bits(bigger) > program_size_bits(h1));
}

TEST_CASE("random bits replay as a pure function of the seed") {
  auto p = parse_program(
      "rand r4\nrand r4\nrand r4\nrand r4\nrand r4\nrand r4\nrand r4\nrand "
      "r4\njlt r4 128 z\nemit 1\nhalt\nz:\nemit 0\nhalt\n",
      "bits");
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    auto a = execute(p, input_at(0.5, 0.5), seed, 100000);
    auto b = execute(p, input_at(0.5, 0.5), seed, 100000);
    CHECK(a.output_bits == b.output_bits);
    CHECK(a.steps == b.steps);
  }
}

TEST_CASE("cost strictly increases with every executed instruction") {
  auto one = execute(parse_program("halt\n", "h"), input_at(0.1, 0.1), 0, 100);
  auto two = execute(parse_program("emit 1\nhalt\n", "eh"), input_at(0.1, 0.1),
                     0, 100);
  CHECK(one.steps >= 1);
  CHECK(two.steps > one.steps);
}
