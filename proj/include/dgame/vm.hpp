#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dgame {

// Register machine over arbitrary-precision integers. The cost model charges
// a base unit per executed instruction plus surcharges: total operand bit
// length for arithmetic and comparisons, one unit per emitted output bit and
// one unit per drawn random bit. This keeps trial division on 100-bit inputs
// genuinely expensive while staying exactly reproducible.

enum class Op {
  Set,     // set rD imm
  Mov,     // mov rD src
  Add,     // add rD a b
  Sub,     // sub rD a b
  Mul,     // mul rD a b
  DivMod,  // divmod rQ rR a b   (b == 0 yields q=0, r=a)
  Jmp,     // jmp target
  Jlt,     // jlt a b target
  Jeq,     // jeq a b target
  Jgt,     // jgt a b target
  Rand,    // rand rD            (rD = 2*rD + random bit)
  Emit,    // emit 0|1
  Halt,    // halt
};

struct Operand {
  bool is_reg = true;
  int reg = 0;
  mpz_class imm;

  static Operand r(int idx) { return Operand{true, idx, 0}; }
  static Operand i(mpz_class v) { return Operand{false, 0, std::move(v)}; }
};

struct Instruction {
  Op op = Op::Halt;
  int dst = 0;   // destination register (Set/Mov/Add/Sub/Mul/Rand, DivMod quotient)
  int dst2 = 0;  // DivMod remainder register
  Operand a, b;
  int target = 0;  // branch target (instruction index)
  int bit = 0;     // Emit literal
};

struct StrategyProgram {
  std::string name;
  std::vector<Instruction> code;
};

class ProgramError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr int kNumRegisters = 16;

// Registers at entry: r0 = ceil(1/eps), r1 = ceil(1/delta), r2 = opponent
// output decoded as a big-endian integer (0 if absent), r3 = opponent output
// bit count. All other registers start at 0.
struct ExecutionInput {
  mpz_class inv_eps;
  mpz_class inv_delta;
  std::optional<std::string> opponent_bits;  // sequential games, player 2 only

  static ExecutionInput from_rates(double eps, double delta);
};

struct ExecutionOutcome {
  bool halted = false;
  std::string output_bits;  // '0'/'1' characters
  std::uint64_t steps = 0;  // cost-model units
};

// Text assembly, one instruction per line, ';' comments, 'label:' lines.
// Throws ProgramError on malformed input or invalid branch targets.
StrategyProgram parse_program(const std::string& text, const std::string& name);

// Canonical serialization length in bits; a pure function of the instruction
// sequence.
std::uint64_t program_size_bits(const StrategyProgram& program);

ExecutionOutcome execute(const StrategyProgram& program,
                         const ExecutionInput& input, std::uint64_t seed,
                         std::uint64_t step_cap);

// Cost accounting shared by the interpreter and host-implemented builtin
// strategies. Builtins must declare their work through a meter so their step
// counts live on the same scale as interpreted programs.
class CostMeter {
 public:
  explicit CostMeter(std::uint64_t cap) : cap_(cap) {}

  // Returns false once the cap is reached; steps clamp to the cap.
  bool charge(std::uint64_t units) {
    if (exhausted_) return false;
    if (units >= cap_ - steps_) {
      steps_ = cap_;
      exhausted_ = true;
      return false;
    }
    steps_ += units;
    return true;
  }
  bool charge_arith(const mpz_class& a, const mpz_class& b);
  bool charge_output(std::uint64_t bits) { return charge(1 + bits); }
  bool charge_random(std::uint64_t bits) { return charge(1 + bits); }

  bool exhausted() const { return exhausted_; }
  std::uint64_t steps() const { return steps_; }
  std::uint64_t cap() const { return cap_; }

 private:
  std::uint64_t cap_;
  std::uint64_t steps_ = 0;
  bool exhausted_ = false;
};

// A strategy is anything that maps (input, seed, cap) to a metered outcome:
// an interpreted program or a host builtin with declared costs.
struct MeteredStrategy {
  std::string name;
  std::uint64_t size_bits = 0;
  std::function<ExecutionOutcome(const ExecutionInput&, std::uint64_t,
                                 std::uint64_t)>
      run;
};

MeteredStrategy make_vm_strategy(StrategyProgram program);
MeteredStrategy load_vm_strategy(const std::string& asm_text,
                                 const std::string& name);

}  // namespace dgame
