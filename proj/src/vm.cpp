#include "dgame/vm.hpp"

#include <cctype>
#include <cmath>
#include <memory>
#include <sstream>
#include <unordered_map>

#include "dgame/numtheory.hpp"
#include "dgame/rng.hpp"

namespace dgame {

ExecutionInput ExecutionInput::from_rates(double eps, double delta) {
  auto inv_ceil = [](double x) {
    double q = 1.0 / x;
    double r = std::nearbyint(q);
    double v = (std::fabs(q - r) < 1e-9 * std::max(1.0, std::fabs(q))) ? r
                                                                       : std::ceil(q);
    mpz_class z;
    mpz_set_d(z.get_mpz_t(), v);
    return z;
  };
  if (!(eps > 0.0 && eps < 1.0) || !(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("discount rates must lie in (0,1)");
  ExecutionInput in;
  in.inv_eps = inv_ceil(eps);
  in.inv_delta = inv_ceil(delta);
  return in;
}

bool CostMeter::charge_arith(const mpz_class& a, const mpz_class& b) {
  return charge(1 + bit_length(a) + bit_length(b));
}

namespace {

struct Token {
  std::string text;
};

std::vector<std::string> tokenize_line(const std::string& line) {
  std::string body = line.substr(0, line.find(';'));
  std::vector<std::string> toks;
  std::istringstream is(body);
  std::string t;
  while (is >> t) toks.push_back(t);
  return toks;
}

int parse_reg(const std::string& t, int lineno) {
  if (t.size() < 2 || t[0] != 'r')
    throw ProgramError("line " + std::to_string(lineno) +
                       ": expected register, got '" + t + "'");
  int idx = 0;
  try {
    idx = std::stoi(t.substr(1));
  } catch (...) {
    throw ProgramError("line " + std::to_string(lineno) + ": bad register '" +
                       t + "'");
  }
  if (idx < 0 || idx >= kNumRegisters)
    throw ProgramError("line " + std::to_string(lineno) +
                       ": register out of range '" + t + "'");
  return idx;
}

Operand parse_operand(const std::string& t, int lineno) {
  if (!t.empty() && t[0] == 'r' && t.size() > 1 && std::isdigit(t[1]))
    return Operand::r(parse_reg(t, lineno));
  try {
    return Operand::i(mpz_class(t));
  } catch (...) {
    throw ProgramError("line " + std::to_string(lineno) + ": bad operand '" +
                       t + "'");
  }
}

}  // namespace

StrategyProgram parse_program(const std::string& text,
                              const std::string& name) {
  struct Pending {
    std::size_t instr;
    std::string label;
    int lineno;
  };
  StrategyProgram p;
  p.name = name;
  std::unordered_map<std::string, int> labels;
  std::vector<Pending> fixups;

  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto toks = tokenize_line(line);
    if (toks.empty()) continue;
    if (toks.size() == 1 && toks[0].back() == ':') {
      std::string label = toks[0].substr(0, toks[0].size() - 1);
      if (labels.count(label))
        throw ProgramError("line " + std::to_string(lineno) +
                           ": duplicate label '" + label + "'");
      labels[label] = static_cast<int>(p.code.size());
      continue;
    }
    Instruction ins;
    const std::string& op = toks[0];
    auto need = [&](std::size_t n) {
      if (toks.size() != n + 1)
        throw ProgramError("line " + std::to_string(lineno) + ": '" + op +
                           "' expects " + std::to_string(n) + " operands");
    };
    auto target_of = [&](const std::string& t) {
      // Numeric targets are absolute instruction indices; otherwise a label.
      if (!t.empty() && (std::isdigit(t[0]))) {
        ins.target = std::stoi(t);
      } else {
        fixups.push_back({p.code.size(), t, lineno});
        ins.target = -1;
      }
    };
    if (op == "set") {
      need(2);
      ins.op = Op::Set;
      ins.dst = parse_reg(toks[1], lineno);
      ins.a = parse_operand(toks[2], lineno);
      if (ins.a.is_reg)
        throw ProgramError("line " + std::to_string(lineno) +
                           ": set needs an immediate");
    } else if (op == "mov") {
      need(2);
      ins.op = Op::Mov;
      ins.dst = parse_reg(toks[1], lineno);
      ins.a = parse_operand(toks[2], lineno);
    } else if (op == "add" || op == "sub" || op == "mul") {
      need(3);
      ins.op = op == "add" ? Op::Add : op == "sub" ? Op::Sub : Op::Mul;
      ins.dst = parse_reg(toks[1], lineno);
      ins.a = parse_operand(toks[2], lineno);
      ins.b = parse_operand(toks[3], lineno);
    } else if (op == "divmod") {
      need(4);
      ins.op = Op::DivMod;
      ins.dst = parse_reg(toks[1], lineno);
      ins.dst2 = parse_reg(toks[2], lineno);
      ins.a = parse_operand(toks[3], lineno);
      ins.b = parse_operand(toks[4], lineno);
    } else if (op == "jmp") {
      need(1);
      ins.op = Op::Jmp;
      target_of(toks[1]);
    } else if (op == "jlt" || op == "jeq" || op == "jgt") {
      need(3);
      ins.op = op == "jlt" ? Op::Jlt : op == "jeq" ? Op::Jeq : Op::Jgt;
      ins.a = parse_operand(toks[1], lineno);
      ins.b = parse_operand(toks[2], lineno);
      target_of(toks[3]);
    } else if (op == "rand") {
      need(1);
      ins.op = Op::Rand;
      ins.dst = parse_reg(toks[1], lineno);
    } else if (op == "emit") {
      need(1);
      ins.op = Op::Emit;
      if (toks[1] != "0" && toks[1] != "1")
        throw ProgramError("line " + std::to_string(lineno) +
                           ": emit expects a literal bit");
      ins.bit = toks[1][0] - '0';
    } else if (op == "halt") {
      need(0);
      ins.op = Op::Halt;
    } else {
      throw ProgramError("line " + std::to_string(lineno) +
                         ": unknown instruction '" + op + "'");
    }
    p.code.push_back(std::move(ins));
  }

  if (p.code.empty()) throw ProgramError("program has no instructions");
  for (const Pending& f : fixups) {
    auto it = labels.find(f.label);
    if (it == labels.end())
      throw ProgramError("line " + std::to_string(f.lineno) +
                         ": unknown label '" + f.label + "'");
    p.code[f.instr].target = it->second;
  }
  int n = static_cast<int>(p.code.size());
  for (std::size_t i = 0; i < p.code.size(); ++i) {
    const Instruction& ins = p.code[i];
    bool branch = ins.op == Op::Jmp || ins.op == Op::Jlt || ins.op == Op::Jeq ||
                  ins.op == Op::Jgt;
    if (branch && (ins.target < 0 || ins.target >= n))
      throw ProgramError("instruction " + std::to_string(i) +
                         ": branch target out of range");
  }
  return p;
}

namespace {

std::uint64_t operand_size_bits(const Operand& o) {
  if (o.is_reg) return 1 + 4;
  return 1 + 1 + 32 + bit_length(o.imm);
}

}  // namespace

std::uint64_t program_size_bits(const StrategyProgram& program) {
  std::uint64_t bits = 16;  // instruction count header
  for (const Instruction& ins : program.code) {
    bits += 5;  // opcode
    switch (ins.op) {
      case Op::Set:
      case Op::Mov:
        bits += 4 + operand_size_bits(ins.a);
        break;
      case Op::Add:
      case Op::Sub:
      case Op::Mul:
        bits += 4 + operand_size_bits(ins.a) + operand_size_bits(ins.b);
        break;
      case Op::DivMod:
        bits += 8 + operand_size_bits(ins.a) + operand_size_bits(ins.b);
        break;
      case Op::Jmp:
        bits += 32;
        break;
      case Op::Jlt:
      case Op::Jeq:
      case Op::Jgt:
        bits += operand_size_bits(ins.a) + operand_size_bits(ins.b) + 32;
        break;
      case Op::Rand:
        bits += 4;
        break;
      case Op::Emit:
        bits += 1;
        break;
      case Op::Halt:
        break;
    }
  }
  return bits;
}

ExecutionOutcome execute(const StrategyProgram& program,
                         const ExecutionInput& input, std::uint64_t seed,
                         std::uint64_t step_cap) {
  if (step_cap < 1) throw std::invalid_argument("step_cap must be >= 1");
  std::vector<mpz_class> reg(kNumRegisters, 0);
  reg[0] = input.inv_eps;
  reg[1] = input.inv_delta;
  if (input.opponent_bits) {
    mpz_class v = 0;
    for (char c : *input.opponent_bits) v = v * 2 + (c - '0');
    reg[2] = v;
    reg[3] = static_cast<unsigned long>(input.opponent_bits->size());
  }

  BitStream bits(seed);
  CostMeter meter(step_cap);
  ExecutionOutcome out;
  int pc = 0;
  const int n = static_cast<int>(program.code.size());

  auto val = [&](const Operand& o) -> const mpz_class& {
    return o.is_reg ? reg[o.reg] : o.imm;
  };

  while (pc >= 0 && pc < n) {
    const Instruction& ins = program.code[pc];
    bool ok = true;
    switch (ins.op) {
      case Op::Set:
        ok = meter.charge(1 + bit_length(ins.a.imm));
        if (ok) reg[ins.dst] = ins.a.imm;
        break;
      case Op::Mov:
        ok = meter.charge(1 + bit_length(val(ins.a)));
        if (ok) reg[ins.dst] = val(ins.a);
        break;
      case Op::Add:
        ok = meter.charge_arith(val(ins.a), val(ins.b));
        if (ok) reg[ins.dst] = val(ins.a) + val(ins.b);
        break;
      case Op::Sub:
        ok = meter.charge_arith(val(ins.a), val(ins.b));
        if (ok) reg[ins.dst] = val(ins.a) - val(ins.b);
        break;
      case Op::Mul:
        ok = meter.charge_arith(val(ins.a), val(ins.b));
        if (ok) reg[ins.dst] = val(ins.a) * val(ins.b);
        break;
      case Op::DivMod: {
        ok = meter.charge_arith(val(ins.a), val(ins.b));
        if (ok) {
          if (val(ins.b) == 0) {
            mpz_class a = val(ins.a);
            reg[ins.dst] = 0;
            reg[ins.dst2] = a;
          } else {
            mpz_class q, r, a = val(ins.a), b = val(ins.b);
            mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), a.get_mpz_t(),
                        b.get_mpz_t());
            reg[ins.dst] = q;
            reg[ins.dst2] = r;
          }
        }
        break;
      }
      case Op::Jmp:
        ok = meter.charge(1);
        if (ok) {
          pc = ins.target;
          continue;
        }
        break;
      case Op::Jlt:
      case Op::Jeq:
      case Op::Jgt: {
        ok = meter.charge_arith(val(ins.a), val(ins.b));
        if (ok) {
          int c = cmp(val(ins.a), val(ins.b));
          bool taken = (ins.op == Op::Jlt && c < 0) ||
                       (ins.op == Op::Jeq && c == 0) ||
                       (ins.op == Op::Jgt && c > 0);
          if (taken) {
            pc = ins.target;
            continue;
          }
        }
        break;
      }
      case Op::Rand:
        ok = meter.charge_random(1);
        if (ok) reg[ins.dst] = reg[ins.dst] * 2 + bits.next_bit();
        break;
      case Op::Emit:
        ok = meter.charge_output(1);
        if (ok) out.output_bits.push_back(static_cast<char>('0' + ins.bit));
        break;
      case Op::Halt:
        ok = meter.charge(1);
        if (ok) {
          out.halted = true;
          out.steps = meter.steps();
          return out;
        }
        break;
    }
    if (!ok) {
      out.halted = false;
      out.output_bits.clear();
      out.steps = step_cap;
      return out;
    }
    ++pc;
  }
  // Falling off the end halts.
  out.halted = true;
  out.steps = meter.steps();
  return out;
}

MeteredStrategy make_vm_strategy(StrategyProgram program) {
  MeteredStrategy s;
  s.name = program.name;
  s.size_bits = program_size_bits(program);
  auto prog = std::make_shared<StrategyProgram>(std::move(program));
  s.run = [prog](const ExecutionInput& in, std::uint64_t seed,
                 std::uint64_t cap) { return execute(*prog, in, seed, cap); };
  return s;
}

MeteredStrategy load_vm_strategy(const std::string& asm_text,
                                 const std::string& name) {
  return make_vm_strategy(parse_program(asm_text, name));
}

}  // namespace dgame
