#pragma once

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dgame {

enum class ActionKind { NoAction, Integer, FactorList, MatrixIndex };

struct Action {
  ActionKind kind = ActionKind::NoAction;
  mpz_class value;                  // Integer / MatrixIndex payload
  std::vector<mpz_class> factors;   // FactorList payload

  static Action none() { return Action{}; }
  static Action integer(mpz_class v) {
    return Action{ActionKind::Integer, std::move(v), {}};
  }
  static Action factor_list(std::vector<mpz_class> fs) {
    return Action{ActionKind::FactorList, 0, std::move(fs)};
  }
  static Action index(long i) {
    return Action{ActionKind::MatrixIndex, i, {}};
  }
};

struct Payoff {
  double u1 = 0.0;
  double u2 = 0.0;
  bool saturated = false;
};

class GameConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Underlying one-shot game: action codecs from VM output bits, non-negative
// payoffs, optional uniform bound. decode() returning nullopt marks a
// malformed output, which the payoff engine treats as non-halting; a present
// NoAction is a legal "played nothing" move where the game defines one.
class GameSpec {
 public:
  virtual ~GameSpec() = default;
  virtual std::string name() const = 0;
  virtual bool sequential() const = 0;
  virtual std::optional<double> bound() const = 0;
  virtual std::optional<Action> decode(int player,
                                       const std::string& bits) const = 0;
  virtual std::string encode(int player, const Action& a) const = 0;
  virtual Payoff payoff(const Action& a1, const Action& a2) const = 0;
  // sup over opponent actions of this player's payoff, given its own action;
  // throws GameConfigError when the sup is unbounded.
  virtual double sup_vs_nonhalt(int player, const Action& own) const = 0;
};

// Integer codec: big-endian binary, empty string = no action.
std::string encode_integer_bits(const mpz_class& v);
std::optional<mpz_class> decode_integer_bits(const std::string& bits);

// Factor-claim codec: concatenated Elias-gamma codes, one per factor.
std::string encode_claim_bits(const std::vector<mpz_class>& factors);
std::optional<std::vector<mpz_class>> decode_claim_bits(
    const std::string& bits);

// Payoff rules as free functions (the GameSpec classes route through these).
Payoff factoring_payoff(const mpz_class& n, const Action& claim);
Payoff largest_integer_payoff(const mpz_class& i, const mpz_class& j);
Payoff exp_payoff(const mpz_class& i, const mpz_class& j);

class FactoringGame : public GameSpec {
 public:
  std::string name() const override { return "factoring"; }
  bool sequential() const override { return true; }
  std::optional<double> bound() const override { return 2.0; }
  std::optional<Action> decode(int player,
                               const std::string& bits) const override;
  std::string encode(int player, const Action& a) const override;
  Payoff payoff(const Action& a1, const Action& a2) const override;
  double sup_vs_nonhalt(int player, const Action& own) const override;
};

class LargestIntegerGame : public GameSpec {
 public:
  std::string name() const override { return "largest-integer"; }
  bool sequential() const override { return false; }
  std::optional<double> bound() const override { return 100.0; }
  std::optional<Action> decode(int player,
                               const std::string& bits) const override;
  std::string encode(int player, const Action& a) const override;
  Payoff payoff(const Action& a1, const Action& a2) const override;
  double sup_vs_nonhalt(int player, const Action& own) const override;
};

// Both players pick an index i and receive 2^i: bounded by nothing, used to
// demonstrate that truncation requires a payoff bound.
class ExponentialGame : public GameSpec {
 public:
  std::string name() const override { return "exponential"; }
  bool sequential() const override { return false; }
  std::optional<double> bound() const override { return std::nullopt; }
  std::optional<Action> decode(int player,
                               const std::string& bits) const override;
  std::string encode(int player, const Action& a) const override;
  Payoff payoff(const Action& a1, const Action& a2) const override;
  double sup_vs_nonhalt(int player, const Action& own) const override;
};

class MatrixGame : public GameSpec {
 public:
  MatrixGame(int rows, int cols, std::vector<double> u1, std::vector<double> u2,
             std::string label = "bimatrix");

  std::string name() const override { return label_; }
  bool sequential() const override { return false; }
  std::optional<double> bound() const override { return bound_; }
  std::optional<Action> decode(int player,
                               const std::string& bits) const override;
  std::string encode(int player, const Action& a) const override;
  Payoff payoff(const Action& a1, const Action& a2) const override;
  double sup_vs_nonhalt(int player, const Action& own) const override;

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double u1_at(int i, int j) const { return u1_[i * cols_ + j]; }
  double u2_at(int i, int j) const { return u2_[i * cols_ + j]; }

  // Plain-text format: header "m n", then m*n lines "i j u1 u2".
  static MatrixGame parse(const std::string& text, std::string label = "bimatrix");
  std::string serialize() const;

 private:
  int rows_, cols_;
  std::vector<double> u1_, u2_;
  double bound_;
  std::string label_;
};

}  // namespace dgame
