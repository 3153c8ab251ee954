#include "dgame/games.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dgame/numtheory.hpp"

namespace dgame {

std::string encode_integer_bits(const mpz_class& v) {
  if (v < 0) throw std::invalid_argument("encode_integer_bits: negative");
  return v.get_str(2);
}

std::optional<mpz_class> decode_integer_bits(const std::string& bits) {
  if (bits.empty()) return std::nullopt;
  mpz_class v = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') return std::nullopt;
    v = v * 2 + (c - '0');
  }
  return v;
}

std::string encode_claim_bits(const std::vector<mpz_class>& factors) {
  std::string out;
  for (const mpz_class& f : factors) {
    if (f < 1) throw std::invalid_argument("encode_claim_bits: factor < 1");
    std::string b = f.get_str(2);
    out.append(b.size() - 1, '0');
    out += b;
  }
  return out;
}

std::optional<std::vector<mpz_class>> decode_claim_bits(
    const std::string& bits) {
  std::vector<mpz_class> out;
  std::size_t i = 0;
  while (i < bits.size()) {
    std::size_t zeros = 0;
    while (i < bits.size() && bits[i] == '0') {
      ++zeros;
      ++i;
    }
    std::size_t len = zeros + 1;
    if (i + len > bits.size()) return std::nullopt;
    mpz_class f = 0;
    for (std::size_t k = 0; k < len; ++k) {
      char c = bits[i + k];
      if (c != '0' && c != '1') return std::nullopt;
      f = f * 2 + (c - '0');
    }
    i += len;
    out.push_back(f);
  }
  if (out.empty()) return std::nullopt;
  return out;
}

Payoff factoring_payoff(const mpz_class& n, const Action& claim) {
  if (n < 2) throw std::invalid_argument("factoring_payoff: n must be >= 2");
  bool valid = false;
  if (claim.kind == ActionKind::FactorList && !claim.factors.empty()) {
    mpz_class prod = 1;
    valid = true;
    for (const mpz_class& f : claim.factors) {
      if (f < 2 || !is_prime(f)) {
        valid = false;
        break;
      }
      prod *= f;
    }
    if (valid && prod != n) valid = false;
  }
  return valid ? Payoff{1.0, 2.0} : Payoff{2.0, 1.0};
}

Payoff largest_integer_payoff(const mpz_class& i, const mpz_class& j) {
  if (i > j) return {100.0, 0.0};
  if (i < j) return {0.0, 100.0};
  return {50.0, 50.0};
}

Payoff exp_payoff(const mpz_class& i, const mpz_class& j) {
  if (i < 0 || j < 0) throw std::invalid_argument("exp_payoff: negative index");
  Payoff p;
  auto eval = [&](const mpz_class& k, double& out) {
    if (k > 1023) {
      out = std::ldexp(1.0, 1023);
      p.saturated = true;
    } else {
      out = std::ldexp(1.0, k.get_si());
    }
  };
  eval(i, p.u1);
  eval(j, p.u2);
  return p;
}

// ---------------------------------------------------------------------------
// FactoringGame

std::optional<Action> FactoringGame::decode(int player,
                                            const std::string& bits) const {
  if (player == 1) {
    auto v = decode_integer_bits(bits);
    if (!v || *v < 2) return std::nullopt;  // invalid number: non-halting
    return Action::integer(*v);
  }
  if (bits.empty()) return Action::none();  // Bob may halt without a claim
  auto fs = decode_claim_bits(bits);
  if (!fs) return std::nullopt;
  for (const mpz_class& f : *fs)
    if (f < 2) return std::nullopt;  // 1 is rejected as a factor
  return Action::factor_list(std::move(*fs));
}

std::string FactoringGame::encode(int player, const Action& a) const {
  if (a.kind == ActionKind::NoAction) return "";
  if (player == 1) return encode_integer_bits(a.value);
  return encode_claim_bits(a.factors);
}

Payoff FactoringGame::payoff(const Action& a1, const Action& a2) const {
  return factoring_payoff(a1.value, a2);
}

double FactoringGame::sup_vs_nonhalt(int player, const Action& own) const {
  if (player == 1) return 2.0;  // some Bob claim is always invalid
  // Bob played `own`; the best Alice number for him makes the claim valid.
  if (own.kind != ActionKind::FactorList) return 1.0;
  for (const mpz_class& f : own.factors)
    if (f < 2 || !is_prime(f)) return 1.0;
  return 2.0;  // Alice could have played exactly the claimed product
}

// ---------------------------------------------------------------------------
// LargestIntegerGame

std::optional<Action> LargestIntegerGame::decode(
    int, const std::string& bits) const {
  auto v = decode_integer_bits(bits);
  if (!v) return std::nullopt;
  return Action::integer(*v);
}

std::string LargestIntegerGame::encode(int, const Action& a) const {
  return encode_integer_bits(a.value);
}

Payoff LargestIntegerGame::payoff(const Action& a1, const Action& a2) const {
  return largest_integer_payoff(a1.value, a2.value);
}

double LargestIntegerGame::sup_vs_nonhalt(int, const Action& own) const {
  // A smaller opponent integer exists unless we played 0.
  return own.value > 0 ? 100.0 : 50.0;
}

// ---------------------------------------------------------------------------
// ExponentialGame

std::optional<Action> ExponentialGame::decode(int,
                                              const std::string& bits) const {
  auto v = decode_integer_bits(bits);
  if (!v) return std::nullopt;
  return Action::integer(*v);
}

std::string ExponentialGame::encode(int, const Action& a) const {
  return encode_integer_bits(a.value);
}

Payoff ExponentialGame::payoff(const Action& a1, const Action& a2) const {
  return exp_payoff(a1.value, a2.value);
}

double ExponentialGame::sup_vs_nonhalt(int, const Action&) const {
  throw GameConfigError(
      "exponential game has unbounded payoffs; the sup over opponent actions "
      "does not exist");
}

// ---------------------------------------------------------------------------
// MatrixGame

MatrixGame::MatrixGame(int rows, int cols, std::vector<double> u1,
                       std::vector<double> u2, std::string label)
    : rows_(rows), cols_(cols), u1_(std::move(u1)), u2_(std::move(u2)),
      label_(std::move(label)) {
  if (rows_ < 1 || cols_ < 1 ||
      u1_.size() != static_cast<std::size_t>(rows_ * cols_) ||
      u2_.size() != u1_.size())
    throw GameConfigError("matrix game: inconsistent dimensions");
  bound_ = 0.0;
  for (std::size_t k = 0; k < u1_.size(); ++k) {
    if (u1_[k] < 0 || u2_[k] < 0)
      throw GameConfigError("matrix game: negative payoff entry");
    bound_ = std::max({bound_, u1_[k], u2_[k]});
  }
  bound_ = std::max(bound_, 1.0);
}

std::optional<Action> MatrixGame::decode(int player,
                                         const std::string& bits) const {
  auto v = decode_integer_bits(bits);
  if (!v) return std::nullopt;
  long limit = player == 1 ? rows_ : cols_;
  if (*v >= limit) return std::nullopt;
  return Action::index(v->get_si());
}

std::string MatrixGame::encode(int, const Action& a) const {
  return encode_integer_bits(a.value);
}

Payoff MatrixGame::payoff(const Action& a1, const Action& a2) const {
  int i = static_cast<int>(a1.value.get_si());
  int j = static_cast<int>(a2.value.get_si());
  if (i < 0 || i >= rows_ || j < 0 || j >= cols_)
    throw std::out_of_range("matrix game: index out of range");
  return {u1_at(i, j), u2_at(i, j)};
}

double MatrixGame::sup_vs_nonhalt(int player, const Action& own) const {
  double best = 0.0;
  if (player == 1) {
    int i = static_cast<int>(own.value.get_si());
    for (int j = 0; j < cols_; ++j) best = std::max(best, u1_at(i, j));
  } else {
    int j = static_cast<int>(own.value.get_si());
    for (int i = 0; i < rows_; ++i) best = std::max(best, u2_at(i, j));
  }
  return best;
}

MatrixGame MatrixGame::parse(const std::string& text, std::string label) {
  std::istringstream is(text);
  int m = 0, n = 0;
  if (!(is >> m >> n) || m < 1 || n < 1)
    throw GameConfigError("bimatrix parse: bad header");
  std::vector<double> u1(m * n, 0.0), u2(m * n, 0.0);
  std::vector<bool> seen(m * n, false);
  int i, j;
  double a, b;
  while (is >> i >> j >> a >> b) {
    if (i < 0 || i >= m || j < 0 || j >= n)
      throw GameConfigError("bimatrix parse: cell index out of range");
    u1[i * n + j] = a;
    u2[i * n + j] = b;
    seen[i * n + j] = true;
  }
  for (bool s : seen)
    if (!s) throw GameConfigError("bimatrix parse: missing cell");
  return MatrixGame(m, n, std::move(u1), std::move(u2), std::move(label));
}

std::string MatrixGame::serialize() const {
  std::ostringstream os;
  os.precision(17);
  os << rows_ << " " << cols_ << "\n";
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j)
      os << i << " " << j << " " << u1_at(i, j) << " " << u2_at(i, j) << "\n";
  return os.str();
}

}  // namespace dgame
