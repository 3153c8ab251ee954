#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dgame/discount.hpp"
#include "dgame/games.hpp"
#include "dgame/vm.hpp"

namespace dgame {

// Useful-computation horizon of the truncated game: ceil(K^2 / delta^2),
// which makes the discounted loss (1-delta)^cap * K at most delta. K >= 1.
std::uint64_t truncation_cap(double K, double delta);

// Slow-growing surrogate rates used to keep machine overhead negligible:
// eps' = 1 / max(2, ceil(log2(1/eps))), same for delta.
std::pair<double, double> miniaturize(double eps, double delta);

class StrategyLibrary {
 public:
  void add(MeteredStrategy s);
  std::size_t size() const { return entries_.size(); }
  const MeteredStrategy& at(std::size_t i) const { return entries_.at(i); }
  const std::vector<MeteredStrategy>& entries() const { return entries_; }
  std::vector<std::string> labels() const;

 private:
  std::vector<MeteredStrategy> entries_;
};

// Finite approximation of the discounted metagame over two strategy
// libraries. Cells are Monte Carlo estimates and carry their provenance.
struct Bimatrix {
  int m = 0, n = 0;
  std::vector<double> a, b;  // row-major m*n
  std::vector<std::pair<PayoffEstimate, PayoffEstimate>> provenance;
  std::vector<std::string> row_labels, col_labels;

  double a_at(int i, int j) const { return a[i * n + j]; }
  double b_at(int i, int j) const { return b[i * n + j]; }
  double max_stderr() const;
  std::string serialize() const;
};

struct MixedProfile {
  std::vector<double> p, q;
};

struct RationalProfile {
  std::vector<mpq_class> p, q;
  MixedProfile to_double() const;
};

struct RegretReport {
  double r1 = 0.0, r2 = 0.0;
  int best_response_1 = 0, best_response_2 = 0;
};

// "profile:" section appended after a serialized bimatrix.
std::string serialize_profile(const MixedProfile& profile);

// Evaluates every library pair with step caps truncation_cap(K, eps) for the
// row player and truncation_cap(K, delta) for the column player. Rejects
// unbounded games: with payoffs like 2^i a finite truncation admits an
// always-profitable escalation, so no cap is sound.
Bimatrix build_bimatrix(const GameSpec& game, const StrategyLibrary& lib1,
                        const StrategyLibrary& lib2, double eps, double delta,
                        std::uint64_t samples, std::uint64_t seed);

// Lemke-Howson complementary pivoting in exact rational arithmetic with
// lexicographic tie-breaking; falls back to support enumeration (m, n <= 12)
// if the pivot budget is exceeded.
RationalProfile lemke_howson_exact(const Bimatrix& game, int initial_label = 0);
MixedProfile lemke_howson(const Bimatrix& game, int initial_label = 0);

// All equilibria over equal-size support pairs, m, n <= 12.
std::vector<RationalProfile> support_enum_exact(const Bimatrix& game);
std::vector<MixedProfile> support_enum(const Bimatrix& game);

RegretReport regret(const Bimatrix& game, const MixedProfile& profile);
std::pair<mpq_class, mpq_class> regret_exact(const Bimatrix& game,
                                             const RationalProfile& profile);

// Compiles a mixed equilibrium of a finite game into two interpreted
// programs: draw 12 metered random bits, select the pure action by
// cumulative thresholds, emit its encoding, halt. Mixing is quantized to
// 2^-12; pure actions compile to straight-line emitters.
std::pair<MeteredStrategy, MeteredStrategy> lift_finite(
    const MatrixGame& game, const MixedProfile& ne);

}  // namespace dgame
