#include "dgame/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dgame/rng.hpp"

namespace dgame {

std::uint64_t truncation_cap(double K, double delta) {
  if (K < 1.0) throw std::invalid_argument("truncation_cap: K must be >= 1");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("truncation_cap: delta must lie in (0,1)");
  double v = K * K / (delta * delta);
  if (v >= 4e18) return static_cast<std::uint64_t>(4e18);
  return static_cast<std::uint64_t>(std::ceil(v - 1e-9));
}

std::pair<double, double> miniaturize(double eps, double delta) {
  auto shrink = [](double r) {
    if (!(r > 0.0 && r < 1.0))
      throw std::invalid_argument("miniaturize: rate must lie in (0,1)");
    double l = std::ceil(std::log2(1.0 / r) - 1e-9);
    return 1.0 / std::max(2.0, l);
  };
  return {shrink(eps), shrink(delta)};
}

void StrategyLibrary::add(MeteredStrategy s) {
  if (s.name.empty())
    throw std::invalid_argument("strategy library: empty label");
  for (const auto& e : entries_)
    if (e.name == s.name)
      throw std::invalid_argument("strategy library: duplicate label " +
                                  s.name);
  entries_.push_back(std::move(s));
}

std::vector<std::string> StrategyLibrary::labels() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.name);
  return out;
}

double Bimatrix::max_stderr() const {
  double s = 0.0;
  for (const auto& [e1, e2] : provenance)
    s = std::max({s, e1.std_error, e2.std_error});
  return s;
}

std::string Bimatrix::serialize() const {
  std::ostringstream os;
  os.precision(17);
  os << m << " " << n << "\n";
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      os << i << " " << j << " " << a_at(i, j) << " " << b_at(i, j) << "\n";
  return os.str();
}

std::string serialize_profile(const MixedProfile& profile) {
  std::ostringstream os;
  os.precision(17);
  os << "profile:\np:";
  for (double v : profile.p) os << " " << v;
  os << "\nq:";
  for (double v : profile.q) os << " " << v;
  os << "\n";
  return os.str();
}

MixedProfile RationalProfile::to_double() const {
  MixedProfile m;
  m.p.reserve(p.size());
  m.q.reserve(q.size());
  for (const auto& v : p) m.p.push_back(v.get_d());
  for (const auto& v : q) m.q.push_back(v.get_d());
  return m;
}

Bimatrix build_bimatrix(const GameSpec& game, const StrategyLibrary& lib1,
                        const StrategyLibrary& lib2, double eps, double delta,
                        std::uint64_t samples, std::uint64_t seed) {
  auto K = game.bound();
  if (!K)
    throw GameConfigError(
        "build_bimatrix: game " + game.name() +
        " has unbounded payoffs; with rewards escalating like 2^i every "
        "finite truncation leaves a profitable deviation, so no cap is "
        "sound and no equilibrium certificate can be issued");
  if (lib1.size() == 0 || lib2.size() == 0)
    throw std::invalid_argument("build_bimatrix: empty strategy library");
  std::uint64_t cap1 = truncation_cap(*K, eps);
  std::uint64_t cap2 = truncation_cap(*K, delta);
  Bimatrix bm;
  bm.m = static_cast<int>(lib1.size());
  bm.n = static_cast<int>(lib2.size());
  bm.a.resize(bm.m * bm.n);
  bm.b.resize(bm.m * bm.n);
  bm.provenance.resize(bm.m * bm.n);
  bm.row_labels = lib1.labels();
  bm.col_labels = lib2.labels();
  for (int i = 0; i < bm.m; ++i) {
    for (int j = 0; j < bm.n; ++j) {
      auto [e1, e2] =
          evaluate_profile(game, lib1.at(i), lib2.at(j), eps, delta, samples,
                           mix_seed(seed, i, j), {cap1, cap2});
      bm.a[i * bm.n + j] = e1.mean;
      bm.b[i * bm.n + j] = e2.mean;
      bm.provenance[i * bm.n + j] = {e1, e2};
    }
  }
  return bm;
}

// ---------------------------------------------------------------------------
// Exact support enumeration

namespace {

// Solves M z = rhs in place; returns false when singular.
bool solve_exact(std::vector<std::vector<mpq_class>> M,
                 std::vector<mpq_class> rhs, std::vector<mpq_class>& out) {
  std::size_t k = M.size();
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t piv = col;
    while (piv < k && M[piv][col] == 0) ++piv;
    if (piv == k) return false;
    std::swap(M[piv], M[col]);
    std::swap(rhs[piv], rhs[col]);
    mpq_class d = M[col][col];
    for (std::size_t j = col; j < k; ++j) M[col][j] /= d;
    rhs[col] /= d;
    for (std::size_t r = 0; r < k; ++r) {
      if (r == col || M[r][col] == 0) continue;
      mpq_class f = M[r][col];
      for (std::size_t j = col; j < k; ++j) M[r][j] -= f * M[col][j];
      rhs[r] -= f * rhs[col];
    }
  }
  out = std::move(rhs);
  return true;
}

std::vector<std::vector<mpq_class>> exact_matrix(const std::vector<double>& v,
                                                 int m, int n) {
  std::vector<std::vector<mpq_class>> M(m, std::vector<mpq_class>(n));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) M[i][j] = mpq_class(v[i * n + j]);
  return M;
}

void enumerate_subsets(int n, int k, const std::function<void(
                                         const std::vector<int>&)>& fn) {
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

std::vector<RationalProfile> support_enum_exact(const Bimatrix& game) {
  int m = game.m, n = game.n;
  if (m < 1 || n < 1 || m > 12 || n > 12)
    throw std::invalid_argument("support_enum: dimensions must be in [1,12]");
  auto A = exact_matrix(game.a, m, n);
  auto B = exact_matrix(game.b, m, n);
  std::vector<RationalProfile> found;
  std::set<std::pair<std::vector<mpq_class>, std::vector<mpq_class>>> seen;
  for (int k = 1; k <= std::min(m, n); ++k) {
    enumerate_subsets(m, k, [&](const std::vector<int>& rows) {
      enumerate_subsets(n, k, [&](const std::vector<int>& cols) {
        // q and row value v: indifference of supported rows + normalization
        std::vector<std::vector<mpq_class>> Mq(
            k + 1, std::vector<mpq_class>(k + 1, 0));
        std::vector<mpq_class> rq(k + 1, 0);
        for (int r = 0; r < k; ++r) {
          for (int c = 0; c < k; ++c) Mq[r][c] = A[rows[r]][cols[c]];
          Mq[r][k] = -1;
        }
        for (int c = 0; c < k; ++c) Mq[k][c] = 1;
        rq[k] = 1;
        std::vector<mpq_class> solq;
        if (!solve_exact(Mq, rq, solq)) return;

        std::vector<std::vector<mpq_class>> Mp(
            k + 1, std::vector<mpq_class>(k + 1, 0));
        std::vector<mpq_class> rp(k + 1, 0);
        for (int c = 0; c < k; ++c) {
          for (int r = 0; r < k; ++r) Mp[c][r] = B[rows[r]][cols[c]];
          Mp[c][k] = -1;
        }
        for (int r = 0; r < k; ++r) Mp[k][r] = 1;
        rp[k] = 1;
        std::vector<mpq_class> solp;
        if (!solve_exact(Mp, rp, solp)) return;

        for (int t = 0; t < k; ++t)
          if (solq[t] < 0 || solp[t] < 0) return;
        mpq_class v = solq[k], w = solp[k];

        RationalProfile prof;
        prof.p.assign(m, 0);
        prof.q.assign(n, 0);
        for (int t = 0; t < k; ++t) {
          prof.p[rows[t]] = solp[t];
          prof.q[cols[t]] = solq[t];
        }
        // best-response check outside the supports
        for (int i = 0; i < m; ++i) {
          mpq_class ui = 0;
          for (int j = 0; j < n; ++j) ui += A[i][j] * prof.q[j];
          if (ui > v) return;
        }
        for (int j = 0; j < n; ++j) {
          mpq_class uj = 0;
          for (int i = 0; i < m; ++i) uj += B[i][j] * prof.p[i];
          if (uj > w) return;
        }
        if (seen.emplace(prof.p, prof.q).second) found.push_back(prof);
      });
    });
  }
  return found;
}

std::vector<MixedProfile> support_enum(const Bimatrix& game) {
  std::vector<MixedProfile> out;
  for (const auto& r : support_enum_exact(game)) out.push_back(r.to_double());
  return out;
}

// ---------------------------------------------------------------------------
// Lemke-Howson

namespace {

struct Tableau {
  int rows = 0, vars = 0;
  std::vector<std::vector<mpq_class>> M;  // rows x (vars + 1), last col rhs
  std::vector<int> basis;                 // label basic in each row
  std::vector<int> label_col;             // label -> column
  std::vector<int> lex_cols;              // rhs-first tie-break column order

  // Enters the variable of `label`; returns the leaving label, or -1 on a
  // ray (no positive pivot column entry).
  int pivot(int label) {
    int col = label_col[label];
    int r = -1;
    for (int i = 0; i < rows; ++i) {
      if (M[i][col] <= 0) continue;
      if (r < 0) {
        r = i;
        continue;
      }
      // lexicographic ratio comparison over (rhs, identity columns)
      for (int k : lex_cols) {
        mpq_class lhs = M[i][k] * M[r][col];
        mpq_class rhs = M[r][k] * M[i][col];
        if (lhs == rhs) continue;
        if (lhs < rhs) r = i;
        break;
      }
    }
    if (r < 0) return -1;
    int leaving = basis[r];
    mpq_class d = M[r][col];
    for (auto& x : M[r]) x /= d;
    for (int i = 0; i < rows; ++i) {
      if (i == r || M[i][col] == 0) continue;
      mpq_class f = M[i][col];
      for (int k = 0; k <= vars; ++k) M[i][k] -= f * M[r][k];
    }
    basis[r] = label;
    return leaving;
  }

  mpq_class value_of(int label) const {
    for (int i = 0; i < rows; ++i)
      if (basis[i] == label) return M[i][vars];
    return 0;
  }
};

}  // namespace

RationalProfile lemke_howson_exact(const Bimatrix& game, int initial_label) {
  int m = game.m, n = game.n;
  if (m < 1 || n < 1)
    throw std::invalid_argument("lemke_howson: empty bimatrix");
  if (initial_label < 0 || initial_label >= m + n)
    throw std::invalid_argument("lemke_howson: initial label out of range");

  double mn = 0.0;
  for (double v : game.a) mn = std::min(mn, v);
  for (double v : game.b) mn = std::min(mn, v);
  mpq_class shift = mpq_class(1) - mpq_class(mn);  // all entries >= 1

  // T1: m rows, A y + r = 1; labels: r_i -> i, y_j -> m + j
  Tableau T1;
  T1.rows = m;
  T1.vars = m + n;
  T1.M.assign(m, std::vector<mpq_class>(m + n + 1, 0));
  T1.basis.resize(m);
  T1.label_col.assign(m + n, 0);
  for (int j = 0; j < n; ++j) T1.label_col[m + j] = j;
  for (int i = 0; i < m; ++i) T1.label_col[i] = n + i;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j)
      T1.M[i][j] = mpq_class(game.a_at(i, j)) + shift;
    T1.M[i][n + i] = 1;
    T1.M[i][m + n] = 1;
    T1.basis[i] = i;
  }
  T1.lex_cols.push_back(m + n);
  for (int i = 0; i < m; ++i) T1.lex_cols.push_back(n + i);

  // T2: n rows, B^T x + s = 1; labels: x_i -> i, s_j -> m + j
  Tableau T2;
  T2.rows = n;
  T2.vars = m + n;
  T2.M.assign(n, std::vector<mpq_class>(m + n + 1, 0));
  T2.basis.resize(n);
  T2.label_col.assign(m + n, 0);
  for (int i = 0; i < m; ++i) T2.label_col[i] = i;
  for (int j = 0; j < n; ++j) T2.label_col[m + j] = m + j;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < m; ++i)
      T2.M[j][i] = mpq_class(game.b_at(i, j)) + shift;
    T2.M[j][m + j] = 1;
    T2.M[j][m + n] = 1;
    T2.basis[j] = m + j;
  }
  T2.lex_cols.push_back(m + n);
  for (int j = 0; j < n; ++j) T2.lex_cols.push_back(m + j);

  auto fallback = [&]() -> RationalProfile {
    if (m > 12 || n > 12)
      throw std::runtime_error(
          "lemke_howson: pivot budget exceeded and game too large for the "
          "support-enumeration fallback");
    auto all = support_enum_exact(game);
    if (all.empty())
      throw std::runtime_error("lemke_howson: no equilibrium found");
    return all.front();
  };

  int lbl = initial_label;
  Tableau* t = (initial_label < m) ? &T2 : &T1;
  const std::uint64_t budget = 100000;
  bool done = false;
  for (std::uint64_t piv = 0; piv < budget; ++piv) {
    int leaving = t->pivot(lbl);
    if (leaving < 0) return fallback();
    if (leaving == initial_label) {
      done = true;
      break;
    }
    lbl = leaving;
    t = (t == &T1) ? &T2 : &T1;
  }
  if (!done) return fallback();

  RationalProfile prof;
  prof.p.resize(m);
  prof.q.resize(n);
  mpq_class sx = 0, sy = 0;
  for (int i = 0; i < m; ++i) {
    prof.p[i] = T2.value_of(i);
    sx += prof.p[i];
  }
  for (int j = 0; j < n; ++j) {
    prof.q[j] = T1.value_of(m + j);
    sy += prof.q[j];
  }
  if (sx == 0 || sy == 0) return fallback();
  for (auto& v : prof.p) v /= sx;
  for (auto& v : prof.q) v /= sy;
  return prof;
}

MixedProfile lemke_howson(const Bimatrix& game, int initial_label) {
  return lemke_howson_exact(game, initial_label).to_double();
}

// ---------------------------------------------------------------------------
// Regret

RegretReport regret(const Bimatrix& game, const MixedProfile& profile) {
  int m = game.m, n = game.n;
  if (static_cast<int>(profile.p.size()) != m ||
      static_cast<int>(profile.q.size()) != n)
    throw std::invalid_argument("regret: profile dimension mismatch");
  RegretReport rep;
  double base1 = 0, base2 = 0;
  std::vector<double> row_u(m, 0), col_u(n, 0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      row_u[i] += game.a_at(i, j) * profile.q[j];
      col_u[j] += game.b_at(i, j) * profile.p[i];
    }
  for (int i = 0; i < m; ++i) base1 += profile.p[i] * row_u[i];
  for (int j = 0; j < n; ++j) base2 += profile.q[j] * col_u[j];
  rep.best_response_1 =
      static_cast<int>(std::max_element(row_u.begin(), row_u.end()) -
                       row_u.begin());
  rep.best_response_2 =
      static_cast<int>(std::max_element(col_u.begin(), col_u.end()) -
                       col_u.begin());
  rep.r1 = std::max(0.0, row_u[rep.best_response_1] - base1);
  rep.r2 = std::max(0.0, col_u[rep.best_response_2] - base2);
  return rep;
}

std::pair<mpq_class, mpq_class> regret_exact(const Bimatrix& game,
                                             const RationalProfile& profile) {
  int m = game.m, n = game.n;
  if (static_cast<int>(profile.p.size()) != m ||
      static_cast<int>(profile.q.size()) != n)
    throw std::invalid_argument("regret_exact: profile dimension mismatch");
  auto A = exact_matrix(game.a, m, n);
  auto B = exact_matrix(game.b, m, n);
  std::vector<mpq_class> row_u(m, 0), col_u(n, 0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      row_u[i] += A[i][j] * profile.q[j];
      col_u[j] += B[i][j] * profile.p[i];
    }
  mpq_class base1 = 0, base2 = 0, best1 = row_u[0], best2 = col_u[0];
  for (int i = 0; i < m; ++i) {
    base1 += profile.p[i] * row_u[i];
    best1 = std::max(best1, row_u[i]);
  }
  for (int j = 0; j < n; ++j) {
    base2 += profile.q[j] * col_u[j];
    best2 = std::max(best2, col_u[j]);
  }
  mpq_class r1 = best1 - base1, r2 = best2 - base2;
  if (r1 < 0) r1 = 0;
  if (r2 < 0) r2 = 0;
  return {r1, r2};
}

// ---------------------------------------------------------------------------
// Finite-game lifting

namespace {

constexpr int kDrawBits = 12;

std::vector<long> quantize_distribution(const std::vector<double>& p) {
  const long total = 1l << kDrawBits;
  std::size_t n = p.size();
  std::vector<long> q(n, 0);
  std::vector<std::pair<double, std::size_t>> rem;
  long assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double scaled = p[i] * total;
    q[i] = static_cast<long>(std::floor(scaled + 1e-12));
    assigned += q[i];
    rem.push_back({scaled - q[i], i});
  }
  std::sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (long k = 0; k < total - assigned; ++k) q[rem[k % n].second] += 1;
  return q;
}

MeteredStrategy compile_mixed_emitter(const MatrixGame& game, int player,
                                      const std::vector<double>& dist) {
  std::vector<long> q = quantize_distribution(dist);
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < q.size(); ++i)
    if (q[i] > 0) support.push_back(i);
  std::ostringstream os;
  auto emit_action = [&](std::size_t idx) {
    std::string bits =
        game.encode(player, Action::index(static_cast<long>(idx)));
    for (char c : bits) os << "emit " << c << "\n";
    os << "halt\n";
  };
  if (support.size() == 1) {
    emit_action(support[0]);
  } else {
    for (int i = 0; i < kDrawBits; ++i) os << "rand r4\n";
    long cum = 0;
    for (std::size_t s = 0; s + 1 < support.size(); ++s) {
      cum += q[support[s]];
      os << "jlt r4 " << cum << " act" << s << "\n";
    }
    os << "jmp act" << support.size() - 1 << "\n";
    for (std::size_t s = 0; s < support.size(); ++s) {
      os << "act" << s << ":\n";
      emit_action(support[s]);
    }
  }
  std::string name = "lift_p" + std::to_string(player) + ":" + game.name();
  return load_vm_strategy(os.str(), name);
}

}  // namespace

std::pair<MeteredStrategy, MeteredStrategy> lift_finite(
    const MatrixGame& game, const MixedProfile& ne) {
  if (static_cast<int>(ne.p.size()) != game.rows() ||
      static_cast<int>(ne.q.size()) != game.cols())
    throw std::invalid_argument("lift_finite: profile dimension mismatch");
  return {compile_mixed_emitter(game, 1, ne.p),
          compile_mixed_emitter(game, 2, ne.q)};
}

}  // namespace dgame
