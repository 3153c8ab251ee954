#include "dgame/factoring.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "dgame/games.hpp"
#include "dgame/numtheory.hpp"
#include "dgame/rng.hpp"

namespace dgame {

int n_of_epsilon(double eps) {
  if (!(eps > 0.0) || eps >= 0.5)
    throw std::invalid_argument("n_of_epsilon: eps must lie in (0, 1/2)");
  double v = 1.0 / (eps * std::log2(1.0 / eps));
  int n = static_cast<int>(std::ceil(v - 1e-12));
  return std::max(2, n);
}

mpz_class pad_to_length(const mpz_class& x, std::size_t bits) {
  if (x < 2) throw std::invalid_argument("pad_to_length: x must be >= 2");
  std::size_t have = bit_length(x);
  if (have > bits) throw std::invalid_argument("pad_to_length: x too long");
  mpz_class r = x;
  mpz_mul_2exp(r.get_mpz_t(), r.get_mpz_t(), bits - have);
  return r;
}

// ---------------------------------------------------------------------------
// Alice

MeteredStrategy alice_const2() {
  return load_vm_strategy("emit 1\nemit 0\nhalt\n", "alice_const2");
}

namespace {

MeteredStrategy make_alice_sampler(std::string name, bool from_eps,
                                   int fixed_bits) {
  MeteredStrategy s;
  s.name = std::move(name);
  s.size_bits = 256;
  s.run = [from_eps, fixed_bits](const ExecutionInput& in, std::uint64_t seed,
                                 std::uint64_t cap) {
    CostMeter m(cap);
    ExecutionOutcome out;
    out.steps = 0;
    int n = fixed_bits;
    if (from_eps) {
      if (in.inv_eps <= 2) {  // eps >= 1/2: the length rule has no scale
        m.charge(1);
        out.halted = !m.exhausted();
        out.steps = m.steps();
        return out;
      }
      n = n_of_epsilon(1.0 / in.inv_eps.get_d());
    }
    std::uint64_t nb = static_cast<std::uint64_t>(n);
    bool ok = m.charge(1 + bit_length(in.inv_eps)) && m.charge_random(nb) &&
              m.charge_output(nb);
    if (!ok) {
      out.halted = false;
      out.steps = m.steps();
      return out;
    }
    BitStream bits(seed);
    std::string o;
    o.push_back('1');
    for (int i = 1; i + 1 < n; ++i) o.push_back(bits.next_bit() ? '1' : '0');
    if (n >= 2) o.push_back('1');
    out.halted = true;
    out.output_bits = std::move(o);
    out.steps = m.steps();
    return out;
  };
  return s;
}

}  // namespace

MeteredStrategy alice_random() {
  return make_alice_sampler("alice_random", true, 0);
}

MeteredStrategy alice_fixed_length(int bits) {
  if (bits < 2) throw std::invalid_argument("alice_fixed_length: bits >= 2");
  return make_alice_sampler("alice_fixed:" + std::to_string(bits), false,
                            bits);
}

// ---------------------------------------------------------------------------
// Bob: trial division

MeteredStrategy bob_halt() { return load_vm_strategy("halt\n", "bob_halt"); }

namespace {

struct TrialPlan {
  mpz_class cost = 0;
  std::vector<mpz_class> factors;
  bool completed = false;
};

// Number of elements of the candidate sequence {2, 3, 5, 7, ...} in [lo, hi].
mpz_class candidate_count(const mpz_class& lo, const mpz_class& hi) {
  mpz_class cnt = 0;
  if (lo <= 2 && hi >= 2) cnt += 1;
  mpz_class olo = std::max(lo, mpz_class(3));
  if (mpz_even_p(olo.get_mpz_t())) olo += 1;
  mpz_class ohi = hi;
  if (ohi >= olo) {
    if (mpz_even_p(ohi.get_mpz_t())) ohi -= 1;
    if (ohi >= olo) cnt += (ohi - olo) / 2 + 1;
  }
  return cnt;
}

// Cost of failing trials over candidates in [lo, hi] against a bv-bit value,
// grouped by divisor bit length. Bails once the running total passes lim.
void add_fail_range(mpz_class lo, const mpz_class& hi, std::size_t bv,
                    mpz_class& cost, const mpz_class& lim) {
  while (lo <= hi && cost <= lim) {
    std::size_t b = bit_length(lo);
    mpz_class group_hi = (mpz_class(1) << b) - 1;
    if (group_hi > hi) group_hi = hi;
    cost += candidate_count(lo, group_hi) * mpz_class(1 + bv + b);
    lo = group_hi + 1;
  }
}

// Exact cost and result of the canonical trial-division loop on x, without
// running it: the scan between successive prime factors is priced in closed
// form from the host factorization.
TrialPlan plan_trial_division(const mpz_class& x, std::uint64_t limit) {
  TrialPlan plan;
  mpz_class lim(static_cast<unsigned long>(limit));
  std::vector<mpz_class> primes = factorize(x);
  mpz_class v = x;
  mpz_class d_next = 2;
  std::size_t idx = 0;
  while (v > 1) {
    std::size_t bv = bit_length(v);
    mpz_class s;
    mpz_sqrt(s.get_mpz_t(), v.get_mpz_t());
    if (idx < primes.size() && primes[idx] <= s) {
      mpz_class p = primes[idx];
      add_fail_range(d_next, p - 1, bv, plan.cost, lim);
      if (plan.cost > lim) return plan;
      while (idx < primes.size() && primes[idx] == p) {
        plan.cost += 1 + bit_length(v) + bit_length(p);
        v /= p;
        plan.factors.push_back(p);
        ++idx;
        if (plan.cost > lim) return plan;
      }
      // the inner division loop exits on one more failing remainder
      plan.cost += 1 + bit_length(v) + bit_length(p);
      if (plan.cost > lim) return plan;
      d_next = p + 1;
    } else {
      add_fail_range(d_next, s, bv, plan.cost, lim);
      if (plan.cost > lim) return plan;
      plan.factors.push_back(v);
      ++idx;
      v = 1;
    }
  }
  plan.completed = plan.cost <= lim;
  return plan;
}

std::optional<mpz_class> read_opponent_number(const ExecutionInput& in) {
  if (!in.opponent_bits) return std::nullopt;
  auto x = decode_integer_bits(*in.opponent_bits);
  if (!x || *x < 2) return std::nullopt;
  return x;
}

ExecutionOutcome give_up(CostMeter& m) {
  ExecutionOutcome out;
  out.halted = !m.exhausted();
  out.steps = m.steps();
  return out;
}

ExecutionOutcome capped_out(CostMeter& m) {
  ExecutionOutcome out;
  out.halted = false;
  out.steps = m.steps();
  return out;
}

}  // namespace

MeteredStrategy bob_trial_division(std::uint64_t budget) {
  MeteredStrategy s;
  s.name = "bob_trial_division";
  s.size_bits = 512;
  s.run = [budget](const ExecutionInput& in, std::uint64_t,
                   std::uint64_t cap) {
    CostMeter m(cap);
    auto x = read_opponent_number(in);
    if (!x) {
      m.charge(2);
      return give_up(m);
    }
    if (!m.charge(1 + bit_length(*x))) return capped_out(m);
    TrialPlan plan =
        plan_trial_division(*x, std::min<std::uint64_t>(budget, cap));
    if (plan.completed) {
      if (!m.charge(plan.cost.get_ui())) return capped_out(m);
      std::string claim = encode_claim_bits(plan.factors);
      if (!m.charge_output(claim.size())) return capped_out(m);
      ExecutionOutcome out;
      out.halted = true;
      out.output_bits = std::move(claim);
      out.steps = m.steps();
      return out;
    }
    if (!m.charge(budget)) return capped_out(m);
    return give_up(m);
  };
  return s;
}

// ---------------------------------------------------------------------------
// Bob: Pollard rho (Brent)

namespace {

const std::vector<unsigned>& small_primes() {
  static const std::vector<unsigned> ps = [] {
    std::vector<unsigned> v;
    for (unsigned n = 2; n < 256; ++n) {
      bool p = true;
      for (unsigned d = 2; d * d <= n; ++d)
        if (n % d == 0) {
          p = false;
          break;
        }
      if (p) v.push_back(n);
    }
    return v;
  }();
  return ps;
}

mpz_class draw_mod(BitStream& bits, std::size_t nbits, const mpz_class& mod) {
  mpz_class v = 0;
  for (std::size_t i = 0; i < nbits + 8; ++i) v = v * 2 + bits.next_bit();
  return v % mod;
}

}  // namespace

MeteredStrategy bob_pollard_rho(std::uint64_t budget) {
  MeteredStrategy s;
  s.name = "bob_pollard_rho";
  s.size_bits = 1024;
  s.run = [budget](const ExecutionInput& in, std::uint64_t seed,
                   std::uint64_t cap) {
    CostMeter m(cap);
    auto xin = read_opponent_number(in);
    if (!xin) {
      m.charge(2);
      return give_up(m);
    }
    std::size_t b = bit_length(*xin);
    if (!m.charge(1 + b)) return capped_out(m);

    // internal give-up horizon ~ 2 * log2(1/delta) / delta cost units
    std::uint64_t D = mpz_fits_ulong_p(in.inv_delta.get_mpz_t())
                          ? in.inv_delta.get_ui()
                          : (1ull << 62);
    unsigned __int128 hor = static_cast<unsigned __int128>(2) *
                            bit_length(in.inv_delta) * D;
    std::uint64_t horizon = budget;
    if (hor < horizon) horizon = static_cast<std::uint64_t>(hor);

    std::uint64_t spent = 0;
    bool capped = false;
    auto chg = [&](std::uint64_t u) {
      if (!m.charge(u)) {
        capped = true;
        return false;
      }
      if (u >= horizon - spent) {
        spent = horizon;
        return false;
      }
      spent += u;
      return true;
    };

    BitStream bits(seed);
    std::vector<mpz_class> work{*xin};
    std::vector<mpz_class> factors;
    bool ok = true;
    while (ok && !work.empty()) {
      mpz_class v = work.back();
      work.pop_back();
      if (v == 1) continue;
      std::size_t bv = bit_length(v);
      std::uint64_t wit = miller_rabin_witness_count(v);
      // modexp per witness: ~2*bv multiplications of bv-bit operands
      if (!(ok = chg(wit * 2 * bv * (1 + 2 * bv)))) break;
      if (is_prime(v)) {
        factors.push_back(v);
        continue;
      }
      bool split = false;
      for (unsigned p : small_primes()) {
        if (!(ok = chg(1 + bv + bit_length(p)))) break;
        if (mpz_divisible_ui_p(v.get_mpz_t(), p)) {
          work.push_back(p);
          work.push_back(v / p);
          split = true;
          break;
        }
      }
      if (!ok) break;
      if (split) continue;
      std::uint64_t itc = 3 * (1 + 2 * bv);
      std::uint64_t gcd_cost = 1 + 2 * bv;
      while (ok && !split) {
        if (!(ok = chg(2 * (1 + bv)))) break;  // fresh c and y draws
        mpz_class c = draw_mod(bits, bv, v - 1) + 1;
        mpz_class y = draw_mod(bits, bv, v);
        if (y < 2) y = 2;
        mpz_class xs, ys, q = 1, d = 1, t;
        std::uint64_t r = 1;
        const std::uint64_t batch = 64;
        auto step = [&](mpz_class& z) { z = (z * z + c) % v; };
        while (ok && d == 1) {
          xs = y;
          for (std::uint64_t i = 0; i < r && (ok = chg(itc)); ++i) step(y);
          if (!ok) break;
          std::uint64_t k = 0;
          while (ok && k < r && d == 1) {
            ys = y;
            std::uint64_t lim2 = std::min(batch, r - k);
            for (std::uint64_t i = 0; i < lim2 && (ok = chg(itc)); ++i) {
              step(y);
              t = xs - y;
              if (t < 0) t = -t;
              q = q * t % v;
            }
            if (!ok || !(ok = chg(gcd_cost))) break;
            mpz_gcd(d.get_mpz_t(), q.get_mpz_t(), v.get_mpz_t());
            k += batch;
          }
          r *= 2;
        }
        if (!ok) break;
        if (d == v) {  // batched gcd overshot: replay one step at a time
          d = 1;
          while ((ok = chg(itc)) && d == 1) {
            step(ys);
            t = xs - ys;
            if (t < 0) t = -t;
            mpz_gcd(d.get_mpz_t(), t.get_mpz_t(), v.get_mpz_t());
          }
          if (!ok) break;
        }
        if (d > 1 && d < v) {
          work.push_back(d);
          work.push_back(v / d);
          split = true;
        }
        // d == v again: this c failed, retry with a fresh one
      }
    }
    if (!ok) return capped ? capped_out(m) : give_up(m);
    std::sort(factors.begin(), factors.end());
    std::string claim = encode_claim_bits(factors);
    if (!m.charge_output(claim.size())) return capped_out(m);
    ExecutionOutcome out;
    out.halted = true;
    out.output_bits = std::move(claim);
    out.steps = m.steps();
    return out;
  };
  return s;
}

// ---------------------------------------------------------------------------
// Lookup table

std::uint64_t LookupTable::size_bits() const {
  std::uint64_t total = 0;
  for (const auto& [k, fs] : entries) {
    total += bit_length(k);
    for (const mpz_class& f : fs) total += bit_length(f);
  }
  return total;
}

std::string LookupTable::serialize() const {
  std::ostringstream os;
  for (const auto& [k, fs] : entries) {
    os << k.get_str();
    os << ":";
    for (const mpz_class& f : fs) os << " " << f.get_str();
    os << "\n";
  }
  return os.str();
}

LookupTable LookupTable::parse(const std::string& text) {
  LookupTable t;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto colon = line.find(':');
    if (colon == std::string::npos)
      throw std::runtime_error("lookup table parse: missing ':'");
    mpz_class key(line.substr(0, colon));
    std::istringstream fs(line.substr(colon + 1));
    std::vector<mpz_class> factors;
    std::string tok;
    while (fs >> tok) factors.emplace_back(tok);
    if (factors.empty())
      throw std::runtime_error("lookup table parse: empty factor list");
    t.covered_length = std::max(t.covered_length, bit_length(key));
    t.entries.emplace(std::move(key), std::move(factors));
  }
  return t;
}

LookupTable build_lookup_table(const std::vector<mpz_class>& support,
                               std::uint64_t max_trials) {
  LookupTable t;
  for (const mpz_class& x : support) {
    if (x < 2)
      throw std::runtime_error("build_lookup_table: support element < 2");
    std::vector<mpz_class> fs = trial_division_factorize(x, max_trials);
    if (fs.empty())
      throw std::runtime_error(
          "build_lookup_table: could not factor " + x.get_str() + " within " +
          std::to_string(max_trials) + " trial divisions");
    t.covered_length = std::max(t.covered_length, bit_length(x));
    t.entries.emplace(x, std::move(fs));
  }
  return t;
}

MeteredStrategy bob_lookup(LookupTable table) {
  auto shared = std::make_shared<LookupTable>(std::move(table));
  MeteredStrategy s;
  s.name = "bob_lookup";
  s.size_bits = shared->size_bits() + 64;
  s.run = [shared](const ExecutionInput& in, std::uint64_t,
                   std::uint64_t cap) {
    CostMeter m(cap);
    auto x = read_opponent_number(in);
    if (!x) {
      m.charge(2);
      return give_up(m);
    }
    std::size_t b = bit_length(*x);
    // read plus state-machine walk, linear in the key length
    if (!m.charge(1 + b) || !m.charge(b)) return capped_out(m);
    auto it = shared->entries.find(*x);
    if (it == shared->entries.end()) return give_up(m);
    std::string claim = encode_claim_bits(it->second);
    if (!m.charge_output(claim.size())) return capped_out(m);
    ExecutionOutcome out;
    out.halted = true;
    out.output_bits = std::move(claim);
    out.steps = m.steps();
    return out;
  };
  return s;
}

MeteredStrategy bob_length_gated(std::size_t max_bits, MeteredStrategy inner,
                                 MeteredStrategy fallback) {
  auto in_p = std::make_shared<MeteredStrategy>(std::move(inner));
  auto fb_p = std::make_shared<MeteredStrategy>(std::move(fallback));
  MeteredStrategy s;
  s.name = "bob_length_gated:" + std::to_string(max_bits) + "[" +
           in_p->name + "|" + fb_p->name + "]";
  s.size_bits = 64 + in_p->size_bits + fb_p->size_bits;
  s.run = [max_bits, in_p, fb_p](const ExecutionInput& in, std::uint64_t seed,
                                 std::uint64_t cap) {
    std::size_t len = in.opponent_bits ? in.opponent_bits->size() : 0;
    std::uint64_t gate = 1 + bit_length(mpz_class(static_cast<long>(len)));
    if (gate >= cap) {
      ExecutionOutcome out;
      out.steps = cap;
      return out;
    }
    const MeteredStrategy& chosen =
        (len > 0 && len <= max_bits) ? *in_p : *fb_p;
    ExecutionOutcome out = chosen.run(in, seed, cap - gate);
    out.steps += gate;
    return out;
  };
  return s;
}

// ---------------------------------------------------------------------------
// Distribution D and algorithm A

mpz_class sample_D(const MeteredStrategy& alice, double eps, int repeats,
                   std::uint64_t seed) {
  if (repeats < 1) throw std::invalid_argument("sample_D: repeats >= 1");
  int n = n_of_epsilon(eps);
  std::uint64_t cap = std::max<std::uint64_t>(
      static_cast<std::uint64_t>(std::ceil(1.0 / eps)),
      64ull * static_cast<std::uint64_t>(n));
  ExecutionInput in = ExecutionInput::from_rates(eps, eps);
  for (int r = 0; r < repeats; ++r) {
    ExecutionOutcome o = alice.run(in, mix_seed(seed, r), cap);
    if (!o.halted) continue;
    auto v = decode_integer_bits(o.output_bits);
    if (v && *v >= 2 && bit_length(*v) <= static_cast<std::size_t>(n))
      return pad_to_length(*v, n);
  }
  // fixed fallback of exact length n, composite for n >= 3
  mpz_class base = n >= 3 ? 3 : 2;
  return pad_to_length(base, n);
}

AmplifiedFactorer AmplifiedFactorer::plan(MeteredStrategy inner, double c,
                                          std::size_t input_bits) {
  if (c < 1.0)
    throw std::invalid_argument("AmplifiedFactorer: c must be >= 1");
  AmplifiedFactorer a;
  a.inner = std::move(inner);
  a.c = c;
  double n = static_cast<double>(std::max<std::size_t>(input_bits, 2));
  double l = std::log2(n);
  a.runs = std::max<std::uint64_t>(
      1, static_cast<std::uint64_t>(std::ceil(l - 1e-12)));
  double cap_d = std::pow(n, c) * std::ceil(std::pow(l, c + 2.0) - 1e-12);
  a.per_run_cap = cap_d >= 9e18
                      ? static_cast<std::uint64_t>(9e18)
                      : static_cast<std::uint64_t>(std::ceil(cap_d));
  return a;
}

std::optional<std::pair<mpz_class, mpz_class>> AmplifiedFactorer::factor(
    const mpz_class& x, std::uint64_t seed) const {
  ExecutionInput in;
  in.inv_eps = mpz_class(1) << 40;
  in.inv_delta = mpz_class(1) << 40;
  in.opponent_bits = encode_integer_bits(x);
  for (std::uint64_t r = 0; r < runs; ++r) {
    ExecutionOutcome o = inner.run(in, mix_seed(seed, r), per_run_cap);
    if (!o.halted || o.output_bits.empty()) continue;
    auto fs = decode_claim_bits(o.output_bits);
    if (!fs) continue;
    mpz_class prod = 1;
    bool good = true;
    for (const mpz_class& f : *fs) {
      if (f < 2) {
        good = false;
        break;
      }
      prod *= f;
    }
    if (good && prod == x) return std::make_pair((*fs)[0], x / (*fs)[0]);
  }
  return std::nullopt;
}

std::optional<std::pair<mpz_class, mpz_class>> extract_algorithm_A(
    const MeteredStrategy& bob, double c, const mpz_class& x,
    std::uint64_t seed) {
  return AmplifiedFactorer::plan(bob, c, bit_length(x)).factor(x, seed);
}

}  // namespace dgame
