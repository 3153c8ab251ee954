#include "runner.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "dgame/discount.hpp"
#include "dgame/factoring.hpp"
#include "dgame/limits.hpp"
#include "dgame/rng.hpp"
#include "dgame/solver.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace dgame::cli {

namespace {

constexpr const char* kToolVersion = "1.0.0";

std::string timestamp_now() {
  auto t = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  char buf[64];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw RunFailure("cannot read file: " + p.string());
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

struct OutputWriter {
  fs::path dir;
  std::map<std::string, std::string> checksums;

  void write(const std::string& name, const std::string& content) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw RunFailure("cannot write file: " + (dir / name).string());
    f << content;
    checksums[name] = fnv1a64_hex(content);
  }
};

MeteredStrategy emit_bits_program(const std::string& bits,
                                  const std::string& name) {
  std::ostringstream os;
  for (char c : bits) os << "emit " << c << "\n";
  os << "halt\n";
  return load_vm_strategy(os.str(), name);
}

std::uint64_t spec_budget(const std::string& spec, std::size_t colon,
                          std::uint64_t fallback) {
  if (colon == std::string::npos) return fallback;
  try {
    return std::stoull(spec.substr(colon + 1));
  } catch (...) {
    throw ValidationError("bad budget in strategy spec: " + spec);
  }
}

SweepSchedule schedule_from(const Config& cfg) {
  SweepSchedule s;
  s.eps_grid = cfg.get_numbers("schedule", "eps");
  std::string rule = cfg.get_string_or("schedule", "delta_rule", "power");
  if (rule == "power") {
    s.rule = DeltaRule::Power;
    s.exponent = cfg.get_number_or("schedule", "exponent", 2.0);
  } else if (rule == "linear") {
    s.rule = DeltaRule::Linear;
  } else if (rule == "independent") {
    s.rule = DeltaRule::Independent;
    s.delta_grid = cfg.get_numbers("schedule", "delta");
  } else {
    throw ValidationError("unknown delta_rule: " + rule);
  }
  try {
    s.validate();
  } catch (const std::exception& e) {
    throw ValidationError(std::string("invalid schedule: ") + e.what());
  }
  return s;
}

json verdict_from(const UniformVerdict& v) {
  json j;
  j["pass"] = v.pass;
  j["gain1"] = v.gain1;
  j["gain2"] = v.gain2;
  j["available"] = v.available;
  j["trailing_max1"] = v.trailing_max1;
  j["trailing_max2"] = v.trailing_max2;
  j["window"] = v.window;
  j["tol"] = v.tol;
  j["effective_tol"] = v.effective_tol;
  j["max_stderr"] = v.max_stderr;
  j["deviations_1"] = v.dev_labels_1;
  j["deviations_2"] = v.dev_labels_2;
  j["warnings"] = v.warnings;
  return j;
}

std::pair<double, double> profile_value(const Bimatrix& bm,
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

std::vector<MeteredStrategy> strategies_from(const Config& cfg,
                                             const std::string& section,
                                             const std::string& key) {
  std::vector<MeteredStrategy> out;
  for (const auto& spec : cfg.get_strings(section, key))
    out.push_back(make_strategy(spec));
  return out;
}

StrategyLibrary library_from(const Config& cfg, const std::string& key) {
  StrategyLibrary lib;
  if (!cfg.has("solve", key))
    throw ValidationError("missing [solve]." + key + " library");
  for (const auto& spec : cfg.get_strings("solve", key)) {
    try {
      lib.add(make_strategy(spec));
    } catch (const std::invalid_argument& e) {
      throw ValidationError(e.what());
    }
  }
  if (lib.size() == 0) throw ValidationError("[solve]." + key + " is empty");
  return lib;
}

}  // namespace

MeteredStrategy make_strategy(const std::string& spec) {
  auto colon = spec.find(':');
  std::string head = spec.substr(0, colon);
  if (head == "alice_const2") return alice_const2();
  if (head == "alice_random") return alice_random();
  if (head == "alice_fixed") {
    if (colon == std::string::npos)
      throw ValidationError("alice_fixed needs a bit count");
    return alice_fixed_length(std::stoi(spec.substr(colon + 1)));
  }
  if (head == "bob_halt") return bob_halt();
  if (head == "spin") return load_vm_strategy("loop:\njmp loop\n", "spin");
  if (head == "trial_division")
    return bob_trial_division(spec_budget(spec, colon, 1ull << 24));
  if (head == "pollard_rho")
    return bob_pollard_rho(spec_budget(spec, colon, 1ull << 40));
  if (head == "emit_ones") {
    if (colon == std::string::npos)
      throw ValidationError("emit_ones needs a count");
    int k = std::stoi(spec.substr(colon + 1));
    if (k < 0 || k > 100000)
      throw ValidationError("emit_ones count out of range");
    return emit_bits_program(std::string(k, '1'), spec);
  }
  if (head == "const_int") {
    if (colon == std::string::npos)
      throw ValidationError("const_int needs a value");
    mpz_class v(spec.substr(colon + 1));
    if (v < 0) throw ValidationError("const_int value must be >= 0");
    return emit_bits_program(encode_integer_bits(v), spec);
  }
  if (head == "asm") {
    if (colon == std::string::npos)
      throw ValidationError("asm needs a file path");
    std::string path = spec.substr(colon + 1);
    try {
      return load_vm_strategy(read_file(path), fs::path(path).stem().string());
    } catch (const ProgramError& e) {
      throw ValidationError(std::string("bad program ") + path + ": " +
                            e.what());
    } catch (const RunFailure& e) {
      throw ValidationError(e.what());
    }
  }
  throw ValidationError("unknown strategy spec: " + spec);
}

std::unique_ptr<GameSpec> make_game(const Config& cfg) {
  std::string id = cfg.get_string("game", "id");
  if (id == "factoring") return std::make_unique<FactoringGame>();
  if (id == "largest-integer") return std::make_unique<LargestIntegerGame>();
  if (id == "exponential") return std::make_unique<ExponentialGame>();
  if (id == "bimatrix") {
    std::string file = cfg.get_string("game", "file");
    try {
      return std::make_unique<MatrixGame>(MatrixGame::parse(read_file(file)));
    } catch (const GameConfigError& e) {
      throw ValidationError(std::string("bad bimatrix file: ") + e.what());
    }
  }
  throw ValidationError("unknown game id: " + id);
}

namespace {

void write_manifest(OutputWriter& w, const Config& cfg,
                    const std::string& kind, std::uint64_t seed,
                    std::uint64_t samples, const std::string& started,
                    bool complete) {
  json m;
  m["tool_version"] = kToolVersion;
  m["kind"] = kind;
  m["seed"] = seed;
  m["samples"] = samples;
  m["config"] = "config.toml";
  m["config_hash"] = fnv1a64_hex(cfg.text());
  m["started"] = started;
  m["finished"] = complete ? timestamp_now() : "";
  m["complete"] = complete;
  json files = json::object();
  for (const auto& [name, sum] : w.checksums)
    if (name != "manifest.json") files[name] = sum;
  m["files"] = files;
  m["schema"] = {
      {"trajectory.csv",
       "one row per grid point: eps, delta, u1, u1_stderr, u2, u2_stderr, "
       "gain1, gain2 (gains are per-player max deviation gains, 0 when no "
       "deviation set applies)"},
      {"bimatrix.txt",
       "header 'm n', then m*n lines 'i j u1 u2', then a profile: section "
       "with mixed strategies p and q"},
      {"verdict.json", "experiment-specific summary; numeric fields only"}};
  std::ofstream f(w.dir / "manifest.json", std::ios::binary);
  f << m.dump(2) << "\n";
}

void run_kind(const std::string& kind, const Config& cfg, OutputWriter& w,
              std::uint64_t seed, std::uint64_t samples) {
  if (kind == "eval") {
    auto game = make_game(cfg);
    auto s1 = make_strategy(cfg.get_string("profile", "s1"));
    auto s2 = make_strategy(cfg.get_string("profile", "s2"));
    double eps = cfg.get_number("eval", "eps");
    double delta = cfg.get_number("eval", "delta");
    if (!(eps > 0 && eps < 1 && delta > 0 && delta < 1))
      throw ValidationError("[eval] rates must lie in (0,1)");
    auto K = game->bound();
    if (!K) throw RunFailure("eval: game has no payoff bound");
    auto caps = std::make_pair(truncation_cap(*K, eps),
                               truncation_cap(*K, delta));
    auto [e1, e2] =
        evaluate_profile(*game, s1, s2, eps, delta, samples, seed, caps);
    json v;
    v["eps"] = eps;
    v["delta"] = delta;
    v["u1"] = e1.mean;
    v["u1_stderr"] = e1.std_error;
    v["u2"] = e2.mean;
    v["u2_stderr"] = e2.std_error;
    v["samples"] = samples;
    v["cap1"] = caps.first;
    v["cap2"] = caps.second;
    w.write("verdict.json", v.dump(2) + "\n");
    return;
  }

  if (kind == "solve") {
    auto game = make_game(cfg);
    auto lib1 = library_from(cfg, "lib1");
    auto lib2 = library_from(cfg, "lib2");
    double eps = cfg.get_number("solve", "eps");
    double delta = cfg.get_number("solve", "delta");
    Bimatrix bm;
    try {
      bm = build_bimatrix(*game, lib1, lib2, eps, delta, samples, seed);
    } catch (const GameConfigError& e) {
      throw RunFailure(e.what());
    }
    auto prof = lemke_howson(bm);
    auto rep = regret(bm, prof);
    auto [u1, u2] = profile_value(bm, prof);
    w.write("bimatrix.txt", bm.serialize() + serialize_profile(prof));
    json v;
    v["eps"] = eps;
    v["delta"] = delta;
    v["regret1"] = rep.r1;
    v["regret2"] = rep.r2;
    v["eps_plus_delta"] = eps + delta;
    v["max_cell_stderr"] = bm.max_stderr();
    v["certified"] = rep.r1 <= eps + delta + 3 * bm.max_stderr() &&
                     rep.r2 <= eps + delta + 3 * bm.max_stderr();
    v["eq_u1"] = u1;
    v["eq_u2"] = u2;
    v["row_labels"] = bm.row_labels;
    v["col_labels"] = bm.col_labels;
    w.write("verdict.json", v.dump(2) + "\n");
    return;
  }

  if (kind == "sweep") {
    auto game = make_game(cfg);
    auto s1 = make_strategy(cfg.get_string("profile", "s1"));
    auto s2 = make_strategy(cfg.get_string("profile", "s2"));
    auto sched = schedule_from(cfg);
    PayoffTrajectory traj;
    try {
      traj = sweep_profile(*game, s1, s2, sched, samples, seed);
    } catch (const GameConfigError& e) {
      throw RunFailure(e.what());
    }
    std::size_t window =
        std::min<std::size_t>(3, traj.points.size());
    auto lim = limit_payoff(traj, window);
    w.write("trajectory.csv", trajectory_csv(traj));
    json v;
    v["limit_u1"] = lim.u1;
    v["limit_u2"] = lim.u2;
    v["slope1"] = lim.slope1;
    v["slope2"] = lim.slope2;
    v["window"] = window;
    w.write("verdict.json", v.dump(2) + "\n");
    return;
  }

  if (kind == "uniform-check") {
    auto game = make_game(cfg);
    auto s1 = make_strategy(cfg.get_string("profile", "s1"));
    auto s2 = make_strategy(cfg.get_string("profile", "s2"));
    auto sched = schedule_from(cfg);
    std::vector<MeteredStrategy> dev1, dev2;
    if (cfg.has("deviations", "dev1"))
      dev1 = strategies_from(cfg, "deviations", "dev1");
    if (cfg.has("deviations", "dev2"))
      dev2 = strategies_from(cfg, "deviations", "dev2");
    double tol = cfg.get_number_or("deviations", "tol", 0.05);
    UniformVerdict verdict;
    PayoffTrajectory traj;
    try {
      traj = sweep_profile(*game, s1, s2, sched, samples, seed);
      verdict = uniform_regret(*game, s1, s2, dev1, dev2, sched, samples,
                               seed, tol);
    } catch (const GameConfigError& e) {
      throw RunFailure(e.what());
    }
    w.write("trajectory.csv", trajectory_csv(traj, &verdict));
    w.write("verdict.json", verdict_from(verdict).dump(2) + "\n");
    return;
  }

  if (kind == "factoring-demo") {
    FactoringGame game;
    SweepSchedule sched;
    if (cfg.has("schedule", "eps")) {
      sched = schedule_from(cfg);
    } else {
      sched.eps_grid = {0.1, 0.05, 0.02};
      sched.rule = DeltaRule::Power;
      sched.exponent = 2.0;
    }
    auto hard_traj = sweep_profile(game, alice_random(), bob_halt(), sched,
                                   samples, seed);
    auto easy_traj =
        sweep_profile(game, alice_const2(), bob_pollard_rho(1ull << 40),
                      sched, samples, mix_seed(seed, 1));
    std::size_t window = std::min<std::size_t>(3, sched.eps_grid.size());
    auto hard_lim = limit_payoff(hard_traj, window);
    auto easy_lim = limit_payoff(easy_traj, window);
    w.write("trajectory.csv", trajectory_csv(hard_traj));
    json v;
    v["hard_limit_u1"] = hard_lim.u1;
    v["hard_limit_u2"] = hard_lim.u2;
    v["easy_limit_u1"] = easy_lim.u1;
    v["easy_limit_u2"] = easy_lim.u2;
    v["window"] = window;
    w.write("verdict.json", v.dump(2) + "\n");
    return;
  }

  if (kind == "largest-integer-demo") {
    LargestIntegerGame game;
    SweepSchedule sched;
    if (cfg.has("schedule", "eps")) {
      sched = schedule_from(cfg);
    } else {
      sched.eps_grid = {0.3, 0.1, 0.03, 0.01};
      sched.rule = DeltaRule::Linear;
    }
    int max_k =
        static_cast<int>(cfg.get_number_or("experiment", "escalation_max", 10));
    StrategyLibrary lib1, lib2;
    for (int k = 0; k <= max_k; ++k) {
      lib1.add(make_strategy("emit_ones:" + std::to_string(4 * k)));
      lib2.add(make_strategy("emit_ones:" + std::to_string(4 * k)));
    }
    std::ostringstream csv;
    csv.precision(17);
    csv << "eps,delta,u1,u1_stderr,u2,u2_stderr,gain1,gain2\n";
    json points = json::array();
    bool monotone = true;
    double prev1 = 1e300, prev2 = 1e300;
    std::string last_bimatrix;
    for (std::size_t i = 0; i < sched.eps_grid.size(); ++i) {
      double eps = sched.eps_grid[i];
      double delta = sched.delta_at(i);
      auto bm = build_bimatrix(game, lib1, lib2, eps, delta, samples,
                               mix_seed(seed, i));
      auto prof = lemke_howson(bm);
      auto rep = regret(bm, prof);
      auto [u1, u2] = profile_value(bm, prof);
      if (u1 > prev1 + 1e-9 || u2 > prev2 + 1e-9) monotone = false;
      prev1 = u1;
      prev2 = u2;
      csv << eps << "," << delta << "," << u1 << ",0," << u2 << ",0,"
          << rep.r1 << "," << rep.r2 << "\n";
      json pt;
      pt["eps"] = eps;
      pt["delta"] = delta;
      pt["eq_u1"] = u1;
      pt["eq_u2"] = u2;
      pt["regret1"] = rep.r1;
      pt["regret2"] = rep.r2;
      pt["eps_plus_delta"] = eps + delta;
      points.push_back(pt);
      last_bimatrix = bm.serialize() + serialize_profile(prof);
    }
    w.write("bimatrix.txt", last_bimatrix);
    w.write("trajectory.csv", csv.str());
    json v;
    v["points"] = points;
    v["monotone_nonincreasing"] = monotone;
    w.write("verdict.json", v.dump(2) + "\n");
    return;
  }

  throw ValidationError("unknown experiment kind: " + kind);
}

}  // namespace

void run_experiment(const std::string& config_path, const Overrides& o) {
  Config raw;
  try {
    raw = Config::parse_file(config_path);
  } catch (const ConfigError& e) {
    throw ValidationError(e.what());
  }

  std::string kind;
  std::uint64_t cfg_seed, cfg_samples, seed, samples;
  std::string out;
  try {
    kind = raw.get_string("experiment", "kind");
    cfg_seed = static_cast<std::uint64_t>(
        raw.get_number_or("experiment", "seed", 1));
    cfg_samples = static_cast<std::uint64_t>(
        raw.get_number_or("experiment", "samples", 100));
    seed = o.seed.value_or(cfg_seed);
    samples = o.samples.value_or(cfg_samples);
    out = o.out ? *o.out : raw.get_string("experiment", "out");
  } catch (const ConfigError& e) {
    throw ValidationError(e.what());
  }
  if (samples == 0) throw ValidationError("samples must be positive");

  // bake effective overrides into the stored config so a later replay of
  // config.toml reproduces this run without any flags; skipped when nothing
  // changed so replaying is idempotent
  Config cfg = raw;
  if (seed != cfg_seed || samples != cfg_samples) {
    std::ostringstream eff;
    eff << raw.text() << "\n[experiment]\nseed = " << seed
        << "\nsamples = " << samples << "\n";
    cfg = Config::parse(eff.str());
  }

  OutputWriter w;
  w.dir = out;
  std::error_code ec;
  fs::create_directories(w.dir, ec);
  if (ec) throw RunFailure("cannot create output directory: " + out);

  std::string started = timestamp_now();
  w.write("config.toml", cfg.text());
  write_manifest(w, cfg, kind, seed, samples, started, false);
  try {
    run_kind(kind, cfg, w, seed, samples);
  } catch (const ConfigError& e) {
    write_manifest(w, cfg, kind, seed, samples, started, false);
    throw ValidationError(e.what());
  } catch (const ValidationError&) {
    write_manifest(w, cfg, kind, seed, samples, started, false);
    throw;
  } catch (const std::exception& e) {
    write_manifest(w, cfg, kind, seed, samples, started, false);
    throw RunFailure(e.what());
  }
  write_manifest(w, cfg, kind, seed, samples, started, true);
}

bool replay_manifest(const std::string& manifest_path, std::string& report) {
  std::ostringstream rep;
  json m;
  try {
    m = json::parse(read_file(manifest_path));
  } catch (const std::exception& e) {
    throw ValidationError(std::string("cannot parse manifest: ") + e.what());
  }
  fs::path dir = fs::path(manifest_path).parent_path();
  fs::path config = dir / m.value("config", "config.toml");
  if (!fs::exists(config)) {
    report = "missing config file: " + config.string() + "\n";
    return false;
  }
  fs::path scratch = dir / "replay-check";
  Overrides o;
  o.out = scratch.string();
  run_experiment(config.string(), o);

  bool all_ok = true;
  for (const auto& [name, sum] : m.at("files").items()) {
    fs::path replayed = scratch / name;
    if (!fs::exists(replayed)) {
      rep << name << ": missing\n";
      all_ok = false;
      continue;
    }
    std::string got = fnv1a64_hex(read_file(replayed));
    if (got == sum.get<std::string>()) {
      rep << name << ": identical\n";
    } else {
      rep << name << ": diverged (" << sum.get<std::string>() << " -> " << got
          << ")\n";
      all_ok = false;
    }
  }
  report = rep.str();
  return all_ok;
}

}  // namespace dgame::cli
