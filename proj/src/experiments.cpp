#include "mgsolve/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "mgsolve/analytics.hpp"

namespace mgsolve {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> SplitCommas(const std::string& s) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(s);
  while (std::getline(in, part, ',')) parts.push_back(Trim(part));
  return parts;
}

double ParseDouble(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::logic_error&) {
    used = 0;
  }
  if (used == 0 || used != value.size() || !std::isfinite(v)) {
    throw InvalidArgument(key + ": expected a number, got \"" + value + "\"");
  }
  return v;
}

long ParseLong(const std::string& key, const std::string& value) {
  const double v = ParseDouble(key, value);
  if (v != std::floor(v) || std::abs(v) > 9e15) {
    throw InvalidArgument(key + ": expected an integer, got \"" + value + "\"");
  }
  return static_cast<long>(v);
}

bool ParseBool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw InvalidArgument(key + ": expected true or false, got \"" + value + "\"");
}

// Shortest text that reads back to the same double.
std::string Fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open \"" + path + "\"");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void WriteFile(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write \"" + path.string() + "\"");
  out << text;
}

void CheckConfig(const ExperimentConfig& c) {
  if (c.game_file.empty()) CheckGenSpec(c.spec);
  if (!(c.eta > 0.0) || !(c.eta_prime > 0.0)) throw InvalidArgument("stepsizes must be positive");
  if (c.total < 1) throw InvalidArgument("T must be at least 1");
  if (c.gap_every < 0) throw InvalidArgument("gap-every must be nonnegative");
  if (c.seeds.empty()) throw InvalidArgument("no seeds given");
  if (c.algo == Algorithm::kHomotopy) BuildSchedule(c.total, c.global_base, c.local_base);
}

struct RunOutcome {
  RunResult result;
  double output_gap = 0.0;
};

RunOutcome RunConfigured(const ExperimentConfig& c, Algorithm algo, const MarkovGame& game,
                         const JointPolicy& z0, RunOptions options) {
  double eta = c.eta, eta_prime = c.eta_prime;
  if (c.strict_theory) {
    eta = std::min(eta, TheoreticalLocalStepsize(game.num_states, game.num_actions_min,
                                                 game.num_actions_max, game.gamma));
    eta_prime = std::min(eta_prime, TheoreticalGlobalStepsize(game.num_actions_min,
                                                              game.num_actions_max, game.gamma));
  }
  RunOutcome out;
  const JointPolicy* output = &out.result.final_policy;
  switch (algo) {
    case Algorithm::kHomotopy: {
      HomotopyConfig hc;
      hc.eta = eta;
      hc.eta_prime = eta_prime;
      out.result = RunHomotopy(game, z0, BuildSchedule(c.total, c.global_base, c.local_base), hc,
                               options);
      break;
    }
    case Algorithm::kOgda:
      out.result = RunSingleAlgorithm(game, z0, eta, c.total, OgdaFactory(),
                                      SegmentKind::kLocalFast, options);
      break;
    case Algorithm::kAveragingOgda:
      out.result = RunSingleAlgorithm(game, z0, eta_prime, c.total, AveragingOgdaFactory(true),
                                      SegmentKind::kGlobalSlow, options);
      output = &out.result.segment_output;
      break;
    case Algorithm::kActorCritic:
      out.result = RunSingleAlgorithm(game, z0, eta, c.total, ActorCriticFactory(),
                                      SegmentKind::kGlobalSlow, options);
      break;
  }
  out.output_gap = std::max(NashGap(game, *output), 0.0);
  return out;
}

json SummaryJson(const ConvergenceSummary& s) {
  json j;
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  j["final_gap"] = opt(s.final_gap);
  j["gap_at_cutoff"] = opt(s.gap_at_cutoff);
  j["cutoff"] = s.cutoff;
  j["fit_samples"] = s.fit_samples;
  j["slope"] = opt(s.slope);
  j["intercept"] = opt(s.intercept);
  j["r_squared"] = opt(s.r_squared);
  json boundaries = json::array();
  for (auto [t, g] : s.boundary_gaps) boundaries.push_back({{"t", t}, {"gap", g}});
  j["boundary_gaps"] = boundaries;
  return j;
}

json ConfigJson(const ExperimentConfig& c) {
  json j = json::object();
  for (const auto& [k, v] : ParseConfigText(ConfigEcho(c))) j[k] = v;
  return j;
}

std::string PlotCsv(const RunLog& log) {
  std::ostringstream os;
  os << "t,segment_kind,k,nash_gap,log10_gap\n";
  for (const auto& e : log.entries) {
    if (!e.nash_gap) continue;
    os << e.t << ',' << SegmentKindName(e.kind) << ',' << e.k << ',' << Fmt(*e.nash_gap) << ','
       << (*e.nash_gap > 0.0 ? Fmt(std::log10(*e.nash_gap)) : std::string()) << '\n';
  }
  return os.str();
}

}  // namespace

const char* AlgorithmName(Algorithm algo) {
  switch (algo) {
    case Algorithm::kHomotopy: return "homotopy";
    case Algorithm::kOgda: return "ogda";
    case Algorithm::kAveragingOgda: return "avg-ogda";
    case Algorithm::kActorCritic: return "actor-critic";
  }
  return "?";
}

Algorithm ParseAlgorithm(const std::string& name) {
  for (Algorithm a : {Algorithm::kHomotopy, Algorithm::kOgda, Algorithm::kAveragingOgda,
                      Algorithm::kActorCritic}) {
    if (name == AlgorithmName(a)) return a;
  }
  throw InvalidArgument("unknown algorithm \"" + name +
                        "\" (expected homotopy, ogda, avg-ogda or actor-critic)");
}

std::vector<std::uint64_t> ParseSeedList(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  for (const auto& part : SplitCommas(text)) {
    if (part.empty()) throw InvalidArgument("seeds: empty entry in \"" + text + "\"");
    const auto dash = part.find('-', 1);
    if (dash == std::string::npos) {
      const long v = ParseLong("seeds", part);
      if (v < 0) throw InvalidArgument("seeds: negative seed");
      seeds.push_back(static_cast<std::uint64_t>(v));
    } else {
      const long lo = ParseLong("seeds", part.substr(0, dash));
      const long hi = ParseLong("seeds", part.substr(dash + 1));
      if (lo < 0 || hi < lo) throw InvalidArgument("seeds: bad range \"" + part + "\"");
      for (long s = lo; s <= hi; ++s) seeds.push_back(static_cast<std::uint64_t>(s));
    }
  }
  if (seeds.empty()) throw InvalidArgument("seeds: no seeds in \"" + text + "\"");
  return seeds;
}

void ApplySetting(ExperimentConfig& c, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = Trim(raw_key);
  const std::string value = Trim(raw_value);
  if (key == "game") {
    c.game_file = value;
  } else if (key == "spec") {
    const auto parts = SplitCommas(value);
    if (parts.size() != 4) throw InvalidArgument("spec: expected S,A,B,gamma");
    c.spec.num_states = static_cast<int>(ParseLong("spec", parts[0]));
    c.spec.num_actions_min = static_cast<int>(ParseLong("spec", parts[1]));
    c.spec.num_actions_max = static_cast<int>(ParseLong("spec", parts[2]));
    c.spec.gamma = ParseDouble("spec", parts[3]);
    CheckGenSpec(c.spec);
  } else if (key == "seed" || key == "seeds") {
    c.seeds = ParseSeedList(value);
  } else if (key == "algo") {
    c.algo = ParseAlgorithm(value);
  } else if (key == "eta") {
    c.eta = ParseDouble(key, value);
  } else if (key == "eta-prime") {
    c.eta_prime = ParseDouble(key, value);
  } else if (key == "schedule") {
    const auto parts = SplitCommas(value);
    if (parts.size() != 2) throw InvalidArgument("schedule: expected u,v");
    c.global_base = ParseDouble("schedule", parts[0]);
    c.local_base = ParseDouble("schedule", parts[1]);
    if (!(c.global_base > 1.0) || !(c.local_base > c.global_base)) {
      throw InvalidArgument("schedule: need v > u > 1");
    }
  } else if (key == "T") {
    c.total = ParseLong(key, value);
  } else if (key == "gap-every") {
    c.gap_every = ParseLong(key, value);
  } else if (key == "out") {
    c.out = value;
  } else if (key == "strict-theory") {
    c.strict_theory = ParseBool(key, value);
  } else if (key == "timing") {
    c.timing = ParseBool(key, value);
  } else if (key == "cutoff") {
    c.cutoff = ParseLong(key, value);
  } else if (key == "jobs") {
    c.jobs = static_cast<int>(ParseLong(key, value));
  } else if (key == "min-policy") {
    c.min_policy_file = value;
  } else if (key == "max-policy") {
    c.max_policy_file = value;
  } else {
    throw InvalidArgument("unknown config key \"" + key + "\"");
  }
}

std::vector<std::pair<std::string, std::string>> ParseConfigText(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument("config line " + std::to_string(line_no) + ": expected key = value");
    }
    entries.emplace_back(Trim(line.substr(0, eq)), Trim(line.substr(eq + 1)));
  }
  return entries;
}

ExperimentConfig LoadConfigFile(const std::string& path, ExperimentConfig base) {
  for (const auto& [k, v] : ParseConfigText(ReadFile(path))) ApplySetting(base, k, v);
  return base;
}

std::string ConfigEcho(const ExperimentConfig& c) {
  std::ostringstream os;
  if (!c.game_file.empty()) os << "game = " << c.game_file << '\n';
  os << "spec = " << c.spec.num_states << ',' << c.spec.num_actions_min << ','
     << c.spec.num_actions_max << ',' << Fmt(c.spec.gamma) << '\n';
  os << "seeds = ";
  for (std::size_t i = 0; i < c.seeds.size(); ++i) os << (i ? "," : "") << c.seeds[i];
  os << '\n';
  os << "algo = " << AlgorithmName(c.algo) << '\n';
  os << "eta = " << Fmt(c.eta) << '\n';
  os << "eta-prime = " << Fmt(c.eta_prime) << '\n';
  os << "schedule = " << Fmt(c.global_base) << ',' << Fmt(c.local_base) << '\n';
  os << "T = " << c.total << '\n';
  os << "gap-every = " << c.gap_every << '\n';
  os << "out = " << c.out << '\n';
  os << "strict-theory = " << (c.strict_theory ? "true" : "false") << '\n';
  os << "timing = " << (c.timing ? "true" : "false") << '\n';
  os << "cutoff = " << c.cutoff << '\n';
  os << "jobs = " << c.jobs << '\n';
  if (!c.min_policy_file.empty()) os << "min-policy = " << c.min_policy_file << '\n';
  if (!c.max_policy_file.empty()) os << "max-policy = " << c.max_policy_file << '\n';
  return os.str();
}

MarkovGame GameForSeed(const ExperimentConfig& c, std::uint64_t seed) {
  if (!c.game_file.empty()) return DeserializeGame(ReadFile(c.game_file));
  GenSpec spec = c.spec;
  spec.seed = seed;
  return RandomGame(spec);
}

JointPolicy InitialPolicyForSeed(const ExperimentConfig&, const MarkovGame& game,
                                 std::uint64_t seed) {
  return RandomPolicyPair({game.num_states, game.num_actions_min, game.num_actions_max, game.gamma,
                           seed});
}

void ParallelFor(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  std::size_t workers = jobs > 0 ? static_cast<std::size_t>(jobs)
                                 : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double Median(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("Median: no values");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

long DefaultCutoff(const Schedule& schedule) {
  long cutoff = 1;
  for (const auto& seg : schedule.segments) {
    if (seg.kind == SegmentKind::kLocalFast && seg.end <= schedule.total / 8) cutoff = seg.end;
  }
  return cutoff;
}

std::vector<GenerateResult> CmdGenerate(const ExperimentConfig& c) {
  CheckGenSpec(c.spec);
  if (c.seeds.empty()) throw InvalidArgument("no seeds given");
  fs::create_directories(c.out);
  std::vector<GenerateResult> results;
  for (std::uint64_t seed : c.seeds) {
    GenSpec spec = c.spec;
    spec.seed = seed;
    const MarkovGame game = RandomGame(spec);
    const fs::path path = fs::path(c.out) / ("game_seed" + std::to_string(seed) + ".json");
    WriteFile(path, SerializeGame(game));
    results.push_back({seed, GameHash(game), path.string()});
  }
  return results;
}

SolveReport CmdSolve(const ExperimentConfig& c) {
  CheckConfig(c);
  fs::create_directories(c.out);
  WriteFile(fs::path(c.out) / "config.txt", ConfigEcho(c));

  const Schedule schedule = c.algo == Algorithm::kHomotopy
                                ? BuildSchedule(c.total, c.global_base, c.local_base)
                                : SingleSegmentSchedule(c.total, SegmentKind::kGlobalSlow);
  SolveReport report;
  report.cutoff = c.cutoff > 0 ? c.cutoff : DefaultCutoff(schedule);
  report.runs.resize(c.seeds.size());
  ParallelFor(c.seeds.size(), c.jobs, [&](std::size_t i) {
    const std::uint64_t seed = c.seeds[i];
    const MarkovGame game = GameForSeed(c, seed);
    const JointPolicy z0 = InitialPolicyForSeed(c, game, seed);
    RunOptions options;
    options.gap_every = c.gap_every;
    options.record_timing = c.timing;
    RunOutcome outcome = RunConfigured(c, c.algo, game, z0, options);
    RunLog& log = outcome.result.log;
    log.metadata["seed"] = std::to_string(seed);
    log.metadata["algo"] = AlgorithmName(c.algo);

    SeedRun& run = report.runs[i];
    run.seed = seed;
    run.game_hash = GameHash(game);
    run.final_gap = outcome.output_gap;
    run.fit = FitLinearRate(log, report.cutoff);

    const std::string stem = "run_seed" + std::to_string(seed);
    const fs::path csv = fs::path(c.out) / (stem + ".csv");
    run.csv_path = csv.string();
    WriteFile(csv, RunLogToCsv(log));
    WriteFile(fs::path(c.out) / (stem + "_plot.csv"), PlotCsv(log));

    json meta;
    meta["seed"] = seed;
    meta["game_hash"] = std::to_string(run.game_hash);
    meta["config"] = ConfigJson(c);
    meta["metadata"] = log.metadata;
    meta["final_gap"] = run.final_gap;
    meta["summary"] = SummaryJson(run.fit);
    json segments = json::array();
    for (const auto& rec : log.segments) {
      segments.push_back({{"kind", SegmentKindName(rec.segment.kind)},
                          {"k", rec.segment.k},
                          {"start", rec.segment.start},
                          {"end", rec.segment.end},
                          {"initial_min", std::to_string(rec.initial_min)},
                          {"initial_max", std::to_string(rec.initial_max)},
                          {"output_min", std::to_string(rec.output_min)},
                          {"output_max", std::to_string(rec.output_max)}});
    }
    meta["segments"] = segments;
    WriteFile(fs::path(c.out) / (stem + ".json"), meta.dump(2) + "\n");
  });

  std::vector<double> gaps;
  for (const auto& r : report.runs) gaps.push_back(r.final_gap);
  report.median_gap = Median(gaps);
  report.min_gap = *std::min_element(gaps.begin(), gaps.end());
  report.max_gap = *std::max_element(gaps.begin(), gaps.end());

  json summary;
  summary["config"] = ConfigJson(c);
  summary["median_final_gap"] = report.median_gap;
  summary["min_final_gap"] = report.min_gap;
  summary["max_final_gap"] = report.max_gap;
  json runs = json::array();
  for (const auto& r : report.runs) {
    runs.push_back({{"seed", r.seed},
                    {"game_hash", std::to_string(r.game_hash)},
                    {"final_gap", r.final_gap},
                    {"fit", SummaryJson(r.fit)}});
  }
  summary["runs"] = runs;
  WriteFile(fs::path(c.out) / "summary.json", summary.dump(2) + "\n");
  return report;
}

double CmdEval(const ExperimentConfig& c) {
  if (c.game_file.empty()) throw InvalidArgument("eval needs --game");
  const MarkovGame game = DeserializeGame(ReadFile(c.game_file));
  JointPolicy z = UniformJointPolicy(game);
  if (!c.min_policy_file.empty()) {
    z.min_policy = DeserializePolicy(ReadFile(c.min_policy_file), Side::kMin);
  }
  if (!c.max_policy_file.empty()) {
    z.max_policy = DeserializePolicy(ReadFile(c.max_policy_file), Side::kMax);
  }
  CheckJointPolicyFor(game, z);
  return std::max(NashGap(game, z), 0.0);
}

ExperimentConfig CompareDefaults() {
  ExperimentConfig c;
  c.spec.gamma = 0.5;
  c.global_base = 2.0;
  c.local_base = 2.1;
  c.total = 50000;
  c.seeds = {1, 2, 3, 4, 5};
  c.algo = Algorithm::kActorCritic;
  return c;
}

std::string CompareToCsv(const std::vector<CompareRow>& rows) {
  std::ostringstream os;
  os << "t,gap_homotopy,gap_baseline\n";
  for (const auto& r : rows) os << r.t << ',' << Fmt(r.gap_homotopy) << ',' << Fmt(r.gap_baseline) << '\n';
  return os.str();
}

std::vector<CompareRow> ParseCompareCsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "t,gap_homotopy,gap_baseline") {
    throw InvalidArgument("compare csv: missing or unexpected header");
  }
  std::vector<CompareRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto parts = SplitCommas(line);
    if (parts.size() != 3) throw InvalidArgument("compare csv: malformed row \"" + line + "\"");
    rows.push_back({ParseLong("t", parts[0]), ParseDouble("gap_homotopy", parts[1]),
                    ParseDouble("gap_baseline", parts[2])});
  }
  return rows;
}

CompareReport CmdCompare(const ExperimentConfig& c) {
  ExperimentConfig hc = c;
  hc.algo = Algorithm::kHomotopy;
  CheckConfig(hc);
  fs::create_directories(c.out);
  WriteFile(fs::path(c.out) / "config.txt", ConfigEcho(c));

  const Schedule schedule = BuildSchedule(c.total, c.global_base, c.local_base);
  std::vector<long> times;
  for (const auto& seg : schedule.segments) times.push_back(seg.end);
  const std::set<long> time_set(times.begin(), times.end());

  // gaps[arm][seed][i] at times[i]
  std::vector<std::vector<double>> hom(c.seeds.size()), base(c.seeds.size());
  auto sample_run = [&](Algorithm algo, const MarkovGame& game, const JointPolicy& z0) {
    std::vector<double> gaps;
    gaps.reserve(times.size());
    RunOptions options;
    options.gap_every = 0;
    options.gap_at_boundaries = false;
    options.record_timing = false;
    options.on_iteration = [&](const IterationView& view) {
      if (time_set.count(view.t)) gaps.push_back(std::max(NashGap(game, view.played), 0.0));
    };
    RunConfigured(c, algo, game, z0, options);
    return gaps;
  };
  ParallelFor(c.seeds.size(), c.jobs, [&](std::size_t i) {
    const MarkovGame game = GameForSeed(c, c.seeds[i]);
    const JointPolicy z0 = InitialPolicyForSeed(c, game, c.seeds[i]);
    hom[i] = sample_run(Algorithm::kHomotopy, game, z0);
    base[i] = sample_run(c.algo, game, z0);
  });

  CompareReport report;
  std::vector<double> final_hom, final_base;
  for (std::size_t s = 0; s < c.seeds.size(); ++s) {
    final_hom.push_back(hom[s].back());
    final_base.push_back(base[s].back());
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    double h = 0.0, b = 0.0;
    for (std::size_t s = 0; s < c.seeds.size(); ++s) {
      h += hom[s][i];
      b += base[s][i];
    }
    const double n = static_cast<double>(c.seeds.size());
    report.rows.push_back({times[i], h / n, b / n});
  }
  report.median_final_homotopy = Median(final_hom);
  report.median_final_baseline = Median(final_base);

  const fs::path csv = fs::path(c.out) / "compare.csv";
  report.csv_path = csv.string();
  WriteFile(csv, CompareToCsv(report.rows));
  json summary;
  summary["config"] = ConfigJson(c);
  summary["baseline"] = AlgorithmName(c.algo);
  summary["median_final_gap_homotopy"] = report.median_final_homotopy;
  summary["median_final_gap_baseline"] = report.median_final_baseline;
  WriteFile(fs::path(c.out) / "compare_summary.json", summary.dump(2) + "\n");
  return report;
}

}  // namespace mgsolve
