#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mgsolve/homotopy.hpp"
#include "mgsolve/metrics.hpp"
#include "mgsolve/randgen.hpp"

namespace mgsolve {

enum class Algorithm { kHomotopy, kOgda, kAveragingOgda, kActorCritic };
const char* AlgorithmName(Algorithm algo);
Algorithm ParseAlgorithm(const std::string& name);

// Every field has a key in the flat config format; see ApplySetting.
struct ExperimentConfig {
  std::string game_file;  // empty: generate from spec and seed
  GenSpec spec;
  Algorithm algo = Algorithm::kHomotopy;
  double eta = 0.1;
  double eta_prime = 0.1;
  double global_base = 2.0;
  double local_base = 4.0;
  long total = 200000;
  std::vector<std::uint64_t> seeds = {1};
  long gap_every = 100;
  std::string out = ".";
  bool strict_theory = false;
  bool timing = false;  // wall_ms stays 0 so reruns are byte-identical
  long cutoff = 0;      // rate-fit cutoff; 0 picks a segment end near T/8
  int jobs = 0;         // worker threads; 0 uses the hardware count
  std::string min_policy_file, max_policy_file;
};

// Keys: game, spec (S,A,B,gamma), seed, seeds (list, ranges a-b allowed),
// algo, eta, eta-prime, schedule (u,v), T, gap-every, out, strict-theory,
// timing, cutoff, jobs, min-policy, max-policy. Throws InvalidArgument.
void ApplySetting(ExperimentConfig& config, const std::string& key, const std::string& value);

// "key = value" lines; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> ParseConfigText(const std::string& text);
ExperimentConfig LoadConfigFile(const std::string& path, ExperimentConfig base = {});

// key=value text that reproduces the config through ParseConfigText.
std::string ConfigEcho(const ExperimentConfig& config);

std::vector<std::uint64_t> ParseSeedList(const std::string& text);

// Game and initial policies used for one seed.
MarkovGame GameForSeed(const ExperimentConfig& config, std::uint64_t seed);
JointPolicy InitialPolicyForSeed(const ExperimentConfig& config, const MarkovGame& game,
                                 std::uint64_t seed);

// Runs fn(i) for i in [0, n) on up to `jobs` threads.
void ParallelFor(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

struct GenerateResult {
  std::uint64_t seed;
  std::uint64_t hash;
  std::string path;
};
std::vector<GenerateResult> CmdGenerate(const ExperimentConfig& config);

struct SeedRun {
  std::uint64_t seed = 0;
  std::uint64_t game_hash = 0;
  double final_gap = 0.0;   // gap of the policy the algorithm outputs
  ConvergenceSummary fit;
  std::string csv_path;
};
struct SolveReport {
  std::vector<SeedRun> runs;  // in seed order
  double median_gap = 0.0, min_gap = 0.0, max_gap = 0.0;
  long cutoff = 0;
};
SolveReport CmdSolve(const ExperimentConfig& config);

double CmdEval(const ExperimentConfig& config);

struct CompareRow {
  long t;
  double gap_homotopy;
  double gap_baseline;
};
struct CompareReport {
  std::vector<CompareRow> rows;
  double median_final_homotopy = 0.0;
  double median_final_baseline = 0.0;
  std::string csv_path;
};
// Homotopy against the algorithm named by config.algo (the baseline arm),
// both sampled at the homotopy segment ends and averaged over seeds.
CompareReport CmdCompare(const ExperimentConfig& config);
// Defaults for the comparison: gamma 0.5, schedule (2, 2.1), T = 5e4,
// seeds 1-5, actor-critic baseline.
ExperimentConfig CompareDefaults();

std::string CompareToCsv(const std::vector<CompareRow>& rows);
std::vector<CompareRow> ParseCompareCsv(const std::string& text);

double Median(std::vector<double> values);
// Segment end of the last LocalFast call finishing at or before T / 8.
long DefaultCutoff(const Schedule& schedule);

}  // namespace mgsolve
