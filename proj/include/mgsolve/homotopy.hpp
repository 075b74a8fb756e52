#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mgsolve/game.hpp"
#include "mgsolve/players.hpp"

namespace mgsolve {

enum class SegmentKind { kGlobalSlow, kLocalFast };
const char* SegmentKindName(SegmentKind kind);
SegmentKind ParseSegmentKind(const std::string& name);

// Iterations are numbered 1..T; start and end are inclusive.
struct Segment {
  SegmentKind kind = SegmentKind::kGlobalSlow;
  int k = 1;
  long start = 1;
  long end = 1;
  long length() const { return end - start + 1; }
};

struct Schedule {
  std::vector<Segment> segments;
  double global_base = 2.0;  // u
  double local_base = 4.0;   // v
  long total = 0;            // T
};

// ceil(base^k), evaluated in extended precision.
long SegmentLength(double base, int k);

// Alternates GlobalSlow_k (ceil(u^k) iterations) and LocalFast_k (ceil(v^k))
// for k = 1, 2, ..., truncating the last segment at T. Requires T >= 1 and
// v > u > 1.
Schedule BuildSchedule(long total, double global_base, double local_base);

// One segment covering all T iterations.
Schedule SingleSegmentSchedule(long total, SegmentKind kind);

struct LogEntry {
  long t = 0;
  SegmentKind kind = SegmentKind::kGlobalSlow;
  int k = 0;
  std::optional<double> nash_gap;  // clamped at zero
  double wall_ms = 0.0;
};

// Policy hashes at a segment's hand-off points.
struct SegmentRecord {
  Segment segment;
  std::uint64_t initial_min = 0, initial_max = 0;
  std::uint64_t output_min = 0, output_max = 0;
};

struct RunLog {
  std::vector<LogEntry> entries;
  std::vector<SegmentRecord> segments;
  std::map<std::string, std::string> metadata;
};

// CSV with header t,segment_kind,k,nash_gap,wall_ms; nash_gap is empty when
// not evaluated. Doubles are printed with round-trip precision.
std::string RunLogToCsv(const RunLog& log);
// Throws InvalidArgument on malformed input.
std::vector<LogEntry> ParseRunLogCsv(const std::string& text);

enum class Execution {
  kSequential,
  // Each player advances on its own thread; the iteration-t marginals are
  // computed before either advances.
  kBarrier,
};

struct IterationView {
  long t;
  const Segment& segment;
  const JointPolicy& played;
};

struct RunOptions {
  long gap_every = 100;      // 0 disables periodic evaluation
  bool gap_at_boundaries = true;
  bool record_timing = true;  // wall_ms is written as 0 when off
  Execution execution = Execution::kSequential;
  std::function<void(const IterationView&)> on_iteration;
};

struct RunResult {
  JointPolicy final_policy;   // last played joint policy
  JointPolicy segment_output;  // output of the final segment
  RunLog log;
};

struct HomotopyConfig {
  double eta = 0.1;        // Local-Fast stepsize
  double eta_prime = 0.1;  // Global-Slow stepsize
  // Clamp both stepsizes to the ceilings from the convergence theory.
  bool strict_theory = false;
  LearnerFactory global_slow = AveragingOgdaFactory();
  LearnerFactory local_fast = OgdaFactory();
};

// Runs the switching scheme: GlobalSlow_k starts from the last played policy
// of LocalFast_{k-1} (z0 for k = 1), LocalFast_k starts from the segment
// output of GlobalSlow_k. Errors from a learner are rethrown with the
// iteration, side and segment attached.
RunResult RunHomotopy(const MarkovGame& game, const JointPolicy& initial, const Schedule& schedule,
                      const HomotopyConfig& config, const RunOptions& options = {});

// Overrides the players entirely, e.g. to freeze one side.
struct PlayerFactories {
  LearnerFactory min_global_slow, max_global_slow;
  LearnerFactory min_local_fast, max_local_fast;
};
RunResult RunHomotopyWith(const MarkovGame& game, const JointPolicy& initial,
                          const Schedule& schedule, double eta, double eta_prime,
                          const PlayerFactories& players, const RunOptions& options = {});

// One algorithm for all T iterations.
RunResult RunSingleAlgorithm(const MarkovGame& game, const JointPolicy& initial, double stepsize,
                             long total, const LearnerFactory& algorithm, SegmentKind label,
                             const RunOptions& options = {});

struct RationalityTrace {
  std::vector<double> suboptimality;  // per iteration, index t - 1
};

// One player is frozen at `frozen`; the other runs the switching scheme.
// Records max_s |V^{x^t}(s) - V^dagger(s)| in the fixed MDP induced by the
// frozen opponent.
RationalityTrace RationalityRun(const MarkovGame& game, const Policy& frozen,
                                const Policy& learner_initial, const Schedule& schedule,
                                const HomotopyConfig& config);

}  // namespace mgsolve
