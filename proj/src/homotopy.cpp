#include "mgsolve/homotopy.hpp"

#include <barrier>
#include <chrono>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <sstream>
#include <thread>

#include "mgsolve/analytics.hpp"

namespace mgsolve {

namespace {

constexpr double kGapFloor = -1e-8;

// Two worker threads, one per player. Each iteration the driver publishes
// both observations and releases the workers through a barrier, then waits
// for both updates at a second barrier.
class PlayerThreads {
 public:
  PlayerThreads() : sync_(3) {
    for (int i = 0; i < 2; ++i) {
      workers_[i] = std::jthread([this, i] { Work(i); });
    }
  }
  ~PlayerThreads() {
    stop_ = true;
    sync_.arrive_and_wait();
  }

  void Step(Learner& min_player, const MarginalMDP& min_obs, Learner& max_player,
            const MarginalMDP& max_obs) {
    learners_[0] = &min_player;
    learners_[1] = &max_player;
    obs_[0] = &min_obs;
    obs_[1] = &max_obs;
    sync_.arrive_and_wait();
    sync_.arrive_and_wait();
    for (auto& err : errors_) {
      if (err) std::rethrow_exception(std::exchange(err, nullptr));
    }
  }

 private:
  void Work(int i) {
    while (true) {
      sync_.arrive_and_wait();
      if (stop_) return;
      try {
        learners_[i]->ObserveAndUpdate(*obs_[i]);
      } catch (...) {
        errors_[i] = std::current_exception();
      }
      sync_.arrive_and_wait();
    }
  }

  std::barrier<> sync_;
  bool stop_ = false;
  Learner* learners_[2] = {nullptr, nullptr};
  const MarginalMDP* obs_[2] = {nullptr, nullptr};
  std::exception_ptr errors_[2];
  std::jthread workers_[2];
};

[[noreturn]] void RethrowWithContext(const std::string& context) {
  try {
    throw;
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(context + ": " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(context + ": " + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error(context + ": " + e.what());
  }
}

// Shortest text that reads back to the same double.
std::string FormatDouble(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void CheckSchedule(const Schedule& schedule) {
  long expected = 1;
  for (const auto& seg : schedule.segments) {
    if (seg.start != expected || seg.end < seg.start) {
      throw InvalidArgument("schedule: segments do not tile [1:T]");
    }
    expected = seg.end + 1;
  }
  if (expected != schedule.total + 1) throw InvalidArgument("schedule: segments do not cover T");
}

}  // namespace

const char* SegmentKindName(SegmentKind kind) {
  return kind == SegmentKind::kGlobalSlow ? "global_slow" : "local_fast";
}

SegmentKind ParseSegmentKind(const std::string& name) {
  if (name == "global_slow") return SegmentKind::kGlobalSlow;
  if (name == "local_fast") return SegmentKind::kLocalFast;
  throw InvalidArgument("unknown segment kind \"" + name + "\"");
}

long SegmentLength(double base, int k) {
  long double power = std::pow(static_cast<long double>(base), static_cast<long double>(k));
  const long double nearest = std::round(power);
  // Integral powers (e.g. 2^k, 4^k) must not be bumped up by rounding noise.
  if (std::abs(power - nearest) <= 1e-12L * nearest) power = nearest;
  return static_cast<long>(std::ceil(power));
}

Schedule BuildSchedule(long total, double global_base, double local_base) {
  if (total < 1) throw InvalidArgument("schedule: T must be >= 1");
  if (!(global_base > 1.0)) throw InvalidArgument("schedule: global base u must exceed 1");
  if (!(local_base > global_base)) {
    throw InvalidArgument("schedule: local base v must exceed global base u");
  }
  Schedule schedule;
  schedule.global_base = global_base;
  schedule.local_base = local_base;
  schedule.total = total;
  long last_end = 0;
  for (int k = 1; last_end < total; ++k) {
    for (SegmentKind kind : {SegmentKind::kGlobalSlow, SegmentKind::kLocalFast}) {
      if (last_end >= total) break;
      const double base = kind == SegmentKind::kGlobalSlow ? global_base : local_base;
      const long length = SegmentLength(base, k);
      const long start = last_end + 1;
      const long end = std::min(start + length - 1, total);
      schedule.segments.push_back({kind, k, start, end});
      last_end = end;
    }
  }
  return schedule;
}

Schedule SingleSegmentSchedule(long total, SegmentKind kind) {
  if (total < 1) throw InvalidArgument("schedule: T must be >= 1");
  Schedule schedule;
  schedule.total = total;
  schedule.segments.push_back({kind, 1, 1, total});
  return schedule;
}

std::string RunLogToCsv(const RunLog& log) {
  std::ostringstream os;
  os << "t,segment_kind,k,nash_gap,wall_ms\n";
  char wall[64];
  for (const auto& e : log.entries) {
    std::snprintf(wall, sizeof(wall), "%.3f", e.wall_ms);
    os << e.t << ',' << SegmentKindName(e.kind) << ',' << e.k << ','
       << (e.nash_gap ? FormatDouble(*e.nash_gap) : std::string()) << ',' << wall << '\n';
  }
  return os.str();
}

std::vector<LogEntry> ParseRunLogCsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "t,segment_kind,k,nash_gap,wall_ms") {
    throw InvalidArgument("run log: missing or unexpected header");
  }
  std::vector<LogEntry> entries;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream row(line);
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    if (fields.size() != 5) {
      throw InvalidArgument("run log: line " + std::to_string(line_no) + " has " +
                            std::to_string(fields.size()) + " fields");
    }
    try {
      LogEntry e;
      e.t = std::stol(fields[0]);
      e.kind = ParseSegmentKind(fields[1]);
      e.k = std::stoi(fields[2]);
      if (!fields[3].empty()) e.nash_gap = std::stod(fields[3]);
      e.wall_ms = std::stod(fields[4]);
      entries.push_back(e);
    } catch (const std::logic_error&) {
      throw InvalidArgument("run log: line " + std::to_string(line_no) + " is malformed");
    }
  }
  return entries;
}

RunResult RunHomotopyWith(const MarkovGame& game, const JointPolicy& initial,
                          const Schedule& schedule, double eta, double eta_prime,
                          const PlayerFactories& players, const RunOptions& options) {
  CheckJointPolicyFor(game, initial);
  CheckSchedule(schedule);

  auto min_gs = players.min_global_slow(Side::kMin);
  auto max_gs = players.max_global_slow(Side::kMax);
  auto min_lf = players.min_local_fast(Side::kMin);
  auto max_lf = players.max_local_fast(Side::kMax);
  std::optional<PlayerThreads> threads;
  if (options.execution == Execution::kBarrier) threads.emplace();

  RunResult result;
  result.final_policy = initial;
  JointPolicy carry = initial;
  const auto clock_start = std::chrono::steady_clock::now();

  for (const Segment& seg : schedule.segments) {
    const bool global = seg.kind == SegmentKind::kGlobalSlow;
    Learner& min_player = global ? *min_gs : *min_lf;
    Learner& max_player = global ? *max_gs : *max_lf;
    const double step = global ? eta_prime : eta;
    const std::string seg_name =
        std::string(SegmentKindName(seg.kind)) + " segment k=" + std::to_string(seg.k);

    try {
      min_player.BeginSegment(carry.min_policy, step);
      max_player.BeginSegment(carry.max_policy, step);
    } catch (...) {
      RethrowWithContext("t=" + std::to_string(seg.start) + ", " + seg_name);
    }
    SegmentRecord record{seg, PolicyHash(min_player.current_policy()),
                         PolicyHash(max_player.current_policy())};

    for (long t = seg.start; t <= seg.end; ++t) {
      JointPolicy& played = result.final_policy;
      played.min_policy = min_player.current_policy();
      played.max_policy = max_player.current_policy();
      if (options.on_iteration) options.on_iteration({t, seg, played});

      const bool periodic = options.gap_every > 0 && t % options.gap_every == 0;
      const bool boundary = options.gap_at_boundaries && (t == seg.start || t == seg.end);
      if (periodic || boundary) {
        LogEntry entry{t, seg.kind, seg.k, std::nullopt, 0.0};
        double gap = NashGap(game, played);
        if (gap < kGapFloor) {
          throw NumericalError("t=" + std::to_string(t) + ": Nash gap " + FormatDouble(gap) +
                               " is negative beyond tolerance");
        }
        entry.nash_gap = std::max(gap, 0.0);
        if (options.record_timing) {
          entry.wall_ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - clock_start)
                              .count();
        }
        result.log.entries.push_back(entry);
      }

      const MarginalMDP min_obs = Marginalize(game, played.max_policy, Side::kMin);
      const MarginalMDP max_obs = Marginalize(game, played.min_policy, Side::kMax);
      if (threads) {
        try {
          threads->Step(min_player, min_obs, max_player, max_obs);
        } catch (...) {
          RethrowWithContext("t=" + std::to_string(t) + ", " + seg_name);
        }
      } else {
        for (auto [learner, obs] : {std::pair{&min_player, &min_obs}, std::pair{&max_player, &max_obs}}) {
          try {
            learner->ObserveAndUpdate(*obs);
          } catch (...) {
            RethrowWithContext("t=" + std::to_string(t) + ", " + SideName(learner->side()) +
                               " side, " + seg_name);
          }
        }
      }
    }

    carry.min_policy = min_player.SegmentOutput();
    carry.max_policy = max_player.SegmentOutput();
    record.output_min = PolicyHash(carry.min_policy);
    record.output_max = PolicyHash(carry.max_policy);
    result.log.segments.push_back(record);
  }
  result.segment_output = carry;

  auto& meta = result.log.metadata;
  meta["eta"] = FormatDouble(eta);
  meta["eta_prime"] = FormatDouble(eta_prime);
  meta["schedule_u"] = FormatDouble(schedule.global_base);
  meta["schedule_v"] = FormatDouble(schedule.local_base);
  meta["T"] = std::to_string(schedule.total);
  meta["game_hash"] = std::to_string(GameHash(game));
  return result;
}

RunResult RunHomotopy(const MarkovGame& game, const JointPolicy& initial, const Schedule& schedule,
                      const HomotopyConfig& config, const RunOptions& options) {
  double eta = config.eta, eta_prime = config.eta_prime;
  if (config.strict_theory) {
    eta = std::min(eta, TheoreticalLocalStepsize(game.num_states, game.num_actions_min,
                                                 game.num_actions_max, game.gamma));
    eta_prime = std::min(
        eta_prime, TheoreticalGlobalStepsize(game.num_actions_min, game.num_actions_max, game.gamma));
  }
  PlayerFactories players{config.global_slow, config.global_slow, config.local_fast,
                          config.local_fast};
  return RunHomotopyWith(game, initial, schedule, eta, eta_prime, players, options);
}

RunResult RunSingleAlgorithm(const MarkovGame& game, const JointPolicy& initial, double stepsize,
                             long total, const LearnerFactory& algorithm, SegmentKind label,
                             const RunOptions& options) {
  PlayerFactories players{algorithm, algorithm, algorithm, algorithm};
  return RunHomotopyWith(game, initial, SingleSegmentSchedule(total, label), stepsize, stepsize,
                         players, options);
}

RationalityTrace RationalityRun(const MarkovGame& game, const Policy& frozen,
                                const Policy& learner_initial, const Schedule& schedule,
                                const HomotopyConfig& config) {
  const Side learner_side = Opponent(frozen.side());
  if (learner_initial.side() != learner_side) {
    throw InvalidArgument("RationalityRun: learner policy must belong to the non-frozen side");
  }
  const MarginalMDP mdp = Marginalize(game, frozen, learner_side);
  const ValueVector optimal = MdpBestResponse(mdp, SenseOf(learner_side)).values;

  LearnerFactory freeze = [&frozen](Side) { return std::make_unique<FrozenLearner>(frozen); };
  PlayerFactories players;
  if (learner_side == Side::kMin) {
    players = {config.global_slow, freeze, config.local_fast, freeze};
  } else {
    players = {freeze, config.global_slow, freeze, config.local_fast};
  }
  JointPolicy initial;
  initial.of(learner_side) = learner_initial;
  initial.of(frozen.side()) = frozen;

  RationalityTrace trace;
  trace.suboptimality.reserve(schedule.total);
  RunOptions options;
  options.gap_every = 0;
  options.gap_at_boundaries = false;
  options.record_timing = false;
  options.on_iteration = [&](const IterationView& view) {
    const ValueVector values = MdpPolicyValue(mdp, view.played.of(learner_side));
    double worst = 0.0;
    for (std::size_t s = 0; s < values.size(); ++s) {
      worst = std::max(worst, std::abs(values[s] - optimal[s]));
    }
    trace.suboptimality.push_back(worst);
  };
  RunHomotopyWith(game, initial, schedule, config.eta, config.eta_prime, players, options);
  return trace;
}

}  // namespace mgsolve
