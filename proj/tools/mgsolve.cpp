// mgsolve: generate games, run solvers, evaluate policies, compare algorithms.
//
// Exit codes: 0 success, 2 usage or config error, 3 numerical failure.

#include <cstdio>
#include <deque>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "mgsolve/experiments.hpp"

namespace {

using mgsolve::ExperimentConfig;

constexpr int kUsageError = 2;
constexpr int kNumericalError = 3;

// Raw flag values, applied on top of the config file in this order.
struct Flags {
  std::string config_file;
  std::vector<std::pair<std::string, std::string>> values;
  std::deque<std::string> storage;
};

void AddFlag(CLI::App* cmd, Flags& flags, const std::string& key, const std::string& help) {
  cmd->add_option("--" + key, flags.storage.emplace_back(), help)
      ->each([&flags, key](const std::string& v) { flags.values.emplace_back(key, v); });
}

ExperimentConfig Resolve(const Flags& flags, ExperimentConfig base) {
  if (!flags.config_file.empty()) base = mgsolve::LoadConfigFile(flags.config_file, base);
  for (const auto& [k, v] : flags.values) mgsolve::ApplySetting(base, k, v);
  return base;
}

void PrintSummary(const mgsolve::SolveReport& report) {
  std::printf("seed,game_hash,final_gap,slope,r_squared\n");
  for (const auto& run : report.runs) {
    std::printf("%llu,%llu,%.12g,", static_cast<unsigned long long>(run.seed),
                static_cast<unsigned long long>(run.game_hash), run.final_gap);
    if (run.fit.slope) {
      std::printf("%.6g,%.6g\n", *run.fit.slope, *run.fit.r_squared);
    } else {
      std::printf(",\n");
    }
  }
  std::printf("median_final_gap=%.12g min=%.12g max=%.12g cutoff=%ld\n", report.median_gap,
              report.min_gap, report.max_gap, report.cutoff);
  if (!report.runs.empty()) {
    for (const auto& [t, gap] : report.runs.front().fit.boundary_gaps) {
      if (t == report.cutoff) std::printf("cutoff_row t=%ld gap=%.12g\n", t, gap);
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nash equilibria of two-player zero-sum Markov games"};
  app.require_subcommand(1);

  Flags flags;
  const std::vector<std::pair<std::string, std::string>> common = {
      {"game", "game file (JSON)"},
      {"spec", "generator spec S,A,B,gamma"},
      {"seed", "single seed"},
      {"seeds", "seed list, e.g. 1,2,5-9"},
      {"eta", "Local-Fast stepsize"},
      {"eta-prime", "Global-Slow stepsize"},
      {"schedule", "growth bases u,v"},
      {"T", "total iterations"},
      {"algo", "homotopy | ogda | avg-ogda | actor-critic"},
      {"gap-every", "Nash gap cadence (0: boundaries only)"},
      {"out", "output directory"},
      {"cutoff", "rate-fit cutoff iteration"},
      {"jobs", "worker threads for the seed fan-out"},
      {"strict-theory", "clamp stepsizes to the theoretical ceilings (true/false)"},
      {"timing", "record wall-clock time in run logs (true/false)"},
      {"min-policy", "min-player policy file (eval)"},
      {"max-policy", "max-player policy file (eval)"},
  };
  std::vector<CLI::App*> commands = {
      app.add_subcommand("generate", "write random games, one file per seed"),
      app.add_subcommand("solve", "run an algorithm and log Nash gaps"),
      app.add_subcommand("eval", "print the Nash gap of a policy pair"),
      app.add_subcommand("compare", "Homotopy-PO against a baseline across seeds"),
  };
  for (auto* cmd : commands) {
    cmd->add_option("--config", flags.config_file, "flat key = value config file");
    for (const auto& [key, help] : common) AddFlag(cmd, flags, key, help);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (commands[0]->parsed()) {
      const auto config = Resolve(flags, {});
      for (const auto& g : mgsolve::CmdGenerate(config)) {
        std::printf("%llu %016llx %s\n", static_cast<unsigned long long>(g.seed),
                    static_cast<unsigned long long>(g.hash), g.path.c_str());
      }
    } else if (commands[1]->parsed()) {
      const auto config = Resolve(flags, {});
      std::fputs(mgsolve::ConfigEcho(config).c_str(), stdout);
      PrintSummary(mgsolve::CmdSolve(config));
    } else if (commands[2]->parsed()) {
      std::printf("%.12g\n", mgsolve::CmdEval(Resolve(flags, {})));
    } else if (commands[3]->parsed()) {
      const auto config = Resolve(flags, mgsolve::CompareDefaults());
      std::fputs(mgsolve::ConfigEcho(config).c_str(), stdout);
      const auto report = mgsolve::CmdCompare(config);
      std::printf("median_final_gap_homotopy=%.12g median_final_gap_baseline=%.12g csv=%s\n",
                  report.median_final_homotopy, report.median_final_baseline,
                  report.csv_path.c_str());
    }
  } catch (const mgsolve::InvalidArgument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsageError;
  } catch (const mgsolve::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kNumericalError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
