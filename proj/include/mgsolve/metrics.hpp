#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "mgsolve/game.hpp"
#include "mgsolve/homotopy.hpp"

namespace mgsolve {

struct DualityBounds {
  double gap = 0.0;
  double constant = 0.0;                // C = sqrt(2 max(A, B)) / (1 - gamma)^2
  std::optional<double> distance;       // ||z - z*||_2 over all states
  std::optional<bool> upper_bound_holds;  // gap <= C * distance + 1e-8
};

double GapDistanceConstant(const MarkovGame& game);
// Euclidean distance between joint policies of the same shape.
double PolicyDistance(const JointPolicy& a, const JointPolicy& b);

// Nash gap of z, plus the upper side of the gap/distance relation when a
// reference equilibrium is supplied.
DualityBounds DualityBoundsCheck(const MarkovGame& game, const JointPolicy& z,
                                 const JointPolicy* witness = nullptr);

struct ConvergenceSummary {
  std::optional<double> final_gap;
  std::optional<double> gap_at_cutoff;  // first evaluated gap at t >= cutoff
  long cutoff = 0;
  long fit_samples = 0;
  // Least squares of ln(gap) against t on t >= cutoff, gap > 0. Only set
  // when at least kMinFitSamples samples qualify.
  std::optional<double> slope;
  std::optional<double> intercept;
  std::optional<double> r_squared;
  std::vector<std::pair<long, double>> boundary_gaps;  // (t, gap) at segment ends

  static constexpr long kMinFitSamples = 10;
};

ConvergenceSummary FitLinearRate(const RunLog& log, long cutoff);

}  // namespace mgsolve
