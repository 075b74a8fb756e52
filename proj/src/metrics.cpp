#include "mgsolve/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "mgsolve/analytics.hpp"

namespace mgsolve {

double GapDistanceConstant(const MarkovGame& game) {
  const double m = std::max(game.num_actions_min, game.num_actions_max);
  return std::sqrt(2.0 * m) / ((1.0 - game.gamma) * (1.0 - game.gamma));
}

double PolicyDistance(const JointPolicy& a, const JointPolicy& b) {
  double sum = 0.0;
  for (Side side : {Side::kMin, Side::kMax}) {
    const auto& u = a.of(side).data();
    const auto& v = b.of(side).data();
    if (u.size() != v.size()) throw InvalidArgument("PolicyDistance: shape mismatch");
    for (std::size_t i = 0; i < u.size(); ++i) sum += (u[i] - v[i]) * (u[i] - v[i]);
  }
  return std::sqrt(sum);
}

DualityBounds DualityBoundsCheck(const MarkovGame& game, const JointPolicy& z,
                                 const JointPolicy* witness) {
  DualityBounds out;
  out.gap = NashGap(game, z);
  out.constant = GapDistanceConstant(game);
  if (witness != nullptr) {
    CheckJointPolicyFor(game, *witness);
    out.distance = PolicyDistance(z, *witness);
    out.upper_bound_holds = out.gap <= out.constant * *out.distance + 1e-8;
  }
  return out;
}

ConvergenceSummary FitLinearRate(const RunLog& log, long cutoff) {
  ConvergenceSummary summary;
  summary.cutoff = cutoff;

  std::set<long> ends;
  for (const auto& rec : log.segments) ends.insert(rec.segment.end);

  std::vector<std::pair<double, double>> points;
  long prev_t = 0;
  bool first = true;
  for (const auto& e : log.entries) {
    if (!first && e.t <= prev_t) throw InvalidArgument("FitLinearRate: iterations not increasing");
    first = false;
    prev_t = e.t;
    if (!e.nash_gap) continue;
    const double gap = *e.nash_gap;
    summary.final_gap = gap;
    if (ends.count(e.t)) summary.boundary_gaps.emplace_back(e.t, gap);
    if (e.t < cutoff) continue;
    if (!summary.gap_at_cutoff) summary.gap_at_cutoff = gap;
    if (!(gap > 0.0)) continue;
    points.emplace_back(static_cast<double>(e.t), std::log(gap));
  }
  summary.fit_samples = static_cast<long>(points.size());
  if (summary.fit_samples < ConvergenceSummary::kMinFitSamples) return summary;

  const double n = static_cast<double>(points.size());
  double mx = 0, my = 0, ymin = points[0].second, ymax = points[0].second;
  for (auto [x, y] : points) {
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double cxx = 0, cxy = 0, cyy = 0;
  for (auto [x, y] : points) {
    cxx += (x - mx) * (x - mx);
    cxy += (x - mx) * (y - my);
    cyy += (y - my) * (y - my);
  }
  if (!(cxx > 0.0)) return summary;
  const double slope = ymax > ymin ? cxy / cxx : 0.0;
  summary.slope = slope;
  summary.intercept = my - slope * mx;
  const double explained = slope * cxy;
  summary.r_squared = ymax > ymin && cyy > 0.0 ? std::clamp(explained / cyy, 0.0, 1.0) : 1.0;
  return summary;
}

}  // namespace mgsolve
