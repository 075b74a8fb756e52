#include "mgsolve/randgen.hpp"

#include <cmath>
#include <numeric>

namespace mgsolve {

namespace {

MarkovGame DrawGame(const GenSpec& spec, Rng& rng) {
  const int S = spec.num_states;
  MarkovGame game(S, spec.num_actions_min, spec.num_actions_max, spec.gamma);
  for (double& r : game.rewards) r = rng.Uniform();

  std::vector<int> states(S);
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < game.num_actions_min; ++a) {
      for (int b = 0; b < game.num_actions_max; ++b) {
        const int support = static_cast<int>(rng.Integer(1, S));
        std::iota(states.begin(), states.end(), 0);
        for (int i = 0; i < support; ++i) {
          const auto j = static_cast<int>(rng.Integer(i, S - 1));
          std::swap(states[i], states[j]);
        }
        auto row = game.transition(s, a, b);
        double total = 0.0;
        for (int i = 0; i < support; ++i) {
          const double w = rng.Uniform();
          row[states[i]] = w;
          total += w;
        }
        for (int i = 0; i < support; ++i) row[states[i]] /= total;
      }
    }
  }
  return game;
}

}  // namespace

void CheckGenSpec(const GenSpec& spec) {
  if (spec.num_states < 1 || spec.num_actions_min < 1 || spec.num_actions_max < 1) {
    throw InvalidArgument("generator: S, A and B must be at least 1");
  }
  if (!(spec.gamma >= 0.0 && spec.gamma < 1.0)) {
    throw InvalidArgument("generator: gamma must lie in [0, 1)");
  }
}

std::uint64_t Rng::Integer(std::uint64_t lo, std::uint64_t hi) {
  if (hi < lo) throw InvalidArgument("Rng::Integer: empty range");
  const std::uint64_t span = hi - lo;
  if (span == ~std::uint64_t{0}) return engine_();
  const std::uint64_t range = span + 1;
  // Reject the tail so every residue is equally likely.
  const std::uint64_t bound = (~std::uint64_t{0} / range) * range;
  std::uint64_t x = engine_();
  while (x >= bound) x = engine_();
  return lo + x % range;
}

MarkovGame RandomGame(const GenSpec& spec) {
  CheckGenSpec(spec);
  Rng rng(spec.seed);
  return DrawGame(spec, rng);
}

Policy RandomPolicy(Side side, int num_states, int num_actions,
                    const std::function<double()>& draw) {
  Policy policy(side, num_states, num_actions);
  for (int s = 0; s < num_states; ++s) {
    auto x = policy.at(s);
    double total = 0.0;
    for (double& p : x) {
      p = draw();
      total += p;
    }
    if (!(total > 0.0) || !std::isfinite(total)) {
      throw InvalidArgument("RandomPolicy: draws must be positive and finite");
    }
    for (double& p : x) p /= total;
  }
  return policy;
}

JointPolicy RandomPolicyPair(const GenSpec& spec) {
  CheckGenSpec(spec);
  Rng rng(spec.seed);
  DrawGame(spec, rng);
  auto draw = [&rng] { return rng.Uniform(); };
  JointPolicy z;
  z.min_policy = RandomPolicy(Side::kMin, spec.num_states, spec.num_actions_min, draw);
  z.max_policy = RandomPolicy(Side::kMax, spec.num_states, spec.num_actions_max, draw);
  return z;
}

}  // namespace mgsolve
