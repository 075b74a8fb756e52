#pragma once

#include <cstdint>
#include <functional>
#include <random>

#include "mgsolve/game.hpp"

namespace mgsolve {

struct GenSpec {
  int num_states = 10;
  int num_actions_min = 10;
  int num_actions_max = 10;
  double gamma = 0.99;
  std::uint64_t seed = 0;
};

// Throws InvalidArgument unless S, A, B >= 1 and gamma is in [0, 1).
void CheckGenSpec(const GenSpec& spec);

// std::mt19937_64 with portable conversions. The standard distributions are
// implementation-defined, so they are not used.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on (0, 1] with 53 random bits.
  double Uniform() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }
  // Uniform on {lo, ..., hi} by rejection sampling.
  std::uint64_t Integer(std::uint64_t lo, std::uint64_t hi);

 private:
  std::mt19937_64 engine_;
};

// Rewards uniform on [0, 1]. For each (s, a, b): a support size i uniform on
// {1, ..., S}, a uniform subset of that size (partial Fisher-Yates), uniform
// weights on the subset, normalized. Draws are consumed in that order, all
// rewards first.
MarkovGame RandomGame(const GenSpec& spec);

// Per state, uniform [0, 1] entries normalized by their L1 norm. The draws
// continue the game's stream: min policy, then max policy.
JointPolicy RandomPolicyPair(const GenSpec& spec);

// One policy from an arbitrary source of positive draws.
Policy RandomPolicy(Side side, int num_states, int num_actions,
                    const std::function<double()>& draw);

}  // namespace mgsolve
