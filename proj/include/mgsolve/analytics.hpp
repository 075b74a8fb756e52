#pragma once

#include <span>
#include <vector>

#include "mgsolve/game.hpp"

namespace mgsolve {

// Dense table indexed (s, action), e.g. marginal rewards or q-values.
struct StateActionTable {
  int num_states = 0;
  int num_actions = 0;
  std::vector<double> data;

  StateActionTable() = default;
  StateActionTable(int states, int actions)
      : num_states(states),
        num_actions(actions),
        data(static_cast<std::size_t>(states) * actions, 0.0) {}

  std::span<double> at(int s) {
    return {data.data() + static_cast<std::size_t>(s) * num_actions,
            static_cast<std::size_t>(num_actions)};
  }
  std::span<const double> at(int s) const {
    return {data.data() + static_cast<std::size_t>(s) * num_actions,
            static_cast<std::size_t>(num_actions)};
  }
  double operator()(int s, int a) const { return data[static_cast<std::size_t>(s) * num_actions + a]; }
  double& operator()(int s, int a) { return data[static_cast<std::size_t>(s) * num_actions + a]; }
};

// Q_s[v](a, b) for every state, indexed like MarkovGame::rewards.
struct QTensor {
  int num_states = 0;
  int num_actions_min = 0;
  int num_actions_max = 0;
  std::vector<double> data;

  double operator()(int s, int a, int b) const {
    return data[(static_cast<std::size_t>(s) * num_actions_min + a) * num_actions_max + b];
  }
  // Row-major A x B block for state s.
  std::span<const double> matrix(int s) const {
    const std::size_t n = static_cast<std::size_t>(num_actions_min) * num_actions_max;
    return {data.data() + s * n, n};
  }
};

// The single-agent MDP a player sees once the opponent's policy has been
// averaged out. `side` is the observing player; the min-player minimizes.
struct MarginalMDP {
  Side side = Side::kMin;
  int num_states = 0;
  int num_actions = 0;
  double gamma = 0.0;
  StateActionTable reward;
  std::vector<double> kernel;  // [(s * n + a) * S + s']

  std::span<const double> transition(int s, int a) const {
    return {kernel.data() + (static_cast<std::size_t>(s) * num_actions + a) * num_states,
            static_cast<std::size_t>(num_states)};
  }
};

enum class Sense { kMinimize, kMaximize };
inline Sense SenseOf(Side side) { return side == Side::kMin ? Sense::kMinimize : Sense::kMaximize; }

QTensor BellmanTarget(const MarkovGame& game, std::span<const double> v);

// V^{x,y}, from the dense linear system (I - gamma P^{x,y}) V = r^{x,y}.
ValueVector JointValue(const MarkovGame& game, const JointPolicy& z);
QTensor JointQ(const MarkovGame& game, const JointPolicy& z);

// Averages the opponent out of the game; `opponent` must belong to
// Opponent(side).
MarginalMDP Marginalize(const MarkovGame& game, const Policy& opponent, Side side);

ValueVector MdpPolicyValue(const MarginalMDP& mdp, const Policy& policy);
// q(s,a) = r(s,a) + gamma * sum_s' P(s'|s,a) V(s') for a given V.
StateActionTable MdpQFromValues(const MarginalMDP& mdp, std::span<const double> values);
StateActionTable MdpQ(const MarginalMDP& mdp, const Policy& policy);

struct BestResponse {
  Policy policy;  // deterministic, lowest index among ties
  ValueVector values;
};

// Optimal deterministic policy by policy iteration; the returned values
// satisfy the Bellman optimality equation to 1e-10 in sup norm.
BestResponse MdpBestResponse(const MarginalMDP& mdp, Sense sense);

// Normalized discounted state occupancy from start distribution rho:
// d^T = (1 - gamma) rho^T + gamma d^T P^{x,y}; sums to one.
std::vector<double> Visitation(const MarkovGame& game, const JointPolicy& z,
                               std::span<const double> rho);

struct MatrixGameOptions {
  double tolerance = 1e-10;
  long max_iterations = 10'000'000;
  // Optional warm start; empty means uniform.
  std::vector<double> initial_row;
  std::vector<double> initial_col;
};

struct MatrixGameSolution {
  double value = 0.0;
  std::vector<double> row_strategy;  // minimizer over rows
  std::vector<double> col_strategy;  // maximizer over columns
  double duality_gap = 0.0;
  long iterations = 0;
};

// max_b (x^T M)_b - min_a (M y)_a for a row-major rows x cols matrix.
double MatrixDualityGap(std::span<const double> matrix, int rows, int cols,
                        std::span<const double> x, std::span<const double> y);

// min_x max_y x^T M y with a witness pair whose duality gap is within
// tolerance. Runs last-iterate optimistic gradient descent/ascent, tracking
// the running average, and periodically tries to polish the iterate by
// solving the equilibrium conditions on its estimated support. Throws
// NumericalError when the iteration cap is hit.
MatrixGameSolution MatrixGameValue(std::span<const double> matrix, int rows, int cols,
                                   const MatrixGameOptions& options = {});

struct MinimaxSolution {
  ValueVector values;     // v*
  QTensor q;              // Q[v*]
  JointPolicy equilibrium;  // per-state matrix-game witnesses on Q[v*]
  int iterations = 0;
};

// Shapley value iteration; stops once successive iterates are within
// tolerance * (1 - gamma) / (2 gamma), which puts v within tolerance of v*.
MinimaxSolution MinimaxValues(const MarkovGame& game, double tolerance = 1e-10);

// V^{x,dagger} (max-player best response against x) and V^{dagger,y}.
ValueVector MaxBestResponseValues(const MarkovGame& game, const Policy& min_policy);
ValueVector MinBestResponseValues(const MarkovGame& game, const Policy& max_policy);

// max_s V^{x,dagger}(s) - V^{dagger,y}(s), unclamped.
double NashGap(const MarkovGame& game, const JointPolicy& z);

}  // namespace mgsolve
