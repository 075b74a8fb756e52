#include "mgsolve/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "mgsolve/simplex.hpp"

namespace mgsolve {

namespace {

constexpr double kSolveResidualTol = 1e-10;
constexpr double kBellmanResidualTol = 1e-10;

// Solves (I - gamma P) V = r and checks the residual.
Eigen::VectorXd SolveDiscounted(const Eigen::MatrixXd& transition, const Eigen::VectorXd& reward,
                                double gamma, bool transpose = false) {
  const Eigen::Index n = transition.rows();
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) - gamma * transition;
  if (transpose) system.transposeInPlace();
  Eigen::VectorXd solution = system.partialPivLu().solve(reward);
  const double residual = (system * solution - reward).lpNorm<Eigen::Infinity>();
  if (!(residual <= kSolveResidualTol)) {
    throw NumericalError("linear solve residual " + std::to_string(residual) +
                         " exceeds tolerance");
  }
  return solution;
}

ValueVector ToVector(const Eigen::VectorXd& v) { return ValueVector(v.data(), v.data() + v.size()); }

// State-to-state kernel and expected reward under a joint policy.
void JointChain(const MarkovGame& game, const JointPolicy& z, Eigen::MatrixXd& transition,
                Eigen::VectorXd& reward) {
  CheckJointPolicyFor(game, z);
  const int S = game.num_states, A = game.num_actions_min, B = game.num_actions_max;
  transition = Eigen::MatrixXd::Zero(S, S);
  reward = Eigen::VectorXd::Zero(S);
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      const double xa = z.min_policy(s, a);
      if (xa == 0.0) continue;
      for (int b = 0; b < B; ++b) {
        const double w = xa * z.max_policy(s, b);
        if (w == 0.0) continue;
        reward(s) += w * game.reward(s, a, b);
        auto row = game.transition(s, a, b);
        for (int sp = 0; sp < S; ++sp) transition(s, sp) += w * row[sp];
      }
    }
  }
}

void PolicyChain(const MarginalMDP& mdp, const Policy& policy, Eigen::MatrixXd& transition,
                 Eigen::VectorXd& reward) {
  if (policy.side() != mdp.side || policy.num_states() != mdp.num_states ||
      policy.num_actions() != mdp.num_actions) {
    throw InvalidArgument("policy does not match the marginal MDP");
  }
  const int S = mdp.num_states, n = mdp.num_actions;
  transition = Eigen::MatrixXd::Zero(S, S);
  reward = Eigen::VectorXd::Zero(S);
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < n; ++a) {
      const double w = policy(s, a);
      if (w == 0.0) continue;
      reward(s) += w * mdp.reward(s, a);
      auto row = mdp.transition(s, a);
      for (int sp = 0; sp < S; ++sp) transition(s, sp) += w * row[sp];
    }
  }
}

bool Better(double candidate, double incumbent, Sense sense, double margin) {
  return sense == Sense::kMinimize ? candidate < incumbent - margin
                                   : candidate > incumbent + margin;
}

double RowDot(std::span<const double> m, int rows, int cols, int a, std::span<const double> y) {
  (void)rows;
  double acc = 0.0;
  for (int b = 0; b < cols; ++b) acc += m[static_cast<std::size_t>(a) * cols + b] * y[b];
  return acc;
}

double ColDot(std::span<const double> m, int rows, int cols, int b, std::span<const double> x) {
  double acc = 0.0;
  for (int a = 0; a < rows; ++a) acc += m[static_cast<std::size_t>(a) * cols + b] * x[a];
  return acc;
}

// Solves the indifference conditions for one player's strategy on a
// guessed support pair: the opponent's support rows/columns must all have
// equal payoff. Returns false if the solution leaves the simplex.
bool SolveOnSupport(const Eigen::MatrixXd& block, std::vector<double>& strategy) {
  // block: rows = opponent's support, cols = own support. Unknowns: own
  // strategy on support plus the common value.
  const Eigen::Index m = block.rows(), k = block.cols();
  Eigen::MatrixXd system(m + 1, k + 1);
  system.topLeftCorner(m, k) = block;
  system.topRightCorner(m, 1).setConstant(-1.0);
  system.bottomLeftCorner(1, k).setOnes();
  system(m, k) = 0.0;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
  rhs(m) = 1.0;
  Eigen::VectorXd sol = system.completeOrthogonalDecomposition().solve(rhs);
  if (!sol.allFinite()) return false;
  strategy.assign(k, 0.0);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    if (sol(i) < -1e-9) return false;
    strategy[i] = std::max(0.0, sol(i));
    sum += strategy[i];
  }
  if (!(sum > 0.0)) return false;
  for (double& p : strategy) p /= sum;
  return true;
}

// Tries to turn an approximate equilibrium into an exact one by solving the
// equilibrium equations on its estimated supports.
bool PolishSupport(std::span<const double> m, int rows, int cols, std::span<const double> x,
                   std::span<const double> y, double threshold, std::vector<double>& out_x,
                   std::vector<double>& out_y) {
  const double max_x = *std::max_element(x.begin(), x.end());
  const double max_y = *std::max_element(y.begin(), y.end());
  std::vector<int> sx, sy;
  for (int a = 0; a < rows; ++a)
    if (x[a] > threshold * max_x) sx.push_back(a);
  for (int b = 0; b < cols; ++b)
    if (y[b] > threshold * max_y) sy.push_back(b);

  // y on sy makes every row in sx indifferent; x on sx makes every column in
  // sy indifferent.
  Eigen::MatrixXd rows_block(sx.size(), sy.size());
  for (std::size_t i = 0; i < sx.size(); ++i)
    for (std::size_t j = 0; j < sy.size(); ++j)
      rows_block(i, j) = m[static_cast<std::size_t>(sx[i]) * cols + sy[j]];
  std::vector<double> ys, xs;
  if (!SolveOnSupport(rows_block, ys)) return false;
  if (!SolveOnSupport(rows_block.transpose(), xs)) return false;
  out_x.assign(rows, 0.0);
  out_y.assign(cols, 0.0);
  for (std::size_t i = 0; i < sx.size(); ++i) out_x[sx[i]] = xs[i];
  for (std::size_t j = 0; j < sy.size(); ++j) out_y[sy[j]] = ys[j];
  return true;
}

}  // namespace

QTensor BellmanTarget(const MarkovGame& game, std::span<const double> v) {
  if (static_cast<int>(v.size()) != game.num_states) {
    throw InvalidArgument("BellmanTarget: value vector has " + std::to_string(v.size()) +
                          " entries, game has " + std::to_string(game.num_states) + " states");
  }
  QTensor q{game.num_states, game.num_actions_min, game.num_actions_max, game.rewards};
  const std::size_t n = q.data.size();
  const int S = game.num_states;
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = game.kernel.data() + i * S;
    double acc = 0.0;
    for (int sp = 0; sp < S; ++sp) acc += row[sp] * v[sp];
    q.data[i] += game.gamma * acc;
  }
  return q;
}

ValueVector JointValue(const MarkovGame& game, const JointPolicy& z) {
  Eigen::MatrixXd transition;
  Eigen::VectorXd reward;
  JointChain(game, z, transition, reward);
  return ToVector(SolveDiscounted(transition, reward, game.gamma));
}

QTensor JointQ(const MarkovGame& game, const JointPolicy& z) {
  return BellmanTarget(game, JointValue(game, z));
}

MarginalMDP Marginalize(const MarkovGame& game, const Policy& opponent, Side side) {
  if (opponent.side() != Opponent(side)) {
    throw InvalidArgument(std::string("Marginalize: the ") + SideName(side) +
                          "-player's view needs the " + SideName(Opponent(side)) +
                          "-player's policy");
  }
  CheckPolicyFor(game, opponent);
  const int S = game.num_states, A = game.num_actions_min, B = game.num_actions_max;
  const int n = game.num_actions(side);

  MarginalMDP mdp;
  mdp.side = side;
  mdp.num_states = S;
  mdp.num_actions = n;
  mdp.gamma = game.gamma;
  mdp.reward = StateActionTable(S, n);
  mdp.kernel.assign(static_cast<std::size_t>(S) * n * S, 0.0);

  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      for (int b = 0; b < B; ++b) {
        const int own = side == Side::kMin ? a : b;
        const double w = opponent(s, side == Side::kMin ? b : a);
        if (w == 0.0) continue;
        mdp.reward(s, own) += w * game.reward(s, a, b);
        double* out = mdp.kernel.data() + (static_cast<std::size_t>(s) * n + own) * S;
        auto row = game.transition(s, a, b);
        for (int sp = 0; sp < S; ++sp) out[sp] += w * row[sp];
      }
    }
  }
  return mdp;
}

ValueVector MdpPolicyValue(const MarginalMDP& mdp, const Policy& policy) {
  Eigen::MatrixXd transition;
  Eigen::VectorXd reward;
  PolicyChain(mdp, policy, transition, reward);
  return ToVector(SolveDiscounted(transition, reward, mdp.gamma));
}

StateActionTable MdpQFromValues(const MarginalMDP& mdp, std::span<const double> values) {
  if (static_cast<int>(values.size()) != mdp.num_states) {
    throw InvalidArgument("MdpQ: value vector has wrong length");
  }
  StateActionTable q = mdp.reward;
  const int S = mdp.num_states;
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < mdp.num_actions; ++a) {
      auto row = mdp.transition(s, a);
      double acc = 0.0;
      for (int sp = 0; sp < S; ++sp) acc += row[sp] * values[sp];
      q(s, a) += mdp.gamma * acc;
    }
  }
  return q;
}

StateActionTable MdpQ(const MarginalMDP& mdp, const Policy& policy) {
  return MdpQFromValues(mdp, MdpPolicyValue(mdp, policy));
}

BestResponse MdpBestResponse(const MarginalMDP& mdp, Sense sense) {
  const int S = mdp.num_states, n = mdp.num_actions;
  std::vector<int> choice(S, 0);
  // Start from the myopic optimum.
  for (int s = 0; s < S; ++s) {
    for (int a = 1; a < n; ++a) {
      if (Better(mdp.reward(s, a), mdp.reward(s, choice[s]), sense, 0.0)) choice[s] = a;
    }
  }

  auto to_policy = [&] {
    Policy policy(mdp.side, S, n);
    for (int s = 0; s < S; ++s) policy(s, choice[s]) = 1.0;
    return policy;
  };

  const int max_rounds = 10 * S * n + 100;
  for (int round = 0; round < max_rounds; ++round) {
    Policy policy = to_policy();
    ValueVector values = MdpPolicyValue(mdp, policy);
    StateActionTable q = MdpQFromValues(mdp, values);
    bool changed = false;
    double residual = 0.0;
    for (int s = 0; s < S; ++s) {
      int best = choice[s];
      for (int a = 0; a < n; ++a) {
        const double margin = 1e-13 * (1.0 + std::abs(q(s, best)));
        if (Better(q(s, a), q(s, best), sense, margin)) best = a;
      }
      if (best != choice[s]) {
        choice[s] = best;
        changed = true;
      }
      double extremum = q(s, 0);
      for (int a = 1; a < n; ++a) {
        extremum = sense == Sense::kMinimize ? std::min(extremum, q(s, a))
                                             : std::max(extremum, q(s, a));
      }
      residual = std::max(residual, std::abs(values[s] - extremum));
    }
    if (!changed) {
      if (!(residual <= kBellmanResidualTol)) {
        throw NumericalError("best response: Bellman residual " + std::to_string(residual));
      }
      // Canonical witness: lowest index among exact optima.
      for (int s = 0; s < S; ++s) {
        for (int a = 0; a < choice[s]; ++a) {
          if (q(s, a) == q(s, choice[s])) {
            choice[s] = a;
            break;
          }
        }
      }
      return {to_policy(), std::move(values)};
    }
  }
  throw NumericalError("best response: policy iteration did not terminate");
}

std::vector<double> Visitation(const MarkovGame& game, const JointPolicy& z,
                               std::span<const double> rho) {
  if (static_cast<int>(rho.size()) != game.num_states) {
    throw InvalidArgument("Visitation: start distribution has wrong length");
  }
  Eigen::MatrixXd transition;
  Eigen::VectorXd reward;
  JointChain(game, z, transition, reward);
  Eigen::VectorXd start(game.num_states);
  for (int s = 0; s < game.num_states; ++s) start(s) = (1.0 - game.gamma) * rho[s];
  return ToVector(SolveDiscounted(transition, start, game.gamma, /*transpose=*/true));
}

double MatrixDualityGap(std::span<const double> matrix, int rows, int cols,
                        std::span<const double> x, std::span<const double> y) {
  double best_col = -std::numeric_limits<double>::infinity();
  for (int b = 0; b < cols; ++b) best_col = std::max(best_col, ColDot(matrix, rows, cols, b, x));
  double best_row = std::numeric_limits<double>::infinity();
  for (int a = 0; a < rows; ++a) best_row = std::min(best_row, RowDot(matrix, rows, cols, a, y));
  return best_col - best_row;
}

MatrixGameSolution MatrixGameValue(std::span<const double> matrix, int rows, int cols,
                                   const MatrixGameOptions& options) {
  if (rows < 1 || cols < 1 || matrix.size() != static_cast<std::size_t>(rows) * cols) {
    throw InvalidArgument("MatrixGameValue: matrix shape mismatch");
  }
  for (double v : matrix) {
    if (!std::isfinite(v)) throw InvalidArgument("MatrixGameValue: non-finite entry");
  }

  MatrixGameSolution sol;
  auto finish = [&](std::vector<double> x, std::vector<double> y, long iterations) {
    sol.row_strategy = std::move(x);
    sol.col_strategy = std::move(y);
    sol.duality_gap = MatrixDualityGap(matrix, rows, cols, sol.row_strategy, sol.col_strategy);
    double value = 0.0;
    for (int a = 0; a < rows; ++a) {
      value += sol.row_strategy[a] * RowDot(matrix, rows, cols, a, sol.col_strategy);
    }
    sol.value = value;
    sol.iterations = iterations;
    return sol;
  };

  // One player has a single action: the other simply best-responds.
  if (rows == 1 || cols == 1) {
    std::vector<double> x(rows, 0.0), y(cols, 0.0);
    if (rows == 1) {
      x[0] = 1.0;
      y[std::max_element(matrix.begin(), matrix.end()) - matrix.begin()] = 1.0;
    } else {
      y[0] = 1.0;
      x[std::min_element(matrix.begin(), matrix.end()) - matrix.begin()] = 1.0;
    }
    return finish(std::move(x), std::move(y), 0);
  }

  const auto [lo_it, hi_it] = std::minmax_element(matrix.begin(), matrix.end());
  const double lo = *lo_it, range = *hi_it - *lo_it;
  if (range == 0.0) {
    return finish(std::vector<double>(rows, 1.0 / rows), std::vector<double>(cols, 1.0 / cols), 0);
  }
  std::vector<double> m(matrix.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = (matrix[i] - lo) / range;
  const double tol = options.tolerance / range;

  double frob = 0.0;
  for (double v : m) frob += v * v;
  const double eta = 0.5 / std::sqrt(frob);

  auto init = [](const std::vector<double>& warm, int n) {
    if (static_cast<int>(warm.size()) == n) return ProjectSimplex(warm);
    return std::vector<double>(n, 1.0 / n);
  };
  std::vector<double> x = init(options.initial_row, rows), y = init(options.initial_col, cols);
  std::vector<double> x_aux = x, y_aux = y;
  std::vector<double> x_avg = x, y_avg = y;
  std::vector<double> gx(rows), gy(cols), step_x(rows), step_y(cols), scratch;
  std::vector<double> best_x = x, best_y = y;
  double best_gap = MatrixDualityGap(m, rows, cols, x, y);

  auto consider = [&](const std::vector<double>& cx, const std::vector<double>& cy) {
    const double gap = MatrixDualityGap(m, rows, cols, cx, cy);
    if (gap < best_gap) {
      best_gap = gap;
      best_x = cx;
      best_y = cy;
    }
  };

  constexpr int kCheckEvery = 25;
  std::vector<double> px, py;
  for (long it = 1; it <= options.max_iterations; ++it) {
    for (int a = 0; a < rows; ++a) gx[a] = RowDot(m, rows, cols, a, y);
    for (int b = 0; b < cols; ++b) gy[b] = ColDot(m, rows, cols, b, x);
    for (int a = 0; a < rows; ++a) step_x[a] = x_aux[a] - eta * gx[a];
    for (int b = 0; b < cols; ++b) step_y[b] = y_aux[b] + eta * gy[b];
    ProjectSimplexInto(step_x, x_aux, scratch);
    ProjectSimplexInto(step_y, y_aux, scratch);
    for (int a = 0; a < rows; ++a) step_x[a] = x_aux[a] - eta * gx[a];
    for (int b = 0; b < cols; ++b) step_y[b] = y_aux[b] + eta * gy[b];
    ProjectSimplexInto(step_x, x, scratch);
    ProjectSimplexInto(step_y, y, scratch);
    const double w = 1.0 / static_cast<double>(it + 1);
    MixInPlace(x_avg, x, w);
    MixInPlace(y_avg, y, w);

    if (it % kCheckEvery == 0 || it == options.max_iterations) {
      consider(x, y);
      consider(x_avg, y_avg);
      for (double threshold : {1e-2, 1e-4, 1e-6}) {
        if (best_gap <= tol) break;
        if (PolishSupport(m, rows, cols, x, y, threshold, px, py)) consider(px, py);
      }
      if (best_gap <= tol) return finish(best_x, best_y, it);
    }
  }
  throw NumericalError("MatrixGameValue: no convergence after " +
                       std::to_string(options.max_iterations) + " iterations, duality gap " +
                       std::to_string(best_gap * range));
}

MinimaxSolution MinimaxValues(const MarkovGame& game, double tolerance) {
  if (auto report = ValidateGame(game); !report.ok()) {
    throw InvalidArgument("MinimaxValues: " + report.Summary());
  }
  const int S = game.num_states, A = game.num_actions_min, B = game.num_actions_max;
  const double gamma = game.gamma;
  const double stop = gamma > 0.0 ? tolerance * (1.0 - gamma) / (2.0 * gamma)
                                  : std::numeric_limits<double>::infinity();
  // Each inner solve must be well below the outer stopping threshold.
  const double inner_tol = std::min(1e-10, 0.1 * std::min(stop, tolerance));

  MinimaxSolution result;
  result.equilibrium = UniformJointPolicy(game);
  ValueVector v(S, 0.0), next(S, 0.0);
  std::vector<std::vector<double>> warm_x(S), warm_y(S);

  auto solve_states = [&](const QTensor& q) {
    for (int s = 0; s < S; ++s) {
      MatrixGameOptions opts;
      opts.tolerance = inner_tol;
      opts.initial_row = warm_x[s];
      opts.initial_col = warm_y[s];
      MatrixGameSolution sol;
      try {
        sol = MatrixGameValue(q.matrix(s), A, B, opts);
      } catch (const NumericalError& e) {
        throw NumericalError("MinimaxValues: state " + std::to_string(s) + ": " + e.what());
      }
      next[s] = sol.value;
      warm_x[s] = std::move(sol.row_strategy);
      warm_y[s] = std::move(sol.col_strategy);
    }
  };

  constexpr int kMaxIterations = 1'000'000;
  for (int it = 1; it <= kMaxIterations; ++it) {
    solve_states(BellmanTarget(game, v));
    double diff = 0.0;
    for (int s = 0; s < S; ++s) diff = std::max(diff, std::abs(next[s] - v[s]));
    v = next;
    if (diff <= stop) {
      result.iterations = it;
      break;
    }
    if (it == kMaxIterations) throw NumericalError("MinimaxValues: value iteration cap reached");
  }

  result.values = v;
  result.q = BellmanTarget(game, v);
  solve_states(result.q);
  for (int s = 0; s < S; ++s) {
    std::copy(warm_x[s].begin(), warm_x[s].end(), result.equilibrium.min_policy.at(s).begin());
    std::copy(warm_y[s].begin(), warm_y[s].end(), result.equilibrium.max_policy.at(s).begin());
  }
  return result;
}

ValueVector MaxBestResponseValues(const MarkovGame& game, const Policy& min_policy) {
  return MdpBestResponse(Marginalize(game, min_policy, Side::kMax), Sense::kMaximize).values;
}

ValueVector MinBestResponseValues(const MarkovGame& game, const Policy& max_policy) {
  return MdpBestResponse(Marginalize(game, max_policy, Side::kMin), Sense::kMinimize).values;
}

double NashGap(const MarkovGame& game, const JointPolicy& z) {
  CheckJointPolicyFor(game, z);
  const ValueVector upper = MaxBestResponseValues(game, z.min_policy);
  const ValueVector lower = MinBestResponseValues(game, z.max_policy);
  double gap = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < game.num_states; ++s) gap = std::max(gap, upper[s] - lower[s]);
  return gap;
}

}  // namespace mgsolve
