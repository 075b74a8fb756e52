#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mgsolve {

// Raised for malformed inputs: bad dimensions, unparsable documents,
// invalid parameters.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a numerical routine fails to meet its tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Which player a policy or observation belongs to. The min-player picks rows
// (actions a in [A]) and pays R; the max-player picks columns (b in [B]).
enum class Side { kMin, kMax };

inline Side Opponent(Side side) { return side == Side::kMin ? Side::kMax : Side::kMin; }
const char* SideName(Side side);

// Two-player zero-sum discounted Markov game with dense tabular storage.
//   rewards: R_s(a, b), indexed [(s * A + a) * B + b]
//   kernel:  P(s' | s, a, b), indexed [((s * A + a) * B + b) * S + s']
struct MarkovGame {
  int num_states = 0;
  int num_actions_min = 0;
  int num_actions_max = 0;
  double gamma = 0.0;
  std::vector<double> rewards;
  std::vector<double> kernel;

  MarkovGame() = default;
  // Zero rewards and an all-zero kernel of the right shape.
  MarkovGame(int states, int actions_min, int actions_max, double discount);

  std::size_t RewardIndex(int s, int a, int b) const {
    return (static_cast<std::size_t>(s) * num_actions_min + a) * num_actions_max + b;
  }
  double reward(int s, int a, int b) const { return rewards[RewardIndex(s, a, b)]; }
  double& reward(int s, int a, int b) { return rewards[RewardIndex(s, a, b)]; }

  // Row P(. | s, a, b) of length num_states.
  std::span<const double> transition(int s, int a, int b) const {
    return {kernel.data() + RewardIndex(s, a, b) * num_states,
            static_cast<std::size_t>(num_states)};
  }
  std::span<double> transition(int s, int a, int b) {
    return {kernel.data() + RewardIndex(s, a, b) * num_states,
            static_cast<std::size_t>(num_states)};
  }

  int num_actions(Side side) const {
    return side == Side::kMin ? num_actions_min : num_actions_max;
  }
  double max_value() const { return 1.0 / (1.0 - gamma); }

  bool operator==(const MarkovGame&) const = default;
};

// Per-state probability vectors over one player's actions, stored dense.
class Policy {
 public:
  Policy() = default;
  Policy(Side side, int num_states, int num_actions);
  Policy(Side side, int num_states, int num_actions, std::vector<double> probs);

  Side side() const { return side_; }
  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }

  std::span<double> at(int s) {
    return {probs_.data() + static_cast<std::size_t>(s) * num_actions_,
            static_cast<std::size_t>(num_actions_)};
  }
  std::span<const double> at(int s) const {
    return {probs_.data() + static_cast<std::size_t>(s) * num_actions_,
            static_cast<std::size_t>(num_actions_)};
  }
  double operator()(int s, int a) const { return probs_[Index(s, a)]; }
  double& operator()(int s, int a) { return probs_[Index(s, a)]; }

  const std::vector<double>& data() const { return probs_; }
  std::vector<double>& data() { return probs_; }

  // Empty string when every state's vector is on the simplex within tol,
  // otherwise a description of the first violation.
  std::string Check(double tol = 1e-9) const;

  bool operator==(const Policy&) const = default;

 private:
  std::size_t Index(int s, int a) const {
    return static_cast<std::size_t>(s) * num_actions_ + a;
  }

  Side side_ = Side::kMin;
  int num_states_ = 0;
  int num_actions_ = 0;
  std::vector<double> probs_;
};

struct JointPolicy {
  Policy min_policy;
  Policy max_policy;

  const Policy& of(Side side) const { return side == Side::kMin ? min_policy : max_policy; }
  Policy& of(Side side) { return side == Side::kMin ? min_policy : max_policy; }

  bool operator==(const JointPolicy&) const = default;
};

using ValueVector = std::vector<double>;

struct Violation {
  std::string kind;  // "kernel_negative", "kernel_row_sum", "reward_range", ...
  std::vector<int> index;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string Summary() const;
};

ValidationReport ValidateGame(const MarkovGame& game);

// Throws InvalidArgument when the policy does not match the game's shape for
// its side or is off the simplex.
void CheckPolicyFor(const MarkovGame& game, const Policy& policy);
void CheckJointPolicyFor(const MarkovGame& game, const JointPolicy& z);

Policy UniformPolicy(const MarkovGame& game, Side side);
JointPolicy UniformJointPolicy(const MarkovGame& game);

// JSON game documents. Doubles are written with round-trip precision, so
// DeserializeGame(SerializeGame(g)) == g bit for bit.
std::string SerializeGame(const MarkovGame& game);
// Throws InvalidArgument naming the missing or invalid field, or listing the
// violated invariants when the parsed game fails validation.
MarkovGame DeserializeGame(const std::string& text);

// Policies as nested arrays [s][action].
std::string SerializePolicy(const Policy& policy);
Policy DeserializePolicy(const std::string& text, Side side);

// 64-bit FNV-1a over the serialized document.
std::uint64_t GameHash(const MarkovGame& game);
std::uint64_t PolicyHash(const Policy& policy);

}  // namespace mgsolve
