#include "mgsolve/game.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

#include "json.hpp"

namespace mgsolve {

namespace {

using nlohmann::json;

constexpr double kKernelRowTol = 1e-12;

std::uint64_t Fnv1a(const void* data, std::size_t size,
                    std::uint64_t hash = 1469598103934665603ULL) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= bytes[i];
    hash *= 1099511628211ULL;
  }
  return hash;
}

const json& Field(const json& doc, const char* name) {
  auto it = doc.find(name);
  if (it == doc.end()) {
    throw InvalidArgument(std::string("game document: missing field \"") + name + "\"");
  }
  return *it;
}

int PositiveInt(const json& doc, const char* name) {
  const json& v = Field(doc, name);
  if (!v.is_number_integer()) {
    throw InvalidArgument(std::string("game document: field \"") + name +
                          "\" must be an integer");
  }
  return v.get<int>();
}

double Real(const json& v, const std::string& where) {
  if (!v.is_number()) {
    throw InvalidArgument("game document: " + where + " must be a number");
  }
  return v.get<double>();
}

void ExpectArray(const json& v, std::size_t size, const std::string& where) {
  if (!v.is_array() || v.size() != size) {
    throw InvalidArgument("game document: " + where + " must be an array of length " +
                          std::to_string(size));
  }
}

std::string IndexString(const std::vector<int>& index) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < index.size(); ++i) os << (i ? "," : "") << index[i];
  os << ")";
  return os.str();
}

}  // namespace

const char* SideName(Side side) { return side == Side::kMin ? "min" : "max"; }

MarkovGame::MarkovGame(int states, int actions_min, int actions_max, double discount)
    : num_states(states),
      num_actions_min(actions_min),
      num_actions_max(actions_max),
      gamma(discount),
      rewards(static_cast<std::size_t>(states) * actions_min * actions_max, 0.0),
      kernel(static_cast<std::size_t>(states) * actions_min * actions_max * states, 0.0) {}

Policy::Policy(Side side, int num_states, int num_actions)
    : side_(side),
      num_states_(num_states),
      num_actions_(num_actions),
      probs_(static_cast<std::size_t>(num_states) * num_actions, 0.0) {}

Policy::Policy(Side side, int num_states, int num_actions, std::vector<double> probs)
    : side_(side), num_states_(num_states), num_actions_(num_actions), probs_(std::move(probs)) {
  if (probs_.size() != static_cast<std::size_t>(num_states) * num_actions) {
    throw InvalidArgument("policy: expected " + std::to_string(num_states * num_actions) +
                          " probabilities, got " + std::to_string(probs_.size()));
  }
}

std::string Policy::Check(double tol) const {
  for (int s = 0; s < num_states_; ++s) {
    double sum = 0.0;
    for (int a = 0; a < num_actions_; ++a) {
      const double p = (*this)(s, a);
      if (!std::isfinite(p) || p < 0.0) {
        return std::string(SideName(side_)) + " policy: entry (" + std::to_string(s) + "," +
               std::to_string(a) + ") is not a probability";
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > tol) {
      return std::string(SideName(side_)) + " policy: state " + std::to_string(s) +
             " sums to " + std::to_string(sum);
    }
  }
  return {};
}

std::string ValidationReport::Summary() const {
  if (ok()) return "ok";
  std::ostringstream os;
  os << violations.size() << " violation(s)";
  for (const auto& v : violations) os << "; " << v.kind << " at " << IndexString(v.index) << ": " << v.message;
  return os.str();
}

ValidationReport ValidateGame(const MarkovGame& game) {
  ValidationReport report;
  auto add = [&](std::string kind, std::vector<int> index, std::string message) {
    report.violations.push_back({std::move(kind), std::move(index), std::move(message)});
  };
  const int S = game.num_states, A = game.num_actions_min, B = game.num_actions_max;
  if (S < 1) add("num_states", {}, "num_states must be positive");
  if (A < 1) add("num_actions_min", {}, "num_actions_min must be positive");
  if (B < 1) add("num_actions_max", {}, "num_actions_max must be positive");
  if (!(game.gamma >= 0.0 && game.gamma < 1.0)) {
    add("gamma", {}, "gamma must lie in [0,1), got " + std::to_string(game.gamma));
  }
  if (!report.ok()) return report;

  const std::size_t n = static_cast<std::size_t>(S) * A * B;
  if (game.rewards.size() != n) {
    add("rewards_shape", {}, "expected " + std::to_string(n) + " rewards");
  }
  if (game.kernel.size() != n * S) {
    add("kernel_shape", {}, "expected " + std::to_string(n * S) + " kernel entries");
  }
  if (!report.ok()) return report;

  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      for (int b = 0; b < B; ++b) {
        const double r = game.reward(s, a, b);
        if (!(r >= 0.0 && r <= 1.0)) {
          add("reward_range", {s, a, b}, "reward " + std::to_string(r) + " outside [0,1]");
        }
        double sum = 0.0;
        bool negative = false;
        for (double p : game.transition(s, a, b)) {
          if (!(p >= 0.0)) negative = true;
          sum += p;
        }
        if (negative) add("kernel_negative", {s, a, b}, "negative or non-finite probability");
        if (!(std::abs(sum - 1.0) <= kKernelRowTol)) {
          add("kernel_row_sum", {s, a, b}, "row sums to " + std::to_string(sum));
        }
      }
    }
  }
  return report;
}

void CheckPolicyFor(const MarkovGame& game, const Policy& policy) {
  if (policy.num_states() != game.num_states ||
      policy.num_actions() != game.num_actions(policy.side())) {
    throw InvalidArgument(std::string(SideName(policy.side())) +
                          " policy shape does not match the game");
  }
  if (auto err = policy.Check(); !err.empty()) throw InvalidArgument(err);
}

void CheckJointPolicyFor(const MarkovGame& game, const JointPolicy& z) {
  if (z.min_policy.side() != Side::kMin || z.max_policy.side() != Side::kMax) {
    throw InvalidArgument("joint policy: sides are swapped");
  }
  CheckPolicyFor(game, z.min_policy);
  CheckPolicyFor(game, z.max_policy);
}

Policy UniformPolicy(const MarkovGame& game, Side side) {
  const int n = game.num_actions(side);
  return Policy(side, game.num_states, n,
                std::vector<double>(static_cast<std::size_t>(game.num_states) * n, 1.0 / n));
}

JointPolicy UniformJointPolicy(const MarkovGame& game) {
  return {UniformPolicy(game, Side::kMin), UniformPolicy(game, Side::kMax)};
}

std::string SerializeGame(const MarkovGame& game) {
  const int S = game.num_states, A = game.num_actions_min, B = game.num_actions_max;
  json rewards = json::array();
  json kernel = json::array();
  for (int s = 0; s < S; ++s) {
    json rs = json::array();
    json ks = json::array();
    for (int a = 0; a < A; ++a) {
      json ra = json::array();
      json ka = json::array();
      for (int b = 0; b < B; ++b) {
        ra.push_back(game.reward(s, a, b));
        auto row = game.transition(s, a, b);
        ka.push_back(std::vector<double>(row.begin(), row.end()));
      }
      rs.push_back(std::move(ra));
      ks.push_back(std::move(ka));
    }
    rewards.push_back(std::move(rs));
    kernel.push_back(std::move(ks));
  }
  json doc = {{"num_states", S},       {"num_actions_min", A}, {"num_actions_max", B},
              {"gamma", game.gamma},   {"rewards", rewards},   {"kernel", kernel}};
  return doc.dump();
}

MarkovGame DeserializeGame(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("game document: parse error: ") + e.what());
  }
  if (!doc.is_object()) throw InvalidArgument("game document: expected a JSON object");

  const int S = PositiveInt(doc, "num_states");
  const int A = PositiveInt(doc, "num_actions_min");
  const int B = PositiveInt(doc, "num_actions_max");
  const double gamma = Real(Field(doc, "gamma"), "field \"gamma\"");
  const json& rewards = Field(doc, "rewards");
  const json& kernel = Field(doc, "kernel");
  if (S < 1 || A < 1 || B < 1 || !(gamma >= 0.0 && gamma < 1.0)) {
    MarkovGame bad;
    bad.num_states = S;
    bad.num_actions_min = A;
    bad.num_actions_max = B;
    bad.gamma = gamma;
    throw InvalidArgument("game document: validation failed: " + ValidateGame(bad).Summary());
  }

  MarkovGame game(S, A, B, gamma);
  ExpectArray(rewards, S, "rewards");
  ExpectArray(kernel, S, "kernel");
  for (int s = 0; s < S; ++s) {
    const std::string rs = "rewards[" + std::to_string(s) + "]";
    const std::string ks = "kernel[" + std::to_string(s) + "]";
    ExpectArray(rewards[s], A, rs);
    ExpectArray(kernel[s], A, ks);
    for (int a = 0; a < A; ++a) {
      const std::string ra = rs + "[" + std::to_string(a) + "]";
      const std::string ka = ks + "[" + std::to_string(a) + "]";
      ExpectArray(rewards[s][a], B, ra);
      ExpectArray(kernel[s][a], B, ka);
      for (int b = 0; b < B; ++b) {
        const std::string kb = ka + "[" + std::to_string(b) + "]";
        game.reward(s, a, b) = Real(rewards[s][a][b], ra + "[" + std::to_string(b) + "]");
        ExpectArray(kernel[s][a][b], S, kb);
        auto row = game.transition(s, a, b);
        for (int sp = 0; sp < S; ++sp) {
          row[sp] = Real(kernel[s][a][b][sp], kb + "[" + std::to_string(sp) + "]");
        }
      }
    }
  }
  if (auto report = ValidateGame(game); !report.ok()) {
    throw InvalidArgument("game document: validation failed: " + report.Summary());
  }
  return game;
}

std::string SerializePolicy(const Policy& policy) {
  json doc = json::array();
  for (int s = 0; s < policy.num_states(); ++s) {
    auto row = policy.at(s);
    doc.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return doc.dump();
}

Policy DeserializePolicy(const std::string& text, Side side) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("policy document: parse error: ") + e.what());
  }
  if (!doc.is_array() || doc.empty() || !doc[0].is_array() || doc[0].empty()) {
    throw InvalidArgument("policy document: expected a non-empty nested array [s][action]");
  }
  const int S = static_cast<int>(doc.size());
  const int n = static_cast<int>(doc[0].size());
  Policy policy(side, S, n);
  for (int s = 0; s < S; ++s) {
    if (!doc[s].is_array() || static_cast<int>(doc[s].size()) != n) {
      throw InvalidArgument("policy document: row " + std::to_string(s) + " has wrong length");
    }
    for (int a = 0; a < n; ++a) {
      if (!doc[s][a].is_number()) {
        throw InvalidArgument("policy document: entry [" + std::to_string(s) + "][" +
                              std::to_string(a) + "] must be a number");
      }
      policy(s, a) = doc[s][a].get<double>();
    }
  }
  if (auto err = policy.Check(); !err.empty()) throw InvalidArgument(err);
  return policy;
}

std::uint64_t GameHash(const MarkovGame& game) {
  const std::string doc = SerializeGame(game);
  return Fnv1a(doc.data(), doc.size());
}

std::uint64_t PolicyHash(const Policy& policy) {
  const auto& d = policy.data();
  const int shape[3] = {static_cast<int>(policy.side()), policy.num_states(), policy.num_actions()};
  return Fnv1a(d.data(), d.size() * sizeof(double), Fnv1a(shape, sizeof(shape)));
}

}  // namespace mgsolve
