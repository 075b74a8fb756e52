#include <cstring>

#include "doctest.h"
#include "mgsolve/game.hpp"
#include "mgsolve/randgen.hpp"
#include "oracles.hpp"

using namespace mgsolve;

namespace {

bool HasViolation(const ValidationReport& r, const std::string& kind, std::vector<int> index) {
  for (const auto& v : r.violations) {
    if (v.kind == kind && v.index == index) return true;
  }
  return false;
}

bool BitEqual(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("single-action game validates") {
  CHECK(ValidateGame(oracle::G2()).ok());
  CHECK(ValidateGame(oracle::G1()).ok());
  CHECK(ValidateGame(oracle::G3()).ok());
}

TEST_CASE("kernel row summing to 0.9 is reported at its index") {
  MarkovGame g = oracle::G3();
  g.transition(1, 0, 0)[1] = 0.9;
  const auto report = ValidateGame(g);
  CHECK_FALSE(report.ok());
  CHECK(HasViolation(report, "kernel_row_sum", {1, 0, 0}));
  CHECK(report.violations.size() == 1);
}

TEST_CASE("reward above one is a range violation") {
  MarkovGame g = oracle::G1();
  g.reward(0, 1, 0) = 1.5;
  CHECK(HasViolation(ValidateGame(g), "reward_range", {0, 1, 0}));
}

TEST_CASE("negative kernel entries and bad discounts are reported") {
  MarkovGame g = oracle::G3();
  g.transition(0, 0, 0)[0] = -0.5;
  g.transition(0, 0, 0)[1] = 1.5;
  CHECK(HasViolation(ValidateGame(g), "kernel_negative", {0, 0, 0}));

  MarkovGame h = oracle::G2();
  h.gamma = 1.0;
  CHECK(HasViolation(ValidateGame(h), "gamma", {}));
  h.gamma = -0.1;
  CHECK(HasViolation(ValidateGame(h), "gamma", {}));
}

TEST_CASE("game documents round-trip bit for bit") {
  const MarkovGame g2 = oracle::G2();
  CHECK(DeserializeGame(SerializeGame(g2)) == g2);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const MarkovGame g = RandomGame({4, 3, 2, 0.97, seed});
    const MarkovGame back = DeserializeGame(SerializeGame(g));
    CHECK(BitEqual(back.rewards, g.rewards));
    CHECK(BitEqual(back.kernel, g.kernel));
    CHECK(back.gamma == g.gamma);
    CHECK(back == g);
  }
}

TEST_CASE("malformed game documents name the offending field") {
  std::string doc = SerializeGame(oracle::G2());
  const auto pos = doc.find("\"gamma\"");
  REQUIRE(pos != std::string::npos);
  std::string missing = doc;
  missing.replace(pos, 7, "\"gamme\"");
  try {
    DeserializeGame(missing);
    FAIL("expected a parse error");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("gamma") != std::string::npos);
  }

  CHECK_THROWS_AS(DeserializeGame("{not json"), InvalidArgument);
  CHECK_THROWS_AS(DeserializeGame("[1,2]"), InvalidArgument);

  const std::string zero_states =
      R"({"num_states":0,"num_actions_min":1,"num_actions_max":1,"gamma":0.5,"rewards":[],"kernel":[]})";
  CHECK_THROWS_AS(DeserializeGame(zero_states), InvalidArgument);

  MarkovGame bad = oracle::G3();
  bad.transition(0, 0, 0)[1] = 0.9;
  CHECK_THROWS_AS(DeserializeGame(SerializeGame(bad)), InvalidArgument);
}

TEST_CASE("uniform policies") {
  for (int n : {1, 2, 10}) {
    MarkovGame g(3, n, 2, 0.5);
    const Policy x = UniformPolicy(g, Side::kMin);
    CHECK(x.num_actions() == n);
    for (int s = 0; s < 3; ++s) {
      for (int a = 0; a < n; ++a) CHECK(x(s, a) == doctest::Approx(1.0 / n).epsilon(1e-15));
    }
    CHECK(x.Check().empty());
  }
}

TEST_CASE("policy documents round-trip and are checked") {
  Rng rng(5);
  const Policy x = oracle::RandomPolicy(rng, Side::kMax, 4, 3);
  const Policy back = DeserializePolicy(SerializePolicy(x), Side::kMax);
  CHECK(back == x);
  CHECK_THROWS_AS(DeserializePolicy("[[0.5, 0.6]]", Side::kMin), InvalidArgument);
  CHECK_THROWS_AS(DeserializePolicy("[[0.5, 0.5], [1.0]]", Side::kMin), InvalidArgument);
}

TEST_CASE("policy shape checks against a game") {
  const MarkovGame g = oracle::G1();
  CHECK_NOTHROW(CheckJointPolicyFor(g, UniformJointPolicy(g)));
  CHECK_THROWS_AS(CheckPolicyFor(g, Policy(Side::kMin, 1, 3, {1, 0, 0})), InvalidArgument);
  JointPolicy swapped{UniformPolicy(g, Side::kMax), UniformPolicy(g, Side::kMin)};
  CHECK_THROWS_AS(CheckJointPolicyFor(g, swapped), InvalidArgument);
}

TEST_CASE("hashes distinguish games and policies") {
  const MarkovGame a = RandomGame({3, 2, 2, 0.9, 1});
  const MarkovGame b = RandomGame({3, 2, 2, 0.9, 2});
  CHECK(GameHash(a) == GameHash(RandomGame({3, 2, 2, 0.9, 1})));
  CHECK(GameHash(a) != GameHash(b));
  const Policy x = UniformPolicy(a, Side::kMin);
  Policy y = x;
  y(0, 0) = 0.75;
  y(0, 1) = 0.25;
  CHECK(PolicyHash(x) != PolicyHash(y));
}
