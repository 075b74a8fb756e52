#include <cmath>

#include "doctest.h"
#include "mgsolve/analytics.hpp"
#include "mgsolve/randgen.hpp"
#include "mgsolve/simplex.hpp"
#include "oracles.hpp"

using namespace mgsolve;
using oracle::SupDiff;

namespace {

MarkovGame SmallRandomGame(Rng& rng, int max_states, int max_actions, double gamma) {
  const int S = static_cast<int>(rng.Integer(1, max_states));
  const int A = static_cast<int>(rng.Integer(1, max_actions));
  const int B = static_cast<int>(rng.Integer(1, max_actions));
  return RandomGame({S, A, B, gamma, rng.Integer(0, 1u << 30)});
}

// Nearby policy: a random direction of length `radius` per state, projected.
Policy Perturb(Rng& rng, const Policy& p, double radius) {
  Policy out = p;
  std::vector<double> v(p.num_actions());
  for (int s = 0; s < p.num_states(); ++s) {
    auto x = p.at(s);
    for (int a = 0; a < p.num_actions(); ++a) v[a] = x[a] + radius * (2.0 * rng.Uniform() - 1.0);
    const auto proj = ProjectSimplex(v);
    std::copy(proj.begin(), proj.end(), out.at(s).begin());
  }
  return out;
}

double JointDistance(const JointPolicy& a, const JointPolicy& b) {
  double s = 0.0;
  for (Side side : {Side::kMin, Side::kMax}) {
    const double d = oracle::Norm2(a.of(side).data(), b.of(side).data());
    s += d * d;
  }
  return std::sqrt(s);
}

std::vector<double> Row(const QTensor& q, int s, const Policy& y) {
  std::vector<double> out(q.num_actions_min, 0.0);
  for (int a = 0; a < q.num_actions_min; ++a) {
    for (int b = 0; b < q.num_actions_max; ++b) out[a] += q(s, a, b) * y(s, b);
  }
  return out;
}

std::vector<double> Col(const QTensor& q, int s, const Policy& x) {
  std::vector<double> out(q.num_actions_max, 0.0);
  for (int a = 0; a < q.num_actions_min; ++a) {
    for (int b = 0; b < q.num_actions_max; ++b) out[b] += q(s, a, b) * x(s, a);
  }
  return out;
}

}  // namespace

TEST_CASE("Bellman target examples") {
  const MarkovGame g1 = oracle::G1();
  const QTensor q0 = BellmanTarget(g1, std::vector{0.0});
  CHECK(q0.data == g1.rewards);

  CHECK(BellmanTarget(oracle::G2(), std::vector{1.0})(0, 0, 0) == 1.0);

  MarkovGame ones = RandomGame({3, 2, 2, 0.75, 4});
  for (double& r : ones.rewards) r = 1.0;
  const QTensor q = BellmanTarget(ones, std::vector<double>(3, 4.0));
  for (double v : q.data) CHECK(v == doctest::Approx(4.0).epsilon(1e-14));

  CHECK_THROWS_AS(BellmanTarget(g1, std::vector{0.0, 1.0}), InvalidArgument);
}

TEST_CASE("Bellman target is a monotone contraction") {
  Rng rng(21);
  for (int draw = 0; draw < 200; ++draw) {
    const MarkovGame g = SmallRandomGame(rng, 5, 4, 0.9);
    std::vector<double> v1(g.num_states), v2(g.num_states);
    for (int s = 0; s < g.num_states; ++s) {
      v1[s] = 10.0 * rng.Uniform();
      v2[s] = v1[s] + 3.0 * rng.Uniform();  // v2 >= v1
    }
    const QTensor q1 = BellmanTarget(g, v1), q2 = BellmanTarget(g, v2);
    CHECK(SupDiff(q1.data, q2.data) <= g.gamma * SupDiff(v1, v2) + 1e-12);
    for (std::size_t i = 0; i < q1.data.size(); ++i) CHECK(q1.data[i] <= q2.data[i] + 1e-15);
  }
}

TEST_CASE("joint values on hand-computed games") {
  CHECK(JointValue(oracle::G2(), UniformJointPolicy(oracle::G2()))[0] ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(JointValue(oracle::G1(), UniformJointPolicy(oracle::G1()))[0] ==
        doctest::Approx(0.5).epsilon(1e-14));
  const auto v3 = JointValue(oracle::G3(), UniformJointPolicy(oracle::G3()));
  CHECK(v3[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(v3[1] == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("joint values agree with fixed-point iteration") {
  Rng rng(22);
  for (int draw = 0; draw < 100; ++draw) {
    const MarkovGame g = SmallRandomGame(rng, 6, 4, draw % 2 ? 0.9 : 0.3);
    const JointPolicy z = oracle::RandomJoint(rng, g);
    const auto v = JointValue(g, z);
    CHECK(SupDiff(v, oracle::ValueByIteration(g, z)) <= 1e-10);
    for (double x : v) {
      CHECK(x >= -1e-9);
      CHECK(x <= g.max_value() + 1e-9);
    }
  }
}

TEST_CASE("joint Q examples") {
  CHECK(JointQ(oracle::G2(), UniformJointPolicy(oracle::G2()))(0, 0, 0) ==
        doctest::Approx(1.0).epsilon(1e-14));
  Rng rng(23);
  const MarkovGame myopic = RandomGame({4, 3, 2, 0.0, 8});
  CHECK(JointQ(myopic, oracle::RandomJoint(rng, myopic)).data == myopic.rewards);
  CHECK(JointQ(oracle::G1(), UniformJointPolicy(oracle::G1())).data == oracle::G1().rewards);
}

TEST_CASE("marginal MDP examples") {
  const MarkovGame g = RandomGame({3, 2, 3, 0.9, 5});
  const MarginalMDP m = Marginalize(g, UniformPolicy(g, Side::kMin), Side::kMax);
  CHECK(m.side == Side::kMax);
  CHECK(m.num_actions == 3);

  Policy point(Side::kMax, 3, 3);
  for (int s = 0; s < 3; ++s) point(s, 2) = 1.0;
  const MarginalMDP pm = Marginalize(g, point, Side::kMin);
  for (int s = 0; s < 3; ++s) {
    for (int a = 0; a < 2; ++a) {
      CHECK(pm.reward(s, a) == g.reward(s, a, 2));
      const auto row = pm.transition(s, a);
      const auto want = g.transition(s, a, 2);
      for (int t = 0; t < 3; ++t) CHECK(row[t] == doctest::Approx(want[t]).epsilon(1e-15));
    }
  }

  const MarginalMDP g1m = Marginalize(oracle::G1(), UniformPolicy(oracle::G1(), Side::kMax), Side::kMin);
  CHECK(g1m.reward.data == std::vector{0.5, 0.5});

  CHECK_THROWS_AS(Marginalize(g, point, Side::kMax), InvalidArgument);
}

TEST_CASE("marginal rows stay stochastic") {
  Rng rng(24);
  for (int draw = 0; draw < 100; ++draw) {
    const MarkovGame g = SmallRandomGame(rng, 6, 5, 0.9);
    const JointPolicy z = oracle::RandomJoint(rng, g);
    for (Side side : {Side::kMin, Side::kMax}) {
      const MarginalMDP m = Marginalize(g, z.of(Opponent(side)), side);
      for (int s = 0; s < g.num_states; ++s) {
        for (int a = 0; a < m.num_actions; ++a) {
          double sum = 0.0;
          for (double p : m.transition(s, a)) sum += p;
          CHECK(std::abs(sum - 1.0) <= 1e-12);
          CHECK(m.reward(s, a) >= 0.0);
          CHECK(m.reward(s, a) <= 1.0);
        }
      }
    }
  }
}

TEST_CASE("MDP policy values match joint values") {
  Rng rng(25);
  for (int draw = 0; draw < 100; ++draw) {
    const MarkovGame g = SmallRandomGame(rng, 6, 4, 0.95);
    const JointPolicy z = oracle::RandomJoint(rng, g);
    const auto joint = JointValue(g, z);
    CHECK(SupDiff(MdpPolicyValue(Marginalize(g, z.max_policy, Side::kMin), z.min_policy), joint) <= 1e-10);
    CHECK(SupDiff(MdpPolicyValue(Marginalize(g, z.min_policy, Side::kMax), z.max_policy), joint) <= 1e-10);
  }
  const MarkovGame g2 = oracle::G2();
  const MarginalMDP m2 = Marginalize(g2, UniformPolicy(g2, Side::kMax), Side::kMin);
  CHECK(MdpPolicyValue(m2, UniformPolicy(g2, Side::kMin))[0] == doctest::Approx(1.0).epsilon(1e-14));
  const MarkovGame g3 = oracle::G3();
  const auto v3 = MdpPolicyValue(Marginalize(g3, UniformPolicy(g3, Side::kMin), Side::kMax),
                                 UniformPolicy(g3, Side::kMax));
  CHECK(v3[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(v3[1] == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("marginal q-functions equal the joint Q contracted with the opponent") {
  Rng rng(26);
  for (int draw = 0; draw < 200; ++draw) {
    const MarkovGame g = SmallRandomGame(rng, 5, 4, draw % 2 ? 0.99 : 0.5);
    const JointPolicy z = oracle::RandomJoint(rng, g);
    const QTensor Q = JointQ(g, z);
    const StateActionTable qx = MdpQ(Marginalize(g, z.max_policy, Side::kMin), z.min_policy);
    const StateActionTable qy = MdpQ(Marginalize(g, z.min_policy, Side::kMax), z.max_policy);
    for (int s = 0; s < g.num_states; ++s) {
      const auto row = Row(Q, s, z.max_policy);
      const auto col = Col(Q, s, z.min_policy);
      for (int a = 0; a < g.num_actions_min; ++a) REQUIRE(std::abs(qx(s, a) - row[a]) <= 1e-10);
      for (int b = 0; b < g.num_actions_max; ++b) REQUIRE(std::abs(qy(s, b) - col[b]) <= 1e-10);
    }
  }
}

TEST_CASE("MDP q-function special cases") {
  const MarkovGame myopic = RandomGame({3, 3, 2, 0.0, 1});
  const MarginalMDP m = Marginalize(myopic, UniformPolicy(myopic, Side::kMax), Side::kMin);
  CHECK(MdpQ(m, UniformPolicy(myopic, Side::kMin)).data == m.reward.data);

  const MarkovGame single = RandomGame({1, 3, 2, 0.8, 2});
  const MarginalMDP ms = Marginalize(single, UniformPolicy(single, Side::kMax), Side::kMin);
  const Policy x = UniformPolicy(single, Side::kMin);
  const double V = MdpPolicyValue(ms, x)[0];
  const auto q = MdpQ(ms, x);
  for (int a = 0; a < 3; ++a) CHECK(q(0, a) == doctest::Approx(ms.reward(0, a) + 0.8 * V).epsilon(1e-13));
}

TEST_CASE("best responses") {
  const MarkovGame g2 = oracle::G2();
  const MarginalMDP m2 = Marginalize(g2, UniformPolicy(g2, Side::kMax), Side::kMin);
  CHECK(MdpBestResponse(m2, Sense::kMinimize).values[0] == doctest::Approx(1.0).epsilon(1e-14));

  const MarkovGame g1 = oracle::G1();
  const MarginalMDP m1 = Marginalize(g1, UniformPolicy(g1, Side::kMax), Side::kMin);
  CHECK(MdpBestResponse(m1, Sense::kMinimize).values[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(MdpBestResponse(m1, Sense::kMaximize).values[0] == doctest::Approx(0.5).epsilon(1e-14));

  const MarkovGame myopic = RandomGame({4, 3, 3, 0.0, 3});
  const MarginalMDP mm = Marginalize(myopic, UniformPolicy(myopic, Side::kMax), Side::kMin);
  const auto br = MdpBestResponse(mm, Sense::kMinimize).values;
  for (int s = 0; s < 4; ++s) {
    const auto r = mm.reward.at(s);
    CHECK(br[s] == *std::min_element(r.begin(), r.end()));
  }
}

TEST_CASE("best responses agree with enumeration over deterministic policies") {
  Rng rng(27);
  for (int draw = 0; draw < 60; ++draw) {
    const MarkovGame g = SmallRandomGame(rng, 3, 3, draw % 2 ? 0.9 : 0.6);
    const JointPolicy z = oracle::RandomJoint(rng, g);
    const auto min_br = MdpBestResponse(Marginalize(g, z.max_policy, Side::kMin), Sense::kMinimize);
    const auto max_br = MdpBestResponse(Marginalize(g, z.min_policy, Side::kMax), Sense::kMaximize);
    CHECK(SupDiff(min_br.values, oracle::BestResponseByEnumeration(g, z.max_policy)) <= 1e-10);
    CHECK(SupDiff(max_br.values, oracle::BestResponseByEnumeration(g, z.min_policy)) <= 1e-10);
    for (double p : min_br.policy.data()) CHECK((p == 0.0 || p == 1.0));
    // The returned policy attains the returned values.
    JointPolicy attained{min_br.policy, z.max_policy};
    CHECK(SupDiff(JointValue(g, attained), min_br.values) <= 1e-10);
  }
}

TEST_CASE("best-response values satisfy Bellman optimality") {
  Rng rng(28);
  for (int draw = 0; draw < 50; ++draw) {
    const MarkovGame g = SmallRandomGame(rng, 10, 6, 0.99);
    const Policy y = oracle::RandomPolicy(rng, Side::kMax, g.num_states, g.num_actions_max);
    const MarginalMDP m = Marginalize(g, y, Side::kMin);
    const auto br = MdpBestResponse(m, Sense::kMinimize);
    const auto q = MdpQFromValues(m, br.values);
    for (int s = 0; s < g.num_states; ++s) {
      const auto row = q.at(s);
      CHECK(std::abs(*std::min_element(row.begin(), row.end()) - br.values[s]) <= 1e-10);
    }
  }
}

TEST_CASE("visitation examples") {
  const MarkovGame g3 = oracle::G3();
  const auto d = Visitation(g3, UniformJointPolicy(g3), std::vector{1.0, 0.0});
  CHECK(d[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(d[1] == doctest::Approx(0.5).epsilon(1e-14));

  MarkovGame myopic = RandomGame({4, 2, 2, 0.0, 1});
  const std::vector rho = {0.1, 0.2, 0.3, 0.4};
  CHECK(SupDiff(Visitation(myopic, UniformJointPolicy(myopic), rho), rho) <= 1e-15);

  CHECK(Visitation(oracle::G2(), UniformJointPolicy(oracle::G2()), std::vector{1.0})[0] ==
        doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("visitation matches the truncated discounted series") {
  Rng rng(29);
  for (int draw = 0; draw < 50; ++draw) {
    const MarkovGame g = SmallRandomGame(rng, 6, 3, 0.8);
    const JointPolicy z = oracle::RandomJoint(rng, g);
    const int S = g.num_states;
    std::vector<double> rho(S);
    double total = 0.0;
    for (double& r : rho) total += r = rng.Uniform();
    for (double& r : rho) r /= total;

    std::vector<double> r, P;
    oracle::JointChain(g, z, r, P);
    std::vector<double> mu = rho, series(S, 0.0);
    double weight = 1.0 - g.gamma;
    for (int t = 0; t < 400; ++t) {
      for (int s = 0; s < S; ++s) series[s] += weight * mu[s];
      std::vector<double> next(S, 0.0);
      for (int s = 0; s < S; ++s) {
        for (int u = 0; u < S; ++u) next[u] += mu[s] * P[s * S + u];
      }
      mu = next;
      weight *= g.gamma;
    }
    const auto d = Visitation(g, z, rho);
    CHECK(SupDiff(d, series) <= 1e-10);
    double sum = 0.0;
    for (int s = 0; s < S; ++s) {
      sum += d[s];
      CHECK(d[s] >= (1.0 - g.gamma) * rho[s] - 1e-12);
    }
    CHECK(std::abs(sum - 1.0) <= 1e-10);
  }
}

TEST_CASE("matrix game examples") {
  const std::vector<double> identity = {1, 0, 0, 1};
  const auto sol = MatrixGameValue(identity, 2, 2);
  CHECK(sol.value == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(oracle::SupDiff(sol.row_strategy, {0.5, 0.5}) <= 1e-9);
  CHECK(oracle::SupDiff(sol.col_strategy, {0.5, 0.5}) <= 1e-9);
  CHECK(sol.duality_gap <= 1e-10);

  const std::vector<double> dominant = {0, 0, 1, 1};
  const auto dom = MatrixGameValue(dominant, 2, 2);
  CHECK(std::abs(dom.value) <= 1e-10);
  CHECK(oracle::SupDiff(dom.row_strategy, {1.0, 0.0}) <= 1e-9);

  const std::vector<double> constant(12, 0.37);
  const auto c = MatrixGameValue(constant, 3, 4);
  CHECK(c.value == doctest::Approx(0.37).epsilon(1e-14));
  CHECK(c.duality_gap <= 1e-10);

  CHECK_THROWS_AS(MatrixGameValue(std::vector<double>{1.0, NAN}, 1, 2), InvalidArgument);
}

TEST_CASE("matrix game witnesses certify the value") {
  Rng rng(30);
  for (int draw = 0; draw < 200; ++draw) {
    const int A = static_cast<int>(rng.Integer(1, 10));
    const int B = static_cast<int>(rng.Integer(1, 10));
    std::vector<double> M(A * B);
    const double scale = draw % 3 == 0 ? 50.0 : 1.0;
    for (double& m : M) m = scale * rng.Uniform();
    const auto sol = MatrixGameValue(M, A, B);
    // max_b (x^T M)_b - min_a (M y)_a bounds |value - v*| from both sides.
    const double gap = MatrixDualityGap(M, A, B, sol.row_strategy, sol.col_strategy);
    REQUIRE(gap <= 1e-10 * std::max(1.0, scale));
    CHECK(std::abs(gap - sol.duality_gap) <= 1e-12 * scale);
    double lo = 1e300, hi = -1e300;
    for (int a = 0; a < A; ++a) {
      double v = 0.0;
      for (int b = 0; b < B; ++b) v += M[a * B + b] * sol.col_strategy[b];
      lo = std::min(lo, v);
    }
    for (int b = 0; b < B; ++b) {
      double v = 0.0;
      for (int a = 0; a < A; ++a) v += M[a * B + b] * sol.row_strategy[a];
      hi = std::max(hi, v);
    }
    CHECK(sol.value >= lo - 1e-12 * scale);
    CHECK(sol.value <= hi + 1e-12 * scale);
  }
}

TEST_CASE("minimax values") {
  CHECK(MinimaxValues(oracle::G2()).values[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(MinimaxValues(oracle::G1()).values[0] == doctest::Approx(0.5).epsilon(1e-10));

  MarkovGame constant = RandomGame({3, 2, 3, 0.9, 6});
  for (double& r : constant.rewards) r = 0.3;
  for (double v : MinimaxValues(constant).values) CHECK(std::abs(v - 3.0) <= 1e-10);
}

TEST_CASE("minimax values are the Shapley fixed point") {
  Rng rng(31);
  for (int draw = 0; draw < 10; ++draw) {
    const MarkovGame g = SmallRandomGame(rng, 4, 3, 0.9);
    const auto sol = MinimaxValues(g);
    const QTensor q = BellmanTarget(g, sol.values);
    for (int s = 0; s < g.num_states; ++s) {
      const auto inner = MatrixGameValue(q.matrix(s), g.num_actions_min, g.num_actions_max);
      CHECK(std::abs(inner.value - sol.values[s]) <= 1e-9);
    }
    CHECK(SupDiff(q.data, sol.q.data) <= 1e-12);
    CHECK(NashGap(g, sol.equilibrium) <= 1e-8);
    // At an equilibrium the joint value is v*.
    CHECK(SupDiff(JointValue(g, sol.equilibrium), sol.values) <= 1e-8);
  }
}

TEST_CASE("Nash gap examples") {
  const MarkovGame g1 = oracle::G1();
  CHECK(std::abs(NashGap(g1, UniformJointPolicy(g1))) <= 1e-12);
  CHECK(NashGap(oracle::G2(), UniformJointPolicy(oracle::G2())) == 0.0);
  const JointPolicy pure{oracle::Pure(Side::kMin, 2, 0), oracle::Pure(Side::kMax, 2, 0)};
  CHECK(NashGap(g1, pure) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("Nash gap is nonnegative and matches enumeration") {
  Rng rng(32);
  for (int draw = 0; draw < 60; ++draw) {
    const MarkovGame g = SmallRandomGame(rng, 3, 3, 0.7);
    const JointPolicy z = oracle::RandomJoint(rng, g);
    const auto hi = oracle::BestResponseByEnumeration(g, z.min_policy);
    const auto lo = oracle::BestResponseByEnumeration(g, z.max_policy);
    double want = -1e300;
    for (int s = 0; s < g.num_states; ++s) want = std::max(want, hi[s] - lo[s]);
    const double gap = NashGap(g, z);
    CHECK(gap >= -1e-8);
    CHECK(std::abs(gap - want) <= 1e-10);
  }
}

TEST_CASE("performance difference identity") {
  Rng rng(33);
  int checked = 0;
  for (int draw = 0; draw < 1000; ++draw) {
    const double gamma = draw % 2 ? 0.9 : 0.3;
    const MarkovGame g = SmallRandomGame(rng, 5, 4, gamma);
    const JointPolicy z = oracle::RandomJoint(rng, g);
    const Policy x2 = oracle::RandomPolicy(rng, Side::kMin, g.num_states, g.num_actions_min);
    const int s0 = static_cast<int>(rng.Integer(0, g.num_states - 1));

    const JointPolicy z2{x2, z.max_policy};
    const double lhs = JointValue(g, z2)[s0] - JointValue(g, z)[s0];
    std::vector<double> rho(g.num_states, 0.0);
    rho[s0] = 1.0;
    const auto d = Visitation(g, z2, rho);
    const QTensor Q = JointQ(g, z);
    double rhs = 0.0;
    for (int s = 0; s < g.num_states; ++s) {
      const auto qy = Row(Q, s, z.max_policy);
      double inner = 0.0;
      for (int a = 0; a < g.num_actions_min; ++a) inner += (x2(s, a) - z.min_policy(s, a)) * qy[a];
      rhs += d[s] * inner;
    }
    rhs /= 1.0 - gamma;
    REQUIRE(std::abs(lhs - rhs) <= 1e-8 * std::max(1.0, std::abs(lhs)));
    ++checked;
  }
  CHECK(checked == 1000);
}

TEST_CASE("smoothness bounds hold on random pairs") {
  Rng rng(34);
  int violations = 0;
  for (int draw = 0; draw < 1000; ++draw) {
    const MarkovGame g = SmallRandomGame(rng, 4, 4, draw % 2 ? 0.9 : 0.5);
    const JointPolicy z = oracle::RandomJoint(rng, g);
    JointPolicy z2;
    if (draw % 3 == 0) {
      z2 = oracle::RandomJoint(rng, g);
    } else {
      const double radius = draw % 3 == 1 ? 1e-3 : 0.1;
      z2 = {Perturb(rng, z.min_policy, radius), Perturb(rng, z.max_policy, radius)};
    }
    const double dist = JointDistance(z, z2);
    const double A = g.num_actions_min, B = g.num_actions_max, gm = g.gamma;
    const double c2 = (1.0 - gm) * (1.0 - gm);
    const double slack = 1e-12;

    const auto v = JointValue(g, z), v2 = JointValue(g, z2);
    if (SupDiff(v, v2) > std::sqrt(A + B) * dist / c2 + slack) ++violations;
    const auto q = JointQ(g, z), q2 = JointQ(g, z2);
    if (SupDiff(q.data, q2.data) > gm * std::sqrt(A + B) * dist / c2 + slack) ++violations;
    std::vector<double> rho(g.num_states);
    double total = 0.0;
    for (double& r : rho) total += r = rng.Uniform();
    for (double& r : rho) r /= total;
    if (SupDiff(Visitation(g, z, rho), Visitation(g, z2, rho)) >
        std::sqrt(A + B) * dist / (1.0 - gm) + slack) {
      ++violations;
    }
    const double dx = oracle::Norm2(z.min_policy.data(), z2.min_policy.data());
    const double dy = oracle::Norm2(z.max_policy.data(), z2.max_policy.data());
    if (SupDiff(MaxBestResponseValues(g, z.min_policy), MaxBestResponseValues(g, z2.min_policy)) >
        std::sqrt(A) * dx / c2 + slack) {
      ++violations;
    }
    if (SupDiff(MinBestResponseValues(g, z.max_policy), MinBestResponseValues(g, z2.max_policy)) >
        std::sqrt(B) * dy / c2 + slack) {
      ++violations;
    }
  }
  CHECK(violations == 0);
}
