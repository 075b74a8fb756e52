#pragma once

#include <functional>
#include <memory>
#include <string>

#include "mgsolve/analytics.hpp"
#include "mgsolve/game.hpp"

namespace mgsolve {

// Averaging weight alpha_tau = (H + 1) / (H + tau).
double Alpha(long tau, double horizon);
// H = (1 + gamma) / (1 - gamma).
double AveragingHorizon(double gamma);
// Critic weight beta_tau = (H0 + 1) / (H0 + tau) with H0 = ceil(2 / (1 - gamma)).
double CriticHorizon(double gamma);
double Beta(long tau, double gamma);

// Stepsize ceilings under which the convergence guarantees are proved. The
// default experiments run well above them.
double TheoreticalLocalStepsize(int states, int actions_min, int actions_max, double gamma);
double TheoreticalGlobalStepsize(int actions_min, int actions_max, double gamma);

struct LearnerTraceEvent {
  Side side;
  long step;            // local counter within the segment, starting at 1
  double policy_change;  // sup-norm distance between the next and current policy
  double value_min;      // extrema of the learner's value estimate (NaN if none)
  double value_max;
};
using TraceHook = std::function<void(const LearnerTraceEvent&)>;

// A decentralized learner. It sees nothing of the opponent except the
// marginal MDP handed to ObserveAndUpdate.
//
// Protocol per segment: BeginSegment(initial, stepsize); then repeatedly
// play current_policy(), receive the MDP induced by the opponent's policy
// of the same iteration, and call ObserveAndUpdate(mdp). SegmentOutput() is
// the policy passed on to the next segment.
class Learner {
 public:
  explicit Learner(Side side) : side_(side) {}
  virtual ~Learner() = default;
  Learner(const Learner&) = delete;
  Learner& operator=(const Learner&) = delete;

  Side side() const { return side_; }
  virtual std::string name() const = 0;

  virtual void BeginSegment(const Policy& initial, double stepsize) = 0;
  // Returns the policy to play next.
  virtual const Policy& ObserveAndUpdate(const MarginalMDP& obs) = 0;
  virtual const Policy& current_policy() const = 0;
  virtual Policy SegmentOutput() const = 0;

  void set_trace_hook(TraceHook hook) { trace_ = std::move(hook); }

 protected:
  // +1 moves against the gradient (min-player), -1 along it (max-player).
  double descent_sign() const { return side_ == Side::kMin ? 1.0 : -1.0; }
  void CheckObservation(const MarginalMDP& obs, const Policy& policy) const;
  void Trace(long step, const Policy& previous, const Policy& next, const ValueVector* values) const;

 private:
  Side side_;
  TraceHook trace_;
};

using LearnerFactory = std::function<std::unique_ptr<Learner>(Side)>;

// Optimistic policy gradient: with q^t the q-function of the played policy
// in the observed MDP,
//   aux^t      = P(aux^{t-1} - eta q^t)   (aux^{T1} = x^{T1})
//   x^{t+1}    = P(aux^t - eta q^t)
// for the min-player; the max-player ascends.
class OgdaLearner final : public Learner {
 public:
  explicit OgdaLearner(Side side) : Learner(side) {}
  std::string name() const override { return "ogda"; }

  void BeginSegment(const Policy& initial, double stepsize) override;
  const Policy& ObserveAndUpdate(const MarginalMDP& obs) override;
  const Policy& current_policy() const override { return policy_; }
  Policy SegmentOutput() const override { return last_played_; }

  const Policy& auxiliary_policy() const { return aux_; }
  const StateActionTable& last_gradient() const { return gradient_; }
  double stepsize() const { return eta_; }

 private:
  Policy policy_, aux_, last_played_;
  StateActionTable gradient_;
  double eta_ = 0.0;
  long step_ = 0;
  std::vector<double> buffer_, scratch_;
};

// Optimistic gradient on q-functions built from a running lower (min side)
// or upper (max side) estimate of the game value:
//   q^t(s,a)     = r^t(s,a) + gamma sum_s' P^t(s'|s,a) V^t(s')
//   qbar         <- (1 - alpha_tau) qbar + alpha_tau q^t
//   V^{t+1}(s)   = min_a qbar(s,a)            (max_b on the max side)
//   xhat         <- (1 - alpha_tau) xhat + alpha_tau x^t
// with tau the local counter. The segment output is xhat, the weighted
// average of the played policies.
//
// Initialization of V at the first observation: the best-response value of
// the observed MDP, or in standalone mode 0 (min side) / 1/(1-gamma) (max).
class AveragingOgdaLearner final : public Learner {
 public:
  AveragingOgdaLearner(Side side, bool standalone = false)
      : Learner(side), standalone_(standalone) {}
  std::string name() const override { return "avg-ogda"; }

  void BeginSegment(const Policy& initial, double stepsize) override;
  const Policy& ObserveAndUpdate(const MarginalMDP& obs) override;
  const Policy& current_policy() const override { return policy_; }
  Policy SegmentOutput() const override;

  const Policy& auxiliary_policy() const { return aux_; }
  const StateActionTable& last_gradient() const { return gradient_; }
  // V_lo (min side) or V_hi (max side) for the next iteration.
  const ValueVector& value_bound() const { return values_; }
  long local_step() const { return tau_; }
  double stepsize() const { return eta_; }

 private:
  bool standalone_;
  Policy policy_, aux_, average_, last_played_;
  StateActionTable gradient_, q_average_;
  ValueVector values_;
  double eta_ = 0.0;
  double horizon_ = 0.0;
  long tau_ = 0;
  std::vector<double> buffer_, scratch_;
};

// Optimistic gradient with a smoothed critic:
//   qhat^t      = r^t + gamma P^t V^{t-1}
//   aux^{t+1}   = P(aux^t - eta qhat^t)
//   x^{t+1}     = P(aux^{t+1} - eta qhat^t)
//   V^t(s)      = (1 - beta_tau) V^{t-1}(s) + beta_tau <x^t_s, qhat^t_s>
// V^{T1-1} is the value of the initial policy in the first observed MDP.
// The segment output is the last played policy.
class ActorCriticLearner final : public Learner {
 public:
  explicit ActorCriticLearner(Side side) : Learner(side) {}
  std::string name() const override { return "actor-critic"; }

  void BeginSegment(const Policy& initial, double stepsize) override;
  const Policy& ObserveAndUpdate(const MarginalMDP& obs) override;
  const Policy& current_policy() const override { return policy_; }
  Policy SegmentOutput() const override { return last_played_; }

  const ValueVector& critic() const { return values_; }

 private:
  Policy policy_, aux_, last_played_;
  StateActionTable gradient_;
  ValueVector values_;
  double eta_ = 0.0;
  long tau_ = 0;
  std::vector<double> buffer_, scratch_;
};

// Plays a fixed policy regardless of observations.
class FrozenLearner final : public Learner {
 public:
  explicit FrozenLearner(Policy policy) : Learner(policy.side()), policy_(std::move(policy)) {}
  std::string name() const override { return "frozen"; }

  void BeginSegment(const Policy&, double) override {}
  const Policy& ObserveAndUpdate(const MarginalMDP&) override { return policy_; }
  const Policy& current_policy() const override { return policy_; }
  Policy SegmentOutput() const override { return policy_; }

 private:
  Policy policy_;
};

LearnerFactory OgdaFactory();
LearnerFactory AveragingOgdaFactory(bool standalone = false);
LearnerFactory ActorCriticFactory();

}  // namespace mgsolve
