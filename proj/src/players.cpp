#include "mgsolve/players.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mgsolve/simplex.hpp"

namespace mgsolve {

namespace {

// out_s = P(from_s - sign * eta * grad_s) for every state.
void ProjectedStep(const Policy& from, const StateActionTable& grad, double signed_eta,
                   Policy& out, std::vector<double>& buffer, std::vector<double>& scratch) {
  const int n = from.num_actions();
  buffer.resize(n);
  for (int s = 0; s < from.num_states(); ++s) {
    auto src = from.at(s);
    auto g = grad.at(s);
    for (int a = 0; a < n; ++a) buffer[a] = src[a] - signed_eta * g[a];
    ProjectSimplexInto(buffer, out.at(s), scratch);
  }
}

void CheckBegin(const Policy& initial, Side side, double stepsize) {
  if (initial.side() != side) throw InvalidArgument("BeginSegment: policy belongs to the other side");
  if (auto err = initial.Check(); !err.empty()) throw InvalidArgument("BeginSegment: " + err);
  if (!(stepsize > 0.0) || !std::isfinite(stepsize)) {
    throw InvalidArgument("BeginSegment: stepsize must be positive");
  }
}

double Extremum(std::span<const double> row, Side side) {
  return side == Side::kMin ? *std::min_element(row.begin(), row.end())
                            : *std::max_element(row.begin(), row.end());
}

}  // namespace

double AveragingHorizon(double gamma) { return (1.0 + gamma) / (1.0 - gamma); }

double Alpha(long tau, double horizon) {
  if (tau < 1) throw InvalidArgument("Alpha: tau must be >= 1");
  if (!(horizon > 0.0)) throw InvalidArgument("Alpha: horizon must be positive");
  return (horizon + 1.0) / (horizon + static_cast<double>(tau));
}

double CriticHorizon(double gamma) { return std::ceil(2.0 / (1.0 - gamma)); }

double Beta(long tau, double gamma) { return Alpha(tau, CriticHorizon(gamma)); }

double TheoreticalLocalStepsize(int states, int actions_min, int actions_max, double gamma) {
  return std::pow(1.0 - gamma, 2.5) /
         (32.0 * std::sqrt(static_cast<double>(states)) * (actions_min + actions_max));
}

double TheoreticalGlobalStepsize(int actions_min, int actions_max, double gamma) {
  return (1.0 - gamma) / (16.0 * std::max(actions_min, actions_max));
}

void Learner::CheckObservation(const MarginalMDP& obs, const Policy& policy) const {
  if (obs.side != side_ || obs.num_states != policy.num_states() ||
      obs.num_actions != policy.num_actions()) {
    throw InvalidArgument(std::string(SideName(side_)) +
                          "-player: observation does not match the learner's policy shape");
  }
}

void Learner::Trace(long step, const Policy& previous, const Policy& next,
                    const ValueVector* values) const {
  if (!trace_) return;
  double change = 0.0;
  for (std::size_t i = 0; i < next.data().size(); ++i) {
    change = std::max(change, std::abs(next.data()[i] - previous.data()[i]));
  }
  LearnerTraceEvent ev{side_, step, change, std::numeric_limits<double>::quiet_NaN(),
                       std::numeric_limits<double>::quiet_NaN()};
  if (values != nullptr && !values->empty()) {
    auto [lo, hi] = std::minmax_element(values->begin(), values->end());
    ev.value_min = *lo;
    ev.value_max = *hi;
  }
  trace_(ev);
}

// ---------------------------------------------------------------- OGDA

void OgdaLearner::BeginSegment(const Policy& initial, double stepsize) {
  CheckBegin(initial, side(), stepsize);
  policy_ = initial;
  aux_ = initial;
  last_played_ = initial;
  eta_ = stepsize;
  step_ = 0;
}

const Policy& OgdaLearner::ObserveAndUpdate(const MarginalMDP& obs) {
  CheckObservation(obs, policy_);
  gradient_ = MdpQ(obs, policy_);
  const double signed_eta = descent_sign() * eta_;
  if (step_ > 0) ProjectedStep(aux_, gradient_, signed_eta, aux_, buffer_, scratch_);
  ++step_;
  last_played_ = policy_;
  ProjectedStep(aux_, gradient_, signed_eta, policy_, buffer_, scratch_);
  Trace(step_, last_played_, policy_, nullptr);
  return policy_;
}

// ------------------------------------------------------- Averaging OGDA

void AveragingOgdaLearner::BeginSegment(const Policy& initial, double stepsize) {
  CheckBegin(initial, side(), stepsize);
  policy_ = initial;
  aux_ = initial;
  average_ = initial;
  last_played_ = initial;
  eta_ = stepsize;
  tau_ = 0;
  q_average_ = StateActionTable(initial.num_states(), initial.num_actions());
  values_.clear();
}

const Policy& AveragingOgdaLearner::ObserveAndUpdate(const MarginalMDP& obs) {
  CheckObservation(obs, policy_);
  if (tau_ == 0) {
    horizon_ = AveragingHorizon(obs.gamma);
    if (standalone_) {
      values_.assign(obs.num_states, side() == Side::kMin ? 0.0 : 1.0 / (1.0 - obs.gamma));
    } else {
      values_ = MdpBestResponse(obs, SenseOf(side())).values;
    }
  }
  ++tau_;
  const double alpha = Alpha(tau_, horizon_);
  const double signed_eta = descent_sign() * eta_;

  gradient_ = MdpQFromValues(obs, values_);
  if (tau_ > 1) ProjectedStep(aux_, gradient_, signed_eta, aux_, buffer_, scratch_);
  MixInPlace(average_.data(), policy_.data(), alpha);
  last_played_ = policy_;
  ProjectedStep(aux_, gradient_, signed_eta, policy_, buffer_, scratch_);

  MixInPlace(q_average_.data, gradient_.data, alpha);
  for (int s = 0; s < obs.num_states; ++s) values_[s] = Extremum(q_average_.at(s), side());

  Trace(tau_, last_played_, policy_, &values_);
  return policy_;
}

Policy AveragingOgdaLearner::SegmentOutput() const {
  if (tau_ == 0) throw InvalidArgument("avg-ogda: segment output requested before any update");
  return average_;
}

// --------------------------------------------------------- Actor-critic

void ActorCriticLearner::BeginSegment(const Policy& initial, double stepsize) {
  CheckBegin(initial, side(), stepsize);
  policy_ = initial;
  aux_ = initial;
  last_played_ = initial;
  eta_ = stepsize;
  tau_ = 0;
  values_.clear();
}

const Policy& ActorCriticLearner::ObserveAndUpdate(const MarginalMDP& obs) {
  CheckObservation(obs, policy_);
  if (tau_ == 0) values_ = MdpPolicyValue(obs, policy_);
  ++tau_;
  const double beta = Beta(tau_, obs.gamma);
  const double signed_eta = descent_sign() * eta_;

  gradient_ = MdpQFromValues(obs, values_);
  ProjectedStep(aux_, gradient_, signed_eta, aux_, buffer_, scratch_);
  last_played_ = policy_;
  for (int s = 0; s < obs.num_states; ++s) {
    double played = 0.0;
    auto x = policy_.at(s);
    auto q = gradient_.at(s);
    for (int a = 0; a < obs.num_actions; ++a) played += x[a] * q[a];
    values_[s] = (1.0 - beta) * values_[s] + beta * played;
  }
  ProjectedStep(aux_, gradient_, signed_eta, policy_, buffer_, scratch_);
  Trace(tau_, last_played_, policy_, &values_);
  return policy_;
}

LearnerFactory OgdaFactory() {
  return [](Side side) { return std::make_unique<OgdaLearner>(side); };
}

LearnerFactory AveragingOgdaFactory(bool standalone) {
  return [standalone](Side side) { return std::make_unique<AveragingOgdaLearner>(side, standalone); };
}

LearnerFactory ActorCriticFactory() {
  return [](Side side) { return std::make_unique<ActorCriticLearner>(side); };
}

}  // namespace mgsolve
