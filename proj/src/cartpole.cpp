#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qpg/env.hpp"

namespace qpg::env {

namespace cartpole {
double theta_threshold() { return 12.0 * std::numbers::pi / 180.0; }
}  // namespace cartpole

CartPoleState cartpole_reset(Rng& rng) {
  CartPoleState s;
  s.x = rng.uniform(-0.05, 0.05);
  s.x_dot = rng.uniform(-0.05, 0.05);
  s.theta = rng.uniform(-0.05, 0.05);
  s.theta_dot = rng.uniform(-0.05, 0.05);
  s.steps_elapsed = 0;
  return s;
}

bool cartpole_terminal(const CartPoleState& s) {
  return std::abs(s.x) > cartpole::kXThreshold ||
         std::abs(s.theta) > cartpole::theta_threshold() ||
         s.steps_elapsed >= cartpole::kMaxSteps;
}

CartPoleState cartpole_integrate(const CartPoleState& s, double force) {
  using namespace cartpole;
  const double total_mass = kCartMass + kPoleMass;
  const double pole_mass_length = kPoleMass * kPoleHalfLength;

  const double cos_t = std::cos(s.theta);
  const double sin_t = std::sin(s.theta);
  const double temp = (force + pole_mass_length * s.theta_dot * s.theta_dot * sin_t) / total_mass;
  const double theta_acc = (kGravity * sin_t - cos_t * temp) /
                           (kPoleHalfLength * (4.0 / 3.0 - kPoleMass * cos_t * cos_t / total_mass));
  const double x_acc = temp - pole_mass_length * theta_acc * cos_t / total_mass;

  CartPoleState next;
  next.x = s.x + kDt * s.x_dot;
  next.x_dot = s.x_dot + kDt * x_acc;
  next.theta = s.theta + kDt * s.theta_dot;
  next.theta_dot = s.theta_dot + kDt * theta_acc;
  next.steps_elapsed = s.steps_elapsed + 1;
  return next;
}

CartPoleOutcome cartpole_step(const CartPoleState& s, int action) {
  if (action != 0 && action != 1)
    throw std::invalid_argument("cartpole_step: action must be 0 or 1");
  if (cartpole_terminal(s))
    throw std::logic_error("cartpole_step: episode already terminated");

  const double force = action == 1 ? cartpole::kForceMag : -cartpole::kForceMag;
  CartPoleOutcome out;
  out.state = cartpole_integrate(s, force);
  out.reward = 1.0;  // every step, including the transition into termination
  out.done = cartpole_terminal(out.state);
  return out;
}

std::vector<double> CartPoleEnv::reset(Rng& rng) {
  state_ = cartpole_reset(rng);
  done_ = false;
  return {state_.x, state_.x_dot, state_.theta, state_.theta_dot};
}

StepResult CartPoleEnv::step(int action, Rng&) {
  if (done_) throw std::logic_error("CartPoleEnv::step: episode is done, call reset");
  const auto out = cartpole_step(state_, action);
  state_ = out.state;
  done_ = out.done;
  return {{state_.x, state_.x_dot, state_.theta, state_.theta_dot}, out.reward, out.done};
}

std::unique_ptr<EnvInterface> CartPoleEnv::clone() const {
  return std::make_unique<CartPoleEnv>(*this);
}

}  // namespace qpg::env
