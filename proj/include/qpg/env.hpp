#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qpg/rng.hpp"

namespace qpg::env {

struct StepResult {
  std::vector<double> next_state;
  double reward = 0.0;
  bool done = false;
};

// Episode-scoped environment. reset() starts a fresh episode and returns
// the first observation; step() advances it and throws once done.
// Instances are value types: clone() for parallel episode generation.
struct EnvInterface {
  virtual ~EnvInterface() = default;
  virtual int state_dim() const = 0;
  virtual int n_actions() const = 0;
  virtual std::vector<double> reset(Rng& rng) = 0;
  virtual StepResult step(int action, Rng& rng) = 0;
  virtual std::unique_ptr<EnvInterface> clone() const = 0;
};

// ---- CartPole -------------------------------------------------------------

struct CartPoleState {
  double x = 0.0;
  double x_dot = 0.0;
  double theta = 0.0;
  double theta_dot = 0.0;
  int steps_elapsed = 0;
};

struct CartPoleOutcome {
  CartPoleState state;
  double reward = 0.0;
  bool done = false;
};

namespace cartpole {
inline constexpr double kGravity = 9.8;
inline constexpr double kCartMass = 1.0;
inline constexpr double kPoleMass = 0.1;
inline constexpr double kPoleHalfLength = 0.5;
inline constexpr double kForceMag = 10.0;
inline constexpr double kDt = 0.02;
inline constexpr double kXThreshold = 2.4;
double theta_threshold();  // 12 degrees in radians
inline constexpr int kMaxSteps = 200;
}  // namespace cartpole

CartPoleState cartpole_reset(Rng& rng);
bool cartpole_terminal(const CartPoleState& s);
CartPoleOutcome cartpole_step(const CartPoleState& s, int action);

// Raw Euler update under an arbitrary force, no termination or step cap.
CartPoleState cartpole_integrate(const CartPoleState& s, double force);

class CartPoleEnv final : public EnvInterface {
public:
  int state_dim() const override { return 4; }
  int n_actions() const override { return 2; }
  std::vector<double> reset(Rng& rng) override;
  StepResult step(int action, Rng& rng) override;
  std::unique_ptr<EnvInterface> clone() const override;

private:
  CartPoleState state_;
  bool done_ = true;
};

// ---- Tabular MDP ----------------------------------------------------------

// Finite MDP with horizon T. Transition rows are renormalized at
// construction and must already sum to 1 within 1e-9.
struct TabularMdp {
  int n_states = 0;
  int n_actions = 0;
  std::vector<double> transition;    // [s][a][s']
  std::vector<double> reward_table;  // [s][a]
  int horizon = 1;
  double gamma = 0.99;
  std::vector<double> initial_dist;

  static TabularMdp make(int n_states, int n_actions, std::vector<double> transition,
                         std::vector<double> reward_table, int horizon, double gamma,
                         std::vector<double> initial_dist);
  static TabularMdp random(Rng& rng, int n_states, int n_actions, int horizon, double gamma);
  static TabularMdp from_json_file(const std::string& path);
  void to_json_file(const std::string& path) const;

  double p(int s, int a, int s2) const { return transition[(s * n_actions + a) * n_states + s2]; }
  double r(int s, int a) const { return reward_table[s * n_actions + a]; }
};

struct TabularTrajectory {
  std::vector<int> states;   // length horizon + 1
  std::vector<int> actions;  // length horizon
  std::vector<double> rewards;
};

// policy_table is row-stochastic [s][a].
TabularTrajectory tabular_rollout(const TabularMdp& mdp, const std::vector<double>& policy_table,
                                  Rng& rng);

// Exact Pr(s_t = s) for t = 0..horizon-1 by forward recursion, [t][s].
std::vector<std::vector<double>> state_visit_probs(const TabularMdp& mdp,
                                                   const std::vector<double>& policy_table);

// ---- One-shot game --------------------------------------------------------

struct OneShotGame {
  std::vector<double> rewards;  // R(a)
  double r_max = 0.0;

  static OneShotGame make(std::vector<double> rewards, double r_max);
};

}  // namespace qpg::env
