#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "qpg/env.hpp"

namespace qpg::env {

TabularMdp TabularMdp::make(int n_states, int n_actions, std::vector<double> transition,
                            std::vector<double> reward_table, int horizon, double gamma,
                            std::vector<double> initial_dist) {
  if (n_states < 1 || n_actions < 1)
    throw std::invalid_argument("TabularMdp: need at least one state and action");
  if (horizon < 1) throw std::invalid_argument("TabularMdp: horizon must be >= 1");
  if (gamma < 0.0 || gamma >= 1.0) throw std::invalid_argument("TabularMdp: gamma must be in [0,1)");
  const std::size_t nsa = std::size_t(n_states) * n_actions;
  if (transition.size() != nsa * n_states || reward_table.size() != nsa ||
      initial_dist.size() != std::size_t(n_states))
    throw std::invalid_argument("TabularMdp: table sizes do not match dimensions");

  auto renormalize = [](double* row, int n, const char* what) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      if (row[i] < 0.0) throw std::invalid_argument(std::string("TabularMdp: negative ") + what);
      sum += row[i];
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument(std::string("TabularMdp: ") + what + " row does not sum to 1");
    for (int i = 0; i < n; ++i) row[i] /= sum;
  };

  for (std::size_t sa = 0; sa < nsa; ++sa)
    renormalize(&transition[sa * n_states], n_states, "transition");
  renormalize(initial_dist.data(), n_states, "initial distribution");
  for (double r : reward_table)
    if (!std::isfinite(r)) throw std::invalid_argument("TabularMdp: non-finite reward");

  TabularMdp mdp;
  mdp.n_states = n_states;
  mdp.n_actions = n_actions;
  mdp.transition = std::move(transition);
  mdp.reward_table = std::move(reward_table);
  mdp.horizon = horizon;
  mdp.gamma = gamma;
  mdp.initial_dist = std::move(initial_dist);
  return mdp;
}

TabularMdp TabularMdp::random(Rng& rng, int n_states, int n_actions, int horizon, double gamma) {
  auto random_row = [&](double* row, int n) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      row[i] = 0.05 + rng.next_double();  // bounded away from zero
      sum += row[i];
    }
    for (int i = 0; i < n; ++i) row[i] /= sum;
  };
  std::vector<double> transition(std::size_t(n_states) * n_actions * n_states);
  std::vector<double> rewards(std::size_t(n_states) * n_actions);
  std::vector<double> mu(n_states);
  for (int s = 0; s < n_states; ++s)
    for (int a = 0; a < n_actions; ++a)
      random_row(&transition[(s * std::size_t(n_actions) + a) * n_states], n_states);
  for (auto& r : rewards) r = rng.uniform(-1.0, 1.0);
  random_row(mu.data(), n_states);
  return make(n_states, n_actions, std::move(transition), std::move(rewards), horizon, gamma,
              std::move(mu));
}

TabularMdp TabularMdp::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("TabularMdp: cannot open " + path);
  nlohmann::json j;
  in >> j;
  const int ns = j.at("n_states").get<int>();
  const int na = j.at("n_actions").get<int>();
  std::vector<double> transition;
  for (const auto& row_s : j.at("transition"))
    for (const auto& row_a : row_s)
      for (const auto& v : row_a) transition.push_back(v.get<double>());
  std::vector<double> rewards;
  for (const auto& row_s : j.at("rewards"))
    for (const auto& v : row_s) rewards.push_back(v.get<double>());
  return make(ns, na, std::move(transition), std::move(rewards), j.at("horizon").get<int>(),
              j.at("gamma").get<double>(), j.at("initial_dist").get<std::vector<double>>());
}

void TabularMdp::to_json_file(const std::string& path) const {
  nlohmann::json j;
  j["n_states"] = n_states;
  j["n_actions"] = n_actions;
  auto transition_json = nlohmann::json::array();
  for (int s = 0; s < n_states; ++s) {
    auto row_s = nlohmann::json::array();
    for (int a = 0; a < n_actions; ++a) {
      auto row_a = nlohmann::json::array();
      for (int s2 = 0; s2 < n_states; ++s2) row_a.push_back(p(s, a, s2));
      row_s.push_back(row_a);
    }
    transition_json.push_back(row_s);
  }
  j["transition"] = transition_json;
  auto rewards_json = nlohmann::json::array();
  for (int s = 0; s < n_states; ++s) {
    auto row = nlohmann::json::array();
    for (int a = 0; a < n_actions; ++a) row.push_back(r(s, a));
    rewards_json.push_back(row);
  }
  j["rewards"] = rewards_json;
  j["horizon"] = horizon;
  j["gamma"] = gamma;
  j["initial_dist"] = initial_dist;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("TabularMdp: cannot write " + path);
  out << j.dump(2) << '\n';
}

namespace {

int sample_index(const double* probs, int n, Rng& rng) {
  const double u = rng.next_double();
  double cum = 0.0;
  for (int i = 0; i < n; ++i) {
    cum += probs[i];
    if (u < cum) return i;
  }
  return n - 1;
}

void check_policy_table(const TabularMdp& mdp, const std::vector<double>& policy_table) {
  if (policy_table.size() != std::size_t(mdp.n_states) * mdp.n_actions)
    throw std::invalid_argument("policy table size does not match MDP");
  for (int s = 0; s < mdp.n_states; ++s) {
    double sum = 0.0;
    for (int a = 0; a < mdp.n_actions; ++a) {
      const double v = policy_table[s * mdp.n_actions + a];
      if (v < 0.0) throw std::invalid_argument("policy table has negative entries");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("policy table row does not sum to 1");
  }
}

}  // namespace

TabularTrajectory tabular_rollout(const TabularMdp& mdp, const std::vector<double>& policy_table,
                                  Rng& rng) {
  check_policy_table(mdp, policy_table);
  TabularTrajectory traj;
  int s = sample_index(mdp.initial_dist.data(), mdp.n_states, rng);
  traj.states.push_back(s);
  for (int t = 0; t < mdp.horizon; ++t) {
    const int a = sample_index(&policy_table[s * mdp.n_actions], mdp.n_actions, rng);
    traj.actions.push_back(a);
    traj.rewards.push_back(mdp.r(s, a));
    s = sample_index(&mdp.transition[(s * std::size_t(mdp.n_actions) + a) * mdp.n_states],
                     mdp.n_states, rng);
    traj.states.push_back(s);
  }
  return traj;
}

std::vector<std::vector<double>> state_visit_probs(const TabularMdp& mdp,
                                                   const std::vector<double>& policy_table) {
  check_policy_table(mdp, policy_table);
  std::vector<std::vector<double>> pr(mdp.horizon, std::vector<double>(mdp.n_states, 0.0));
  pr[0] = mdp.initial_dist;
  for (int t = 0; t + 1 < mdp.horizon; ++t)
    for (int s = 0; s < mdp.n_states; ++s)
      for (int a = 0; a < mdp.n_actions; ++a) {
        const double w = pr[t][s] * policy_table[s * mdp.n_actions + a];
        if (w == 0.0) continue;
        for (int s2 = 0; s2 < mdp.n_states; ++s2) pr[t + 1][s2] += w * mdp.p(s, a, s2);
      }
  return pr;
}

OneShotGame OneShotGame::make(std::vector<double> rewards, double r_max) {
  if (rewards.empty()) throw std::invalid_argument("OneShotGame: empty reward table");
  if (r_max <= 0.0) throw std::invalid_argument("OneShotGame: r_max must be positive");
  for (double r : rewards)
    if (!std::isfinite(r) || std::abs(r) > r_max)
      throw std::invalid_argument("OneShotGame: rewards must satisfy |R(a)| <= r_max");
  OneShotGame game;
  game.rewards = std::move(rewards);
  game.r_max = r_max;
  return game;
}

}  // namespace qpg::env
