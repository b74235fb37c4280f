#include "qpg/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace qpg::train {

std::vector<double> compute_returns(const Trajectory& traj, double gamma) {
  if (traj.steps.empty()) throw std::invalid_argument("compute_returns: empty trajectory");
  std::vector<double> returns(traj.steps.size());
  double acc = 0.0;
  for (int t = static_cast<int>(traj.steps.size()) - 1; t >= 0; --t) {
    acc = traj.steps[t].reward + gamma * acc;
    returns[t] = acc;
  }
  return returns;
}

std::vector<double> normalize_returns(const std::vector<double>& returns) {
  if (returns.size() < 2) return std::vector<double>(returns.size(), 0.0);
  const double n = static_cast<double>(returns.size());
  double mean = 0.0;
  for (double g : returns) mean += g;
  mean /= n;
  double var = 0.0;
  for (double g : returns) var += (g - mean) * (g - mean);
  const double std_dev = std::sqrt(var / (n - 1.0));
  if (std_dev < 1e-8) return std::vector<double>(returns.size(), 0.0);
  std::vector<double> out(returns.size());
  for (std::size_t i = 0; i < returns.size(); ++i) out[i] = (returns[i] - mean) / std_dev;
  return out;
}

void TrainConfig::validate() const {
  if (n_layers < 1) throw std::invalid_argument("TrainConfig: n_layers must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
  if (gamma < 0.0 || gamma > 1.0) throw std::invalid_argument("TrainConfig: gamma must be in [0,1]");
  if (learning_rate < 0.0) throw std::invalid_argument("TrainConfig: learning_rate must be >= 0");
  if (beta_end < beta_start) throw std::invalid_argument("TrainConfig: beta_end must be >= beta_start");
  if (max_batches < 0) throw std::invalid_argument("TrainConfig: max_batches must be >= 0");
  if (bin_count < 1) throw std::invalid_argument("TrainConfig: bin_count must be >= 1");
  if (expressivity_window < 2) throw std::invalid_argument("TrainConfig: expressivity_window must be >= 2");
  if (early_stop_window < 2 || early_stop_window % 2 != 0)
    throw std::invalid_argument("TrainConfig: early_stop_window must be even and >= 2");
  if (optimizer != "sgd" && optimizer != "adam")
    throw std::invalid_argument("TrainConfig: optimizer must be 'sgd' or 'adam'");
}

TrainConfig load_train_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_train_config: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("load_train_config: invalid JSON in " + path + ": " + e.what());
  }
  TrainConfig cfg;
  cfg.n_layers = j.value("n_layers", cfg.n_layers);
  cfg.batch_size = j.value("batch_size", cfg.batch_size);
  cfg.gamma = j.value("gamma", cfg.gamma);
  cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
  cfg.w_lr_scale = j.value("w_lr_scale", cfg.w_lr_scale);
  cfg.optimizer = j.value("optimizer", cfg.optimizer);
  cfg.adam_beta1 = j.value("adam_beta1", cfg.adam_beta1);
  cfg.adam_beta2 = j.value("adam_beta2", cfg.adam_beta2);
  cfg.adam_eps = j.value("adam_eps", cfg.adam_eps);
  cfg.beta_start = j.value("beta_start", cfg.beta_start);
  cfg.beta_end = j.value("beta_end", cfg.beta_end);
  cfg.max_batches = j.value("max_batches", cfg.max_batches);
  cfg.early_stop_enabled = j.value("early_stop_enabled", cfg.early_stop_enabled);
  cfg.early_stop_window = j.value("early_stop_window", cfg.early_stop_window);
  cfg.bin_count = j.value("bin_count", cfg.bin_count);
  cfg.expressivity_window = j.value("expressivity_window", cfg.expressivity_window);
  cfg.w_init = j.value("w_init", cfg.w_init);
  cfg.normalize = j.value("normalize", cfg.normalize);
  if (j.contains("reward_target") && !j["reward_target"].is_null())
    cfg.reward_target = j["reward_target"].get<double>();
  cfg.seed = j.value("seed", cfg.seed);
  cfg.validate();
  return cfg;
}

namespace {

nlohmann::json config_to_json(const TrainConfig& cfg) {
  nlohmann::json j;
  j["n_layers"] = cfg.n_layers;
  j["batch_size"] = cfg.batch_size;
  j["gamma"] = cfg.gamma;
  j["learning_rate"] = cfg.learning_rate;
  j["w_lr_scale"] = cfg.w_lr_scale;
  j["optimizer"] = cfg.optimizer;
  j["adam_beta1"] = cfg.adam_beta1;
  j["adam_beta2"] = cfg.adam_beta2;
  j["adam_eps"] = cfg.adam_eps;
  j["beta_start"] = cfg.beta_start;
  j["beta_end"] = cfg.beta_end;
  j["max_batches"] = cfg.max_batches;
  j["early_stop_enabled"] = cfg.early_stop_enabled;
  j["early_stop_window"] = cfg.early_stop_window;
  j["bin_count"] = cfg.bin_count;
  j["expressivity_window"] = cfg.expressivity_window;
  j["w_init"] = cfg.w_init;
  j["normalize"] = cfg.normalize;
  if (cfg.reward_target) j["reward_target"] = *cfg.reward_target;
  else j["reward_target"] = nullptr;
  j["seed"] = cfg.seed;
  return j;
}

}  // namespace

void save_train_config(const TrainConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_train_config: cannot write " + path);
  out << config_to_json(cfg).dump(2) << '\n';
}

std::string train_config_json(const TrainConfig& cfg) { return config_to_json(cfg).dump(2); }

double beta_schedule(int batch_index, int max_batches, double beta_start, double beta_end) {
  if (batch_index < 0 || batch_index > max_batches)
    throw std::out_of_range("beta_schedule: batch_index out of range");
  if (max_batches == 0) return beta_start;
  const double t = static_cast<double>(batch_index) / static_cast<double>(max_batches);
  return beta_start + t * (beta_end - beta_start);
}

bool early_stop_check(const std::vector<double>& reward_history, int window) {
  if (window < 2 || window % 2 != 0)
    throw std::invalid_argument("early_stop_check: window must be even and >= 2");
  if ((int)reward_history.size() < window) return false;
  const int half = window / 2;
  const std::size_t n = reward_history.size();
  double older = 0.0, newer = 0.0;
  for (int i = 0; i < half; ++i) {
    older += reward_history[n - window + i];
    newer += reward_history[n - half + i];
  }
  return newer / half < older / half;
}

BatchGradient batch_gradient(const policy::SoftmaxPqcPolicy& pol,
                             const std::vector<Trajectory>& batch,
                             const std::vector<std::vector<double>>& step_weights, Exec exec) {
  if (batch.empty()) throw std::invalid_argument("batch_gradient: empty batch");
  if (step_weights.size() != batch.size())
    throw std::invalid_argument("batch_gradient: weights do not match batch");

  struct StepRef {
    const TrajStep* step;
    double weight;
  };
  std::vector<StepRef> steps;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (step_weights[i].size() != batch[i].steps.size())
      throw std::invalid_argument("batch_gradient: weights do not match trajectory length");
    for (std::size_t t = 0; t < batch[i].steps.size(); ++t)
      steps.push_back({&batch[i].steps[t], step_weights[i][t]});
  }

  const int n_steps = static_cast<int>(steps.size());
  const int n_params = pol.n_params();
  std::vector<std::vector<double>> scores(n_steps);
  const bool parallel = exec == Exec::parallel;

#pragma omp parallel for schedule(static) if (parallel)
  for (int i = 0; i < n_steps; ++i)
    scores[i] = policy::log_policy_gradient(pol, steps[i].step->state, steps[i].step->action);

  BatchGradient out;
  out.gradient.assign(n_params, 0.0);
  for (int i = 0; i < n_steps; ++i) {
    double norm_sq = 0.0;
    for (int k = 0; k < n_params; ++k) {
      out.gradient[k] += scores[i][k] * steps[i].weight;
      norm_sq += scores[i][k] * scores[i][k];
    }
    out.max_score_norm = std::max(out.max_score_norm, std::sqrt(norm_sq));
  }
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  for (auto& g : out.gradient) g *= inv_n;
  return out;
}

namespace {

double l2_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void check_finite(const std::vector<double>& grad) {
  for (double g : grad)
    if (!std::isfinite(g))
      throw std::runtime_error("policy gradient update: non-finite gradient component");
}

}  // namespace

double policy_gradient_step(policy::SoftmaxPqcPolicy& pol, const std::vector<Trajectory>& batch,
                            const std::vector<std::vector<double>>& normalized_returns,
                            double learning_rate, Exec exec) {
  const auto bg = batch_gradient(pol, batch, normalized_returns, exec);
  check_finite(bg.gradient);
  const double norm = l2_norm(bg.gradient);
  auto theta = pol.flat_params();
  for (std::size_t k = 0; k < theta.size(); ++k) theta[k] += learning_rate * bg.gradient[k];
  pol.set_flat_params(theta);
  return norm;
}

namespace {

EpisodeData run_episode(const policy::SoftmaxPqcPolicy& pol, const env::EnvInterface& proto,
                        Rng rng) {
  EpisodeData rec;
  rec.prob_sums.assign(pol.n_actions(), 0.0);
  auto env = proto.clone();
  std::vector<double> state = env->reset(rng);
  while (true) {
    const auto dist = policy::action_probs(pol, state);
    const int action = policy::sample_action(dist, rng);
    const auto step = env->step(action, rng);
    rec.traj.steps.push_back({state, action, step.reward});
    rec.step_entropy.push_back(policy::policy_entropy(dist));
    for (int a = 0; a < pol.n_actions(); ++a) rec.prob_sums[a] += dist.probs[a];
    rec.total_reward += step.reward;
    if (step.done) break;
    state = step.next_state;
  }
  return rec;
}

struct AdamState {
  std::vector<double> m, v;
  int t = 0;
};

void apply_update(policy::SoftmaxPqcPolicy& pol, const TrainConfig& cfg,
                  const std::vector<double>& grad, AdamState& adam) {
  auto theta = pol.flat_params();
  const int n_circ = pol.n_circuit_params();
  auto lr_for = [&](int k) {
    return k < n_circ ? cfg.learning_rate : cfg.learning_rate * cfg.w_lr_scale;
  };
  if (cfg.optimizer == "adam") {
    if (adam.m.empty()) {
      adam.m.assign(theta.size(), 0.0);
      adam.v.assign(theta.size(), 0.0);
    }
    adam.t += 1;
    const double c1 = 1.0 - std::pow(cfg.adam_beta1, adam.t);
    const double c2 = 1.0 - std::pow(cfg.adam_beta2, adam.t);
    for (std::size_t k = 0; k < theta.size(); ++k) {
      adam.m[k] = cfg.adam_beta1 * adam.m[k] + (1.0 - cfg.adam_beta1) * grad[k];
      adam.v[k] = cfg.adam_beta2 * adam.v[k] + (1.0 - cfg.adam_beta2) * grad[k] * grad[k];
      theta[k] += lr_for(k) * (adam.m[k] / c1) / (std::sqrt(adam.v[k] / c2) + cfg.adam_eps);
    }
  } else {
    for (std::size_t k = 0; k < theta.size(); ++k) theta[k] += lr_for(k) * grad[k];
  }
  pol.set_flat_params(theta);
}

}  // namespace

std::vector<EpisodeData> generate_episodes(const policy::SoftmaxPqcPolicy& pol,
                                           const env::EnvInterface& env_proto, int n,
                                           std::uint64_t seed, int batch_index, Exec exec) {
  if (n < 1) throw std::invalid_argument("generate_episodes: n must be >= 1");
  std::vector<EpisodeData> episodes(n);
  const bool parallel = exec == Exec::parallel;
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int i = 0; i < n; ++i)
    episodes[i] = run_episode(pol, env_proto, Rng(mix64(seed, mix64(batch_index + 1, i + 1))));
  return episodes;
}

TrainResult train(const TrainConfig& cfg, const env::EnvInterface& env_proto,
                  info::MetricEngine& metrics, Exec exec) {
  cfg.validate();
  if (env_proto.n_actions() != 2)
    throw std::invalid_argument("train: the parity-head policy supports two actions");

  Rng init_rng(mix64(cfg.seed, 0x1a17));
  TrainResult result;
  result.policy = policy::SoftmaxPqcPolicy::parity_head(env_proto.state_dim(), cfg.n_layers,
                                                        init_rng, cfg.w_init, cfg.beta_start);
  AdamState adam;
  std::vector<double> reward_history;

  for (int b = 0; b < cfg.max_batches; ++b) {
    result.policy.beta = beta_schedule(b, cfg.max_batches, cfg.beta_start, cfg.beta_end);

    auto episodes = generate_episodes(result.policy, env_proto, cfg.batch_size, cfg.seed, b, exec);

    BatchRecord record;
    record.batch_index = b;
    record.trajectories.reserve(cfg.batch_size);
    std::vector<double> pooled_returns;
    std::vector<int> pooled_actions;
    std::vector<double> step_entropies;
    std::vector<double> prob_sums(2, 0.0);
    double reward_sum = 0.0;
    std::size_t total_steps = 0;
    for (auto& ep : episodes) {
      ep.traj.returns = compute_returns(ep.traj, cfg.gamma);
      for (std::size_t t = 0; t < ep.traj.steps.size(); ++t) {
        pooled_returns.push_back(ep.traj.returns[t]);
        pooled_actions.push_back(ep.traj.steps[t].action);
      }
      step_entropies.insert(step_entropies.end(), ep.step_entropy.begin(), ep.step_entropy.end());
      for (int a = 0; a < 2; ++a) prob_sums[a] += ep.prob_sums[a];
      reward_sum += ep.total_reward;
      total_steps += ep.traj.steps.size();
      record.trajectories.push_back(std::move(ep.traj));
    }
    const auto& batch = record.trajectories;

    std::vector<double> pooled_norm =
        cfg.normalize ? normalize_returns(pooled_returns) : pooled_returns;
    std::vector<std::vector<double>> per_traj(batch.size());
    {
      std::size_t offset = 0;
      for (std::size_t i = 0; i < batch.size(); ++i) {
        per_traj[i].assign(pooled_norm.begin() + offset,
                           pooled_norm.begin() + offset + batch[i].steps.size());
        offset += batch[i].steps.size();
      }
    }

    auto bg = batch_gradient(result.policy, batch, per_traj, exec);
    check_finite(bg.gradient);
    record.total_gradient = std::move(bg.gradient);
    record.gradient_norm = l2_norm(record.total_gradient);
    record.mean_reward = reward_sum / cfg.batch_size;
    const double grad_norm = record.gradient_norm;

    const double mean_reward = record.mean_reward;
    reward_history.push_back(mean_reward);
    const int ma_window = std::min<std::size_t>(10, reward_history.size());
    double moving_avg = 0.0;
    for (int i = 0; i < ma_window; ++i)
      moving_avg += reward_history[reward_history.size() - 1 - i];
    moving_avg /= ma_window;

    std::vector<double> mean_dist(2, 0.0);
    for (int a = 0; a < 2; ++a) mean_dist[a] = prob_sums[a] / static_cast<double>(total_steps);

    result.series.samples.push_back(metrics.batch_sample(
        b, pooled_actions, 2, pooled_norm, step_entropies, mean_dist, grad_norm, mean_reward,
        result.policy.beta, moving_avg));
    result.bin_delta_max = std::max(result.bin_delta_max, metrics.last_bin_delta());
    result.g_max_observed = std::max(result.g_max_observed, bg.max_score_norm);
    for (double g : pooled_norm)
      result.y_max_observed = std::max(result.y_max_observed, std::abs(g));

    apply_update(result.policy, cfg, record.total_gradient, adam);
    result.batches_run = b + 1;
    result.episodes_total += cfg.batch_size;

    if (cfg.reward_target && (int)reward_history.size() >= 10 && moving_avg >= *cfg.reward_target) {
      result.reached_target = true;
      break;
    }
    if (cfg.early_stop_enabled && early_stop_check(reward_history, cfg.early_stop_window)) {
      result.early_stopped = true;
      break;
    }
  }
  return result;
}

const char* const kRunCsvHeader =
    "batch,mean_reward,moving_avg_reward,beta,grad_norm,mi_tet_proxy,entropy,expressivity_proxy";

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_run_csv(const info::MetricSeries& series, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_run_csv: cannot open " + path);
  out << kRunCsvHeader << '\n';
  for (const auto& s : series.samples) {
    out << s.batch_index << ',' << fmt(s.mean_reward) << ',' << fmt(s.moving_avg_reward) << ','
        << fmt(s.beta) << ',' << fmt(s.grad_norm) << ',' << fmt(s.mi_tet_proxy) << ','
        << fmt(s.entropy) << ',' << fmt(s.expressivity_proxy) << '\n';
  }
  if (!out) throw std::runtime_error("write_run_csv: write failed for " + path);
}

info::MetricSeries read_run_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_run_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kRunCsvHeader)
    throw std::runtime_error("read_run_csv: unexpected header in " + path);
  info::MetricSeries series;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    info::MetricSample s;
    char comma;
    if (!(ls >> s.batch_index >> comma >> s.mean_reward >> comma >> s.moving_avg_reward >> comma >>
          s.beta >> comma >> s.grad_norm >> comma >> s.mi_tet_proxy >> comma >> s.entropy >>
          comma >> s.expressivity_proxy))
      throw std::runtime_error("read_run_csv: malformed row in " + path);
    series.samples.push_back(s);
  }
  return series;
}

}  // namespace qpg::train
