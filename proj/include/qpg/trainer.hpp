#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qpg/env.hpp"
#include "qpg/infometrics.hpp"
#include "qpg/parallel.hpp"
#include "qpg/policy.hpp"

namespace qpg::train {

struct TrajStep {
  std::vector<double> state;
  int action = 0;
  double reward = 0.0;
};

struct Trajectory {
  std::vector<TrajStep> steps;
  std::vector<double> returns;  // filled by compute_returns
};

// Discounted return from each step over its own remaining rewards,
// G_t = sum_k gamma^k r_{t+k}, by one backward pass.
std::vector<double> compute_returns(const Trajectory& traj, double gamma);

// Batch standardization to mean 0, sample std 1; all zeros when the spread
// is degenerate (std < 1e-8) or fewer than two values are supplied.
std::vector<double> normalize_returns(const std::vector<double>& returns);

struct TrainConfig {
  int n_layers = 5;
  int batch_size = 10;
  double gamma = 0.99;
  double learning_rate = 0.05;
  double w_lr_scale = 5.0;         // multiplier on the observable-weight block
  std::string optimizer = "adam";  // "adam" or "sgd"
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double beta_start = 1.0;
  double beta_end = 1.5;
  int max_batches = 500;
  bool early_stop_enabled = true;
  int early_stop_window = 10;
  int bin_count = 50;
  int expressivity_window = 10;
  double w_init = 0.1;  // near log-2 initial policy entropy
  bool normalize = true;                    // test hook; training contract is on
  std::optional<double> reward_target;      // stop once the moving average reaches it
  std::uint64_t seed = 0;

  void validate() const;
};

TrainConfig load_train_config(const std::string& path);
void save_train_config(const TrainConfig& cfg, const std::string& path);
std::string train_config_json(const TrainConfig& cfg);  // pretty-printed JSON text

struct BatchRecord {
  int batch_index = 0;
  std::vector<Trajectory> trajectories;
  std::vector<double> total_gradient;
  double gradient_norm = 0.0;
  double mean_reward = 0.0;
};

// Linear interpolation from beta_start at batch 0 to beta_end at max_batches.
double beta_schedule(int batch_index, int max_batches, double beta_start, double beta_end);

// Collapse rule: with at least `window` entries, stop when the mean of the
// latter window/2 entries drops below the mean of the preceding window/2.
bool early_stop_check(const std::vector<double>& reward_history, int window = 10);

struct EpisodeData {
  Trajectory traj;
  std::vector<double> step_entropy;
  std::vector<double> prob_sums;  // per-action sums of the step distributions
  double total_reward = 0.0;
};

// N independent episodes under a policy snapshot, one derived rng stream
// per episode; results land in per-episode slots so any schedule gives
// identical output.
std::vector<EpisodeData> generate_episodes(const policy::SoftmaxPqcPolicy& pol,
                                           const env::EnvInterface& env_proto, int n,
                                           std::uint64_t seed, int batch_index,
                                           Exec exec = Exec::parallel);

struct BatchGradient {
  std::vector<double> gradient;  // (1/N) sum_i sum_t dlogpi * G~
  double max_score_norm = 0.0;   // largest per-step score norm seen
};

// Per-step scores are computed independently (OpenMP across steps) and
// reduced serially in step order, so serial and parallel runs match bitwise.
BatchGradient batch_gradient(const policy::SoftmaxPqcPolicy& pol,
                             const std::vector<Trajectory>& batch,
                             const std::vector<std::vector<double>>& step_weights,
                             Exec exec = Exec::parallel);

// Plain ascent update; returns the gradient norm (logged before updating).
double policy_gradient_step(policy::SoftmaxPqcPolicy& pol, const std::vector<Trajectory>& batch,
                            const std::vector<std::vector<double>>& normalized_returns,
                            double learning_rate, Exec exec = Exec::parallel);

struct TrainResult {
  info::MetricSeries series;
  policy::SoftmaxPqcPolicy policy;
  bool early_stopped = false;
  bool reached_target = false;
  int batches_run = 0;
  std::int64_t episodes_total = 0;
  double g_max_observed = 0.0;     // max per-step score norm over the run
  double y_max_observed = 0.0;     // max |normalized return|
  double bin_delta_max = 0.0;      // largest per-batch bin width
};

// Full REINFORCE loop: anneal beta, roll N episodes, normalize returns,
// accumulate the gradient, log metrics, update, stop on the collapse rule
// or the optional reward target. Deterministic for a fixed config.
TrainResult train(const TrainConfig& cfg, const env::EnvInterface& env_proto,
                  info::MetricEngine& metrics, Exec exec = Exec::parallel);

// CSV schema shared by the CLI and the report reader.
extern const char* const kRunCsvHeader;
void write_run_csv(const info::MetricSeries& series, const std::string& path);
info::MetricSeries read_run_csv(const std::string& path);

}  // namespace qpg::train
