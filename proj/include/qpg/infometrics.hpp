#pragma once

#include <cstdint>
#include <vector>

namespace qpg::info {

// ---- Discretization ---------------------------------------------------------

// B half-open bins [b_k, b_k + delta) partitioning [y_min, y_max], with
// midpoints m_k = b_k + delta/2. Values at or above y_max clamp into bin B,
// values below y_min into bin 1, so no sample is dropped.
struct BinSpec {
  int bins = 1;
  double y_min = 0.0;
  double y_max = 1.0;
  double delta = 1.0;

  static BinSpec make(int bins, double y_min, double y_max);
  double edge(int k) const;      // b_k, k in 1..bins
  double midpoint(int k) const;  // m_k
};

int discretize(double y, const BinSpec& spec);  // 1-based bin index

// ---- Histograms and plug-in estimators --------------------------------------

class JointHistogram {
public:
  JointHistogram(int n_actions, int n_bins);
  void add(int action, int bin, std::int64_t count = 1);  // bin is 1-based
  int n_actions() const { return n_actions_; }
  int n_bins() const { return n_bins_; }
  std::int64_t count(int action, int bin) const;
  std::int64_t total() const { return total_; }

private:
  int n_actions_;
  int n_bins_;
  std::vector<std::int64_t> counts_;
  std::int64_t total_ = 0;
};

// Plug-in I(A; Y~) in nats over the empirical joint.
double mutual_information(const JointHistogram& hist);

// Sum_s p(s) I(A; Y~ | S = s) with p(s) from per-group sample counts.
double conditional_mutual_information(const std::vector<JointHistogram>& per_state);

// Exact-table counterparts used by the theorem harness.
double entropy_nats(const std::vector<double>& probs);
double kl_divergence(const std::vector<double>& p, const std::vector<double>& q);
double tv_distance(const std::vector<double>& p, const std::vector<double>& q);
double mi_joint(const std::vector<std::vector<double>>& joint);  // rows x cols probabilities

// ---- Expressivity window -----------------------------------------------------

// Ring buffer of the latest action distributions with uniform weights.
class DistributionWindow {
public:
  explicit DistributionWindow(int capacity);
  void push(std::vector<double> probs);
  int size() const { return static_cast<int>(entries_.size()); }
  int capacity() const { return capacity_; }
  const std::vector<double>& at(int i) const { return entries_[i]; }

private:
  int capacity_;
  std::vector<std::vector<double>> entries_;
  int next_ = 0;
  bool full_ = false;
};

// Mean KL to the window mean; equals I(A; Z) of the induced joint with Z
// uniform over window slots.
double jsd_expressivity(const DistributionWindow& window);
double l2_divergence(const DistributionWindow& window);   // mean squared L2 distance
double tv_divergence(const DistributionWindow& window);   // mean squared TV distance

// ---- Series statistics ---------------------------------------------------------

double pearson_correlation(const std::vector<double>& x, const std::vector<double>& y);

struct MetricSample {
  int batch_index = 0;
  double mi_tet_proxy = 0.0;       // I(A; Y~), nats
  double entropy = 0.0;            // batch-mean policy entropy, nats
  double grad_norm = 0.0;
  double expressivity_proxy = 0.0;  // I(A; Z), nats
  double mean_reward = 0.0;
  double beta = 0.0;
  double moving_avg_reward = 0.0;
};

struct MetricSeries {
  std::vector<MetricSample> samples;
};

struct ScalingConstants {
  double c = 0.0;  // sup grad_norm / sqrt(MI)
  double k = 0.0;  // sup expressivity / MI
};

// Sup-ratio estimates over batches with positive MI; throws if none.
ScalingConstants estimate_scaling_constants(const MetricSeries& series);

struct BoundParams {
  double g_max = 0.0;
  double y_max = 0.0;
  double r_max = 0.0;
  double delta = 0.0;
};

enum class BoundFlag { satisfied, boundary, violated };

struct BoundCheck {
  BoundFlag raw = BoundFlag::satisfied;     // sqrt(2) G Y sqrt(MI) + G delta
  BoundFlag scaled = BoundFlag::satisfied;  // C sqrt(MI)
  double raw_bound = 0.0;
  double scaled_bound = 0.0;
};

std::vector<BoundCheck> bound_report(const MetricSeries& series, const BoundParams& bounds,
                                     const ScalingConstants& constants);

// ---- Per-batch metric assembly -------------------------------------------------

// Owns the bin count and the expressivity window across batches of one run.
class MetricEngine {
public:
  MetricEngine(int bin_count, int window_size);

  MetricSample batch_sample(int batch_index, const std::vector<int>& actions, int n_actions,
                            const std::vector<double>& reward_signal,
                            const std::vector<double>& step_entropies,
                            const std::vector<double>& mean_action_dist, double grad_norm,
                            double mean_reward, double beta, double moving_avg_reward);

  int bin_count() const { return bin_count_; }
  double last_bin_delta() const { return last_bin_delta_; }

private:
  int bin_count_;
  DistributionWindow window_;
  double last_bin_delta_ = 0.0;
};

// MI of pooled (action, signal) samples under B equal bins over the
// observed signal range. Constant signal or B = 1 gives exactly zero.
double binned_mutual_information(const std::vector<int>& actions, int n_actions,
                                 const std::vector<double>& signal, int bin_count,
                                 double* delta_out = nullptr);

}  // namespace qpg::info
