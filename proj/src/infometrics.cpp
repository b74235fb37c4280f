#include "qpg/infometrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qpg::info {

BinSpec BinSpec::make(int bins, double y_min, double y_max) {
  if (bins < 1) throw std::invalid_argument("BinSpec: bins must be >= 1");
  if (!std::isfinite(y_min) || !std::isfinite(y_max) || y_max <= y_min)
    throw std::invalid_argument("BinSpec: need finite y_min < y_max");
  BinSpec spec;
  spec.bins = bins;
  spec.y_min = y_min;
  spec.y_max = y_max;
  spec.delta = (y_max - y_min) / bins;
  return spec;
}

double BinSpec::edge(int k) const {
  if (k < 1 || k > bins) throw std::out_of_range("BinSpec::edge: k out of range");
  return y_min + (k - 1) * delta;
}

double BinSpec::midpoint(int k) const { return edge(k) + 0.5 * delta; }

int discretize(double y, const BinSpec& spec) {
  if (!std::isfinite(y)) throw std::invalid_argument("discretize: y must be finite");
  if (y < spec.y_min) return 1;
  if (y >= spec.y_max) return spec.bins;
  const int k = 1 + static_cast<int>((y - spec.y_min) / spec.delta);
  return std::clamp(k, 1, spec.bins);
}

JointHistogram::JointHistogram(int n_actions, int n_bins)
    : n_actions_(n_actions), n_bins_(n_bins) {
  if (n_actions < 1 || n_bins < 1)
    throw std::invalid_argument("JointHistogram: dimensions must be positive");
  counts_.assign(std::size_t(n_actions) * n_bins, 0);
}

void JointHistogram::add(int action, int bin, std::int64_t count) {
  if (action < 0 || action >= n_actions_ || bin < 1 || bin > n_bins_)
    throw std::out_of_range("JointHistogram::add: cell out of range");
  if (count < 0) throw std::invalid_argument("JointHistogram::add: negative count");
  counts_[std::size_t(action) * n_bins_ + (bin - 1)] += count;
  total_ += count;
}

std::int64_t JointHistogram::count(int action, int bin) const {
  if (action < 0 || action >= n_actions_ || bin < 1 || bin > n_bins_)
    throw std::out_of_range("JointHistogram::count: cell out of range");
  return counts_[std::size_t(action) * n_bins_ + (bin - 1)];
}

double mutual_information(const JointHistogram& hist) {
  if (hist.total() == 0) throw std::invalid_argument("mutual_information: empty histogram");
  const double n = static_cast<double>(hist.total());
  std::vector<double> row(hist.n_actions(), 0.0), col(hist.n_bins(), 0.0);
  for (int a = 0; a < hist.n_actions(); ++a)
    for (int k = 1; k <= hist.n_bins(); ++k) {
      const double c = static_cast<double>(hist.count(a, k));
      row[a] += c;
      col[k - 1] += c;
    }
  double mi = 0.0;
  for (int a = 0; a < hist.n_actions(); ++a)
    for (int k = 1; k <= hist.n_bins(); ++k) {
      const double c = static_cast<double>(hist.count(a, k));
      if (c > 0.0) mi += (c / n) * std::log(c * n / (row[a] * col[k - 1]));
    }
  return mi;
}

double conditional_mutual_information(const std::vector<JointHistogram>& per_state) {
  std::int64_t total = 0;
  for (const auto& h : per_state) total += h.total();
  if (total == 0) throw std::invalid_argument("conditional_mutual_information: no samples");
  double cmi = 0.0;
  for (const auto& h : per_state) {
    if (h.total() == 0) continue;
    cmi += (static_cast<double>(h.total()) / static_cast<double>(total)) * mutual_information(h);
  }
  return cmi;
}

double entropy_nats(const std::vector<double>& probs) {
  double h = 0.0;
  for (double p : probs)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

double kl_divergence(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw std::invalid_argument("kl_divergence: size mismatch");
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) throw std::invalid_argument("kl_divergence: q vanishes where p > 0");
    kl += p[i] * std::log(p[i] / q[i]);
  }
  return kl;
}

double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw std::invalid_argument("tv_distance: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

double mi_joint(const std::vector<std::vector<double>>& joint) {
  if (joint.empty() || joint[0].empty()) throw std::invalid_argument("mi_joint: empty table");
  const std::size_t cols = joint[0].size();
  std::vector<double> row(joint.size(), 0.0), col(cols, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < joint.size(); ++i) {
    if (joint[i].size() != cols) throw std::invalid_argument("mi_joint: ragged table");
    for (std::size_t j = 0; j < cols; ++j) {
      row[i] += joint[i][j];
      col[j] += joint[i][j];
      total += joint[i][j];
    }
  }
  if (total <= 0.0) throw std::invalid_argument("mi_joint: zero mass");
  double mi = 0.0;
  for (std::size_t i = 0; i < joint.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      const double p = joint[i][j] / total;
      if (p > 0.0) mi += p * std::log(p * total * total / (row[i] * col[j]));
    }
  return mi;
}

DistributionWindow::DistributionWindow(int capacity) : capacity_(capacity) {
  if (capacity < 1) throw std::invalid_argument("DistributionWindow: capacity must be >= 1");
}

void DistributionWindow::push(std::vector<double> probs) {
  double sum = 0.0;
  for (double p : probs) {
    if (p < 0.0 || !std::isfinite(p))
      throw std::invalid_argument("DistributionWindow: invalid probability entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("DistributionWindow: probabilities must sum to 1");
  if (!entries_.empty() && probs.size() != entries_[0].size())
    throw std::invalid_argument("DistributionWindow: dimension changed");
  if (!full_ && (int)entries_.size() < capacity_) {
    entries_.push_back(std::move(probs));
    if ((int)entries_.size() == capacity_) full_ = true;
  } else {
    entries_[next_] = std::move(probs);
    next_ = (next_ + 1) % capacity_;
  }
}

namespace {

std::vector<double> window_mean(const DistributionWindow& w) {
  std::vector<double> mean(w.at(0).size(), 0.0);
  for (int i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += w.at(i)[j];
  for (auto& v : mean) v /= w.size();
  return mean;
}

void require_window(const DistributionWindow& w, const char* who) {
  if (w.size() < 2) throw std::invalid_argument(std::string(who) + ": window holds < 2 entries");
}

}  // namespace

double jsd_expressivity(const DistributionWindow& window) {
  require_window(window, "jsd_expressivity");
  const auto mean = window_mean(window);
  double jsd = 0.0;
  for (int i = 0; i < window.size(); ++i) jsd += kl_divergence(window.at(i), mean);
  return jsd / window.size();
}

double l2_divergence(const DistributionWindow& window) {
  require_window(window, "l2_divergence");
  const auto mean = window_mean(window);
  double d = 0.0;
  for (int i = 0; i < window.size(); ++i) {
    double sq = 0.0;
    for (std::size_t j = 0; j < mean.size(); ++j) {
      const double diff = window.at(i)[j] - mean[j];
      sq += diff * diff;
    }
    d += sq;
  }
  return d / window.size();
}

double tv_divergence(const DistributionWindow& window) {
  require_window(window, "tv_divergence");
  const auto mean = window_mean(window);
  double d = 0.0;
  for (int i = 0; i < window.size(); ++i) {
    const double tv = tv_distance(window.at(i), mean);
    d += tv * tv;
  }
  return d / window.size();
}

double pearson_correlation(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("pearson_correlation: need two equal-length series");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0)
    throw std::invalid_argument("pearson_correlation: degenerate variance");
  return sxy / std::sqrt(sxx * syy);
}

ScalingConstants estimate_scaling_constants(const MetricSeries& series) {
  if (series.samples.empty())
    throw std::invalid_argument("estimate_scaling_constants: empty series");
  ScalingConstants out;
  bool any = false;
  for (const auto& s : series.samples) {
    if (s.mi_tet_proxy <= 0.0) continue;
    any = true;
    out.c = std::max(out.c, s.grad_norm / std::sqrt(s.mi_tet_proxy));
    out.k = std::max(out.k, s.expressivity_proxy / s.mi_tet_proxy);
  }
  if (!any) throw std::invalid_argument("estimate_scaling_constants: all MI values are zero");
  return out;
}

std::vector<BoundCheck> bound_report(const MetricSeries& series, const BoundParams& bounds,
                                     const ScalingConstants& constants) {
  constexpr double tol = 1e-12;
  auto flag = [&](double lhs, double rhs) {
    if (lhs > rhs + tol) return BoundFlag::violated;
    if (std::abs(lhs - rhs) <= tol) return BoundFlag::boundary;
    return BoundFlag::satisfied;
  };
  std::vector<BoundCheck> checks;
  checks.reserve(series.samples.size());
  for (const auto& s : series.samples) {
    BoundCheck c;
    c.raw_bound = std::sqrt(2.0) * bounds.g_max * bounds.y_max * std::sqrt(std::max(0.0, s.mi_tet_proxy)) +
                  bounds.g_max * bounds.delta;
    c.scaled_bound = constants.c * std::sqrt(std::max(0.0, s.mi_tet_proxy));
    c.raw = flag(s.grad_norm, c.raw_bound);
    c.scaled = flag(s.grad_norm, c.scaled_bound);
    checks.push_back(c);
  }
  return checks;
}

double binned_mutual_information(const std::vector<int>& actions, int n_actions,
                                 const std::vector<double>& signal, int bin_count,
                                 double* delta_out) {
  if (actions.size() != signal.size())
    throw std::invalid_argument("binned_mutual_information: sample size mismatch");
  if (actions.empty()) throw std::invalid_argument("binned_mutual_information: no samples");
  const auto [lo_it, hi_it] = std::minmax_element(signal.begin(), signal.end());
  if (delta_out) *delta_out = 0.0;
  if (bin_count < 2 || *hi_it - *lo_it < 1e-12) return 0.0;  // a single occupied bin carries no MI
  const BinSpec spec = BinSpec::make(bin_count, *lo_it, *hi_it);
  if (delta_out) *delta_out = spec.delta;
  JointHistogram hist(n_actions, bin_count);
  for (std::size_t i = 0; i < actions.size(); ++i) hist.add(actions[i], discretize(signal[i], spec));
  return mutual_information(hist);
}

MetricEngine::MetricEngine(int bin_count, int window_size)
    : bin_count_(bin_count), window_(window_size) {
  if (bin_count < 1) throw std::invalid_argument("MetricEngine: bin_count must be >= 1");
}

MetricSample MetricEngine::batch_sample(int batch_index, const std::vector<int>& actions,
                                        int n_actions, const std::vector<double>& reward_signal,
                                        const std::vector<double>& step_entropies,
                                        const std::vector<double>& mean_action_dist,
                                        double grad_norm, double mean_reward, double beta,
                                        double moving_avg_reward) {
  MetricSample sample;
  sample.batch_index = batch_index;
  sample.mi_tet_proxy =
      binned_mutual_information(actions, n_actions, reward_signal, bin_count_, &last_bin_delta_);
  double h = 0.0;
  for (double e : step_entropies) h += e;
  sample.entropy = step_entropies.empty() ? 0.0 : h / step_entropies.size();
  window_.push(mean_action_dist);
  sample.expressivity_proxy = window_.size() >= 2 ? jsd_expressivity(window_) : 0.0;
  sample.grad_norm = grad_norm;
  sample.mean_reward = mean_reward;
  sample.beta = beta;
  sample.moving_avg_reward = moving_avg_reward;
  return sample;
}

}  // namespace qpg::info
