#include "qpg/policy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace qpg::policy {

std::vector<double> SoftmaxPqcPolicy::flat_params() const {
  std::vector<double> theta;
  theta.reserve(n_params());
  theta.insert(theta.end(), params.phi.begin(), params.phi.end());
  theta.insert(theta.end(), params.lam.begin(), params.lam.end());
  theta.insert(theta.end(), obs_weights.begin(), obs_weights.end());
  return theta;
}

void SoftmaxPqcPolicy::set_flat_params(const std::vector<double>& theta) {
  if ((int)theta.size() != n_params())
    throw std::invalid_argument("set_flat_params: wrong parameter count");
  auto it = theta.begin();
  std::copy(it, it + params.phi.size(), params.phi.begin());
  it += params.phi.size();
  std::copy(it, it + params.lam.size(), params.lam.begin());
  it += params.lam.size();
  std::copy(it, theta.end(), obs_weights.begin());
}

SoftmaxPqcPolicy SoftmaxPqcPolicy::parity_head(int n_qubits, int n_layers, Rng& rng,
                                               double w_init, double beta) {
  SoftmaxPqcPolicy pol;
  pol.spec = CircuitSpec::ring(n_qubits, n_layers);
  pol.params = PqcParams::random_init(pol.spec, rng);
  std::vector<int> all(n_qubits);
  std::iota(all.begin(), all.end(), 0);
  pol.action_obs.push_back(Observable::z_product(all, 1.0));
  pol.action_obs.push_back(Observable::z_product(all, -1.0));
  pol.obs_weights.assign(2, w_init);
  pol.beta = beta;
  return pol;
}

std::vector<double> softmax(const std::vector<double>& logits) {
  if (logits.empty()) throw std::invalid_argument("softmax: empty logits");
  const double m = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - m);
    z += p[i];
  }
  for (auto& v : p) v /= z;
  return p;
}

std::vector<double> encode_input(const std::vector<double>& state) {
  std::vector<double> x(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) x[i] = std::atan(state[i]);
  return x;
}

ActionDistribution action_probs(const SoftmaxPqcPolicy& pol, const std::vector<double>& state) {
  if ((int)state.size() != pol.spec.n_qubits)
    throw std::invalid_argument("action_probs: state length must equal n_qubits");
  const auto input = encode_input(state);
  const auto psi = quantum::run_pqc(pol.spec, pol.params, input);

  ActionDistribution dist;
  dist.expectations.resize(pol.n_actions());
  std::vector<double> logits(pol.n_actions());
  for (int a = 0; a < pol.n_actions(); ++a) {
    dist.expectations[a] = quantum::expectation(psi, pol.action_obs[a]);
    logits[a] = pol.beta * pol.obs_weights[a] * dist.expectations[a];
  }
  dist.probs = softmax(logits);
  return dist;
}

int sample_action(const ActionDistribution& dist, Rng& rng) {
  const double u = rng.next_double();
  double cum = 0.0;
  for (std::size_t a = 0; a < dist.probs.size(); ++a) {
    cum += dist.probs[a];
    if (u < cum) return static_cast<int>(a);
  }
  return static_cast<int>(dist.probs.size()) - 1;
}

std::vector<double> log_policy_gradient(const SoftmaxPqcPolicy& pol,
                                        const std::vector<double>& state, int action) {
  if (action < 0 || action >= pol.n_actions())
    throw std::invalid_argument("log_policy_gradient: action out of range");
  const auto dist = action_probs(pol, state);
  const auto input = encode_input(state);
  const auto dexp = quantum::param_shift_gradient_multi(pol.spec, pol.params, input,
                                                        pol.action_obs);
  const int n_circ = pol.n_circuit_params();
  const int n_act = pol.n_actions();
  std::vector<double> grad(pol.n_params(), 0.0);

  // d log pi(a)/d theta_k = beta * (w_a dE_a - sum_a' pi_a' w_a' dE_a')
  for (int k = 0; k < n_circ; ++k) {
    double mean = 0.0;
    for (int b = 0; b < n_act; ++b) mean += dist.probs[b] * pol.obs_weights[b] * dexp[b][k];
    grad[k] = pol.beta * (pol.obs_weights[action] * dexp[action][k] - mean);
  }
  // d log pi(a)/d w_b = beta * (1[b = a] - pi_b) * E_b
  for (int b = 0; b < n_act; ++b) {
    const double indicator = (b == action) ? 1.0 : 0.0;
    grad[n_circ + b] = pol.beta * (indicator - dist.probs[b]) * dist.expectations[b];
  }
  return grad;
}

double entropy(const std::vector<double>& probs) {
  double h = 0.0;
  for (double p : probs)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

double policy_entropy(const ActionDistribution& dist) { return entropy(dist.probs); }

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_vector(std::ostream& out, const char* key, const std::vector<double>& v) {
  out << key;
  for (double x : v) out << ' ' << fmt_double(x);
  out << '\n';
}

}  // namespace

void save_checkpoint(const SoftmaxPqcPolicy& pol, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
  out << "n_qubits " << pol.spec.n_qubits << '\n';
  out << "n_layers " << pol.spec.n_layers << '\n';
  out << "n_actions " << pol.n_actions() << '\n';
  out << "beta " << fmt_double(pol.beta) << '\n';
  write_vector(out, "phi", pol.params.phi);
  write_vector(out, "lam", pol.params.lam);
  write_vector(out, "w", pol.obs_weights);
  if (!out) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

SoftmaxPqcPolicy load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
  int n_qubits = 0, n_layers = 0, n_actions = 0;
  double beta = 1.0;
  std::vector<double> phi, lam, w;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    if (key == "n_qubits") ls >> n_qubits;
    else if (key == "n_layers") ls >> n_layers;
    else if (key == "n_actions") ls >> n_actions;
    else if (key == "beta") ls >> beta;
    else if (key == "phi" || key == "lam" || key == "w") {
      std::vector<double>& dst = key == "phi" ? phi : key == "lam" ? lam : w;
      double x;
      while (ls >> x) dst.push_back(x);
    } else {
      throw std::runtime_error("load_checkpoint: unknown key '" + key + "'");
    }
  }
  if (n_actions != 2)
    throw std::runtime_error("load_checkpoint: expected a two-action parity head");
  Rng dummy(0);
  SoftmaxPqcPolicy pol = SoftmaxPqcPolicy::parity_head(n_qubits, n_layers, dummy, 1.0, beta);
  if (phi.size() != pol.params.phi.size() || lam.size() != pol.params.lam.size() ||
      w.size() != pol.obs_weights.size())
    throw std::runtime_error("load_checkpoint: parameter block sizes do not match header");
  pol.params.phi = std::move(phi);
  pol.params.lam = std::move(lam);
  pol.obs_weights = std::move(w);
  return pol;
}

}  // namespace qpg::policy
