#pragma once

#include <string>
#include <vector>

#include "qpg/circuit.hpp"
#include "qpg/rng.hpp"

namespace qpg::policy {

using quantum::CircuitSpec;
using quantum::Observable;
using quantum::PqcParams;

struct ActionDistribution {
  std::vector<double> probs;         // softmax(beta * w_a * <O_a>)
  std::vector<double> expectations;  // <O_a> per action, unweighted
};

// softmax-PQC policy: one fixed base observable per action, each scaled by
// a trainable weight, sharpened by the inverse temperature beta. Raw state
// components are squashed through arctan before encoding.
//
// Flat trainable parameter order everywhere: phi, lam, obs_weights.
struct SoftmaxPqcPolicy {
  CircuitSpec spec;
  PqcParams params;
  std::vector<Observable> action_obs;
  std::vector<double> obs_weights;
  double beta = 1.0;

  int n_actions() const { return static_cast<int>(action_obs.size()); }
  int n_circuit_params() const { return spec.phi_count() + spec.lam_count(); }
  int n_params() const { return n_circuit_params() + n_actions(); }

  std::vector<double> flat_params() const;
  void set_flat_params(const std::vector<double>& theta);

  // Two-action head over full-register parity: O_0 = Z...Z, O_1 = -O_0.
  static SoftmaxPqcPolicy parity_head(int n_qubits, int n_layers, Rng& rng,
                                      double w_init, double beta = 1.0);
};

std::vector<double> softmax(const std::vector<double>& logits);
std::vector<double> encode_input(const std::vector<double>& state);

ActionDistribution action_probs(const SoftmaxPqcPolicy& pol, const std::vector<double>& state);

// Inverse-CDF sampling; deterministic under a fixed rng state.
int sample_action(const ActionDistribution& dist, Rng& rng);

// d log pi(action | state) / d theta over the flat parameter vector.
std::vector<double> log_policy_gradient(const SoftmaxPqcPolicy& pol,
                                        const std::vector<double>& state, int action);

double entropy(const std::vector<double>& probs);  // nats, 0 log 0 = 0
double policy_entropy(const ActionDistribution& dist);

// Flat key-value text checkpoint; doubles round-trip bit-identically.
void save_checkpoint(const SoftmaxPqcPolicy& pol, const std::string& path);
SoftmaxPqcPolicy load_checkpoint(const std::string& path);

}  // namespace qpg::policy
