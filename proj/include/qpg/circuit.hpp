#pragma once

#include <utility>
#include <vector>

#include "qpg/rng.hpp"
#include "qpg/statevector.hpp"

namespace qpg::quantum {

// Layered reuploading ansatz. Per layer: per-qubit variational Ry then Rz,
// the CZ entangler pattern, then per-qubit Rx(lam * input) encoding.
struct CircuitSpec {
  int n_qubits = 0;
  int n_layers = 0;
  std::vector<std::pair<int, int>> entanglers;

  // Nearest-neighbour ring; a single pair for two qubits, none for one.
  static CircuitSpec ring(int n_qubits, int n_layers);

  int phi_count() const { return 2 * n_layers * n_qubits; }
  int lam_count() const { return n_layers * n_qubits; }
};

// Trainable rotation angles phi and encoding scalings lam. phi stores
// (rz, ry) per (layer, qubit); the Ry angle is applied first.
struct PqcParams {
  int n_qubits = 0;
  int n_layers = 0;
  std::vector<double> phi;
  std::vector<double> lam;

  static PqcParams zeros(const CircuitSpec& spec);
  // phi ~ U(0, phi_max), lam = 1 everywhere: near-identity start.
  static PqcParams random_init(const CircuitSpec& spec, Rng& rng, double phi_max = 0.1);

  int phi_index(int layer, int qubit, int rot) const;  // rot 0 = Rz, 1 = Ry
  int lam_index(int layer, int qubit) const;
};

// Weighted sum of tensor products of Pauli-Z over the listed qubits,
// identity elsewhere.
struct Observable {
  struct Term {
    std::vector<int> qubits;
    double coeff = 1.0;
  };
  std::vector<Term> terms;

  static Observable z_product(std::vector<int> qubits, double coeff = 1.0);
  double coeff_norm() const;  // sum of |coeff|, bounds any expectation
};

Statevector run_pqc(const CircuitSpec& spec, const PqcParams& params,
                    const std::vector<double>& input);

double expectation(const Statevector& state, const Observable& obs);

// Exact d<obs>/d(theta), phi block then lam block, via +-pi/2 shifted
// evaluations; lam entries by the chain rule through the encoding angle.
std::vector<double> param_shift_gradient(const CircuitSpec& spec, const PqcParams& params,
                                         const std::vector<double>& input,
                                         const Observable& obs);

// Same shift rule with every observable measured on each shifted state;
// one row per observable.
std::vector<std::vector<double>> param_shift_gradient_multi(
    const CircuitSpec& spec, const PqcParams& params, const std::vector<double>& input,
    const std::vector<Observable>& obs_list);

}  // namespace qpg::quantum
