#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace qpg::quantum {

enum class Axis { X, Y, Z };

inline constexpr int kMaxQubits = 12;  // dense amplitudes, desk scale

// Dense amplitude vector of an n-qubit register. Qubit q is bit q of the
// basis index, so |q1 q0> with q0 least significant.
struct Statevector {
  int n_qubits = 0;
  std::vector<std::complex<double>> amplitudes;

  std::size_t dim() const { return amplitudes.size(); }
  double norm_sq() const;
};

Statevector init_zero_state(int n_qubits);

// In-place exp(-i * angle/2 * P) on one qubit, P in {X, Y, Z}.
void apply_rotation(Statevector& state, int qubit, Axis axis, double angle);

// In-place phase flip on basis states with both qubits set. Involution.
void apply_cz(Statevector& state, int q1, int q2);

}  // namespace qpg::quantum
