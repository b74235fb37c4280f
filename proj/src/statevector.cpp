#include "qpg/statevector.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qpg::quantum {

double Statevector::norm_sq() const {
  double s = 0.0;
  for (const auto& a : amplitudes) s += std::norm(a);
  return s;
}

Statevector init_zero_state(int n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits)
    throw std::invalid_argument("init_zero_state: n_qubits must be in [1, " +
                                std::to_string(kMaxQubits) + "]");
  Statevector state;
  state.n_qubits = n_qubits;
  state.amplitudes.assign(std::size_t{1} << n_qubits, {0.0, 0.0});
  state.amplitudes[0] = 1.0;
  return state;
}

static void check_qubit(const Statevector& state, int qubit, const char* who) {
  if (qubit < 0 || qubit >= state.n_qubits)
    throw std::out_of_range(std::string(who) + ": qubit index out of range");
}

void apply_rotation(Statevector& state, int qubit, Axis axis, double angle) {
  check_qubit(state, qubit, "apply_rotation");
  if (!std::isfinite(angle))
    throw std::invalid_argument("apply_rotation: angle must be finite");

  const double c = std::cos(0.5 * angle);
  const double s = std::sin(0.5 * angle);
  const std::size_t bit = std::size_t{1} << qubit;
  const std::size_t dim = state.dim();
  auto* amp = state.amplitudes.data();

  switch (axis) {
    case Axis::Z: {
      // diag(e^{-i a/2}, e^{+i a/2})
      const std::complex<double> p0(c, -s), p1(c, s);
      for (std::size_t i = 0; i < dim; ++i) amp[i] *= (i & bit) ? p1 : p0;
      break;
    }
    case Axis::Y: {
      // [[c, -s], [s, c]] real
      for (std::size_t i = 0; i < dim; ++i) {
        if (i & bit) continue;
        const auto a0 = amp[i];
        const auto a1 = amp[i | bit];
        amp[i] = c * a0 - s * a1;
        amp[i | bit] = s * a0 + c * a1;
      }
      break;
    }
    case Axis::X: {
      // [[c, -is], [-is, c]]
      const std::complex<double> is(0.0, s);
      for (std::size_t i = 0; i < dim; ++i) {
        if (i & bit) continue;
        const auto a0 = amp[i];
        const auto a1 = amp[i | bit];
        amp[i] = c * a0 - is * a1;
        amp[i | bit] = c * a1 - is * a0;
      }
      break;
    }
  }
}

void apply_cz(Statevector& state, int q1, int q2) {
  check_qubit(state, q1, "apply_cz");
  check_qubit(state, q2, "apply_cz");
  if (q1 == q2) throw std::invalid_argument("apply_cz: qubits must differ");

  const std::size_t mask = (std::size_t{1} << q1) | (std::size_t{1} << q2);
  const std::size_t dim = state.dim();
  auto* amp = state.amplitudes.data();
  for (std::size_t i = 0; i < dim; ++i)
    if ((i & mask) == mask) amp[i] = -amp[i];
}

}  // namespace qpg::quantum
