#include "qpg/circuit.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qpg::quantum {

CircuitSpec CircuitSpec::ring(int n_qubits, int n_layers) {
  if (n_qubits < 1 || n_qubits > kMaxQubits)
    throw std::invalid_argument("CircuitSpec::ring: n_qubits out of range");
  if (n_layers < 1) throw std::invalid_argument("CircuitSpec::ring: n_layers must be >= 1");
  CircuitSpec spec;
  spec.n_qubits = n_qubits;
  spec.n_layers = n_layers;
  if (n_qubits == 2) {
    spec.entanglers.emplace_back(0, 1);
  } else if (n_qubits > 2) {
    for (int q = 0; q < n_qubits; ++q) spec.entanglers.emplace_back(q, (q + 1) % n_qubits);
  }
  return spec;
}

PqcParams PqcParams::zeros(const CircuitSpec& spec) {
  PqcParams p;
  p.n_qubits = spec.n_qubits;
  p.n_layers = spec.n_layers;
  p.phi.assign(spec.phi_count(), 0.0);
  p.lam.assign(spec.lam_count(), 0.0);
  return p;
}

PqcParams PqcParams::random_init(const CircuitSpec& spec, Rng& rng, double phi_max) {
  PqcParams p = zeros(spec);
  for (auto& v : p.phi) v = rng.uniform(0.0, phi_max);
  for (auto& v : p.lam) v = 1.0;
  return p;
}

int PqcParams::phi_index(int layer, int qubit, int rot) const {
  return 2 * (layer * n_qubits + qubit) + rot;
}

int PqcParams::lam_index(int layer, int qubit) const {
  return layer * n_qubits + qubit;
}

Observable Observable::z_product(std::vector<int> qubits, double coeff) {
  Observable obs;
  obs.terms.push_back({std::move(qubits), coeff});
  return obs;
}

double Observable::coeff_norm() const {
  double s = 0.0;
  for (const auto& t : terms) s += std::abs(t.coeff);
  return s;
}

namespace {

struct AngleShift {
  int phi_index = -1;   // shifted phi entry, or -1
  int lam_index = -1;   // shifted encoding angle (flat layer*n+q), or -1
  double offset = 0.0;
};

void check_run_args(const CircuitSpec& spec, const PqcParams& params,
                    const std::vector<double>& input) {
  if (params.n_qubits != spec.n_qubits || params.n_layers != spec.n_layers ||
      (int)params.phi.size() != spec.phi_count() || (int)params.lam.size() != spec.lam_count())
    throw std::invalid_argument("run_pqc: params do not match circuit spec");
  if ((int)input.size() != spec.n_qubits)
    throw std::invalid_argument("run_pqc: input length must equal n_qubits");
  for (double v : params.phi)
    if (!std::isfinite(v)) throw std::invalid_argument("run_pqc: non-finite phi");
  for (double v : params.lam)
    if (!std::isfinite(v)) throw std::invalid_argument("run_pqc: non-finite lam");
  for (double v : input)
    if (!std::isfinite(v)) throw std::invalid_argument("run_pqc: non-finite input");
}

Statevector run_shifted(const CircuitSpec& spec, const PqcParams& params,
                        const std::vector<double>& input, const AngleShift& shift) {
  Statevector state = init_zero_state(spec.n_qubits);
  for (int layer = 0; layer < spec.n_layers; ++layer) {
    for (int q = 0; q < spec.n_qubits; ++q) {
      const int iz = params.phi_index(layer, q, 0);
      const int iy = params.phi_index(layer, q, 1);
      double az = params.phi[iz];
      double ay = params.phi[iy];
      if (shift.phi_index == iz) az += shift.offset;
      if (shift.phi_index == iy) ay += shift.offset;
      apply_rotation(state, q, Axis::Y, ay);
      apply_rotation(state, q, Axis::Z, az);
    }
    for (const auto& [a, b] : spec.entanglers) apply_cz(state, a, b);
    for (int q = 0; q < spec.n_qubits; ++q) {
      const int il = params.lam_index(layer, q);
      double angle = params.lam[il] * input[q];
      if (shift.lam_index == il) angle += shift.offset;
      apply_rotation(state, q, Axis::X, angle);
    }
  }
  return state;
}

}  // namespace

Statevector run_pqc(const CircuitSpec& spec, const PqcParams& params,
                    const std::vector<double>& input) {
  check_run_args(spec, params, input);
  return run_shifted(spec, params, input, {});
}

double expectation(const Statevector& state, const Observable& obs) {
  std::vector<std::size_t> masks;
  masks.reserve(obs.terms.size());
  for (const auto& term : obs.terms) {
    std::size_t mask = 0;
    for (int q : term.qubits) {
      if (q < 0 || q >= state.n_qubits)
        throw std::out_of_range("expectation: term qubit index out of range");
      mask |= std::size_t{1} << q;
    }
    masks.push_back(mask);
  }
  double value = 0.0;
  for (std::size_t t = 0; t < obs.terms.size(); ++t) {
    double acc = 0.0;
    for (std::size_t i = 0; i < state.dim(); ++i) {
      const double p = std::norm(state.amplitudes[i]);
      acc += (std::popcount(i & masks[t]) & 1) ? -p : p;
    }
    value += obs.terms[t].coeff * acc;
  }
  return value;
}

std::vector<std::vector<double>> param_shift_gradient_multi(
    const CircuitSpec& spec, const PqcParams& params, const std::vector<double>& input,
    const std::vector<Observable>& obs_list) {
  check_run_args(spec, params, input);
  constexpr double half_pi = std::numbers::pi / 2.0;
  const int n_phi = spec.phi_count();
  const int n_lam = spec.lam_count();
  const int n_obs = (int)obs_list.size();

  std::vector<std::vector<double>> grad(n_obs, std::vector<double>(n_phi + n_lam, 0.0));

  auto eval_pair = [&](const AngleShift& plus, const AngleShift& minus, double scale, int col) {
    const Statevector up = run_shifted(spec, params, input, plus);
    const Statevector dn = run_shifted(spec, params, input, minus);
    for (int o = 0; o < n_obs; ++o)
      grad[o][col] = scale * 0.5 * (expectation(up, obs_list[o]) - expectation(dn, obs_list[o]));
  };

  for (int k = 0; k < n_phi; ++k)
    eval_pair({k, -1, half_pi}, {k, -1, -half_pi}, 1.0, k);

  for (int layer = 0; layer < spec.n_layers; ++layer) {
    for (int q = 0; q < spec.n_qubits; ++q) {
      const int il = params.lam_index(layer, q);
      const double x = input[q];
      if (x == 0.0) continue;  // chain-rule factor is zero
      eval_pair({-1, il, half_pi}, {-1, il, -half_pi}, x, n_phi + il);
    }
  }
  return grad;
}

std::vector<double> param_shift_gradient(const CircuitSpec& spec, const PqcParams& params,
                                         const std::vector<double>& input,
                                         const Observable& obs) {
  return param_shift_gradient_multi(spec, params, input, {obs})[0];
}

}  // namespace qpg::quantum
