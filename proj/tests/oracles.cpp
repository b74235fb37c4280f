#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace oracle {

Matrix identity(int n) {
  Matrix m(n, std::vector<Cx>(n, 0.0));
  for (int i = 0; i < n; ++i) m[i][i] = 1.0;
  return m;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  const int ar = (int)a.size(), ac = (int)a[0].size();
  const int br = (int)b.size(), bc = (int)b[0].size();
  Matrix m(ar * br, std::vector<Cx>(ac * bc, 0.0));
  for (int i = 0; i < ar; ++i)
    for (int j = 0; j < ac; ++j)
      for (int k = 0; k < br; ++k)
        for (int l = 0; l < bc; ++l) m[i * br + k][j * bc + l] = a[i][j] * b[k][l];
  return m;
}

Vector matvec(const Matrix& m, const Vector& v) {
  Vector out(m.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
  return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  const int n = (int)a.size(), m = (int)b[0].size(), k = (int)b.size();
  Matrix out(n, std::vector<Cx>(m, 0.0));
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < k; ++l)
      for (int j = 0; j < m; ++j) out[i][j] += a[i][l] * b[l][j];
  return out;
}

Matrix mat_exp(const Matrix& a) {
  double max_abs = 0.0;
  for (const auto& row : a)
    for (const auto& v : row) max_abs = std::max(max_abs, std::abs(v));
  int squarings = 0;
  double scale = 1.0;
  while (max_abs * scale > 0.5) {
    scale *= 0.5;
    ++squarings;
  }
  Matrix scaled = a;
  for (auto& row : scaled)
    for (auto& v : row) v *= scale;

  Matrix result = identity((int)a.size());
  Matrix term = identity((int)a.size());
  for (int k = 1; k <= 24; ++k) {
    term = matmul(term, scaled);
    for (auto& row : term)
      for (auto& v : row) v /= static_cast<double>(k);
    for (std::size_t i = 0; i < result.size(); ++i)
      for (std::size_t j = 0; j < result.size(); ++j) result[i][j] += term[i][j];
  }
  for (int s = 0; s < squarings; ++s) result = matmul(result, result);
  return result;
}

Matrix rotation_matrix(qpg::quantum::Axis axis, double angle) {
  const Cx i(0.0, 1.0);
  Matrix pauli;
  switch (axis) {
    case qpg::quantum::Axis::X: pauli = {{0.0, 1.0}, {1.0, 0.0}}; break;
    case qpg::quantum::Axis::Y: pauli = {{0.0, -i}, {i, 0.0}}; break;
    case qpg::quantum::Axis::Z: pauli = {{1.0, 0.0}, {0.0, -1.0}}; break;
  }
  Matrix gen(2, std::vector<Cx>(2, 0.0));
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) gen[r][c] = -i * (angle / 2.0) * pauli[r][c];
  return mat_exp(gen);
}

Matrix embed_single(const Matrix& gate, int qubit, int n_qubits) {
  Matrix m = identity(1);
  for (int q = n_qubits - 1; q >= 0; --q) m = kron(m, q == qubit ? gate : identity(2));
  return m;
}

Matrix cz_matrix(int q1, int q2, int n_qubits) {
  const int dim = 1 << n_qubits;
  Matrix m(dim, std::vector<Cx>(dim, 0.0));
  const int mask = (1 << q1) | (1 << q2);
  for (int b = 0; b < dim; ++b) m[b][b] = ((b & mask) == mask) ? -1.0 : 1.0;
  return m;
}

double fidelity(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("fidelity: size mismatch");
  Cx ip = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) ip += std::conj(a[i]) * b[i];
  return std::norm(ip);
}

Vector to_vector(const qpg::quantum::Statevector& s) { return s.amplitudes; }

double mi_bruteforce(const std::vector<std::vector<long long>>& counts) {
  const int rows = (int)counts.size();
  const int cols = (int)counts[0].size();
  long long total = 0;
  for (const auto& row : counts)
    for (long long c : row) total += c;
  double mi = 0.0;
  for (int a = 0; a < rows; ++a)
    for (int y = 0; y < cols; ++y) {
      if (counts[a][y] == 0) continue;
      const double p_ay = double(counts[a][y]) / double(total);
      long long row_sum = 0, col_sum = 0;
      for (int y2 = 0; y2 < cols; ++y2) row_sum += counts[a][y2];
      for (int a2 = 0; a2 < rows; ++a2) col_sum += counts[a2][y];
      const double p_a = double(row_sum) / double(total);
      const double p_y = double(col_sum) / double(total);
      mi += p_ay * std::log(p_ay / (p_a * p_y));
    }
  return mi;
}

double central_diff(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

std::vector<double> returns_bruteforce(const std::vector<double>& rewards, double gamma) {
  std::vector<double> out(rewards.size(), 0.0);
  for (std::size_t t = 0; t < rewards.size(); ++t)
    for (std::size_t k = t; k < rewards.size(); ++k)
      out[t] += std::pow(gamma, double(k - t)) * rewards[k];
  return out;
}

}  // namespace oracle
