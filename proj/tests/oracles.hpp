#pragma once

// Independent reference implementations used only by tests: a dense
// matrix-product quantum simulator with series-expansion gate matrices,
// brute-force information estimators, and finite differences. None of
// these share code with the library paths they check.

#include <complex>
#include <functional>
#include <vector>

#include "qpg/statevector.hpp"

namespace oracle {

using Cx = std::complex<double>;
using Matrix = std::vector<std::vector<Cx>>;
using Vector = std::vector<Cx>;

Matrix identity(int n);
Matrix kron(const Matrix& a, const Matrix& b);
Vector matvec(const Matrix& m, const Vector& v);
Matrix matmul(const Matrix& a, const Matrix& b);

// exp(A) by scaling-and-squaring Taylor series.
Matrix mat_exp(const Matrix& a);

// exp(-i angle/2 P) from the literal Pauli matrix, no closed form.
Matrix rotation_matrix(qpg::quantum::Axis axis, double angle);

// Gate on one qubit of an n-qubit register, qubit 0 least significant.
Matrix embed_single(const Matrix& gate, int qubit, int n_qubits);
Matrix cz_matrix(int q1, int q2, int n_qubits);

double fidelity(const Vector& a, const Vector& b);  // |<a|b>|^2
Vector to_vector(const qpg::quantum::Statevector& s);

// Plug-in MI by the most literal triple loop over an integer count table.
double mi_bruteforce(const std::vector<std::vector<long long>>& counts);

// Central finite difference with the given step.
double central_diff(const std::function<double(double)>& f, double x, double h);

// Double-loop discounted return, gamma^k over the remaining rewards.
std::vector<double> returns_bruteforce(const std::vector<double>& rewards, double gamma);

}  // namespace oracle
