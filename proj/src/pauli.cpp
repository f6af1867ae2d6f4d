#include "fluxpair/pauli.hpp"

#include <cmath>
#include <string>

#include "fluxpair/spectrum.hpp"

namespace fluxpair {

namespace {

/// Rotates v by a global phase so that the amplitude at -n is the conjugate
/// of the amplitude at n (real in the phase representation; possible because
/// the Hamiltonian is real there), then fixes the leftover sign
/// deterministically.  Records the sign anchor and the residual conjugation
/// defect.
void gauge_fix(Eigen::VectorXcd& v, const std::vector<std::int64_t>& reflection,
               std::int64_t& anchor_out, Complex& value_out, double& defect_out) {
  const std::int64_t n = v.size();

  // Phase from the best-conditioned reflection pair: e^{2i theta} = v_I^* / v_{-I}.
  std::int64_t pair_index = 0;
  double best = -1.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double weight = std::abs(v(i)) * std::abs(v(reflection[i]));
    if (weight > best) {
      best = weight;
      pair_index = i;
    }
  }
  const Complex ratio = std::conj(v(pair_index)) / v(reflection[pair_index]);
  const double theta = 0.5 * std::arg(ratio);
  v *= std::exp(Complex(0.0, theta));

  // The phase is fixed only up to a sign; anchor it on the largest amplitude.
  // Reflection partners of a parity eigenstate tie in magnitude up to solver
  // noise, so near-ties resolve to the lowest index instead of to the noise.
  double amax = 0.0;
  for (std::int64_t i = 0; i < n; ++i) amax = std::max(amax, std::abs(v(i)));
  std::int64_t anchor = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    if (std::abs(v(i)) >= (1.0 - 1e-6) * amax) {
      anchor = i;
      break;
    }
  }
  const Complex av = v(anchor);
  const double decisive = std::abs(av.real()) > 1e-3 * amax ? av.real() : av.imag();
  if (decisive < 0.0) v = -v;

  anchor_out = anchor;
  value_out = v(anchor);

  double defect = 0.0;
  for (std::int64_t i = 0; i < n; ++i)
    defect = std::max(defect, std::abs(v(reflection[i]) - std::conj(v(i))));
  defect_out = defect;
}

Eigen::Matrix4cd kron2(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Eigen::Matrix4cd out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

}  // namespace

Eigen::Matrix2cd pauli_matrix(int i) {
  Eigen::Matrix2cd m;
  const Complex im(0.0, 1.0);
  switch (i) {
    case 0:  // x
      m << 0.0, 1.0, 1.0, 0.0;
      return m;
    case 1:  // y: ground state is the -1 eigenvector of z
      m << 0.0, im, -im, 0.0;
      return m;
    case 2:  // z
      m << -1.0, 0.0, 0.0, 1.0;
      return m;
    default:
      throw ValidationError("pauli index must be 0 (x), 1 (y) or 2 (z)");
  }
}

QubitBasis qubit_basis(const QubitParams& params, GroundChoice ground,
                       const Eigen::Matrix2d& kinetic_block_ghz, const BasisConfig& config,
                       double tol) {
  if (config.mode_count != 2) throw ValidationError("qubit_basis needs a 2-mode basis config");

  const SparseHermitian h = single_qubit_hamiltonian(params, ground, kinetic_block_ghz, config);
  const EigenSolution sol = lowest_eigenpairs_charge(h, config, 2, tol);

  QubitBasis basis;
  basis.delta = sol.values[1] - sol.values[0];
  if (basis.delta < 1e-9)
    throw Error("qubit gap " + std::to_string(basis.delta) +
                " GHz is below 1e-9; the two-level frame is ill-defined");

  basis.ground = sol.vectors.col(0);
  basis.excited = sol.vectors.col(1);

  const std::vector<std::int64_t> reflection = charge_reflection_permutation(config);
  gauge_fix(basis.ground, reflection, basis.gauge.ground_index, basis.gauge.ground_value,
            basis.gauge.conjugation_defect);
  double excited_defect = 0.0;
  gauge_fix(basis.excited, reflection, basis.gauge.excited_index, basis.gauge.excited_value,
            excited_defect);
  basis.gauge.conjugation_defect = std::max(basis.gauge.conjugation_defect, excited_defect);
  return basis;
}

Eigen::MatrixXcd product_basis(const QubitBasis& q1, const QubitBasis& q2) {
  const std::int64_t n1 = q1.ground.size();
  const std::int64_t n2 = q2.ground.size();
  if (n1 != n2 || q1.excited.size() != n1 || q2.excited.size() != n2)
    throw ValidationError("qubit bases have mismatched dimensions");

  Eigen::MatrixXcd out(n1 * n2, 4);
  auto kron_into = [&](int col, const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    for (std::int64_t i = 0; i < n1; ++i) out.col(col).segment(i * n2, n2) = a(i) * b;
  };
  // |gg>, |ge>, |eg>, |ee> with the qubit-2 index fastest.
  kron_into(0, q1.ground, q2.ground);
  kron_into(1, q1.ground, q2.excited);
  kron_into(2, q1.excited, q2.ground);
  kron_into(3, q1.excited, q2.excited);
  return out;
}

Eigen::Matrix4cd PauliDecomposition::reconstruct() const {
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  Eigen::Matrix4cd out = e0 * Eigen::Matrix4cd::Identity();
  for (int a = 0; a < 3; ++a) {
    out += 0.5 * h1(a) * kron2(pauli_matrix(a), id);
    out += 0.5 * h2(a) * kron2(id, pauli_matrix(a));
    for (int b = 0; b < 3; ++b) out += j(a, b) * kron2(pauli_matrix(a), pauli_matrix(b));
  }
  return out;
}

PauliDecomposition pauli_coefficients(const Eigen::Matrix4cd& h_eff) {
  const double scale = std::max(1.0, h_eff.cwiseAbs().maxCoeff());
  if ((h_eff - h_eff.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw ValidationError("effective Hamiltonian is not Hermitian");

  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  auto real_checked = [&](Complex c) {
    if (std::abs(c.imag()) > 1e-12 * scale)
      throw ValidationError("Pauli coefficient has a non-negligible imaginary part");
    return c.real();
  };

  PauliDecomposition out;
  out.e0 = real_checked(h_eff.trace() / 4.0);
  for (int i = 0; i < 3; ++i) {
    out.h1(i) = real_checked((kron2(pauli_matrix(i), id) * h_eff).trace() / 2.0);
    out.h2(i) = real_checked((kron2(id, pauli_matrix(i)) * h_eff).trace() / 2.0);
    for (int j = 0; j < 3; ++j)
      out.j(i, j) = real_checked((kron2(pauli_matrix(i), pauli_matrix(j)) * h_eff).trace() / 4.0);
  }
  return out;
}

}  // namespace fluxpair
