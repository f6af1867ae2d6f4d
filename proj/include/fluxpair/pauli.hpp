#pragma once

#include <Eigen/Dense>

#include <cstdint>

#include "fluxpair/charge_basis.hpp"
#include "fluxpair/circuit.hpp"

namespace fluxpair {

/// Gauge-fixed two-level basis of one (loaded) qubit.
///
/// The phase convention makes each eigenvector conjugation-symmetric in the
/// charge basis (amplitude at -n = conjugate of amplitude at n), i.e. real in
/// the phase representation, with a deterministic overall sign.  This pins
/// the operator quadratures: charge matrix elements <g|n|e> come out purely
/// imaginary and junction-phase elements real, so Pauli labels (x vs y) are
/// reproducible across runs and parameters.
struct QubitBasis {
  Eigen::VectorXcd ground;
  Eigen::VectorXcd excited;
  double delta = 0.0;  ///< E1 - E0, GHz

  /// Index and value of the amplitude that anchored the sign choice of each
  /// vector (largest magnitude, ties to the lowest index).
  struct GaugeCertificate {
    std::int64_t ground_index = -1;
    Complex ground_value{0.0, 0.0};
    std::int64_t excited_index = -1;
    Complex excited_value{0.0, 0.0};
    double conjugation_defect = 0.0;  ///< max |u(-n) - conj(u(n))| after fixing
  } gauge;
};

/// Solves the loaded single-qubit Hamiltonian for its two lowest states and
/// applies the gauge described on QubitBasis.  kinetic_block_ghz is the
/// qubit's diagonal block of the coupled circuit's inverse capacitance
/// matrix, pre-multiplied to GHz (HamiltonianTerms.kinetic_q1/q2).
QubitBasis qubit_basis(const QubitParams& params, GroundChoice ground,
                       const Eigen::Matrix2d& kinetic_block_ghz, const BasisConfig& config,
                       double tol = 1e-10);

/// Tensor-product four-state basis in the order |gg>, |ge>, |eg>, |ee>
/// (qubit-2 index fastest, matching the joint-mode ordering).
Eigen::MatrixXcd product_basis(const QubitBasis& q1, const QubitBasis& q2);

/// h_eff = e0*I + sum_i (h1_i/2) s_i x I + (h2_i/2) I x s_i + sum_ij J_ij s_i x s_j,
/// with s = (sigma_x, sigma_y, sigma_z) in the energy eigenbasis ordered
/// (ground, excited) and ground mapped to the -1 eigenvector of sigma_z, so a
/// bare qubit reads h_z = +Delta.
struct PauliDecomposition {
  double e0 = 0.0;
  Eigen::Vector3d h1 = Eigen::Vector3d::Zero();
  Eigen::Vector3d h2 = Eigen::Vector3d::Zero();
  Eigen::Matrix3d j = Eigen::Matrix3d::Zero();

  Eigen::Matrix4cd reconstruct() const;
};

/// Pauli matrix i in {0:x, 1:y, 2:z} under the (ground, excited) ordering.
Eigen::Matrix2cd pauli_matrix(int i);

/// Trace-orthogonality extraction of the coefficients; throws ValidationError
/// if h_eff is not Hermitian or a coefficient has a non-negligible imaginary
/// part (> 1e-12 of the matrix scale).
PauliDecomposition pauli_coefficients(const Eigen::Matrix4cd& h_eff);

}  // namespace fluxpair
