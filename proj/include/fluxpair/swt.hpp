#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>

#include "fluxpair/charge_basis.hpp"
#include "fluxpair/errors.hpp"

namespace fluxpair {

/// B_ij = <basis0_i | basis_j> between two orthonormal d-vector lists.
/// Singular values live in [0, 1]; their minimum measures how well the
/// coupled low-energy subspace is still captured by the product basis.
struct OverlapMatrix {
  Eigen::MatrixXcd b;
  int d() const { return static_cast<int>(b.rows()); }
};

OverlapMatrix overlap_matrix(const Eigen::MatrixXcd& basis0, const Eigen::MatrixXcd& basis);

/// Output of the rank-d Schrieffer-Wolff projection.
struct SwtResult {
  Eigen::MatrixXcd a;      ///< unitary polar factor of B (A = W V^dagger)
  Eigen::MatrixXcd h_eff;  ///< A diag(E) A^dagger, Hermitian, GHz, in the basis0 ordering
  double min_singular = 0.0;
  double subspace_gap = std::numeric_limits<double>::quiet_NaN();  ///< E_d - E_{d-1}, GHz
};

/// Rank-d Schrieffer-Wolff step: SVD B = W Sigma V^dagger, unitary factor
/// A = W V^dagger, effective Hamiltonian h_eff = A diag(energies) A^dagger.
/// energies must be the coupled system's d lowest eigenvalues in the order
/// matching the overlap's coupled-side columns.  Throws HybridizationError
/// when the smallest singular value of B falls below the threshold.
SwtResult swt_projection(const OverlapMatrix& ov, const Eigen::VectorXd& energies,
                         double hybridization_threshold,
                         double subspace_gap = std::numeric_limits<double>::quiet_NaN());

/// Reference method computed densely: the exact direct-rotation unitary
/// U = sqrt((2 P0 - I)(2 P - I)) maps the coupled low subspace P onto the
/// uncoupled one P0, and H_eff = P0 U P H P U^dagger P0 is then expressed in
/// the given orthonormal basis0 columns (which must span ran(P0)).  Dense and
/// slow by design; used to cross-validate swt_projection on small cutoffs.
Eigen::MatrixXcd full_swt_oracle(const SparseHermitian& h0, const SparseHermitian& h,
                                 const Eigen::MatrixXcd& basis0,
                                 std::int64_t full_dim_limit = 2000);

}  // namespace fluxpair
