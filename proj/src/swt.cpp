#include "fluxpair/swt.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <string>

namespace fluxpair {

OverlapMatrix overlap_matrix(const Eigen::MatrixXcd& basis0, const Eigen::MatrixXcd& basis) {
  if (basis0.rows() != basis.rows())
    throw ValidationError("overlap: bases live on different spaces");
  if (basis0.cols() != basis.cols())
    throw ValidationError("overlap: bases have different subspace dimensions");
  if (basis0.cols() < 1) throw ValidationError("overlap: empty basis");
  return OverlapMatrix{basis0.adjoint() * basis};
}

SwtResult swt_projection(const OverlapMatrix& ov, const Eigen::VectorXd& energies,
                         double hybridization_threshold, double subspace_gap) {
  const int d = ov.d();
  if (ov.b.cols() != d) throw ValidationError("overlap matrix must be square");
  if (energies.size() != d)
    throw ValidationError("energy count does not match the subspace dimension");
  for (int i = 1; i < d; ++i)
    if (energies(i) < energies(i - 1))
      throw ValidationError("energies must be ascending");

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(ov.b, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd sigma = svd.singularValues();
  if (sigma(0) > 1.0 + 1e-6)
    throw ValidationError("overlap has a singular value above 1; input bases "
                          "are not orthonormal");

  SwtResult result;
  result.min_singular = sigma(d - 1);
  result.subspace_gap = subspace_gap;
  if (result.min_singular < hybridization_threshold) {
    throw HybridizationError(
        "low-energy subspace has hybridized with higher levels (min singular value " +
            std::to_string(result.min_singular) + " below threshold " +
            std::to_string(hybridization_threshold) + ")",
        result.min_singular);
  }

  result.a = svd.matrixU() * svd.matrixV().adjoint();

  // Mean-shifting the energies keeps the matrix arithmetic at the scale of
  // the level spacings instead of the absolute energies, which preserves
  // tiny high-order couplings in h_eff.
  const double mean = energies.mean();
  const Eigen::VectorXd centered = energies.array() - mean;
  Eigen::MatrixXcd h = result.a * centered.asDiagonal() * result.a.adjoint();
  h = 0.5 * (h + h.adjoint()).eval();
  for (int i = 0; i < d; ++i) h(i, i) += mean;
  result.h_eff = std::move(h);
  return result;
}

Eigen::MatrixXcd full_swt_oracle(const SparseHermitian& h0, const SparseHermitian& h,
                                 const Eigen::MatrixXcd& basis0, std::int64_t full_dim_limit) {
  const std::int64_t n = h0.dimension();
  if (h.dimension() != n) throw ValidationError("operators live on different spaces");
  if (basis0.rows() != n) throw ValidationError("basis0 does not match the operators");
  if (n > full_dim_limit)
    throw DimensionError("dense reference method limited to dimension " +
                         std::to_string(full_dim_limit) + ", got " + std::to_string(n));
  const int d = static_cast<int>(basis0.cols());
  if (d < 1 || d > n) throw ValidationError("subspace dimension out of range");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es0(h0.dense());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.dense());
  if (es0.info() != Eigen::Success || es.info() != Eigen::Success)
    throw Error("dense eigendecomposition failed");

  const Eigen::MatrixXcd v0 = es0.eigenvectors().leftCols(d);
  const Eigen::MatrixXcd v = es.eigenvectors().leftCols(d);
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  const Eigen::MatrixXcd p0 = v0 * v0.adjoint();
  const Eigen::MatrixXcd p = v * v.adjoint();

  // basis0 must span ran(P0) (the low subspace of h0), otherwise expressing
  // the result in it is meaningless.
  if ((p0 * basis0 - basis0).cwiseAbs().maxCoeff() > 1e-6)
    throw ValidationError("basis0 does not span the low-energy subspace of h0");

  // Direct rotation between the two subspaces.  The reflection product is
  // unitary (hence normal, diagonalizable); the principal square root fails
  // exactly when some principal angle reaches 90 degrees.
  const Eigen::MatrixXcd reflections = (2.0 * p0 - id) * (2.0 * p - id);
  const Eigen::MatrixXcd u = reflections.sqrt();

  if ((u * p * u.adjoint() - p0).cwiseAbs().maxCoeff() > 1e-6)
    throw Error("direct-rotation square root failed to map the subspaces "
                "(orthogonal subspaces or branch failure)");

  const Eigen::MatrixXcd h_in_p = p * (h.dense() * p);
  const Eigen::MatrixXcd rotated = u * h_in_p * u.adjoint();
  Eigen::MatrixXcd result = basis0.adjoint() * rotated * basis0;
  result = 0.5 * (result + result.adjoint()).eval();
  return result;
}

}  // namespace fluxpair
