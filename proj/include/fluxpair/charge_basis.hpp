#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "fluxpair/circuit.hpp"
#include "fluxpair/errors.hpp"

namespace fluxpair {

using Complex = std::complex<double>;

/// Truncated integer-charge basis: each mode spans n in [-n_max, n_max]
/// (m = 2*n_max+1 states), mode_count modes, total dimension m^mode_count.
/// Joint index convention: the LAST mode varies fastest, i.e.
/// index = ((i0*m + i1)*m + ...) with i_k = n_k + n_max.
struct BasisConfig {
  int n_max = 6;
  int mode_count = 4;
  std::int64_t max_dimension = 2'000'000;  ///< guard against runaway m^mode_count

  int states_per_mode() const { return 2 * n_max + 1; }

  /// Total dimension m^mode_count; throws DimensionError above max_dimension.
  std::int64_t dimension() const;

  /// Stride of a mode in the joint index (last mode has stride 1).
  std::int64_t stride(int mode) const;

  /// Charge quantum number of `mode` encoded in a joint index.
  int charge_of(std::int64_t index, int mode) const;

  void validate() const;
};

/// Sparse Hermitian operator on the joint charge basis.  Built from a
/// coordinate list (duplicates summed on compression) and stored compressed
/// row-major for matrix-vector products.
class SparseHermitian {
 public:
  using Storage = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

  SparseHermitian() = default;

  /// Sums duplicate coordinates and compresses.  The entry list must already
  /// be Hermitian (every (i,j,v) matched by (j,i,conj v)); this is asserted
  /// cheaply via a row/column checksum and exactly in tests.
  static SparseHermitian from_triplets(std::int64_t dim,
                                       const std::vector<Eigen::Triplet<Complex>>& entries);

  std::int64_t dimension() const { return mat_.rows(); }
  std::int64_t nonzeros() const { return mat_.nonZeros(); }

  Eigen::VectorXcd apply(const Eigen::Ref<const Eigen::VectorXcd>& x) const;
  Eigen::VectorXd real_diagonal() const;
  Eigen::MatrixXcd dense() const;

  /// max |M - M^dagger| over all entries; ~0 by construction.
  double hermiticity_error() const;

  SparseHermitian plus(const SparseHermitian& other) const;

  const Storage& matrix() const { return mat_; }

 private:
  explicit SparseHermitian(Storage m) : mat_(std::move(m)) {}
  Storage mat_;
};

/// Diagonal charge-number operator of one mode (integer eigenvalues).
SparseHermitian number_operator(const BasisConfig& config, int mode);

/// Charge-shift representation of prefactor*cos(sum_k dir_k*phi_k - offset):
/// (prefactor/2) * (e^{-i offset} * Prod_k Shift(mode_k, dir_k) + h.c.),
/// with Shift(mode,+1)|n> = |n+1> truncated at the cutoff boundary.
SparseHermitian cosine_operator(const BasisConfig& config, const CosineTerm& term);

/// Quadratic charge form sum_ab block(a,b) * n_{row_modes[a]} * n_{col_modes[b]}.
/// Diagonal in the charge basis.  Same-qubit kinetic blocks use
/// row_modes == col_modes; the mutual block uses one mode pair per qubit and
/// must be applied for both orderings by the caller (or via the two-sided
/// overload below).
SparseHermitian kinetic_operator(const BasisConfig& config, const Eigen::Matrix2d& block,
                                 std::array<int, 2> row_modes, std::array<int, 2> col_modes);
inline SparseHermitian kinetic_operator(const BasisConfig& config, const Eigen::Matrix2d& block,
                                        std::array<int, 2> modes) {
  return kinetic_operator(config, block, modes, modes);
}

/// Full Hamiltonian on the joint basis.  include_interaction=false gives
/// H0 (loaded single-qubit blocks only); true adds the mutual kinetic term
/// (both orderings) and the interaction cosines.
SparseHermitian assemble_hamiltonian(const BasisConfig& config, const HamiltonianTerms& terms,
                                     bool include_interaction);

/// Hamiltonian of one isolated qubit on a two-mode basis, given its
/// (possibly capacitively loaded) kinetic block in GHz.
SparseHermitian single_qubit_hamiltonian(const QubitParams& params, GroundChoice ground,
                                         const Eigen::Matrix2d& kinetic_block_ghz,
                                         const BasisConfig& config);

/// Permutation index maps used by symmetry tests and solver start hints.
/// charge_reflection: n -> -n on every mode.  qubit_exchange (mode_count 4):
/// swaps the two qubits' mode pairs.
std::vector<std::int64_t> charge_reflection_permutation(const BasisConfig& config);
std::vector<std::int64_t> qubit_exchange_permutation(const BasisConfig& config);

}  // namespace fluxpair
