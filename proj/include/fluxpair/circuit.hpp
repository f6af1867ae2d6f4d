#pragma once

#include <Eigen/Dense>

#include <array>
#include <vector>

#include "fluxpair/errors.hpp"

namespace fluxpair {

/// Parameters of one three-junction flux qubit.
///
/// The loop holds two identical "big" junctions (Josephson energy E_J,
/// capacitance C) and one smaller junction alpha*E_J with capacitance
/// alpha*C, optionally shunted by an extra capacitor beta*C.  Energies are
/// expressed through the single-junction charging energy e_c = e^2/(2C) in
/// GHz, with E_J = r * e_c.  The external flux bias (frustration) enters the
/// small junction's phase.
struct QubitParams {
  double alpha = 0.7;        ///< small-junction size relative to the big ones
  double beta = 0.0;         ///< shunt capacitance across the small junction, units of C
  double r = 50.0;           ///< E_J / e_c
  double e_c = 1.0;          ///< charging energy e^2/(2C) in GHz
  double frustration = 0.5;  ///< external flux through the loop, units of the flux quantum

  double josephson_energy() const { return r * e_c; }
};

/// Which of a qubit's three nodes is grounded.  Node 0 sits between the two
/// big junctions; nodes 1 and 2 flank the small junction.  Grounding removes
/// that node's phase from the problem, so each qubit keeps two free modes.
struct GroundChoice {
  int node = 0;
};

enum class CouplingKind {
  Capacitor,             ///< shared capacitor gamma*C between the two loops
  JosephsonJunction,     ///< shared junction gamma*E_J, no capacitance
  JunctionWithCapacitor  ///< junction gamma*E_J in parallel with capacitor gamma*C
};

/// One coupling element between node_a of qubit 1 and node_b of qubit 2.
/// Nodes are labelled 0..2 as in GroundChoice; coupling to a grounded node is
/// rejected during validation.  gamma scales the element relative to the big
/// junctions of qubit 1 (capacitance gamma*C, Josephson energy gamma*E_J).
struct CouplingElement {
  CouplingKind kind = CouplingKind::Capacitor;
  int node_a = 2;
  int node_b = 1;
  double gamma = 0.0;

  bool has_capacitor() const {
    return kind == CouplingKind::Capacitor || kind == CouplingKind::JunctionWithCapacitor;
  }
  bool has_junction() const {
    return kind == CouplingKind::JosephsonJunction || kind == CouplingKind::JunctionWithCapacitor;
  }
};

/// Full description of the coupled pair.
struct CircuitSpec {
  QubitParams qubit1;
  QubitParams qubit2;
  GroundChoice ground1;
  GroundChoice ground2;
  std::vector<CouplingElement> couplings;

  /// Throws ValidationError on out-of-range parameters, grounded coupling
  /// nodes, or negative gamma.
  void validate() const;

  bool has_capacitive_coupling() const;
  bool has_junction_coupling() const;
};

/// Capacitance data in units of the big-junction capacitance C.
///
/// Row/column order of `full` is (qubit-1 free modes ascending by node,
/// qubit-2 free modes ascending by node).  The 2x2 views are blocks of
/// `inverse_full`: inverting the whole matrix is what loads each qubit's
/// effective mass with the other circuit's capacitances, and the off-diagonal
/// block is the charge-charge coupling strength.
struct CapacitanceMatrices {
  Eigen::Matrix4d full;
  Eigen::Matrix4d inverse_full;
  Eigen::Matrix2d q1_block;      ///< inverse_full(0:2, 0:2)
  Eigen::Matrix2d q2_block;      ///< inverse_full(2:4, 2:4)
  Eigen::Matrix2d mutual_block;  ///< inverse_full(0:2, 2:4)
};

/// One +-1 shift on one global mode (0..3); a product of shifts is the charge
/// representation of exp(+-i phi) factors making up a cosine.
struct CosineShift {
  int mode = 0;
  int direction = 1;  ///< +1 or -1
};

/// prefactor * cos(sum_k direction_k * phi_{mode_k} - phase_offset), stored in
/// shift form: the operator is (prefactor/2) * (e^{-i phase_offset} * S + h.c.)
/// where S is the product of the listed charge shifts.
struct CosineTerm {
  double prefactor = 0.0;  ///< GHz; the -E_J sign is folded in (negative for potential wells)
  std::vector<CosineShift> shifts;
  double phase_offset = 0.0;
};

/// Everything the charge-basis layer needs to assemble Hamiltonians, with the
/// kinetic blocks already scaled to GHz: H_kin = sum_ab block(a,b) n_a n_b per
/// qubit, plus the mutual block applied in both orderings (q1 x q2 and its
/// transpose), i.e. the full quadratic form over all four modes.
struct HamiltonianTerms {
  // The inverse capacitance matrix is expressed in qubit-1 units, so one
  // global prefactor 4*e_c1 converts every block to GHz (qubit 2's own e_c
  // enters through the unit conversion inside the capacitance matrix).
  Eigen::Matrix2d kinetic_q1;      ///< 4 * e_c1 * q1_block
  Eigen::Matrix2d kinetic_q2;      ///< 4 * e_c1 * q2_block
  Eigen::Matrix2d kinetic_mutual;  ///< 4 * e_c1 * mutual_block
  std::vector<CosineTerm> cosines_q1;   ///< act on modes 0,1
  std::vector<CosineTerm> cosines_q2;   ///< act on modes 2,3
  std::vector<CosineTerm> cosines_int;  ///< junction couplings across the qubits
};

/// The two free (non-grounded) nodes of a qubit, ascending.
std::array<int, 2> free_nodes(GroundChoice g);

/// Assembles the 4x4 capacitance matrix from the branch list (two big
/// junctions, the small junction with its shunt, and every capacitive
/// coupling element), inverts it, and slices the blocks.  Qubit-2
/// capacitances are expressed in units of qubit 1's C through the ratio of
/// charging energies.  Throws SingularMatrixError if the matrix is not
/// positive definite.
CapacitanceMatrices build_capacitance_matrices(const CircuitSpec& spec);

/// Potential and kinetic terms for the coupled system, in GHz.
HamiltonianTerms build_hamiltonian_terms(const CircuitSpec& spec, const CapacitanceMatrices& mats);

/// Potential terms of one isolated qubit, acting on modes (mode_offset,
/// mode_offset+1).  Used for the two-mode single-qubit problems and as the
/// per-qubit pieces of the coupled assembly.
std::vector<CosineTerm> single_qubit_cosines(const QubitParams& params, GroundChoice ground,
                                             int mode_offset = 0);

/// Bare (unloaded) 2x2 kinetic block of one isolated qubit in GHz:
/// 4*e_c*(inverse of its own free-node capacitance matrix).  Follows the same
/// code path as build_capacitance_matrices so an uncoupled circuit reproduces
/// it bitwise.
Eigen::Matrix2d bare_kinetic_block(const QubitParams& params, GroundChoice ground);

/// Single-qubit potential U(phi1, phi2) in GHz on a uniform grid over
/// [-pi, pi)^2, row-major in phi1 (phi2 fastest).  For plotting landscapes.
struct PotentialLandscape {
  int grid = 0;
  std::vector<double> phi;     ///< grid points shared by both axes
  std::vector<double> values;  ///< grid*grid energies, GHz
};
PotentialLandscape potential_landscape(const QubitParams& params, int grid);

}  // namespace fluxpair
