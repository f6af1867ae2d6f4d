#include "fluxpair/circuit.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace fluxpair {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void validate_qubit(const QubitParams& p, const char* label) {
  auto fail = [&](const std::string& msg) {
    throw ValidationError(std::string(label) + ": " + msg);
  };
  if (!(p.alpha > 0.0)) fail("alpha must be > 0");
  if (!(p.beta >= 0.0)) fail("beta must be >= 0");
  if (!(p.r > 0.0)) fail("r must be > 0");
  if (!(p.e_c > 0.0)) fail("e_c must be > 0");
  if (!(p.frustration >= 0.0 && p.frustration < 1.0)) fail("frustration must lie in [0, 1)");
}

/// Capacitance matrix of one isolated qubit restricted to its two free
/// nodes, in units of `scale` times that qubit's big-junction capacitance.
/// Branches: (0,1) big, (0,2) big, (1,2) small + shunt.
Eigen::Matrix2d qubit_capacitance(const QubitParams& p, GroundChoice g, double scale) {
  Eigen::Matrix3d all = Eigen::Matrix3d::Zero();
  auto add_branch = [&all](int i, int j, double c) {
    all(i, i) += c;
    all(j, j) += c;
    all(i, j) -= c;
    all(j, i) -= c;
  };
  add_branch(0, 1, scale);
  add_branch(0, 2, scale);
  add_branch(1, 2, scale * (p.alpha + p.beta));

  const std::array<int, 2> free = free_nodes(g);
  Eigen::Matrix2d out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) out(a, b) = all(free[a], free[b]);
  return out;
}

Eigen::Matrix2d invert_2x2_spd(const Eigen::Matrix2d& m) {
  const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  if (!(det > 0.0) || !(m(0, 0) > 0.0)) {
    throw SingularMatrixError("2x2 capacitance block is not positive definite",
                              {m(0, 0), m(0, 1), m(1, 0), m(1, 1)});
  }
  Eigen::Matrix2d inv;
  inv << m(1, 1) / det, -m(0, 1) / det, -m(1, 0) / det, m(0, 0) / det;
  return 0.5 * (inv + inv.transpose());
}

/// Local mode index (0 or 1) of a free node under a ground choice.
int mode_of(int node, GroundChoice g) {
  const std::array<int, 2> free = free_nodes(g);
  if (node == free[0]) return 0;
  if (node == free[1]) return 1;
  throw ValidationError("node " + std::to_string(node) + " is grounded and carries no mode");
}

}  // namespace

std::array<int, 2> free_nodes(GroundChoice g) {
  switch (g.node) {
    case 0:
      return {1, 2};
    case 1:
      return {0, 2};
    case 2:
      return {0, 1};
    default:
      throw ValidationError("ground node must be 0, 1 or 2");
  }
}

void CircuitSpec::validate() const {
  validate_qubit(qubit1, "qubit1");
  validate_qubit(qubit2, "qubit2");
  if (ground1.node < 0 || ground1.node > 2 || ground2.node < 0 || ground2.node > 2)
    throw ValidationError("ground node must be 0, 1 or 2");
  for (std::size_t i = 0; i < couplings.size(); ++i) {
    const CouplingElement& c = couplings[i];
    auto fail = [&](const std::string& msg) {
      throw ValidationError("coupling " + std::to_string(i) + ": " + msg);
    };
    if (c.node_a < 0 || c.node_a > 2 || c.node_b < 0 || c.node_b > 2)
      fail("nodes must be 0, 1 or 2");
    if (c.node_a == ground1.node) fail("node_a is qubit 1's ground");
    if (c.node_b == ground2.node) fail("node_b is qubit 2's ground");
    if (!(c.gamma >= 0.0)) fail("gamma must be >= 0");
  }
}

bool CircuitSpec::has_capacitive_coupling() const {
  for (const CouplingElement& c : couplings)
    if (c.has_capacitor() && c.gamma > 0.0) return true;
  return false;
}

bool CircuitSpec::has_junction_coupling() const {
  for (const CouplingElement& c : couplings)
    if (c.has_junction() && c.gamma > 0.0) return true;
  return false;
}

CapacitanceMatrices build_capacitance_matrices(const CircuitSpec& spec) {
  spec.validate();

  // Work in units of qubit 1's big-junction capacitance.  With E_C = e^2/2C,
  // qubit 2's capacitance unit is C2 = C1 * e_c1/e_c2.
  const double scale2 = spec.qubit1.e_c / spec.qubit2.e_c;

  CapacitanceMatrices out;
  out.full.setZero();

  // Per-qubit blocks of the 4x4 (free modes of qubit 1, then of qubit 2).
  out.full.topLeftCorner<2, 2>() = qubit_capacitance(spec.qubit1, spec.ground1, 1.0);
  out.full.bottomRightCorner<2, 2>() = qubit_capacitance(spec.qubit2, spec.ground2, scale2);

  // Coupling capacitors bridge one free node of each qubit.
  for (const CouplingElement& c : spec.couplings) {
    if (!c.has_capacitor() || c.gamma == 0.0) continue;
    const int a = mode_of(c.node_a, spec.ground1);
    const int b = 2 + mode_of(c.node_b, spec.ground2);
    out.full(a, a) += c.gamma;
    out.full(b, b) += c.gamma;
    out.full(a, b) -= c.gamma;
    out.full(b, a) -= c.gamma;
  }

  if (!spec.has_capacitive_coupling()) {
    // Uncoupled blocks invert independently; keeping the mutual block an
    // exact zero lets downstream gamma=0 paths match bare qubits bitwise.
    out.inverse_full.setZero();
    out.inverse_full.topLeftCorner<2, 2>() = invert_2x2_spd(out.full.topLeftCorner<2, 2>());
    out.inverse_full.bottomRightCorner<2, 2>() =
        invert_2x2_spd(out.full.bottomRightCorner<2, 2>());
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(out.full);
    const Eigen::Vector4d ev = es.eigenvalues();
    if (!(ev(0) > 1e-12 * std::abs(ev(3)))) {
      const Eigen::Vector4d null_dir = es.eigenvectors().col(0);
      throw SingularMatrixError(
          "full capacitance matrix is singular or not positive definite",
          {null_dir(0), null_dir(1), null_dir(2), null_dir(3)});
    }
    out.inverse_full =
        es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    out.inverse_full = 0.5 * (out.inverse_full + out.inverse_full.transpose()).eval();
  }

  out.q1_block = out.inverse_full.topLeftCorner<2, 2>();
  out.q2_block = out.inverse_full.bottomRightCorner<2, 2>();
  out.mutual_block = out.inverse_full.topRightCorner<2, 2>();
  return out;
}

Eigen::Matrix2d bare_kinetic_block(const QubitParams& params, GroundChoice ground) {
  validate_qubit(params, "params");
  return 4.0 * params.e_c * invert_2x2_spd(qubit_capacitance(params, ground, 1.0));
}

std::vector<CosineTerm> single_qubit_cosines(const QubitParams& params, GroundChoice ground,
                                             int mode_offset) {
  const double ej = params.josephson_energy();
  const double offset = kTwoPi * params.frustration;
  const int m0 = mode_offset;      // lower free node's mode
  const int m1 = mode_offset + 1;  // upper free node's mode

  // Branch phases with the grounded node pinned to zero.  The small junction
  // is always written as cos(phi_node2 - phi_node1 - 2*pi*f) so that flux
  // orientation is consistent across ground choices.
  std::vector<CosineTerm> out;
  switch (ground.node) {
    case 0:
      // free nodes (1, 2): U = -EJ cos(phi1) - EJ cos(phi2) - aEJ cos(phi2 - phi1 - 2pi f)
      out.push_back({-ej, {{m0, 1}}, 0.0});
      out.push_back({-ej, {{m1, 1}}, 0.0});
      out.push_back({-params.alpha * ej, {{m1, 1}, {m0, -1}}, offset});
      break;
    case 1:
      // free nodes (0, 2): U = -EJ cos(phi0) - EJ cos(phi2 - phi0) - aEJ cos(phi2 - 2pi f)
      out.push_back({-ej, {{m0, 1}}, 0.0});
      out.push_back({-ej, {{m1, 1}, {m0, -1}}, 0.0});
      out.push_back({-params.alpha * ej, {{m1, 1}}, offset});
      break;
    case 2:
      // free nodes (0, 1): U = -EJ cos(phi1 - phi0) - EJ cos(phi0) - aEJ cos(-phi1 - 2pi f)
      out.push_back({-ej, {{m1, 1}, {m0, -1}}, 0.0});
      out.push_back({-ej, {{m0, 1}}, 0.0});
      out.push_back({-params.alpha * ej, {{m1, -1}}, offset});
      break;
    default:
      throw ValidationError("ground node must be 0, 1 or 2");
  }
  return out;
}

HamiltonianTerms build_hamiltonian_terms(const CircuitSpec& spec,
                                         const CapacitanceMatrices& mats) {
  spec.validate();
  HamiltonianTerms terms;

  // Kinetic energy (1/2) Q Cbar^-1 Q with Q = 2e n and Cbar in units of C1
  // gives 4 e_c1 * n Cbar^-1 n over all four modes; the cross block appears
  // twice in the quadratic form, which assemble_hamiltonian honors by
  // applying kinetic_mutual in both orderings.
  const double pre = 4.0 * spec.qubit1.e_c;
  terms.kinetic_q1 = pre * mats.q1_block;
  terms.kinetic_q2 = pre * mats.q2_block;
  terms.kinetic_mutual = pre * mats.mutual_block;

  terms.cosines_q1 = single_qubit_cosines(spec.qubit1, spec.ground1, 0);
  terms.cosines_q2 = single_qubit_cosines(spec.qubit2, spec.ground2, 2);

  // Each junction coupling adds -gamma*EJ cos(phi_b' - phi_a), the two
  // connected free nodes only.
  const double ej = spec.qubit1.josephson_energy();
  for (const CouplingElement& c : spec.couplings) {
    if (!c.has_junction() || c.gamma == 0.0) continue;
    const int ma = mode_of(c.node_a, spec.ground1);
    const int mb = 2 + mode_of(c.node_b, spec.ground2);
    terms.cosines_int.push_back({-c.gamma * ej, {{mb, 1}, {ma, -1}}, 0.0});
  }
  return terms;
}

PotentialLandscape potential_landscape(const QubitParams& params, int grid) {
  if (grid < 2) throw ValidationError("potential grid must have at least 2 points per axis");
  validate_qubit(params, "params");

  const double ej = params.josephson_energy();
  const double offset = kTwoPi * params.frustration;

  PotentialLandscape out;
  out.grid = grid;
  out.phi.resize(grid);
  for (int i = 0; i < grid; ++i)
    out.phi[i] = -std::numbers::pi + kTwoPi * static_cast<double>(i) / grid;

  out.values.resize(static_cast<std::size_t>(grid) * grid);
  for (int i = 0; i < grid; ++i) {
    const double p1 = out.phi[i];
    for (int j = 0; j < grid; ++j) {
      const double p2 = out.phi[j];
      out.values[static_cast<std::size_t>(i) * grid + j] =
          -ej * std::cos(p1) - ej * std::cos(p2) -
          params.alpha * ej * std::cos(p2 - p1 - offset);
    }
  }
  return out;
}

}  // namespace fluxpair
