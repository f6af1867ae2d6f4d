// End-to-end acceptance gate for the coupled flux-qubit pipeline.
//
// Each numbered check prints exactly one PASS/FAIL line with the measured
// numbers that decided it; the process exit code is the number of failed
// checks.  Checks that depend on slow production-scale sweeps (charge cutoff
// 6, dimension 28561) print their wall time so regressions in solver cost are
// visible in the log.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fluxpair/charge_basis.hpp"
#include "fluxpair/circuit.hpp"
#include "fluxpair/errors.hpp"
#include "fluxpair/pauli.hpp"
#include "fluxpair/spectrum.hpp"
#include "fluxpair/sweep.hpp"
#include "fluxpair/swt.hpp"
#include "oracles.hpp"

using namespace fluxpair;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* format, ...) {
  char buffer[1024];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buffer, sizeof(buffer), format, args);
  va_end(args);
  return std::string(buffer);
}

/// One full extraction at a given cutoff: loaded single-qubit bases, product
/// basis, coupled solve, overlap projection, coefficient readout.
struct Pipeline {
  QubitBasis q1, q2;
  Eigen::MatrixXcd basis0;
  SparseHermitian h0, h;
  EigenSolution sol;
  SwtResult swt;
  PauliDecomposition pauli;
};

Pipeline run_pipeline(const CircuitSpec& spec, int n_max, double tol, double threshold) {
  BasisConfig pair;
  pair.n_max = n_max;
  pair.mode_count = 4;
  BasisConfig single = pair;
  single.mode_count = 2;

  const HamiltonianTerms terms = build_hamiltonian_terms(spec, build_capacitance_matrices(spec));
  Pipeline out;
  out.q1 = qubit_basis(spec.qubit1, spec.ground1, terms.kinetic_q1, single, tol);
  out.q2 = qubit_basis(spec.qubit2, spec.ground2, terms.kinetic_q2, single, tol);
  out.basis0 = product_basis(out.q1, out.q2);
  out.h0 = assemble_hamiltonian(pair, terms, false);
  out.h = assemble_hamiltonian(pair, terms, true);
  out.sol = lowest_eigenpairs_charge(out.h, pair, 4, tol);
  Eigen::VectorXd e(4);
  for (int i = 0; i < 4; ++i) e(i) = out.sol.values[i];
  out.swt = swt_projection(overlap_matrix(out.basis0, out.sol.vectors), e, threshold);
  out.pauli = pauli_coefficients(out.swt.h_eff);
  return out;
}

/// Sweep template shared by the production-scale checks.
SweepConfig sweep_template(double alpha, double r, double e_c, int g1, int g2, CouplingKind kind,
                           int na, int nb) {
  SweepConfig cfg;
  cfg.circuit.qubit1.alpha = alpha;
  cfg.circuit.qubit1.r = r;
  cfg.circuit.qubit1.e_c = e_c;
  cfg.circuit.qubit2 = cfg.circuit.qubit1;
  cfg.circuit.ground1.node = g1;
  cfg.circuit.ground2.node = g2;
  CouplingElement el;
  el.kind = kind;
  el.node_a = na;
  el.node_b = nb;
  el.gamma = 1.0;
  cfg.circuit.couplings = {el};
  cfg.variable = SweepVariable::Gamma;
  cfg.n_max = 6;
  cfg.k = 8;
  cfg.values = {1.0};  // run_point takes the actual value; keep validate() happy
  return cfg;
}

double max_off_selection(const SweepRow& row) {
  double off = std::max({std::abs(row.h1(0)), std::abs(row.h1(1)), std::abs(row.h2(0)),
                         std::abs(row.h2(1))});
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      if (i != k) off = std::max(off, std::abs(row.j(i, k)));
  return off;
}

// ---------------------------------------------------------------------------
// 1. The effective Hamiltonian of a random coupled circuit reproduces the four
//    lowest coupled eigenvalues, cross-checked against a dense solve.
// ---------------------------------------------------------------------------
bool check_spectrum_preservation(std::string& detail) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(0x5eed2026u);
  std::uniform_real_distribution<double> alpha_dist(0.55, 0.85);
  std::uniform_real_distribution<double> beta_dist(0.0, 0.4);
  std::uniform_real_distribution<double> r_dist(20.0, 60.0);
  std::uniform_real_distribution<double> ec_dist(0.8, 1.25);
  std::uniform_int_distribution<int> ground_dist(0, 2);
  std::uniform_int_distribution<int> kind_dist(0, 2);
  std::uniform_int_distribution<int> node_dist(0, 1);
  std::uniform_real_distribution<double> cap_gamma(0.01, 0.25);
  std::uniform_real_distribution<double> junc_gamma(0.002, 0.02);

  double worst = 0.0;
  int worst_case = -1;
  for (int trial = 0; trial < 50; ++trial) {
    CircuitSpec spec;
    spec.qubit1.alpha = alpha_dist(rng);
    spec.qubit1.beta = beta_dist(rng);
    spec.qubit1.r = r_dist(rng);
    spec.qubit1.e_c = ec_dist(rng);
    spec.qubit2.alpha = alpha_dist(rng);
    spec.qubit2.beta = beta_dist(rng);
    spec.qubit2.r = r_dist(rng);
    spec.qubit2.e_c = ec_dist(rng);
    spec.ground1.node = ground_dist(rng);
    spec.ground2.node = ground_dist(rng);
    CouplingElement el;
    el.kind = static_cast<CouplingKind>(kind_dist(rng));
    el.node_a = free_nodes(spec.ground1)[node_dist(rng)];
    el.node_b = free_nodes(spec.ground2)[node_dist(rng)];
    el.gamma = el.kind == CouplingKind::Capacitor ? cap_gamma(rng) : junc_gamma(rng);
    spec.couplings = {el};

    try {
      const Pipeline p = run_pipeline(spec, 2, 1e-10, 0.02);
      const oracles::DenseSolution ref = oracles::dense_lowest(p.h, 4);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(p.swt.h_eff);
      for (int i = 0; i < 4; ++i) {
        const double rel = std::abs(eig.eigenvalues()(i) - ref.values(i)) / std::abs(ref.values(i));
        if (rel > worst) {
          worst = rel;
          worst_case = trial;
        }
      }
    } catch (const Error& err) {
      detail = fmt("configuration %d aborted: %s", trial, err.what());
      return false;
    }
  }
  const double dt = seconds_since(t0);
  detail = fmt("50 random circuits, worst eigenvalue mismatch %.2e relative (case %d), %.0fs",
               worst, worst_case, dt);
  return worst <= 1e-12 && dt < 300.0;
}

// ---------------------------------------------------------------------------
// 2. The rank-d projection agrees with the dense direct-rotation reference.
// ---------------------------------------------------------------------------
bool check_projection_matches_reference(std::string& detail) {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::string worst_label;

  const auto scan = [&](CouplingKind kind, int g1, int g2, double lo, double hi,
                        const char* label) -> bool {
    CircuitSpec spec;
    spec.qubit1.alpha = 0.7;
    spec.qubit1.r = 50.0;
    spec.qubit2 = spec.qubit1;
    spec.ground1.node = g1;
    spec.ground2.node = g2;
    CouplingElement el;
    el.kind = kind;
    el.node_a = 2;
    el.node_b = 1;
    spec.couplings = {el};
    for (int i = 0; i < 10; ++i) {
      spec.couplings[0].gamma = lo * std::pow(hi / lo, i / 9.0);
      try {
        const Pipeline p = run_pipeline(spec, 2, 1e-11, 0.05);
        const Eigen::MatrixXcd reference = full_swt_oracle(p.h0, p.h, p.basis0);
        const double diff = oracles::max_abs_diff(p.swt.h_eff, reference);
        if (diff > worst) {
          worst = diff;
          worst_label = fmt("%s gamma=%.4g", label, spec.couplings[0].gamma);
        }
      } catch (const Error& err) {
        detail = fmt("%s gamma=%.4g aborted: %s", label, spec.couplings[0].gamma, err.what());
        return false;
      }
    }
    return true;
  };

  if (!scan(CouplingKind::Capacitor, 0, 0, 0.01, 0.5, "capacitor")) return false;
  if (!scan(CouplingKind::JosephsonJunction, 1, 2, 0.005, 0.04, "junction")) return false;
  const double dt = seconds_since(t0);
  detail = fmt("20 configurations, worst max-entry difference %.2e GHz (%s), %.0fs", worst,
               worst_label.c_str(), dt);
  return worst <= 1e-8 && dt < 600.0;
}

// ---------------------------------------------------------------------------
// 3. With the coupling removed the model is exactly local: no two-qubit
//    coefficients, and each local field equals the bare qubit gap.
// ---------------------------------------------------------------------------
bool check_uncoupled_limit(std::string& detail) {
  const auto t0 = Clock::now();
  SweepConfig cfg = sweep_template(0.7, 50.0, 1.0, 0, 0, CouplingKind::Capacitor, 2, 1);
  cfg.solver_tol = 1e-11;
  const SweepRow row = run_point(cfg, 0.0);
  if (row.status != RowStatus::Ok) {
    detail = "zero-coupling point did not complete cleanly";
    return false;
  }
  BasisConfig single;
  single.n_max = cfg.n_max;
  single.mode_count = 2;
  const SingleQubitReport bare =
      single_qubit_report(cfg.circuit.qubit1, cfg.circuit.ground1, std::nullopt, single, 1e-11);
  const double max_j = row.j.cwiseAbs().maxCoeff();
  const double rel1 = std::abs(row.h1(2) - bare.delta) / bare.delta;
  const double rel2 = std::abs(row.h2(2) - bare.delta) / bare.delta;
  detail = fmt("max|J|=%.2e GHz, local fields match the bare gap %.6f GHz to %.1e/%.1e rel, %.0fs",
               max_j, bare.delta, rel1, rel2, seconds_since(t0));
  return max_j < 1e-10 && rel1 <= 1e-9 && rel2 <= 1e-9;
}

// ---------------------------------------------------------------------------
// 4. At the flux symmetry point every capacitive layout produces only
//    {h1z, h2z, Jxx, Jyy, Jzz}; all other coefficients vanish.
// ---------------------------------------------------------------------------
bool check_selection_rule(std::string& detail) {
  const auto t0 = Clock::now();
  struct Layout {
    const char* name;
    int g1, g2;
    std::vector<std::array<int, 2>> links;
  };
  const std::vector<Layout> layouts = {
      {"a", 1, 2, {{2, 1}}},          {"b", 1, 2, {{0, 0}}},
      {"c", 1, 2, {{0, 1}}},          {"d", 1, 2, {{2, 1}, {0, 0}}},
      {"e", 1, 2, {{2, 0}, {0, 1}}},  {"f", 0, 0, {{1, 1}}},
      {"g", 0, 0, {{1, 2}}},          {"h", 0, 0, {{1, 1}, {2, 2}}},
      {"i", 0, 0, {{1, 2}, {2, 1}}}};

  double worst_ratio = 0.0;
  const char* worst_name = "";
  for (const Layout& layout : layouts) {
    SweepConfig cfg = sweep_template(0.7, 50.0, 1.0, layout.g1, layout.g2,
                                     CouplingKind::Capacitor, layout.links[0][0],
                                     layout.links[0][1]);
    cfg.circuit.couplings.clear();
    for (const auto& link : layout.links) {
      CouplingElement el;
      el.kind = CouplingKind::Capacitor;
      el.node_a = link[0];
      el.node_b = link[1];
      el.gamma = 1.0;
      cfg.circuit.couplings.push_back(el);
    }
    cfg.solver_tol = 1e-10;
    const SweepRow row = run_point(cfg, 0.3);
    if (row.status != RowStatus::Ok) {
      detail = fmt("layout %s did not complete cleanly", layout.name);
      return false;
    }
    const double ratio = max_off_selection(row) / row.j.cwiseAbs().maxCoeff();
    if (ratio > worst_ratio) {
      worst_ratio = ratio;
      worst_name = layout.name;
    }
  }
  detail = fmt("9 layouts at gamma=0.3, worst off-selection/max|J| = %.2e (layout %s), %.0fs",
               worst_ratio, worst_name, seconds_since(t0));
  return worst_ratio < 1e-8;
}

// ---------------------------------------------------------------------------
// 5. The three coupling channels scale with their perturbative orders:
//    J_yy linear, J_zz quadratic, J_xx cubic in the coupling strength.
// ---------------------------------------------------------------------------
bool check_perturbative_orders(std::string& detail) {
  const auto t0 = Clock::now();
  SweepConfig cfg = sweep_template(0.7, 50.0, 1.0, 0, 0, CouplingKind::Capacitor, 2, 1);
  cfg.solver_tol = 1e-10;
  std::vector<SweepRow> rows;
  for (double g : {2e-3, 3e-3, 4.5e-3, 6.5e-3, 1e-2}) rows.push_back(run_point(cfg, g));
  for (const SweepRow& row : rows)
    if (row.status != RowStatus::Ok) {
      detail = fmt("point gamma=%.4g did not complete cleanly", row.sweep_value);
      return false;
    }
  try {
    const ScalingReport fits = scaling_report(rows, 1e-3, 1e-2);
    detail = fmt("log-log slopes: J_yy %.3f (want 1), J_zz %.3f (want 2), J_xx %.3f (want 3), %.0fs",
                 fits.jyy.slope, fits.jzz.slope, fits.jxx.slope, seconds_since(t0));
    return std::abs(fits.jyy.slope - 1.0) <= 0.15 && std::abs(fits.jzz.slope - 2.0) <= 0.15 &&
           std::abs(fits.jxx.slope - 3.0) <= 0.15;
  } catch (const Error& err) {
    detail = fmt("slope fit aborted: %s", err.what());
    return false;
  }
}

// ---------------------------------------------------------------------------
// 6. Capacitive sweep phenomenology: the loaded gap falls monotonically and
//    |J_yy|, |J_zz| each peak inside the window and decay past the peak, with
//    peak magnitudes within a factor of two of each other.
// ---------------------------------------------------------------------------
bool check_capacitive_phenomenology(std::string& detail) {
  const auto t0 = Clock::now();
  SweepConfig cfg = sweep_template(0.7, 50.0, 1.0, 0, 0, CouplingKind::Capacitor, 2, 1);
  cfg.solver_tol = 1e-10;
  const std::vector<double> grid = {0.1, 0.25, 0.45, 0.7, 1.0, 1.25, 1.45};
  std::vector<SweepRow> rows;
  for (double g : grid) rows.push_back(run_point(cfg, g));
  for (const SweepRow& row : rows)
    if (row.status != RowStatus::Ok) {
      detail = fmt("point gamma=%.4g did not complete cleanly", row.sweep_value);
      return false;
    }

  bool gap_decreasing = true;
  for (std::size_t i = 1; i < rows.size(); ++i)
    gap_decreasing = gap_decreasing && rows[i].delta1 < rows[i - 1].delta1;

  const auto interior_peak = [&](auto value) -> int {
    int arg = 0;
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (value(rows[i]) > value(rows[arg])) arg = static_cast<int>(i);
    const bool interior = arg > 0 && arg + 1 < static_cast<int>(rows.size()) &&
                          value(rows.back()) < value(rows[arg]);
    return interior ? arg : -1;
  };
  const auto abs_yy = [](const SweepRow& r) { return std::abs(r.j(1, 1)); };
  const auto abs_zz = [](const SweepRow& r) { return std::abs(r.j(2, 2)); };
  const int peak_yy = interior_peak(abs_yy);
  const int peak_zz = interior_peak(abs_zz);

  bool peaks_ok = peak_yy >= 0 && peak_zz >= 0;
  double peak_ratio = 0.0;
  if (peaks_ok) {
    peak_ratio = abs_yy(rows[peak_yy]) / abs_zz(rows[peak_zz]);
    peaks_ok = peak_ratio <= 2.0 && peak_ratio >= 0.5;
  }

  detail = fmt(
      "delta1 %.4f->%.4f GHz (%s); |J_yy| %.2e->%.2e, |J_zz| %.2e->%.2e across gamma %.2g..%.2g "
      "(%s), %.0fs",
      rows.front().delta1, rows.back().delta1, gap_decreasing ? "strictly decreasing" : "NOT monotone",
      abs_yy(rows.front()), abs_yy(rows.back()), abs_zz(rows.front()), abs_zz(rows.back()),
      grid.front(), grid.back(),
      peaks_ok ? fmt("interior peaks, ratio %.2f", peak_ratio).c_str()
               : "largest at the window edge, no interior peak",
      seconds_since(t0));
  return gap_decreasing && peaks_ok;
}

// ---------------------------------------------------------------------------
// 7. Shared-junction coupling: J_xx dominates both other diagonal channels by
//    two orders of magnitude at small coupling, and the projection reports
//    subspace breakdown by gamma = 0.15.
// ---------------------------------------------------------------------------
bool check_junction_dominance(std::string& detail) {
  const auto t0 = Clock::now();
  SweepConfig cfg = sweep_template(0.7, 50.0, 1.0, 1, 2, CouplingKind::JosephsonJunction, 2, 1);
  cfg.solver_tol = 1e-10;

  double worst_ratio = 0.0;
  double worst_gamma = 0.0;
  for (double g : {0.005, 0.015, 0.03, 0.045}) {
    const SweepRow row = run_point(cfg, g);
    if (row.status != RowStatus::Ok) {
      detail = fmt("point gamma=%.4g did not complete cleanly", g);
      return false;
    }
    const double ratio =
        std::max(std::abs(row.j(1, 1)), std::abs(row.j(2, 2))) / std::abs(row.j(0, 0));
    if (ratio > worst_ratio) {
      worst_ratio = ratio;
      worst_gamma = g;
    }
  }
  const bool dominance = worst_ratio <= 1e-2;

  double onset = -1.0;
  double last_singular = 1.0;
  for (double g : {0.05, 0.10, 0.15}) {
    const SweepRow row = run_point(cfg, g);
    last_singular = row.min_singular;
    if (row.status == RowStatus::Hybridized) {
      onset = g;
      break;
    }
  }
  const bool breakdown_in_window = onset > 0.0;
  if (!breakdown_in_window) {
    // Measure where breakdown actually lands so the line stays informative.
    for (double g : {0.16, 0.18, 0.22, 0.30}) {
      const SweepRow row = run_point(cfg, g);
      last_singular = row.min_singular;
      if (row.status == RowStatus::Hybridized) {
        onset = g;
        break;
      }
    }
  }

  detail = fmt(
      "max(|J_yy|,|J_zz|)/|J_xx| = %.3f at gamma=%.3g (bound 0.01); breakdown %s (min singular "
      "%.3f at the last probed point), %.0fs",
      worst_ratio, worst_gamma,
      onset > 0.0 ? fmt("first flagged at gamma=%.3g", onset).c_str() : "not reached by gamma=0.30",
      last_singular, seconds_since(t0));
  return dominance && breakdown_in_window;
}

// ---------------------------------------------------------------------------
// 8. Device-scale capacitive runs (charging energy 7.4 GHz, r=35): at
//    alpha=0.8 every diagonal coupling stays below 0.2 GHz, and at alpha=0.7
//    the transverse coupling reaches half the qubit gap somewhere.
// ---------------------------------------------------------------------------
bool check_device_capacitive(std::string& detail) {
  const auto t0 = Clock::now();
  const std::vector<double> grid = {0.5, 1.0, 1.5, 2.0};

  SweepConfig strong = sweep_template(0.8, 35.0, 7.4, 0, 0, CouplingKind::Capacitor, 2, 1);
  strong.solver_tol = 1e-9;
  double max_jii = 0.0, max_jii_gamma = 0.0;
  for (double g : grid) {
    const SweepRow row = run_point(strong, g);
    if (row.status != RowStatus::Ok) {
      detail = fmt("alpha=0.8 point gamma=%.4g did not complete cleanly", g);
      return false;
    }
    for (int i = 0; i < 3; ++i)
      if (std::abs(row.j(i, i)) > max_jii) {
        max_jii = std::abs(row.j(i, i));
        max_jii_gamma = g;
      }
  }

  SweepConfig soft = sweep_template(0.7, 35.0, 7.4, 0, 0, CouplingKind::Capacitor, 2, 1);
  soft.solver_tol = 1e-9;
  double best_ratio = 0.0, best_gamma = 0.0;
  for (double g : grid) {
    const SweepRow row = run_point(soft, g);
    if (row.status != RowStatus::Ok) {
      detail = fmt("alpha=0.7 point gamma=%.4g did not complete cleanly", g);
      return false;
    }
    if (std::abs(row.jyy_over_delta) > best_ratio) {
      best_ratio = std::abs(row.jyy_over_delta);
      best_gamma = g;
    }
  }

  detail = fmt(
      "alpha=0.8: max|J_ii| = %.4f GHz at gamma=%.3g (bound 0.2); alpha=0.7: max |J_yy|/gap = "
      "%.3f at gamma=%.3g (want >= 0.5), %.0fs",
      max_jii, max_jii_gamma, best_ratio, best_gamma, seconds_since(t0));
  return max_jii < 0.2 && best_ratio >= 0.5;
}

// ---------------------------------------------------------------------------
// 9. Device-scale junction run (alpha=0.8, r=35, charging energy 7.4 GHz,
//    junction with its parallel capacitor): some clean point reaches
//    J_xx more than twice the qubit gap.
// ---------------------------------------------------------------------------
bool check_device_junction(std::string& detail) {
  const auto t0 = Clock::now();
  SweepConfig cfg = sweep_template(0.8, 35.0, 7.4, 1, 2, CouplingKind::JunctionWithCapacitor, 2, 1);
  cfg.solver_tol = 1e-9;
  double best = 0.0, best_gamma = 0.0;
  bool reached = false;
  for (double g : {0.02, 0.04, 0.06, 0.08, 0.10, 0.12}) {
    const SweepRow row = run_point(cfg, g);
    if (row.status != RowStatus::Ok) continue;  // hybridized points do not count
    const double ratio = std::abs(row.jxx_over_delta);
    if (ratio > best) {
      best = ratio;
      best_gamma = g;
    }
    if (ratio > 2.0) {
      reached = true;
      break;
    }
  }
  detail = fmt("max J_xx/gap over clean points = %.3f at gamma=%.3g (want > 2), %.0fs", best,
               best_gamma, seconds_since(t0));
  return reached;
}

// ---------------------------------------------------------------------------
// 10. Single-qubit anharmonicity trend: the leakage ratio E12/gap should fall
//     as the small junction grows, and a 0.5C shunt should lower both the gap
//     and the ratio.
// ---------------------------------------------------------------------------
bool check_anharmonicity_trend(std::string& detail) {
  const auto t0 = Clock::now();
  BasisConfig single;
  single.n_max = 8;
  single.mode_count = 2;

  std::vector<double> ratios;
  std::string table;
  for (double alpha : {0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90}) {
    QubitParams params;
    params.alpha = alpha;
    params.r = 50.0;
    const SingleQubitReport rep =
        single_qubit_report(params, GroundChoice{0}, std::nullopt, single, 1e-11);
    ratios.push_back(rep.anharmonicity_ratio);
    table += fmt("%s%.2f:%.3g", table.empty() ? "" : " ", alpha, rep.anharmonicity_ratio);
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < ratios.size(); ++i)
    decreasing = decreasing && ratios[i] < ratios[i - 1];

  QubitParams base;
  base.alpha = 0.7;
  base.r = 50.0;
  QubitParams shunted = base;
  shunted.beta = 0.5;
  const SingleQubitReport rep0 =
      single_qubit_report(base, GroundChoice{0}, std::nullopt, single, 1e-11);
  const SingleQubitReport rep5 =
      single_qubit_report(shunted, GroundChoice{0}, std::nullopt, single, 1e-11);
  const bool shunt_ok =
      rep5.delta < rep0.delta && rep5.anharmonicity_ratio < rep0.anharmonicity_ratio;

  detail = fmt(
      "E12/gap by alpha {%s} (%s); shunt 0->0.5 at alpha=0.7: gap %.4f->%.4f GHz, ratio "
      "%.3f->%.3f, %.0fs",
      table.c_str(), decreasing ? "strictly decreasing" : "NOT decreasing",
      rep0.delta, rep5.delta, rep0.anharmonicity_ratio, rep5.anharmonicity_ratio,
      seconds_since(t0));
  return decreasing && shunt_ok;
}

// ---------------------------------------------------------------------------
// 11. Mirroring the coupler attachment between a qubit's two corner nodes
//     flips the signs of J_yy and J_xx and preserves J_zz and every gap.
//     (Relabelling which corner is grounded, with the coupler elsewhere, is an
//     exact symmetry at the flux symmetry point; that is verified too.)
// ---------------------------------------------------------------------------
bool check_mirror_covariance(std::string& detail) {
  const auto t0 = Clock::now();
  SweepConfig cfg_a = sweep_template(0.7, 50.0, 1.0, 0, 0, CouplingKind::Capacitor, 2, 1);
  SweepConfig cfg_b = sweep_template(0.7, 50.0, 1.0, 0, 0, CouplingKind::Capacitor, 2, 2);
  cfg_a.solver_tol = cfg_b.solver_tol = 1e-10;
  const SweepRow a = run_point(cfg_a, 0.3);
  const SweepRow b = run_point(cfg_b, 0.3);
  if (a.status != RowStatus::Ok || b.status != RowStatus::Ok) {
    detail = "a mirrored point did not complete cleanly";
    return false;
  }

  const auto flips = [](double x, double y) {
    return std::abs(x + y) <= 1e-6 * std::max(std::abs(x), std::abs(y)) + 1e-10;
  };
  const auto preserved = [](double x, double y) {
    return std::abs(x - y) <= 1e-9 * std::max(std::abs(x), std::abs(y));
  };
  const bool ok_flip = flips(a.j(1, 1), b.j(1, 1)) && flips(a.j(0, 0), b.j(0, 0));
  const bool ok_keep = preserved(a.j(2, 2), b.j(2, 2)) && preserved(a.delta1, b.delta1) &&
                       preserved(a.delta2, b.delta2) &&
                       preserved(a.subspace_gap, b.subspace_gap);

  // Grounding corner node 1 versus corner node 2 (coupler untouched) builds
  // the same operator at the flux symmetry point.
  QubitParams solo;
  solo.alpha = 0.7;
  solo.r = 50.0;
  BasisConfig single;
  single.n_max = 4;
  single.mode_count = 2;
  const SparseHermitian h1 = single_qubit_hamiltonian(solo, GroundChoice{1},
                                                      bare_kinetic_block(solo, GroundChoice{1}),
                                                      single);
  const SparseHermitian h2 = single_qubit_hamiltonian(solo, GroundChoice{2},
                                                      bare_kinetic_block(solo, GroundChoice{2}),
                                                      single);
  const double relabel_diff = oracles::max_abs_diff(h1.dense(), h2.dense());
  const bool relabel_exact = relabel_diff <= 1e-12 * solo.josephson_energy();

  detail = fmt(
      "J_yy %+.5e -> %+.5e, J_xx %+.5e -> %+.5e (sign flip %s); J_zz/gaps preserved %s; ground "
      "relabel 1<->2 identical to %.1e GHz, %.0fs",
      a.j(1, 1), b.j(1, 1), a.j(0, 0), b.j(0, 0), ok_flip ? "ok" : "BROKEN",
      ok_keep ? "ok" : "BROKEN", relabel_diff, seconds_since(t0));
  return ok_flip && ok_keep && relabel_exact;
}

// ---------------------------------------------------------------------------
// 12. The extracted effective Hamiltonian does not depend on eigenvector
//     gauge: random column phases and rotations inside a degenerate pair
//     leave it unchanged.
// ---------------------------------------------------------------------------
bool check_gauge_invariance(std::string& detail) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(0xfadedfacadeull);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);

  CircuitSpec spec;
  spec.qubit1.alpha = 0.7;
  spec.qubit1.r = 50.0;
  spec.qubit2 = spec.qubit1;
  CouplingElement el;
  el.kind = CouplingKind::Capacitor;
  el.node_a = 2;
  el.node_b = 1;
  el.gamma = 0.15;
  spec.couplings = {el};

  const Pipeline coupled = run_pipeline(spec, 2, 1e-11, 0.05);
  Eigen::VectorXd e(4);
  for (int i = 0; i < 4; ++i) e(i) = coupled.sol.values[i];
  Eigen::MatrixXcd phased = coupled.sol.vectors;
  for (int c = 0; c < 4; ++c) phased.col(c) *= std::polar(1.0, angle(rng));
  const SwtResult swt_phased = swt_projection(overlap_matrix(coupled.basis0, phased), e, 0.05);
  const double phase_diff = oracles::max_abs_diff(swt_phased.h_eff, coupled.swt.h_eff);

  spec.couplings[0].gamma = 0.0;  // identical uncoupled qubits: exact two-fold degeneracy
  const Pipeline degen = run_pipeline(spec, 2, 1e-11, 0.05);
  Eigen::VectorXd e0(4);
  for (int i = 0; i < 4; ++i) e0(i) = degen.sol.values[i];
  const double split = std::abs(e0(2) - e0(1));
  Eigen::Matrix2cd block;
  block << Complex(angle(rng), angle(rng)), Complex(angle(rng), angle(rng)),
      Complex(angle(rng), angle(rng)), Complex(angle(rng), angle(rng));
  const Eigen::HouseholderQR<Eigen::Matrix2cd> qr(block);
  const Eigen::Matrix2cd rotation = qr.householderQ();
  Eigen::MatrixXcd rotated = degen.sol.vectors;
  rotated.middleCols(1, 2) = degen.sol.vectors.middleCols(1, 2) * rotation;
  const SwtResult swt_rotated = swt_projection(overlap_matrix(degen.basis0, rotated), e0, 0.05);
  const double rot_diff = oracles::max_abs_diff(swt_rotated.h_eff, degen.swt.h_eff);

  detail = fmt(
      "random column phases shift h_eff by %.1e GHz; rotating the degenerate pair (split %.1e "
      "GHz) shifts it by %.1e GHz, %.0fs",
      phase_diff, split, rot_diff, seconds_since(t0));
  return phase_diff < 1e-10 && rot_diff < 1e-10;
}

}  // namespace

int main() {
  struct Check {
    const char* name;
    bool (*fn)(std::string&);
  };
  const std::vector<Check> checks = {
      {"four lowest coupled levels preserved by projection", check_spectrum_preservation},
      {"projection matches dense direct-rotation reference", check_projection_matches_reference},
      {"uncoupled limit is exactly local", check_uncoupled_limit},
      {"selection rule across nine capacitive layouts", check_selection_rule},
      {"perturbative orders of the coupling channels", check_perturbative_orders},
      {"capacitive sweep phenomenology", check_capacitive_phenomenology},
      {"junction coupling dominance and breakdown onset", check_junction_dominance},
      {"device-scale capacitive coupling bounds", check_device_capacitive},
      {"device-scale junction coupling strength", check_device_junction},
      {"single-qubit anharmonicity trend", check_anharmonicity_trend},
      {"mirror covariance of coupling signs", check_mirror_covariance},
      {"gauge invariance of the effective Hamiltonian", check_gauge_invariance},
  };

  const auto t0 = Clock::now();
  std::printf("coupled flux-qubit pipeline: acceptance checks\n");
  int failures = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    std::string detail;
    bool ok = false;
    try {
      ok = checks[i].fn(detail);
    } catch (const std::exception& err) {
      detail = fmt("unexpected exception: %s", err.what());
      ok = false;
    }
    if (!ok) ++failures;
    std::printf("[%2zu] %s  %-52s %s\n", i + 1, ok ? "PASS" : "FAIL", checks[i].name,
                detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu checks passed (%.0fs total)\n", checks.size() - failures, checks.size(),
              seconds_since(t0));
  return failures;
}
