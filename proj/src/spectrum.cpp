#include "fluxpair/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace fluxpair {

namespace {

/// Twice-iterated classical Gram-Schmidt against the first m columns of V,
/// then normalization.  Returns false when v lies (numerically) inside the
/// span already.
bool orthonormalize_against(const Eigen::MatrixXcd& v_basis, int m, Eigen::VectorXcd& v) {
  const double original = v.norm();
  if (!(original > 0.0)) return false;
  for (int pass = 0; pass < 2; ++pass) {
    if (m == 0) break;
    const Eigen::VectorXcd coeff = v_basis.leftCols(m).adjoint() * v;
    v.noalias() -= v_basis.leftCols(m) * coeff;
  }
  const double remaining = v.norm();
  if (!(remaining > 1e-8 * original)) return false;
  v /= remaining;
  return true;
}

}  // namespace

EigenSolution lowest_eigenpairs(const SparseHermitian& h, int k, double tol,
                                const SolverOptions& options) {
  const std::int64_t n = h.dimension();
  if (k < 1) throw ValidationError("k must be >= 1");
  if (k > n) throw ValidationError("k exceeds the operator dimension");
  if (!(tol > 0.0)) throw ValidationError("tol must be positive");

  // Converge guard pairs beyond the requested k (discarded on return), so a
  // level just above the returned window is refined rather than ignored.
  const int k_work = static_cast<int>(
      std::min<std::int64_t>(n, static_cast<std::int64_t>(k) + std::max(options.guard, 0)));

  // Subspace capacity: enough room beyond k for a thick restart to retain
  // useful history, capped by the space dimension itself.
  const int max_basis = static_cast<int>(
      std::min<std::int64_t>(n, std::max(options.max_basis, 2 * k_work + 8)));
  const int block = std::min(k_work, 8);  // expansion vectors per iteration

  const Eigen::VectorXd diag = h.real_diagonal();
  const double diag_scale = std::max(1.0, diag.cwiseAbs().maxCoeff());

  Eigen::MatrixXcd v_basis(n, max_basis);
  Eigen::MatrixXcd hv_basis(n, max_basis);
  Eigen::MatrixXcd t_small = Eigen::MatrixXcd::Zero(max_basis, max_basis);
  int m = 0;
  long matvecs = 0;

  auto append = [&](Eigen::VectorXcd v) -> bool {
    if (m >= max_basis) return false;
    if (!orthonormalize_against(v_basis, m, v)) return false;
    v_basis.col(m) = v;
    hv_basis.col(m) = h.apply(v);
    ++matvecs;
    for (int i = 0; i < m; ++i) {
      const Complex tim = v_basis.col(i).dot(hv_basis.col(m));
      t_small(i, m) = tim;
      t_small(m, i) = std::conj(tim);
    }
    t_small(m, m) = Complex(std::real(v_basis.col(m).dot(hv_basis.col(m))), 0.0);
    ++m;
    return true;
  };

  // Deterministic start block: normalized all-ones, caller hints, then
  // fixed-seed Gaussian fill until the block holds k+2 directions.
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_vector = [&] {
    Eigen::VectorXcd v(n);
    for (std::int64_t i = 0; i < n; ++i) v(i) = Complex(gauss(rng), gauss(rng));
    return v;
  };

  append(Eigen::VectorXcd::Ones(n));
  for (const Eigen::VectorXcd& hint : options.start_hints) {
    if (hint.size() != n) throw ValidationError("start hint has wrong dimension");
    append(hint);
  }
  {
    const int start_target = static_cast<int>(std::min<std::int64_t>(n, k_work + 2));
    int guard = 0;
    while (m < start_target && guard++ < 4 * start_target) append(random_vector());
  }

  std::vector<double> last_residuals;
  while (true) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(t_small.topLeftCorner(m, m));
    const Eigen::VectorXd theta = es.eigenvalues();
    const Eigen::MatrixXcd y = es.eigenvectors();

    const int kk = std::min(k_work, m);
    const Eigen::MatrixXcd x = v_basis.leftCols(m) * y.leftCols(kk);
    Eigen::MatrixXcd residual = hv_basis.leftCols(m) * y.leftCols(kk);
    residual.noalias() -= x * theta.head(kk).asDiagonal();

    last_residuals.resize(kk);
    bool converged = (m >= k_work);
    int unconverged = 0;
    for (int i = 0; i < kk; ++i) {
      last_residuals[i] = residual.col(i).norm();
      if (last_residuals[i] >= tol) {
        converged = false;
        ++unconverged;
      }
    }

    if (converged) {
      EigenSolution sol;
      sol.values.assign(theta.data(), theta.data() + k);
      sol.vectors = x.leftCols(k);
      sol.residuals.assign(last_residuals.begin(), last_residuals.begin() + k);
      return sol;
    }
    if (matvecs >= options.max_matvecs) {
      throw NonConvergenceError("eigensolver exhausted its matrix-vector budget of " +
                                    std::to_string(options.max_matvecs),
                                last_residuals, matvecs);
    }

    const int want = std::min(std::max(unconverged, 1), block);

    if (m + want > max_basis) {
      // Thick restart: keep the best Ritz vectors, rebuild the small matrix
      // (diagonal after the rotation).
      const int keep = std::min(2 * k_work + 4, m - 1);
      const Eigen::MatrixXcd v_new = v_basis.leftCols(m) * y.leftCols(keep);
      const Eigen::MatrixXcd hv_new = hv_basis.leftCols(m) * y.leftCols(keep);
      v_basis.leftCols(keep) = v_new;
      hv_basis.leftCols(keep) = hv_new;
      t_small.topLeftCorner(keep, keep).setZero();
      for (int i = 0; i < keep; ++i) t_small(i, i) = Complex(theta(i), 0.0);
      m = keep;
      continue;
    }

    // Expand with diagonally preconditioned residuals of unconverged pairs.
    int added = 0;
    for (int i = 0; i < kk && added < want; ++i) {
      if (last_residuals[i] < tol) continue;
      Eigen::VectorXcd t(n);
      for (std::int64_t j = 0; j < n; ++j) {
        double denom = diag(j) - theta(i);
        const double floor = 1e-6 * diag_scale;
        if (std::abs(denom) < floor) denom = (denom < 0.0) ? -floor : floor;
        t(j) = residual(j, i) / denom;
      }
      if (append(std::move(t))) ++added;
    }
    for (int i = 0; i < kk && added == 0; ++i) {
      if (last_residuals[i] < tol) continue;
      if (append(residual.col(i))) ++added;
    }
    {
      int guard = 0;
      while (added == 0 && m < max_basis && guard++ < 8)
        if (append(random_vector())) ++added;
    }
    if (added == 0) {
      throw NonConvergenceError("eigensolver subspace stagnated before reaching tolerance",
                                last_residuals, matvecs);
    }
  }
}

namespace {

/// Orbit bookkeeping for an involutive index permutation.  Each orbit {i, ri}
/// carries one even basis vector (e_i + e_ri)/sqrt(2) (or e_i alone when the
/// orbit is a fixed point) and, for two-element orbits, one odd basis vector
/// (e_i - e_ri)/sqrt(2) anchored with + on the smaller index.
struct SectorMap {
  std::vector<std::int64_t> slot_even;  ///< full index -> its orbit's even slot
  std::vector<std::int64_t> slot_odd;   ///< full index -> odd slot, -1 if fixed
  std::vector<double> weight_even;      ///< coefficient of e_i in the even vector
  std::vector<double> weight_odd;       ///< coefficient of e_i in the odd vector
  std::int64_t even_dim = 0;
  std::int64_t odd_dim = 0;
};

SectorMap build_sector_map(const std::vector<std::int64_t>& perm) {
  const std::int64_t n = static_cast<std::int64_t>(perm.size());
  SectorMap map;
  map.slot_even.assign(n, -1);
  map.slot_odd.assign(n, -1);
  map.weight_even.assign(n, 0.0);
  map.weight_odd.assign(n, 0.0);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (std::int64_t i = 0; i < n; ++i) {
    if (perm[i] < i) continue;  // orbit handled at its representative
    map.slot_even[i] = map.even_dim++;
    if (perm[i] != i) map.slot_odd[i] = map.odd_dim++;
  }
  for (std::int64_t i = 0; i < n; ++i) {
    const std::int64_t r = perm[i];
    const std::int64_t rep = std::min(i, r);
    map.slot_even[i] = map.slot_even[rep];
    map.slot_odd[i] = map.slot_odd[rep];
    if (r == i) {
      map.weight_even[i] = 1.0;
      map.weight_odd[i] = 0.0;
    } else {
      map.weight_even[i] = inv_sqrt2;
      map.weight_odd[i] = (i == rep) ? inv_sqrt2 : -inv_sqrt2;
    }
  }
  return map;
}

/// Compresses h into one parity sector: H_sector[A,B] = u_A^dag H u_B with the
/// real sector coefficients above.  Every stored entry lands on exactly one
/// sector entry, so the triplet list stays Hermitian and from_triplets sums
/// the orbit contributions.
SparseHermitian sector_operator(const SparseHermitian& h, const SectorMap& map, bool even) {
  std::vector<Eigen::Triplet<Complex>> entries;
  entries.reserve(static_cast<std::size_t>(h.nonzeros()));
  const SparseHermitian::Storage& m = h.matrix();
  for (int outer = 0; outer < m.outerSize(); ++outer) {
    for (SparseHermitian::Storage::InnerIterator it(m, outer); it; ++it) {
      const std::int64_t i = it.row();
      const std::int64_t j = it.col();
      const double wi = even ? map.weight_even[i] : map.weight_odd[i];
      const double wj = even ? map.weight_even[j] : map.weight_odd[j];
      const double w = wi * wj;
      if (w == 0.0) continue;
      const std::int64_t a = even ? map.slot_even[i] : map.slot_odd[i];
      const std::int64_t b = even ? map.slot_even[j] : map.slot_odd[j];
      entries.emplace_back(static_cast<int>(a), static_cast<int>(b), w * it.value());
    }
  }
  return SparseHermitian::from_triplets(even ? map.even_dim : map.odd_dim, entries);
}

/// Expands a sector vector back to the full space (an isometry, so norms and
/// residuals computed inside the sector remain valid outside).
Eigen::VectorXcd lift_sector_vector(const Eigen::VectorXcd& y, const SectorMap& map, bool even,
                                    std::int64_t n) {
  Eigen::VectorXcd full = Eigen::VectorXcd::Zero(n);
  for (std::int64_t i = 0; i < n; ++i) {
    const double w = even ? map.weight_even[i] : map.weight_odd[i];
    if (w == 0.0) continue;
    const std::int64_t slot = even ? map.slot_even[i] : map.slot_odd[i];
    full(i) = w * y(slot);
  }
  return full;
}

/// Adjoint of lift_sector_vector: projects a full-space vector into a sector.
Eigen::VectorXcd compress_to_sector(const Eigen::VectorXcd& v, const SectorMap& map, bool even) {
  Eigen::VectorXcd sector = Eigen::VectorXcd::Zero(even ? map.even_dim : map.odd_dim);
  const std::int64_t n = v.size();
  for (std::int64_t i = 0; i < n; ++i) {
    const double w = even ? map.weight_even[i] : map.weight_odd[i];
    if (w == 0.0) continue;
    const std::int64_t slot = even ? map.slot_even[i] : map.slot_odd[i];
    sector(slot) += w * v(i);
  }
  return sector;
}

/// Numerical check that h commutes with the index permutation, using two
/// fixed-seed random probes: || H(Pv) - P(Hv) || must vanish relative to the
/// result norms.  Costs four applications of h.
bool commutes_with_permutation(const SparseHermitian& h, const std::vector<std::int64_t>& perm,
                               std::uint64_t seed) {
  const std::int64_t n = h.dimension();
  std::mt19937_64 rng(seed ^ 0xc2b2ae3d27d4eb4full);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int probe = 0; probe < 2; ++probe) {
    Eigen::VectorXcd v(n), pv(n);
    for (std::int64_t i = 0; i < n; ++i) v(i) = Complex(gauss(rng), gauss(rng));
    for (std::int64_t i = 0; i < n; ++i) pv(i) = v(perm[i]);
    const Eigen::VectorXcd hv = h.apply(v);
    const Eigen::VectorXcd hpv = h.apply(pv);
    Eigen::VectorXcd phv(n);
    for (std::int64_t i = 0; i < n; ++i) phv(i) = hv(perm[i]);
    const double scale = hv.norm() + hpv.norm();
    if ((hpv - phv).norm() > 1e-10 * std::max(1.0, scale)) return false;
  }
  return true;
}

}  // namespace

EigenSolution lowest_eigenpairs_charge(const SparseHermitian& h, const BasisConfig& config, int k,
                                       double tol, SolverOptions options) {
  const std::vector<std::int64_t> perm = charge_reflection_permutation(config);
  const std::int64_t n = config.dimension();
  if (n != h.dimension()) throw ValidationError("basis config does not match the operator");
  if (k < 1) throw ValidationError("k must be >= 1");
  if (k > n) throw ValidationError("k exceeds the operator dimension");

  if (!commutes_with_permutation(h, perm, options.seed)) {
    // Away from the flux symmetry point there is no conserved parity; run the
    // plain solver, seeded with reflection-adapted directions (cheap and
    // harmless) plus the guard pairs of the core iteration.
    std::mt19937_64 rng(options.seed ^ 0xa5a5a5a5a5a5a5a5ull);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int pairs = (k + 1) / 2;
    for (int p = 0; p < pairs; ++p) {
      Eigen::VectorXcd g(n);
      for (std::int64_t i = 0; i < n; ++i) g(i) = Complex(gauss(rng), gauss(rng));
      Eigen::VectorXcd even(n), odd(n);
      for (std::int64_t i = 0; i < n; ++i) {
        even(i) = g(i) + g(perm[i]);
        odd(i) = g(i) - g(perm[i]);
      }
      options.start_hints.push_back(std::move(even));
      options.start_hints.push_back(std::move(odd));
    }
    return lowest_eigenpairs(h, k, tol, options);
  }

  // The operator conserves reflection parity: block-diagonalize and solve the
  // even and odd sectors independently.  Each sector solve can only be asked
  // for at most its own dimension; the union always holds at least k pairs.
  const SectorMap map = build_sector_map(perm);
  const int k_even = static_cast<int>(std::min<std::int64_t>(k, map.even_dim));
  const int k_odd = static_cast<int>(std::min<std::int64_t>(k, map.odd_dim));

  auto sector_options = [&](bool even) {
    SolverOptions opts = options;
    opts.start_hints.clear();
    if (!even) opts.seed ^= 0x94d049bb133111ebull;
    for (const Eigen::VectorXcd& hint : options.start_hints) {
      if (hint.size() != n) throw ValidationError("start hint has wrong dimension");
      Eigen::VectorXcd sector = compress_to_sector(hint, map, even);
      if (sector.norm() > 1e-12 * hint.norm()) opts.start_hints.push_back(std::move(sector));
    }
    return opts;
  };

  const EigenSolution even_sol =
      lowest_eigenpairs(sector_operator(h, map, true), k_even, tol, sector_options(true));
  EigenSolution odd_sol;
  if (k_odd > 0)
    odd_sol = lowest_eigenpairs(sector_operator(h, map, false), k_odd, tol, sector_options(false));

  // Merge: take the k lowest of the union, even sector first on exact ties so
  // the result is deterministic.
  struct Slot {
    double value;
    bool even;
    int col;
  };
  std::vector<Slot> slots;
  slots.reserve(even_sol.values.size() + odd_sol.values.size());
  for (std::size_t i = 0; i < even_sol.values.size(); ++i)
    slots.push_back({even_sol.values[i], true, static_cast<int>(i)});
  for (std::size_t i = 0; i < odd_sol.values.size(); ++i)
    slots.push_back({odd_sol.values[i], false, static_cast<int>(i)});
  std::stable_sort(slots.begin(), slots.end(),
                   [](const Slot& a, const Slot& b) { return a.value < b.value; });

  EigenSolution sol;
  sol.vectors.resize(n, k);
  for (int t = 0; t < k; ++t) {
    const Slot& s = slots[static_cast<std::size_t>(t)];
    const EigenSolution& src = s.even ? even_sol : odd_sol;
    sol.values.push_back(s.value);
    sol.residuals.push_back(src.residuals[static_cast<std::size_t>(s.col)]);
    sol.vectors.col(t) = lift_sector_vector(src.vectors.col(s.col), map, s.even, n);
  }
  return sol;
}

SingleQubitReport single_qubit_report(const QubitParams& params, GroundChoice ground,
                                      const std::optional<Eigen::Matrix2d>& kinetic_block_ghz,
                                      const BasisConfig& config, double tol) {
  if (config.mode_count != 2)
    throw ValidationError("single_qubit_report needs a 2-mode basis config");
  const Eigen::Matrix2d block =
      kinetic_block_ghz ? *kinetic_block_ghz : bare_kinetic_block(params, ground);
  const SparseHermitian h = single_qubit_hamiltonian(params, ground, block, config);
  const EigenSolution sol = lowest_eigenpairs_charge(h, config, 3, tol);

  SingleQubitReport report;
  report.delta = sol.values[1] - sol.values[0];
  report.e12 = sol.values[2] - sol.values[1];
  report.anharmonicity_ratio = report.delta > 0.0 ? report.e12 / report.delta
                                                  : std::numeric_limits<double>::infinity();
  return report;
}

std::vector<ConvergenceRow> convergence_scan(const CircuitSpec& spec,
                                             const std::vector<int>& n_max_list, int k,
                                             double tol) {
  if (n_max_list.empty()) throw ValidationError("n_max list must not be empty");
  for (std::size_t i = 1; i < n_max_list.size(); ++i)
    if (n_max_list[i] <= n_max_list[i - 1])
      throw ValidationError("n_max list must be strictly ascending");

  const CapacitanceMatrices mats = build_capacitance_matrices(spec);
  const HamiltonianTerms terms = build_hamiltonian_terms(spec, mats);

  std::vector<ConvergenceRow> rows;
  rows.reserve(n_max_list.size());
  for (int n_max : n_max_list) {
    BasisConfig config;
    config.n_max = n_max;
    config.mode_count = 4;
    const SparseHermitian h = assemble_hamiltonian(config, terms, true);
    const EigenSolution sol = lowest_eigenpairs_charge(h, config, k, tol);
    rows.push_back({n_max, sol.values});
  }
  return rows;
}

}  // namespace fluxpair
