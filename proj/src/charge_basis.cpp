#include "fluxpair/charge_basis.hpp"

#include <cmath>
#include <string>

namespace fluxpair {

void BasisConfig::validate() const {
  if (n_max < 1) throw ValidationError("n_max must be >= 1");
  if (mode_count != 2 && mode_count != 4)
    throw ValidationError("mode_count must be 2 (single qubit) or 4 (coupled pair)");
  dimension();  // triggers the size guard
}

std::int64_t BasisConfig::dimension() const {
  const std::int64_t m = states_per_mode();
  std::int64_t dim = 1;
  for (int i = 0; i < mode_count; ++i) {
    dim *= m;
    if (dim > max_dimension) {
      throw DimensionError("charge basis dimension " + std::to_string(m) + "^" +
                           std::to_string(mode_count) + " exceeds the limit of " +
                           std::to_string(max_dimension) + "; lower n_max");
    }
  }
  return dim;
}

std::int64_t BasisConfig::stride(int mode) const {
  const std::int64_t m = states_per_mode();
  std::int64_t s = 1;
  for (int i = mode_count - 1; i > mode; --i) s *= m;
  return s;
}

int BasisConfig::charge_of(std::int64_t index, int mode) const {
  const std::int64_t m = states_per_mode();
  return static_cast<int>((index / stride(mode)) % m) - n_max;
}

SparseHermitian SparseHermitian::from_triplets(std::int64_t dim,
                                               const std::vector<Eigen::Triplet<Complex>>& entries) {
  Storage mat(dim, dim);
  mat.setFromTriplets(entries.begin(), entries.end());  // duplicates summed here
  mat.prune([](const Storage::StorageIndex&, const Storage::StorageIndex&, const Complex& v) {
    return v != Complex(0.0, 0.0);
  });
  mat.makeCompressed();
  return SparseHermitian(std::move(mat));
}

Eigen::VectorXcd SparseHermitian::apply(const Eigen::Ref<const Eigen::VectorXcd>& x) const {
  return mat_ * x;
}

Eigen::VectorXd SparseHermitian::real_diagonal() const {
  return mat_.diagonal().real();
}

Eigen::MatrixXcd SparseHermitian::dense() const {
  return Eigen::MatrixXcd(mat_);
}

double SparseHermitian::hermiticity_error() const {
  Storage diff = Storage(mat_.adjoint()) - mat_;
  double worst = 0.0;
  for (int row = 0; row < diff.outerSize(); ++row)
    for (Storage::InnerIterator it(diff, row); it; ++it)
      worst = std::max(worst, std::abs(it.value()));
  return worst;
}

SparseHermitian SparseHermitian::plus(const SparseHermitian& other) const {
  if (dimension() != other.dimension())
    throw ValidationError("cannot add operators of different dimensions");
  Storage sum = mat_ + other.mat_;
  sum.makeCompressed();
  return SparseHermitian(std::move(sum));
}

namespace {

using TripletList = std::vector<Eigen::Triplet<Complex>>;

void check_mode(const BasisConfig& config, int mode) {
  if (mode < 0 || mode >= config.mode_count)
    throw ValidationError("mode index " + std::to_string(mode) + " out of range for " +
                          std::to_string(config.mode_count) + " modes");
}

/// dest += sum_ab block(a,b) n_{row_modes[a]} n_{col_modes[b]} (diagonal).
void append_quadratic(TripletList& dest, const BasisConfig& config, const Eigen::Matrix2d& block,
                      std::array<int, 2> row_modes, std::array<int, 2> col_modes) {
  for (int m : row_modes) check_mode(config, m);
  for (int m : col_modes) check_mode(config, m);
  const std::int64_t dim = config.dimension();
  for (std::int64_t i = 0; i < dim; ++i) {
    double value = 0.0;
    for (int a = 0; a < 2; ++a) {
      const int na = config.charge_of(i, row_modes[a]);
      for (int b = 0; b < 2; ++b)
        value += block(a, b) * na * config.charge_of(i, col_modes[b]);
    }
    if (value != 0.0) dest.emplace_back(i, i, Complex(value, 0.0));
  }
}

/// dest += (p/2)(e^{-i offset} * Prod_k Shift(mode_k, dir_k) + h.c.).
void append_cosine(TripletList& dest, const BasisConfig& config, const CosineTerm& term) {
  if (term.shifts.empty()) throw ValidationError("cosine term must shift at least one mode");
  for (std::size_t a = 0; a < term.shifts.size(); ++a) {
    check_mode(config, term.shifts[a].mode);
    if (term.shifts[a].direction != 1 && term.shifts[a].direction != -1)
      throw ValidationError("cosine shift direction must be +1 or -1");
    for (std::size_t b = a + 1; b < term.shifts.size(); ++b)
      if (term.shifts[a].mode == term.shifts[b].mode)
        throw ValidationError("cosine term repeats a mode");
  }

  const Complex up = 0.5 * term.prefactor * std::exp(Complex(0.0, -term.phase_offset));
  const Complex down = std::conj(up);
  const std::int64_t dim = config.dimension();
  for (std::int64_t i = 0; i < dim; ++i) {
    // Target index after raising every listed mode by its direction; the
    // shift is dropped at the cutoff boundary.
    std::int64_t j = i;
    bool in_range = true;
    for (const CosineShift& s : term.shifts) {
      const int n = config.charge_of(i, s.mode);
      if (n + s.direction > config.n_max || n + s.direction < -config.n_max) {
        in_range = false;
        break;
      }
      j += s.direction * config.stride(s.mode);
    }
    if (!in_range) continue;
    dest.emplace_back(j, i, up);
    dest.emplace_back(i, j, down);
  }
}

}  // namespace

SparseHermitian number_operator(const BasisConfig& config, int mode) {
  config.validate();
  check_mode(config, mode);
  const std::int64_t dim = config.dimension();
  TripletList entries;
  entries.reserve(dim);
  for (std::int64_t i = 0; i < dim; ++i) {
    const int n = config.charge_of(i, mode);
    if (n != 0) entries.emplace_back(i, i, Complex(n, 0.0));
  }
  return SparseHermitian::from_triplets(dim, entries);
}

SparseHermitian cosine_operator(const BasisConfig& config, const CosineTerm& term) {
  config.validate();
  TripletList entries;
  append_cosine(entries, config, term);
  return SparseHermitian::from_triplets(config.dimension(), entries);
}

SparseHermitian kinetic_operator(const BasisConfig& config, const Eigen::Matrix2d& block,
                                 std::array<int, 2> row_modes, std::array<int, 2> col_modes) {
  config.validate();
  TripletList entries;
  append_quadratic(entries, config, block, row_modes, col_modes);
  return SparseHermitian::from_triplets(config.dimension(), entries);
}

SparseHermitian assemble_hamiltonian(const BasisConfig& config, const HamiltonianTerms& terms,
                                     bool include_interaction) {
  config.validate();
  if (config.mode_count != 4)
    throw ValidationError("assemble_hamiltonian needs a 4-mode basis; use "
                          "single_qubit_hamiltonian for one qubit");

  const std::int64_t dim = config.dimension();
  TripletList entries;
  entries.reserve(static_cast<std::size_t>(dim) * 16);

  append_quadratic(entries, config, terms.kinetic_q1, {0, 1}, {0, 1});
  append_quadratic(entries, config, terms.kinetic_q2, {2, 3}, {2, 3});
  for (const CosineTerm& t : terms.cosines_q1) append_cosine(entries, config, t);
  for (const CosineTerm& t : terms.cosines_q2) append_cosine(entries, config, t);

  if (include_interaction) {
    // The cross block of the quadratic charge form enters twice (n1.B.n2 and
    // its transpose), matching the full form (1/2) Q C^-1 Q.
    append_quadratic(entries, config, terms.kinetic_mutual, {0, 1}, {2, 3});
    append_quadratic(entries, config, terms.kinetic_mutual.transpose(), {2, 3}, {0, 1});
    for (const CosineTerm& t : terms.cosines_int) append_cosine(entries, config, t);
  }
  return SparseHermitian::from_triplets(dim, entries);
}

SparseHermitian single_qubit_hamiltonian(const QubitParams& params, GroundChoice ground,
                                         const Eigen::Matrix2d& kinetic_block_ghz,
                                         const BasisConfig& config) {
  config.validate();
  if (config.mode_count != 2)
    throw ValidationError("single_qubit_hamiltonian needs a 2-mode basis");

  TripletList entries;
  append_quadratic(entries, config, kinetic_block_ghz, {0, 1}, {0, 1});
  for (const CosineTerm& t : single_qubit_cosines(params, ground, 0))
    append_cosine(entries, config, t);
  return SparseHermitian::from_triplets(config.dimension(), entries);
}

std::vector<std::int64_t> charge_reflection_permutation(const BasisConfig& config) {
  config.validate();
  const std::int64_t dim = config.dimension();
  std::vector<std::int64_t> perm(dim);
  for (std::int64_t i = 0; i < dim; ++i) {
    std::int64_t j = 0;
    for (int mode = 0; mode < config.mode_count; ++mode) {
      const int n = config.charge_of(i, mode);
      j += static_cast<std::int64_t>(-n + config.n_max) * config.stride(mode);
    }
    perm[i] = j;
  }
  return perm;
}

std::vector<std::int64_t> qubit_exchange_permutation(const BasisConfig& config) {
  config.validate();
  if (config.mode_count != 4)
    throw ValidationError("qubit exchange needs a 4-mode basis");
  const std::int64_t dim = config.dimension();
  std::vector<std::int64_t> perm(dim);
  for (std::int64_t i = 0; i < dim; ++i) {
    const int swapped[4] = {config.charge_of(i, 2), config.charge_of(i, 3),
                            config.charge_of(i, 0), config.charge_of(i, 1)};
    std::int64_t j = 0;
    for (int mode = 0; mode < 4; ++mode)
      j += static_cast<std::int64_t>(swapped[mode] + config.n_max) * config.stride(mode);
    perm[i] = j;
  }
  return perm;
}

}  // namespace fluxpair
