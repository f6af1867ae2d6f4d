#pragma once

#include <Eigen/Dense>

#include <limits>
#include <string>
#include <vector>

#include "fluxpair/circuit.hpp"
#include "fluxpair/errors.hpp"

namespace fluxpair {

enum class SweepVariable { Gamma, Alpha, Beta, R };

std::string to_string(SweepVariable v);

/// A full sweep job: circuit template, swept variable and grid, numerical
/// knobs, output location.  gamma values scale every coupling element's
/// relative gamma; alpha/beta/r apply to both qubits.
struct SweepConfig {
  CircuitSpec circuit;
  SweepVariable variable = SweepVariable::Gamma;
  std::vector<double> values;  ///< strictly increasing
  int n_max = 6;
  int k = 8;
  double hybridization_threshold = 0.1;
  double solver_tol = 1e-10;
  bool dimensionless = false;  ///< force e_c = 1 on both qubits (energies in units of E_C)
  std::string output_path = "sweep.csv";

  void validate() const;

  /// Canonical text form with every default applied; parses back to an
  /// equivalent config.
  std::string echo() const;
};

enum class RowStatus { Ok, Hybridized, Error };

std::string to_string(RowStatus s);

/// One sweep point.  Hybridized rows keep the diagnostics that are still
/// meaningful (gaps, subspace_gap, min_singular); error rows keep only the
/// sweep value.  Absent numbers are NaN and serialize to empty CSV cells.
struct SweepRow {
  static constexpr double nan = std::numeric_limits<double>::quiet_NaN();

  double sweep_value = nan;
  double delta1 = nan;
  double delta2 = nan;
  double e0 = nan;
  Eigen::Vector3d h1 = Eigen::Vector3d::Constant(nan);
  Eigen::Vector3d h2 = Eigen::Vector3d::Constant(nan);
  Eigen::Matrix3d j = Eigen::Matrix3d::Constant(nan);
  double jxx_over_delta = nan;
  double jyy_over_delta = nan;
  double jzz_over_delta = nan;
  double subspace_gap = nan;
  double min_singular = nan;
  RowStatus status = RowStatus::Ok;
};

/// Parses the documented key-value config schema; throws ParseError with a
/// line number on malformed text and ValidationError on bad field values or
/// unknown keys.
SweepConfig parse_config(const std::string& text);
SweepConfig load_config(const std::string& path);

/// The circuit at one sweep value (template with the variable substituted).
CircuitSpec apply_sweep_value(const SweepConfig& config, double value);

/// Runs the full pipeline at one point; never throws for per-point physics
/// failures (they land in row.status).
SweepRow run_point(const SweepConfig& config, double value);

/// All points, optionally on a small thread pool (results are ordered by
/// grid position regardless), then writes the CSV atomically to
/// config.output_path and returns the rows.
std::vector<SweepRow> run_sweep(const SweepConfig& config, int threads = 1);

/// CSV serialization: fixed header, 17-significant-digit decimals, LF line
/// endings; parsing an emitted file reproduces the rows bit-exactly.
std::string to_csv(const std::vector<SweepRow>& rows);
std::vector<SweepRow> from_csv(const std::string& text);
void write_csv_atomic(const std::vector<SweepRow>& rows, const std::string& path);
std::vector<SweepRow> read_csv_file(const std::string& path);

/// Log-log least-squares slope of |J_ii| versus the sweep value over a
/// window, one fit per diagonal coupling; needs >= 4 ok rows in the window
/// with every |J_ii| > 1e-12.
struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
  int points = 0;
};
struct ScalingReport {
  ScalingFit jxx, jyy, jzz;
};
ScalingReport scaling_report(const std::vector<SweepRow>& rows, double lo, double hi);

}  // namespace fluxpair
