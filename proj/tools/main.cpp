#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "fluxpair/circuit.hpp"
#include "fluxpair/errors.hpp"
#include "fluxpair/spectrum.hpp"
#include "fluxpair/sweep.hpp"

namespace {

std::string format17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw fluxpair::Error("cannot write to '" + path + "'");
  out << text;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream stream(text);
  std::string piece;
  while (std::getline(stream, piece, ',')) {
    try {
      out.push_back(std::stoi(piece));
    } catch (const std::exception&) {
      throw fluxpair::ValidationError("malformed integer list '" + text + "'");
    }
  }
  if (out.empty()) throw fluxpair::ValidationError("empty integer list");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled flux-qubit pair simulator: effective two-qubit Hamiltonians "
               "from circuit parameters"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_override;
  int nmax_override = 0;
  int threads = 1;
  bool dimensionless = false;
  double tol_override = 0.0;

  CLI::App* sim = app.add_subcommand("simulate", "Run a parameter sweep and write a CSV table");
  sim->add_option("--config", config_path, "sweep config file")->required();
  sim->add_option("--output", output_override, "override the CSV output path");
  sim->add_option("--nmax", nmax_override, "override the charge cutoff");
  sim->add_option("--threads", threads, "worker threads for sweep points");
  sim->add_flag("--dimensionless", dimensionless, "force e_c = 1 (energies in units of E_C)");
  sim->add_option("--tol", tol_override, "override the eigensolver residual tolerance");

  std::string nmax_list_text;
  int conv_k = 8;
  std::string conv_output;
  double conv_value = std::numeric_limits<double>::quiet_NaN();
  CLI::App* conv = app.add_subcommand(
      "converge", "Energy convergence table against the charge cutoff (CSV: n_max, E0..)");
  conv->add_option("--config", config_path, "sweep config file")->required();
  conv->add_option("--nmax-list", nmax_list_text, "comma-separated ascending cutoffs, e.g. 4,5,6")
      ->required();
  conv->add_option("--k", conv_k, "number of energies per row");
  conv->add_option("--value", conv_value,
                   "sweep value at which to study convergence (default: the grid maximum)");
  conv->add_option("--output", conv_output, "output file (default: stdout)");

  int grid = 201;
  int which_qubit = 1;
  std::string land_output;
  CLI::App* land = app.add_subcommand(
      "landscape", "Qubit potential on a phase grid (CSV: phi1, phi2, U_GHz)");
  land->add_option("--config", config_path, "sweep config file")->required();
  land->add_option("--grid", grid, "points per phase axis");
  land->add_option("--qubit", which_qubit, "which qubit's potential (1 or 2)")
      ->check(CLI::Range(1, 2));
  land->add_option("--output", land_output, "output file (default: stdout)");

  std::string scaling_input;
  std::string window_text;
  CLI::App* scal = app.add_subcommand(
      "scaling", "Log-log slope fits of |J_ii| vs the sweep value over a window");
  scal->add_option("--input", scaling_input, "sweep CSV produced by simulate")->required();
  scal->add_option("--window", window_text, "fit window as lo,hi")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      fluxpair::SweepConfig config = fluxpair::load_config(config_path);
      if (!output_override.empty()) config.output_path = output_override;
      if (nmax_override > 0) config.n_max = nmax_override;
      if (tol_override > 0.0) config.solver_tol = tol_override;
      if (dimensionless) config.dimensionless = true;

      std::cout << "# effective configuration\n" << config.echo() << "\n";
      const std::vector<fluxpair::SweepRow> rows = fluxpair::run_sweep(config, threads);

      int ok = 0, hybridized = 0, failed = 0;
      for (const fluxpair::SweepRow& r : rows) {
        if (r.status == fluxpair::RowStatus::Ok) ++ok;
        if (r.status == fluxpair::RowStatus::Hybridized) ++hybridized;
        if (r.status == fluxpair::RowStatus::Error) ++failed;
      }
      std::cout << rows.size() << " points -> " << config.output_path << " (" << ok << " ok, "
                << hybridized << " hybridized, " << failed << " error)\n";
      return failed == 0 ? 0 : 2;
    }

    if (conv->parsed()) {
      const fluxpair::SweepConfig config = fluxpair::load_config(config_path);
      const std::vector<int> nmax_list = parse_int_list(nmax_list_text);
      const double value =
          std::isnan(conv_value) ? config.values.back() : conv_value;
      const fluxpair::CircuitSpec spec = fluxpair::apply_sweep_value(config, value);
      const std::vector<fluxpair::ConvergenceRow> rows =
          fluxpair::convergence_scan(spec, nmax_list, conv_k, config.solver_tol);

      std::ostringstream csv;
      csv << "n_max";
      for (int i = 0; i < conv_k; ++i) csv << ",E" << i;
      csv << "\n";
      for (const fluxpair::ConvergenceRow& row : rows) {
        csv << row.n_max;
        for (double e : row.energies) csv << "," << format17(e);
        csv << "\n";
      }
      emit(csv.str(), conv_output);

      for (std::size_t i = 1; i < rows.size(); ++i) {
        double drift = 0.0;
        for (int j = 0; j < conv_k; ++j) {
          const double denom = std::max(1e-300, std::abs(rows[i].energies[j]));
          drift = std::max(drift,
                           std::abs(rows[i].energies[j] - rows[i - 1].energies[j]) / denom);
        }
        std::cerr << "# drift n_max " << rows[i - 1].n_max << " -> " << rows[i].n_max
                  << ": max relative " << format17(drift) << "\n";
      }
      return 0;
    }

    if (land->parsed()) {
      const fluxpair::SweepConfig config = fluxpair::load_config(config_path);
      const fluxpair::QubitParams& params =
          which_qubit == 1 ? config.circuit.qubit1 : config.circuit.qubit2;
      const fluxpair::PotentialLandscape landscape =
          fluxpair::potential_landscape(params, grid);

      std::ostringstream csv;
      csv << "phi1,phi2,U_GHz\n";
      for (int i = 0; i < grid; ++i)
        for (int j = 0; j < grid; ++j)
          csv << format17(landscape.phi[i]) << "," << format17(landscape.phi[j]) << ","
              << format17(landscape.values[static_cast<std::size_t>(i) * grid + j]) << "\n";
      emit(csv.str(), land_output);
      return 0;
    }

    if (scal->parsed()) {
      const std::vector<std::string> parts = [&] {
        std::vector<std::string> out;
        std::stringstream stream(window_text);
        std::string piece;
        while (std::getline(stream, piece, ',')) out.push_back(piece);
        return out;
      }();
      if (parts.size() != 2)
        throw fluxpair::ValidationError("window must be 'lo,hi', got '" + window_text + "'");
      const double lo = std::stod(parts[0]);
      const double hi = std::stod(parts[1]);

      const std::vector<fluxpair::SweepRow> rows = fluxpair::read_csv_file(scaling_input);
      const fluxpair::ScalingReport report = fluxpair::scaling_report(rows, lo, hi);

      std::cout << "coefficient,slope,intercept,residual_rms,points\n";
      auto line = [&](const char* name, const fluxpair::ScalingFit& f) {
        std::cout << name << "," << format17(f.slope) << "," << format17(f.intercept) << ","
                  << format17(f.residual_rms) << "," << f.points << "\n";
      };
      line("jxx", report.jxx);
      line("jyy", report.jyy);
      line("jzz", report.jzz);
      return 0;
    }
  } catch (const fluxpair::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
