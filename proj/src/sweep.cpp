#include "fluxpair/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "fluxpair/charge_basis.hpp"
#include "fluxpair/pauli.hpp"
#include "fluxpair/spectrum.hpp"
#include "fluxpair/swt.hpp"

namespace fluxpair {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& text, int line) {
  const std::string t = trim(text);
  if (t.empty()) throw ParseError("empty numeric value on line " + std::to_string(line), line);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size())
    throw ParseError("malformed number '" + t + "' on line " + std::to_string(line), line);
  return v;
}

int parse_int(const std::string& text, int line) {
  const double v = parse_double(text, line);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw ParseError("expected an integer, got '" + trim(text) + "' on line " +
                         std::to_string(line),
                     line);
  return i;
}

bool parse_bool(const std::string& text, int line) {
  const std::string t = trim(text);
  if (t == "true") return true;
  if (t == "false") return false;
  throw ParseError("expected true or false, got '" + t + "' on line " + std::to_string(line),
                   line);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

constexpr const char* kCsvHeader =
    "sweep_value,delta1,delta2,e0,h1x,h1y,h1z,h2x,h2y,h2z,"
    "jxx,jxy,jxz,jyx,jyy,jyz,jzx,jzy,jzz,"
    "jxx_over_delta,jyy_over_delta,jzz_over_delta,subspace_gap,min_singular,status";

}  // namespace

std::string to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::Gamma:
      return "gamma";
    case SweepVariable::Alpha:
      return "alpha";
    case SweepVariable::Beta:
      return "beta";
    case SweepVariable::R:
      return "r";
  }
  throw ValidationError("unknown sweep variable");
}

std::string to_string(RowStatus s) {
  switch (s) {
    case RowStatus::Ok:
      return "ok";
    case RowStatus::Hybridized:
      return "hybridized";
    case RowStatus::Error:
      return "error";
  }
  throw ValidationError("unknown row status");
}

void SweepConfig::validate() const {
  circuit.validate();
  if (values.empty()) throw ValidationError("sweep grid is empty");
  for (std::size_t i = 1; i < values.size(); ++i)
    if (!(values[i] > values[i - 1]))
      throw ValidationError("sweep values must be strictly increasing");
  if (n_max < 1) throw ValidationError("n_max must be >= 1");
  if (k < 5) throw ValidationError("k must be >= 5 so the subspace gap E4-E3 is reportable");
  if (!(hybridization_threshold > 0.0))
    throw ValidationError("hybridization_threshold must be positive");
  if (!(solver_tol > 0.0)) throw ValidationError("solver_tol must be positive");
  if (output_path.empty()) throw ValidationError("output path is empty");
}

SweepConfig parse_config(const std::string& text) {
  SweepConfig config;
  config.circuit.couplings.clear();

  // Section state while scanning.
  enum class Section { None, Qubit1, Qubit2, Grounds, Coupling, Sweep };
  Section section = Section::None;
  bool saw_qubit1 = false, saw_qubit2 = false, saw_sweep = false;
  bool saw_alpha1 = false, saw_r1 = false, saw_alpha2 = false, saw_r2 = false;
  bool saw_kind = false;
  bool saw_start = false, saw_stop = false, saw_points = false, saw_values = false;
  double start = 0.0, stop = 0.0;
  int points = 0;

  std::istringstream stream(text);
  std::string raw;
  int line = 0;
  while (std::getline(stream, raw)) {
    ++line;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;

    if (s.front() == '[') {
      if (s == "[[coupling]]") {
        section = Section::Coupling;
        if (!config.circuit.couplings.empty() && !saw_kind)
          throw ValidationError("coupling block before line " + std::to_string(line) +
                                " is missing its kind");
        config.circuit.couplings.push_back(CouplingElement{});
        config.circuit.couplings.back().gamma = 1.0;
        saw_kind = false;
        continue;
      }
      if (s.back() != ']' || s.size() < 3)
        throw ParseError("malformed section header on line " + std::to_string(line), line);
      const std::string name = s.substr(1, s.size() - 2);
      if (name == "qubit1") {
        section = Section::Qubit1;
        saw_qubit1 = true;
      } else if (name == "qubit2") {
        section = Section::Qubit2;
        saw_qubit2 = true;
      } else if (name == "grounds") {
        section = Section::Grounds;
      } else if (name == "sweep") {
        section = Section::Sweep;
        saw_sweep = true;
      } else {
        throw ValidationError("unknown section [" + name + "] on line " + std::to_string(line));
      }
      continue;
    }

    const std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected 'key = value' on line " + std::to_string(line), line);
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty())
      throw ParseError("missing key before '=' on line " + std::to_string(line), line);

    auto unknown = [&]() {
      throw ValidationError("unknown key '" + key + "' on line " + std::to_string(line));
    };

    switch (section) {
      case Section::None:
        throw ParseError("key '" + key + "' outside any section on line " + std::to_string(line),
                         line);
      case Section::Qubit1:
      case Section::Qubit2: {
        QubitParams& q =
            section == Section::Qubit1 ? config.circuit.qubit1 : config.circuit.qubit2;
        if (key == "alpha") {
          q.alpha = parse_double(value, line);
          (section == Section::Qubit1 ? saw_alpha1 : saw_alpha2) = true;
        } else if (key == "beta") {
          q.beta = parse_double(value, line);
        } else if (key == "r") {
          q.r = parse_double(value, line);
          (section == Section::Qubit1 ? saw_r1 : saw_r2) = true;
        } else if (key == "e_c") {
          q.e_c = parse_double(value, line);
        } else if (key == "frustration") {
          q.frustration = parse_double(value, line);
        } else {
          unknown();
        }
        break;
      }
      case Section::Grounds: {
        if (key == "qubit1")
          config.circuit.ground1.node = parse_int(value, line);
        else if (key == "qubit2")
          config.circuit.ground2.node = parse_int(value, line);
        else
          unknown();
        break;
      }
      case Section::Coupling: {
        CouplingElement& c = config.circuit.couplings.back();
        if (key == "kind") {
          if (value == "capacitor")
            c.kind = CouplingKind::Capacitor;
          else if (value == "junction")
            c.kind = CouplingKind::JosephsonJunction;
          else if (value == "junction_with_capacitor")
            c.kind = CouplingKind::JunctionWithCapacitor;
          else
            throw ValidationError("unknown coupling kind '" + value + "' on line " +
                                  std::to_string(line));
          saw_kind = true;
        } else if (key == "node_a") {
          c.node_a = parse_int(value, line);
        } else if (key == "node_b") {
          c.node_b = parse_int(value, line);
        } else if (key == "gamma") {
          c.gamma = parse_double(value, line);
        } else {
          unknown();
        }
        break;
      }
      case Section::Sweep: {
        if (key == "variable") {
          if (value == "gamma")
            config.variable = SweepVariable::Gamma;
          else if (value == "alpha")
            config.variable = SweepVariable::Alpha;
          else if (value == "beta")
            config.variable = SweepVariable::Beta;
          else if (value == "r")
            config.variable = SweepVariable::R;
          else
            throw ValidationError("unknown sweep variable '" + value + "' on line " +
                                  std::to_string(line));
        } else if (key == "start") {
          start = parse_double(value, line);
          saw_start = true;
        } else if (key == "stop") {
          stop = parse_double(value, line);
          saw_stop = true;
        } else if (key == "points") {
          points = parse_int(value, line);
          saw_points = true;
        } else if (key == "values") {
          config.values.clear();
          for (const std::string& piece : split(value, ','))
            config.values.push_back(parse_double(piece, line));
          saw_values = true;
        } else if (key == "n_max") {
          config.n_max = parse_int(value, line);
        } else if (key == "k") {
          config.k = parse_int(value, line);
        } else if (key == "hybridization_threshold") {
          config.hybridization_threshold = parse_double(value, line);
        } else if (key == "solver_tol") {
          config.solver_tol = parse_double(value, line);
        } else if (key == "dimensionless") {
          config.dimensionless = parse_bool(value, line);
        } else if (key == "output") {
          if (value.empty()) throw ValidationError("output path is empty");
          config.output_path = value;
        } else {
          unknown();
        }
        break;
      }
    }
  }

  if (!saw_qubit1) throw ValidationError("missing [qubit1] section");
  if (!saw_alpha1 || !saw_r1) throw ValidationError("[qubit1] must set alpha and r");
  if (saw_qubit2 && (!saw_alpha2 || !saw_r2))
    throw ValidationError("[qubit2] must set alpha and r (or omit the section entirely)");
  if (!saw_qubit2) config.circuit.qubit2 = config.circuit.qubit1;
  if (!saw_sweep) throw ValidationError("missing [sweep] section");
  if (!config.circuit.couplings.empty() && !saw_kind)
    throw ValidationError("last coupling block is missing its kind");

  if (saw_values) {
    if (saw_start || saw_stop || saw_points)
      throw ValidationError("give either an explicit values list or start/stop/points, not both");
  } else {
    if (!saw_start || !saw_stop || !saw_points)
      throw ValidationError("sweep grid needs start, stop and points (or an explicit values list)");
    if (points < 1) throw ValidationError("points must be >= 1");
    if (points == 1) {
      config.values = {start};
    } else {
      if (!(stop > start)) throw ValidationError("stop must exceed start");
      config.values.resize(points);
      for (int i = 0; i < points; ++i)
        config.values[i] = start + (stop - start) * static_cast<double>(i) / (points - 1);
    }
  }

  config.validate();
  return config;
}

SweepConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string SweepConfig::echo() const {
  std::ostringstream out;
  auto qubit = [&](const char* name, const QubitParams& q) {
    out << "[" << name << "]\n";
    out << "alpha = " << format_double(q.alpha) << "\n";
    out << "beta = " << format_double(q.beta) << "\n";
    out << "r = " << format_double(q.r) << "\n";
    out << "e_c = " << format_double(q.e_c) << "\n";
    out << "frustration = " << format_double(q.frustration) << "\n\n";
  };
  qubit("qubit1", circuit.qubit1);
  qubit("qubit2", circuit.qubit2);
  out << "[grounds]\n";
  out << "qubit1 = " << circuit.ground1.node << "\n";
  out << "qubit2 = " << circuit.ground2.node << "\n\n";
  for (const CouplingElement& c : circuit.couplings) {
    out << "[[coupling]]\n";
    out << "kind = ";
    switch (c.kind) {
      case CouplingKind::Capacitor:
        out << "capacitor";
        break;
      case CouplingKind::JosephsonJunction:
        out << "junction";
        break;
      case CouplingKind::JunctionWithCapacitor:
        out << "junction_with_capacitor";
        break;
    }
    out << "\n";
    out << "node_a = " << c.node_a << "\n";
    out << "node_b = " << c.node_b << "\n";
    out << "gamma = " << format_double(c.gamma) << "\n\n";
  }
  out << "[sweep]\n";
  out << "variable = " << to_string(variable) << "\n";
  out << "values = ";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ", ";
    out << format_double(values[i]);
  }
  out << "\n";
  out << "n_max = " << n_max << "\n";
  out << "k = " << k << "\n";
  out << "hybridization_threshold = " << format_double(hybridization_threshold) << "\n";
  out << "solver_tol = " << format_double(solver_tol) << "\n";
  out << "dimensionless = " << (dimensionless ? "true" : "false") << "\n";
  out << "output = " << output_path << "\n";
  return out.str();
}

CircuitSpec apply_sweep_value(const SweepConfig& config, double value) {
  CircuitSpec spec = config.circuit;
  switch (config.variable) {
    case SweepVariable::Gamma:
      for (CouplingElement& c : spec.couplings) c.gamma *= value;
      break;
    case SweepVariable::Alpha:
      spec.qubit1.alpha = spec.qubit2.alpha = value;
      break;
    case SweepVariable::Beta:
      spec.qubit1.beta = spec.qubit2.beta = value;
      break;
    case SweepVariable::R:
      spec.qubit1.r = spec.qubit2.r = value;
      break;
  }
  if (config.dimensionless) {
    spec.qubit1.e_c = 1.0;
    spec.qubit2.e_c = 1.0;
  }
  spec.validate();
  return spec;
}

SweepRow run_point(const SweepConfig& config, double value) {
  SweepRow row;
  row.sweep_value = value;
  try {
    const CircuitSpec spec = apply_sweep_value(config, value);
    const CapacitanceMatrices mats = build_capacitance_matrices(spec);
    const HamiltonianTerms terms = build_hamiltonian_terms(spec, mats);

    BasisConfig single;
    single.n_max = config.n_max;
    single.mode_count = 2;
    BasisConfig joint;
    joint.n_max = config.n_max;
    joint.mode_count = 4;

    const QubitBasis q1 =
        qubit_basis(spec.qubit1, spec.ground1, terms.kinetic_q1, single, config.solver_tol);
    const QubitBasis q2 =
        qubit_basis(spec.qubit2, spec.ground2, terms.kinetic_q2, single, config.solver_tol);
    row.delta1 = q1.delta;
    row.delta2 = q2.delta;

    const SparseHermitian h = assemble_hamiltonian(joint, terms, true);
    const EigenSolution sol = lowest_eigenpairs_charge(h, joint, config.k, config.solver_tol);
    row.subspace_gap = sol.values[4] - sol.values[3];

    const Eigen::MatrixXcd basis0 = product_basis(q1, q2);
    const OverlapMatrix ov = overlap_matrix(basis0, sol.vectors.leftCols(4));
    Eigen::VectorXd energies(4);
    for (int i = 0; i < 4; ++i) energies(i) = sol.values[i];

    const SwtResult swt =
        swt_projection(ov, energies, config.hybridization_threshold, row.subspace_gap);
    row.min_singular = swt.min_singular;

    const PauliDecomposition pd = pauli_coefficients(Eigen::Matrix4cd(swt.h_eff));
    row.e0 = pd.e0;
    row.h1 = pd.h1;
    row.h2 = pd.h2;
    row.j = pd.j;
    row.jxx_over_delta = pd.j(0, 0) / row.delta1;
    row.jyy_over_delta = pd.j(1, 1) / row.delta1;
    row.jzz_over_delta = pd.j(2, 2) / row.delta1;
    row.status = RowStatus::Ok;
  } catch (const HybridizationError& e) {
    row.status = RowStatus::Hybridized;
    row.min_singular = e.min_singular();
  } catch (const Error&) {
    row.status = RowStatus::Error;
  }
  return row;
}

std::vector<SweepRow> run_sweep(const SweepConfig& config, int threads) {
  config.validate();
  const int count = static_cast<int>(config.values.size());
  std::vector<SweepRow> rows(count);

  const int workers = std::clamp(threads, 1, count);
  if (workers == 1) {
    for (int i = 0; i < count; ++i) rows[i] = run_point(config, config.values[i]);
  } else {
    std::atomic<int> next{0};
    auto work = [&] {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        rows[i] = run_point(config, config.values[i]);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }

  write_csv_atomic(rows, config.output_path);
  return rows;
}

std::string to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << kCsvHeader << "\n";
  for (const SweepRow& r : rows) {
    const double cells[24] = {r.sweep_value,
                              r.delta1,
                              r.delta2,
                              r.e0,
                              r.h1(0),
                              r.h1(1),
                              r.h1(2),
                              r.h2(0),
                              r.h2(1),
                              r.h2(2),
                              r.j(0, 0),
                              r.j(0, 1),
                              r.j(0, 2),
                              r.j(1, 0),
                              r.j(1, 1),
                              r.j(1, 2),
                              r.j(2, 0),
                              r.j(2, 1),
                              r.j(2, 2),
                              r.jxx_over_delta,
                              r.jyy_over_delta,
                              r.jzz_over_delta,
                              r.subspace_gap,
                              r.min_singular};
    for (double c : cells) out << format_double(c) << ",";
    out << to_string(r.status) << "\n";
  }
  return out.str();
}

std::vector<SweepRow> from_csv(const std::string& text) {
  std::istringstream stream(text);
  std::string line;
  if (!std::getline(stream, line) || trim(line) != kCsvHeader)
    throw ParseError("unrecognized CSV header", 1);

  std::vector<SweepRow> rows;
  int line_no = 1;
  while (std::getline(stream, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split(line, ',');
    if (cells.size() != 25)
      throw ParseError("expected 25 CSV cells, got " + std::to_string(cells.size()) +
                           " on line " + std::to_string(line_no),
                       line_no);
    auto cell = [&](int i) -> double {
      if (cells[i].empty()) return SweepRow::nan;
      return parse_double(cells[i], line_no);
    };
    SweepRow r;
    r.sweep_value = cell(0);
    r.delta1 = cell(1);
    r.delta2 = cell(2);
    r.e0 = cell(3);
    for (int i = 0; i < 3; ++i) r.h1(i) = cell(4 + i);
    for (int i = 0; i < 3; ++i) r.h2(i) = cell(7 + i);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r.j(i, j) = cell(10 + 3 * i + j);
    r.jxx_over_delta = cell(19);
    r.jyy_over_delta = cell(20);
    r.jzz_over_delta = cell(21);
    r.subspace_gap = cell(22);
    r.min_singular = cell(23);
    const std::string status = cells[24];
    if (status == "ok")
      r.status = RowStatus::Ok;
    else if (status == "hybridized")
      r.status = RowStatus::Hybridized;
    else if (status == "error")
      r.status = RowStatus::Error;
    else
      throw ParseError("unknown status '" + status + "' on line " + std::to_string(line_no),
                       line_no);
    rows.push_back(r);
  }
  return rows;
}

void write_csv_atomic(const std::vector<SweepRow>& rows, const std::string& path) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write to '" + tmp.string() + "'");
    out << to_csv(rows);
    if (!out) throw Error("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

std::vector<SweepRow> read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open CSV file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_csv(buffer.str());
}

ScalingReport scaling_report(const std::vector<SweepRow>& rows, double lo, double hi) {
  if (!(lo > 0.0) || !(hi > lo))
    throw ValidationError("window must satisfy 0 < lo < hi for a log-log fit");

  std::vector<const SweepRow*> window;
  for (const SweepRow& r : rows)
    if (r.status == RowStatus::Ok && r.sweep_value >= lo && r.sweep_value <= hi)
      window.push_back(&r);
  if (window.size() < 4)
    throw ValidationError("need at least 4 ok rows inside the window, found " +
                          std::to_string(window.size()));

  auto fit = [&](int i) {
    ScalingFit f;
    const int n = static_cast<int>(window.size());
    Eigen::VectorXd x(n), y(n);
    for (int p = 0; p < n; ++p) {
      const double jv = std::abs(window[p]->j(i, i));
      if (!(jv > 1e-12))
        throw ValidationError("a coupling magnitude inside the window is below 1e-12; "
                              "the log-log fit would be dominated by noise");
      x(p) = std::log(window[p]->sweep_value);
      y(p) = std::log(jv);
    }
    const double xm = x.mean(), ym = y.mean();
    const double sxx = (x.array() - xm).square().sum();
    f.slope = ((x.array() - xm) * (y.array() - ym)).sum() / sxx;
    f.intercept = ym - f.slope * xm;
    f.residual_rms =
        std::sqrt((y.array() - f.intercept - f.slope * x.array()).square().mean());
    f.points = n;
    return f;
  };

  ScalingReport report;
  report.jxx = fit(0);
  report.jyy = fit(1);
  report.jzz = fit(2);
  return report;
}

}  // namespace fluxpair
