#include "qubus/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "qubus/csv.hpp"
#include "qubus/error.hpp"
#include "qubus/gates.hpp"
#include "qubus/measures.hpp"
#include "qubus/oracle.hpp"
#include "qubus/parallel.hpp"
#include "qubus/sequence_io.hpp"

namespace qubus {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct GlobalOptions {
  std::string out_path;
  std::size_t jobs = default_jobs();
  std::string fig;
};

struct CoherenceOptions {
  double alpha = 1.0;
  double gamma_over_chi = 1.0;
  double chit_max = 10.0;
  std::size_t steps = 1000;
  std::string pair = "01";
};

struct EntanglementOptions {
  std::vector<double> alpha{100.0};
  std::vector<double> gamma_over_chi{1.0};
  double chit_max = 1.0;
  std::size_t steps = 1000;
  bool scan = false;
};

struct CzOptions {
  std::vector<double> l;
  std::string l_grid;
  std::string l_tot_grid;
  bool iterated = false;
  bool both = false;
};

struct RunOptions {
  std::string file;
  std::string input;
  double probe_re = 0.0;
  double probe_im = 0.0;
  bool oracle = false;
};

std::string num(double x) { return format_number(x); }

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return v;
}

std::vector<double> parse_grid(const std::string& text, const std::string& flag) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 3) throw ValidationError(flag + " expects start:stop:count");
  try {
    const double a = std::stod(parts[0]);
    const double b = std::stod(parts[1]);
    const long n = std::stol(parts[2]);
    if (n < 1) throw ValidationError(flag + " count must be >= 1");
    return linspace(a, b, static_cast<std::size_t>(n));
  } catch (const std::logic_error&) {
    throw ValidationError(flag + " expects start:stop:count");
  }
}

EigenvaluePair parse_pair(const std::string& pair) {
  if (pair.size() != 2 || (pair[0] != '0' && pair[0] != '1') || (pair[1] != '0' && pair[1] != '1')) {
    throw ValidationError("--pair expects two bits, e.g. 01");
  }
  return EigenvaluePair::pauli_z(pair[0] - '0', pair[1] - '0');
}

void cmd_coherence(const CoherenceOptions& o, std::ostream& out) {
  if (!(o.alpha >= 0.0)) throw ValidationError("--alpha must be >= 0");
  if (!(o.gamma_over_chi >= 0.0)) throw ValidationError("--gamma-over-chi must be >= 0");
  if (!(o.chit_max > 0.0)) throw ValidationError("--chit-max must be > 0");
  if (o.steps < 1) throw ValidationError("--steps must be >= 1");
  const EigenvaluePair lambda = parse_pair(o.pair);
  CsvWriter csv(out, {"chit", "abs_zeta", "re_f", "im_f"});
  for (std::size_t i = 0; i <= o.steps; ++i) {
    const double chit = o.chit_max * static_cast<double>(i) / static_cast<double>(o.steps);
    const CouplingSpec spec{1.0, o.gamma_over_chi, chit};
    const cplx f = coherence_exponent(o.alpha, spec, lambda);
    csv.row({num(chit), num(std::exp(f.real())), num(f.real()), num(f.imag())});
  }
}

void cmd_entanglement(const EntanglementOptions& o, std::size_t jobs, std::ostream& out) {
  for (double a : o.alpha) {
    if (!(a > 0.0)) throw ValidationError("--alpha must be > 0");
  }
  for (double g : o.gamma_over_chi) {
    if (!(g > 0.0)) throw ValidationError("--gamma-over-chi must be > 0");
  }
  std::vector<std::pair<double, double>> cases;
  for (double g : o.gamma_over_chi) {
    for (double a : o.alpha) cases.emplace_back(a, g);
  }
  if (o.scan) {
    const auto peaks = parallel_map<PeakReport>(cases.size(), jobs, [&](std::size_t i) {
      return peak_scan(cases[i].first, cases[i].second);
    });
    CsvWriter csv(out, {"alpha", "gamma_over_chi", "t_star", "c_max", "entropy_at_peak"});
    for (std::size_t i = 0; i < cases.size(); ++i) {
      csv.row({num(cases[i].first), num(cases[i].second), num(peaks[i].t_star),
               num(peaks[i].c_max), num(peaks[i].entropy_at_peak)});
    }
    return;
  }
  if (!(o.chit_max > 0.0)) throw ValidationError("--chit-max must be > 0");
  if (o.steps < 1) throw ValidationError("--steps must be >= 1");
  using Curve = std::vector<std::pair<double, double>>;
  const auto curves = parallel_map<Curve>(cases.size(), jobs, [&](std::size_t c) {
    Curve curve;
    for (std::size_t i = 1; i <= o.steps; ++i) {
      const double chit = o.chit_max * static_cast<double>(i) / static_cast<double>(o.steps);
      const auto rho = orthogonalize(cases[c].first, 1.0, cases[c].second, chit);
      curve.emplace_back(concurrence(rho), von_neumann_entropy(rho));
    }
    return curve;
  });
  CsvWriter csv(out, {"alpha", "gamma_over_chi", "chit", "concurrence", "entropy"});
  for (std::size_t c = 0; c < cases.size(); ++c) {
    for (std::size_t i = 1; i <= o.steps; ++i) {
      const double chit = o.chit_max * static_cast<double>(i) / static_cast<double>(o.steps);
      csv.row({num(cases[c].first), num(cases[c].second), num(chit), num(curves[c][i - 1].first),
               num(curves[c][i - 1].second)});
    }
  }
}

void cmd_cz(const CzOptions& o, std::size_t jobs, std::ostream& out) {
  std::vector<double> grid = o.l;
  if (!o.l_grid.empty()) {
    const auto g = parse_grid(o.l_grid, "--l-grid");
    grid.insert(grid.end(), g.begin(), g.end());
  }
  if (!o.l_tot_grid.empty()) {
    for (double lt : parse_grid(o.l_tot_grid, "--l-tot-grid")) grid.push_back(l_from_l_tot(lt));
  }
  if (grid.empty()) throw ValidationError("cz needs --l, --l-grid or --l-tot-grid");
  for (double l : grid) {
    if (!(l >= 0.0)) throw ValidationError("l must be >= 0");
  }
  std::vector<bool> kinds;
  if (o.both) kinds = {false, true};
  else kinds = {o.iterated};
  CsvWriter csv(out, {"sequence", "l", "l_tot", "F", "C", "c_minus_norm", "s_sum_norm", "p_a", "p_b"});
  for (bool iterated : kinds) {
    for (const auto& r : loss_sweep(grid, iterated, jobs)) {
      csv.row({iterated ? "iterated" : "single", num(r.l), num(r.l_tot), num(r.fidelity),
               num(r.concurrence), num(r.c_minus_norm), num(r.s_sum_norm), num(r.p_a), num(r.p_b)});
    }
  }
}

void write_matrix(CsvWriter& csv, const std::string& section, const Matrix& m, std::size_t n) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      csv.row({section, BasisIndex(n, static_cast<std::size_t>(i)).label(),
               BasisIndex(n, static_cast<std::size_t>(j)).label(), num(m(i, j).real()),
               num(m(i, j).imag())});
    }
  }
}

void cmd_run(const RunOptions& o, std::ostream& out) {
  const SequenceSpec spec = read_sequence_file(o.file);
  const std::string labels = o.input.empty() ? std::string(spec.n_qubits, '+') : o.input;
  if (labels.size() != spec.n_qubits) {
    throw ValidationError("--input has " + std::to_string(labels.size()) + " labels for " +
                          std::to_string(spec.n_qubits) + " qubits");
  }
  const Matrix rho0 = product_density(labels);
  const cplx probe{o.probe_re, o.probe_im};
  const HybridState final_state = run_sequence(new_product_state(rho0, probe), spec.steps);
  std::optional<OracleComparison> oracle;
  if (o.oracle) oracle = compare_with_engine(spec.steps, rho0, probe);

  const std::size_t n = spec.n_qubits;
  const std::size_t d = final_state.dim();
  CsvWriter csv(out, {"section", "ket", "bra", "re", "im"});
  write_matrix(csv, "rho", reduce_qubits(final_state), n);
  const DephasingKernel kernel = accumulated_kernel(final_state);
  write_matrix(csv, "kernel", kernel.values(), n);
  write_matrix(csv, "log_kernel", kernel.log_values(), n);

  // Final probe amplitude per basis state, and its expansion c0 + sum_k c_k z_k.
  cplx mean = 0.0;
  std::vector<cplx> coeff(n, 0.0);
  for (std::size_t v = 0; v < d; ++v) {
    const cplx amp = final_state.branch(v, v).ket_amp;
    const std::string label = BasisIndex(n, v).label();
    csv.row({"probe", label, label, num(amp.real()), num(amp.imag())});
    mean += amp / static_cast<double>(d);
    for (std::size_t k = 0; k < n; ++k) coeff[k] += amp * (BasisIndex(n, v).z(k) / static_cast<double>(d));
  }
  csv.row({"residual", "", "", num(mean.real()), num(mean.imag())});
  for (std::size_t k = 0; k < n; ++k) {
    csv.row({"z_coefficient", std::to_string(k), "", num(coeff[k].real()), num(coeff[k].imag())});
  }
  csv.row({"probe_spread", "", "", num(final_state.probe_spread()), "0"});
  if (oracle) {
    write_matrix(csv, "oracle", oracle->oracle, n);
    csv.row({"oracle_deviation", "", "", num(oracle->max_deviation), "0"});
  }
}

void apply_entanglement_preset(const std::string& fig, EntanglementOptions& o) {
  if (fig == "2a") {
    o.alpha = {50.0, 100.0, 200.0};
    o.gamma_over_chi = {1.0};
    o.chit_max = 0.1;
    o.steps = 2000;
  } else if (fig == "2b") {
    o.alpha = {100.0};
    o.gamma_over_chi = {1.0, 7.0, 21.0};
    o.chit_max = 0.1;
    o.steps = 2000;
  } else if (fig == "3") {
    o.alpha.clear();
    for (int i = 0; i <= 40; ++i) o.alpha.push_back(std::pow(10.0, 0.1 * i));
    o.gamma_over_chi = {1.0, 3.0, 5.0, 10.0, 15.0};
    o.scan = true;
  } else {
    throw ValidationError("entanglement presets are 2a, 2b and 3");
  }
}

void apply_cz_preset(const std::string& fig, CzOptions& o) {
  if (fig != "7a" && fig != "7b") throw ValidationError("cz presets are 7a and 7b");
  o.l.clear();
  o.l_grid.clear();
  o.l_tot_grid = "0:0.9:91";
  o.both = fig == "7b";
  o.iterated = false;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coherent-probe qubit gates under probe loss"};
  app.fallthrough();
  app.require_subcommand(0, 1);

  GlobalOptions global;
  app.add_option("--out", global.out_path, "Write CSV here instead of stdout");
  app.add_option("--jobs", global.jobs, "Worker threads for sweeps")->check(CLI::PositiveNumber);
  app.add_option("--fig", global.fig, "Figure preset: 2a, 2b, 3, 7a, 7b");

  CoherenceOptions coh;
  auto* coherence = app.add_subcommand("coherence", "Coherence parameter over chi t");
  coherence->add_option("--alpha", coh.alpha, "Probe amplitude");
  coherence->add_option("--gamma-over-chi", coh.gamma_over_chi, "Damping over coupling");
  coherence->add_option("--chit-max", coh.chit_max, "Largest chi t");
  coherence->add_option("--steps", coh.steps, "Grid intervals");
  coherence->add_option("--pair", coh.pair, "Qubit basis pair (ket, bra), e.g. 01 or 00");

  EntanglementOptions ent;
  auto* entanglement = app.add_subcommand("entanglement", "Qubit-probe concurrence and entropy");
  entanglement->add_option("--alpha", ent.alpha, "Probe amplitudes")->delimiter(',');
  entanglement->add_option("--gamma-over-chi", ent.gamma_over_chi, "Damping ratios")->delimiter(',');
  entanglement->add_option("--chit-max", ent.chit_max, "Largest chi t of the curves");
  entanglement->add_option("--steps", ent.steps, "Curve points");
  entanglement->add_flag("--scan", ent.scan, "Report the concurrence peak instead of curves");

  CzOptions cz;
  auto* czcmd = app.add_subcommand("cz", "Calibrated CZ gate against loss");
  czcmd->add_option("--l", cz.l, "Loss per segment")->delimiter(',');
  czcmd->add_option("--l-grid", cz.l_grid, "start:stop:count in l");
  czcmd->add_option("--l-tot-grid", cz.l_tot_grid, "start:stop:count in l_tot");
  czcmd->add_flag("--iterated", cz.iterated, "Two half-strength passes");

  RunOptions run;
  auto* runcmd = app.add_subcommand("run", "Run a sequence file");
  runcmd->add_option("file", run.file, "Sequence file")->required();
  runcmd->add_option("--input", run.input, "Qubit input labels (0, 1, +, -)");
  runcmd->add_option("--probe-re", run.probe_re, "Initial probe amplitude, real part");
  runcmd->add_option("--probe-im", run.probe_im, "Initial probe amplitude, imaginary part");
  runcmd->add_flag("--oracle", run.oracle, "Also run the Fock-space oracle");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream help_out;
    const int code = app.exit(e, help_out, err);
    out << help_out.str();
    return code == 0 ? 0 : 1;
  }

  try {
    std::ostringstream buffer;
    if (*coherence) {
      if (!global.fig.empty()) throw ValidationError("coherence has no presets");
      cmd_coherence(coh, buffer);
    } else if (*entanglement || global.fig == "2a" || global.fig == "2b" || global.fig == "3") {
      if (!global.fig.empty()) apply_entanglement_preset(global.fig, ent);
      cmd_entanglement(ent, global.jobs, buffer);
    } else if (*czcmd || global.fig == "7a" || global.fig == "7b") {
      if (!global.fig.empty()) apply_cz_preset(global.fig, cz);
      cmd_cz(cz, global.jobs, buffer);
    } else if (*runcmd) {
      if (!global.fig.empty()) throw ValidationError("run has no presets");
      cmd_run(run, buffer);
    } else if (!global.fig.empty()) {
      throw ValidationError("unknown preset '" + global.fig + "'");
    } else {
      err << app.help();
      return 1;
    }
    if (global.out_path.empty()) {
      out << buffer.str();
    } else {
      std::ofstream file(global.out_path, std::ios::binary);
      if (!file) throw ValidationError("cannot write '" + global.out_path + "'");
      file << buffer.str();
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace qubus
