// Command-line front end: matrix and HMM file analysis through the
// meromorphic calculus, with JSON/CSV output for plotting.

#include <CLI11.hpp>

#include <complex>
#include <cstdlib>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include "meromat/errors.hpp"
#include "meromat/funcalc.hpp"
#include "meromat/io.hpp"
#include "meromat/specdensity.hpp"
#include "meromat/spectral.hpp"
#include "meromat/stoch.hpp"

namespace {

using namespace meromat;

bool logging_enabled() {
  const char* env = std::getenv("MEROMAT_LOG");
  return env != nullptr && env[0] != '\0';
}

void log_step(const std::string& msg) {
  if (logging_enabled()) std::cerr << "[meromat] " << msg << "\n";
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvariantViolation:
    case ErrorKind::ClusterAmbiguity:
    case ErrorKind::ChainConstructionFailure:
    case ErrorKind::QuadratureFailure:
    case ErrorKind::NotDiagonalizable:
      return 3;
    case ErrorKind::UnsupportedRequest:
    case ErrorKind::FunctionSingularAtEigenvalue:
      return 4;
    default:
      return 2;
  }
}

Complex parse_complex(const std::string& text) {
  std::size_t comma = text.find(',');
  try {
    if (comma == std::string::npos) return Complex(std::stod(text), 0.0);
    return Complex(std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1)));
  } catch (...) {
    fail(ErrorKind::ParseError, "cannot parse complex value \"" + text + "\"");
  }
}

struct GridSpec {
  int count = 256;
  double lo = 0.0;
  double hi = 2.0 * std::numbers::pi;
  bool explicit_range = false;
};

GridSpec parse_grid(const std::string& text) {
  GridSpec spec;
  if (text.empty()) return spec;
  std::stringstream ss(text);
  std::string cell;
  std::vector<std::string> parts;
  while (std::getline(ss, cell, ',')) parts.push_back(cell);
  try {
    spec.count = std::stoi(parts.at(0));
    if (parts.size() >= 3) {
      spec.lo = std::stod(parts[1]);
      spec.hi = std::stod(parts[2]);
      spec.explicit_range = true;
    }
  } catch (...) {
    fail(ErrorKind::ParseError, "cannot parse grid spec \"" + text + "\"");
  }
  if (spec.count < 2) fail(ErrorKind::InvalidArgument, "grid count must be at least 2");
  return spec;
}

void emit_json(const nlohmann::json& j, const std::string& out) {
  if (out.empty())
    std::cout << j.dump(2) << "\n";
  else
    write_json_file(out, j);
}

void emit_csv(const CsvTable& table, const std::string& out) {
  if (out.empty())
    std::cout << csv_to_string(table);
  else
    write_csv(out, table);
}

std::string lines_path(const std::string& out) {
  std::size_t dot = out.rfind('.');
  if (dot == std::string::npos) return out + ".lines.csv";
  return out.substr(0, dot) + ".lines" + out.substr(dot);
}

ComplexMatrix function_of_matrix(const ComplexMatrix& A, const std::string& fn,
                                 const std::string& laurent_path,
                                 const std::string& c_text,
                                 const SpectralOptions& opts) {
  SpectralDecomposition decomp = decompose(A, opts);
  if (!laurent_path.empty()) {
    log_step("applying user Laurent data from " + laurent_path);
    return apply_meromorphic(decomp, read_laurent_json(laurent_path));
  }
  if (fn == "exp") return apply_holomorphic(decomp, exp_function());
  if (fn == "log") return apply_holomorphic(decomp, log_function());
  if (fn == "identity") return apply_holomorphic(decomp, identity_function());
  if (fn == "drazin") {
    if (!c_text.empty()) return drazin(decomp, parse_complex(c_text));
    return drazin(decomp);
  }
  if (fn.rfind("power:", 0) == 0)
    return matrix_power(decomp, parse_complex(fn.substr(6)));
  fail(ErrorKind::UnsupportedRequest, "unknown function \"" + fn +
                                          "\"; expected exp, log, identity, drazin, "
                                          "power:<L>, or --laurent data");
}

int run(int argc, char** argv) {
  CLI::App app{"meromat: spectral decomposition and meromorphic functional calculus "
               "for arbitrary square complex matrices"};
  app.require_subcommand(1);

  double tol_cluster = 0.0;
  double rank_safety = 100.0;
  double tol_unit_circle = 1e-9;
  std::string out;
  app.add_option("--tol-cluster", tol_cluster,
                 "eigenvalue clustering tolerance (0 = automatic)")
      ->capture_default_str();
  app.add_option("--rank-safety", rank_safety, "numerical-rank safety factor")
      ->capture_default_str();
  app.add_option("--tol-unit-circle", tol_unit_circle,
                 "| |lambda| - 1 | below this marks a spectral line")
      ->capture_default_str();
  app.add_option("--out", out, "output path (default: stdout)");

  auto* cmd_dec = app.add_subcommand("decompose", "spectrum, projectors, residuals");
  std::string dec_matrix;
  bool dec_no_companions = false;
  cmd_dec->add_option("matrix", dec_matrix, "matrix JSON file")->required();
  cmd_dec->add_flag("--no-companions", dec_no_companions,
                    "omit projector/companion payloads from the report");

  auto* cmd_fn = app.add_subcommand("funcalc", "evaluate f(A)");
  std::string fn_matrix, fn_name, fn_laurent, fn_c;
  cmd_fn->add_option("matrix", fn_matrix, "matrix JSON file")->required();
  cmd_fn->add_option("--fn", fn_name,
                     "function name: exp, log, identity, drazin, power:<L>");
  cmd_fn->add_option("--laurent", fn_laurent,
                     "JSON file with per-eigenvalue Laurent coefficients");
  cmd_fn->add_option("--c", fn_c, "Drazin shift c (complex: re[,im])");

  auto* cmd_res = app.add_subcommand("resolvent", "evaluate (zI - A)^(-1)");
  std::string res_matrix, res_z;
  cmd_res->add_option("matrix", res_matrix, "matrix JSON file")->required();
  cmd_res->add_option("--z", res_z, "evaluation point (complex: re[,im])")->required();

  auto* cmd_dr = app.add_subcommand("drazin", "Drazin inverse");
  std::string dr_matrix, dr_c;
  cmd_dr->add_option("matrix", dr_matrix, "matrix JSON file")->required();
  cmd_dr->add_option("--c", dr_c, "shift c (complex: re[,im])");

  auto* cmd_poi = app.add_subcommand("poisson", "truncated counting pmf");
  int poi_N = 16;
  double poi_r = 1.0, poi_t = 1.0;
  cmd_poi->add_option("--N", poi_N, "count truncation")->required();
  cmd_poi->add_option("--r", poi_r, "rate per unit time")->required();
  cmd_poi->add_option("--t", poi_t, "duration")->required();

  auto* cmd_gk = app.add_subcommand("greenkubo", "integrated correlation coefficient");
  std::string gk_matrix, gk_obs, gk_obs_b;
  cmd_gk->add_option("matrix", gk_matrix, "rate-matrix JSON file")->required();
  cmd_gk->add_option("--observable", gk_obs, "vector JSON file")->required();
  cmd_gk->add_option("--observable-b", gk_obs_b, "optional second observable");

  auto* cmd_acf = app.add_subcommand("acf", "autocorrelation of an HMM process");
  std::string acf_hmm;
  int acf_max_lag = 32;
  cmd_acf->add_option("hmm", acf_hmm, "HMM JSON file")->required();
  cmd_acf->add_option("--max-lag", acf_max_lag, "largest lag")->capture_default_str();

  auto* cmd_pow = app.add_subcommand("power", "power spectrum of an HMM process");
  std::string pow_hmm, pow_grid;
  cmd_pow->add_option("hmm", pow_hmm, "HMM JSON file")->required();
  cmd_pow->add_option("--grid", pow_grid, "count[,lo,hi] frequency grid");

  auto* cmd_sim = app.add_subcommand("simulate", "sample a series from an HMM");
  std::string sim_hmm;
  std::int64_t sim_n = 1000;
  std::uint64_t sim_seed = 1;
  bool sim_means_only = false;
  cmd_sim->add_option("hmm", sim_hmm, "HMM JSON file")->required();
  cmd_sim->add_option("--n", sim_n, "series length")->capture_default_str();
  cmd_sim->add_option("--seed", sim_seed, "random seed")->capture_default_str();
  cmd_sim->add_flag("--means-only", sim_means_only, "emit state means, no noise");

  auto* cmd_scan = app.add_subcommand("scan", "eigenvalue scan of a series");
  std::string scan_series, scan_grid;
  double scan_radius = 1.05;
  cmd_scan->add_option("series", scan_series, "series CSV file")->required();
  cmd_scan->add_option("--radius", scan_radius, "scan radius in (1, 2]")
      ->capture_default_str();
  cmd_scan->add_option("--grid", scan_grid, "count[,lo,hi] angle grid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  SpectralOptions opts;
  opts.cluster_tolerance = tol_cluster;
  opts.rank_safety = rank_safety;

  if (cmd_dec->parsed()) {
    log_step("decomposing " + dec_matrix);
    SpectralDecomposition d = decompose(read_matrix_json(dec_matrix), opts);
    emit_json(decomposition_report(d, !dec_no_companions), out);
  } else if (cmd_fn->parsed()) {
    if (fn_name.empty() == fn_laurent.empty())
      fail(ErrorKind::UnsupportedRequest,
           "funcalc needs exactly one of --fn or --laurent");
    ComplexMatrix result =
        function_of_matrix(read_matrix_json(fn_matrix), fn_name, fn_laurent, fn_c, opts);
    emit_json(matrix_to_json(result), out);
  } else if (cmd_res->parsed()) {
    SpectralDecomposition d = decompose(read_matrix_json(res_matrix), opts);
    emit_json(matrix_to_json(resolvent(d, parse_complex(res_z))), out);
  } else if (cmd_dr->parsed()) {
    SpectralDecomposition d = decompose(read_matrix_json(dr_matrix), opts);
    ComplexMatrix result = dr_c.empty() ? drazin(d) : drazin(d, parse_complex(dr_c));
    emit_json(matrix_to_json(result), out);
  } else if (cmd_poi->parsed()) {
    log_step("counting pmf for N=" + std::to_string(poi_N));
    ComplexMatrix T = poisson_transition(poi_N, poi_r, poi_t);
    CsvTable table;
    table.header = {"n", "probability"};
    for (int n = 0; n <= poi_N; ++n)
      table.rows.push_back({static_cast<double>(n), T(0, n).real()});
    emit_csv(table, out);
  } else if (cmd_gk->parsed()) {
    RateMatrix G = RateMatrix::from(read_matrix_json(gk_matrix), 1e-9);
    SpectralDecomposition d = decompose(G.matrix(), opts);
    Observable A = read_vector_json(gk_obs);
    Complex kappa;
    if (gk_obs_b.empty()) {
      kappa = green_kubo(G, d, A);
    } else {
      Observable B = read_vector_json(gk_obs_b);
      kappa = green_kubo(G, d, A, &B);
    }
    CsvTable table;
    table.header = {"kappa_re", "kappa_im"};
    table.rows.push_back({kappa.real(), kappa.imag()});
    emit_csv(table, out);
  } else if (cmd_acf->parsed()) {
    HiddenMarkovModel hmm = read_hmm_json(acf_hmm);
    if (acf_max_lag < 0) fail(ErrorKind::InvalidArgument, "max lag must be nonnegative");
    auto gamma = autocorrelation_series(hmm, acf_max_lag);
    CsvTable table;
    table.header = {"tau", "gamma_re", "gamma_im"};
    for (std::size_t tau = 0; tau < gamma.size(); ++tau)
      table.rows.push_back(
          {static_cast<double>(tau), gamma[tau].real(), gamma[tau].imag()});
    emit_csv(table, out);
  } else if (cmd_pow->parsed()) {
    HiddenMarkovModel hmm = read_hmm_json(pow_hmm);
    GridSpec spec = parse_grid(pow_grid);
    auto grid = uniform_grid(spec.count, spec.lo, spec.hi, !spec.explicit_range);
    log_step("power spectrum on " + std::to_string(spec.count) + " frequencies");
    PowerSpectrumOptions pso;
    pso.unit_circle_tolerance = tol_unit_circle;
    pso.decomposition = opts;
    auto result = power_spectrum(hmm, grid, pso);

    CsvTable cont;
    cont.header = {"omega", "P_c"};
    for (std::size_t k = 0; k < result.omega.size(); ++k)
      cont.rows.push_back({result.omega[k], result.continuous[k]});
    CsvTable lines;
    lines.header = {"omega_line", "weight"};
    for (const auto& line : result.lines)
      lines.rows.push_back({line.omega, line.weight});

    if (out.empty()) {
      std::cout << csv_to_string(cont) << csv_to_string(lines);
    } else {
      write_csv(out, cont);
      write_csv(lines_path(out), lines);
    }
  } else if (cmd_sim->parsed()) {
    HiddenMarkovModel hmm = read_hmm_json(sim_hmm);
    auto series = sample_hmm(
        hmm, sim_n, sim_seed,
        sim_means_only ? EmissionMode::MeansOnly : EmissionMode::Auto);
    CsvTable table;
    table.header = {"x_re", "x_im"};
    for (Complex x : series) table.rows.push_back({x.real(), x.imag()});
    emit_csv(table, out);
  } else if (cmd_scan->parsed()) {
    auto series = read_series_csv(scan_series);
    GridSpec spec = parse_grid(scan_grid.empty() ? "1024" : scan_grid);
    auto grid = uniform_grid(spec.count, spec.lo, spec.hi, !spec.explicit_range);
    auto candidates = eigenvalue_scan(series, scan_radius, grid);
    CsvTable table;
    table.header = {"omega", "magnitude"};
    for (const auto& c : candidates) table.rows.push_back({c.omega, c.magnitude});
    emit_csv(table, out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
