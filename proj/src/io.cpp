#include "meromat/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "meromat/errors.hpp"

namespace meromat {

namespace {

using nlohmann::json;

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    fail(ErrorKind::ParseError, "expected a complex entry [re, im]");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

int dim_from_json(const json& j, std::size_t expected_entries_per_dim) {
  if (!j.is_object() || !j.contains("dim") || !j["dim"].is_number_integer())
    fail(ErrorKind::ParseError, "expected an object with an integer \"dim\"");
  int dim = j["dim"].get<int>();
  if (dim < 1) fail(ErrorKind::ParseError, "\"dim\" must be positive");
  if (!j.contains("entries") || !j["entries"].is_array())
    fail(ErrorKind::ParseError, "expected an \"entries\" array");
  std::size_t want = expected_entries_per_dim == 2
                         ? static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim)
                         : static_cast<std::size_t>(dim);
  if (j["entries"].size() != want)
    fail(ErrorKind::ParseError, "expected " + std::to_string(want) + " entries, got " +
                                    std::to_string(j["entries"].size()));
  return dim;
}

}  // namespace

json matrix_to_json(const ComplexMatrix& M) {
  json entries = json::array();
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j) entries.push_back(complex_to_json(M(i, j)));
  return json{{"dim", M.rows()}, {"entries", std::move(entries)}};
}

ComplexMatrix matrix_from_json(const json& j) {
  int dim = dim_from_json(j, 2);
  ComplexMatrix M(dim, dim);
  std::size_t k = 0;
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) M(r, c) = complex_from_json(j["entries"][k++]);
  if (!M.allFinite()) fail(ErrorKind::NonFinite, "matrix has NaN or Inf entries");
  return M;
}

json vector_to_json(const ComplexVector& v) {
  json entries = json::array();
  for (int i = 0; i < v.size(); ++i) entries.push_back(complex_to_json(v(i)));
  return json{{"dim", v.size()}, {"entries", std::move(entries)}};
}

ComplexVector vector_from_json(const json& j) {
  int dim = dim_from_json(j, 1);
  ComplexVector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = complex_from_json(j["entries"][i]);
  if (!v.allFinite()) fail(ErrorKind::NonFinite, "vector has NaN or Inf entries");
  return v;
}

json hmm_to_json(const HiddenMarkovModel& hmm) {
  json means = json::array();
  for (int s = 0; s < hmm.states(); ++s) means.push_back(complex_to_json(hmm.means(s)));
  json secmom = json::array();
  for (int s = 0; s < hmm.states(); ++s) secmom.push_back(hmm.second_moments(s));
  json out{{"T", matrix_to_json(hmm.T.matrix())},
           {"means", std::move(means)},
           {"second_moments", std::move(secmom)}};
  if (hmm.emissions)
    out["emissions"] = {
        {"type",
         hmm.emissions->type == EmissionType::Gaussian ? "gaussian" : "deterministic"}};
  return out;
}

HiddenMarkovModel hmm_from_json(const json& j) {
  if (!j.is_object() || !j.contains("T") || !j.contains("means") ||
      !j.contains("second_moments"))
    fail(ErrorKind::ParseError, "an HMM needs \"T\", \"means\" and \"second_moments\"");

  ComplexMatrix T = matrix_from_json(j["T"]);
  const int n = static_cast<int>(T.rows());
  if (!j["means"].is_array() || static_cast<int>(j["means"].size()) != n)
    fail(ErrorKind::ParseError, "\"means\" must list one value per state");
  if (!j["second_moments"].is_array() ||
      static_cast<int>(j["second_moments"].size()) != n)
    fail(ErrorKind::ParseError, "\"second_moments\" must list one value per state");

  ComplexVector means(n);
  RealVector secmom(n);
  for (int s = 0; s < n; ++s) {
    means(s) = complex_from_json(j["means"][s]);
    if (!j["second_moments"][s].is_number())
      fail(ErrorKind::ParseError, "second moments must be real numbers");
    secmom(s) = j["second_moments"][s].get<double>();
  }

  std::optional<EmissionSpec> emissions;
  if (j.contains("emissions")) {
    const auto& e = j["emissions"];
    if (!e.is_object() || !e.contains("type") || !e["type"].is_string())
      fail(ErrorKind::ParseError, "\"emissions\" needs a string \"type\"");
    std::string type = e["type"].get<std::string>();
    if (type == "gaussian")
      emissions = EmissionSpec{EmissionType::Gaussian};
    else if (type == "deterministic")
      emissions = EmissionSpec{EmissionType::Deterministic};
    else
      fail(ErrorKind::UnsupportedRequest, "unknown emission type \"" + type + "\"");
  }

  return make_hmm(StochasticMatrix::from(T, 1e-9), std::move(means), std::move(secmom),
                  emissions);
}

LocalFunctionData laurent_from_json(const json& j) {
  if (!j.is_array()) fail(ErrorKind::ParseError, "Laurent data must be an array");
  LocalFunctionData data;
  for (const auto& item : j) {
    if (!item.is_object() || !item.contains("lambda") || !item.contains("coeffs") ||
        !item["coeffs"].is_array())
      fail(ErrorKind::ParseError,
           "each Laurent entry needs \"lambda\" and a \"coeffs\" array");
    LaurentData entry;
    entry.lambda = complex_from_json(item["lambda"]);
    for (const auto& c : item["coeffs"]) entry.coeffs.push_back(complex_from_json(c));
    data.entries.push_back(std::move(entry));
  }
  return data;
}

json decomposition_report(const SpectralDecomposition& decomp, bool include_companions) {
  json records = json::array();
  for (const auto& rec : decomp.spectrum.records)
    records.push_back({{"lambda", complex_to_json(rec.lambda)},
                       {"algebraic", rec.algebraic},
                       {"geometric", rec.geometric},
                       {"index", rec.index}});
  json out{{"dim", decomp.dim()},
           {"cluster_tolerance", decomp.spectrum.cluster_tolerance},
           {"spectrum", std::move(records)},
           {"residuals",
            {{"completeness", decomp.residuals.completeness},
             {"orthogonality", decomp.residuals.orthogonality},
             {"dunford_sum", decomp.residuals.dunford_sum},
             {"dunford_commute", decomp.residuals.dunford_commute},
             {"nilpotency", decomp.residuals.nilpotency}}}};
  if (include_companions) {
    json projectors = json::array();
    json companions = json::array();
    for (const auto& fam : decomp.companions) {
      projectors.push_back(matrix_to_json(fam[0]));
      json fam_json = json::array();
      for (const auto& comp : fam) fam_json.push_back(matrix_to_json(comp));
      companions.push_back(std::move(fam_json));
    }
    out["projectors"] = std::move(projectors);
    out["companions"] = std::move(companions);
  }
  return out;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ParseError, "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorKind::ParseError, path + ": " + e.what());
  }
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::ParseError, "cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
}

ComplexMatrix read_matrix_json(const std::string& path) {
  return matrix_from_json(read_json_file(path));
}

ComplexVector read_vector_json(const std::string& path) {
  return vector_from_json(read_json_file(path));
}

HiddenMarkovModel read_hmm_json(const std::string& path) {
  return hmm_from_json(read_json_file(path));
}

LocalFunctionData read_laurent_json(const std::string& path) {
  return laurent_from_json(read_json_file(path));
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string csv_to_string(const CsvTable& table) {
  std::ostringstream os;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) os << ",";
    os << table.header[i];
  }
  if (!table.header.empty()) os << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ",";
      os << format_double(row[i]);
    }
    os << "\n";
  }
  return os.str();
}

void write_csv(const std::string& path, const CsvTable& table) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::ParseError, "cannot open " + path + " for writing");
  out << csv_to_string(table);
}

std::vector<std::vector<double>> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ParseError, "cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      // strtod instead of stod: stod raises out_of_range on denormals.
      const char* begin = cell.c_str();
      char* end = nullptr;
      double v = std::strtod(begin, &end);
      while (end && (*end == ' ' || *end == '\t' || *end == '\r')) ++end;
      if (end == begin || (end && *end != '\0')) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;  // header row
      }
      fail(ErrorKind::ParseError, path + ": non-numeric row");
    }
    first = false;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<Complex> read_series_csv(const std::string& path) {
  auto rows = read_csv(path);
  std::vector<Complex> series;
  series.reserve(rows.size());
  for (const auto& row : rows) {
    if (row.empty()) continue;
    if (row.size() == 1)
      series.emplace_back(row[0], 0.0);
    else
      series.emplace_back(row[row.size() - 2], row[row.size() - 1]);
  }
  if (series.empty()) fail(ErrorKind::EmptySeries, path + " contains no samples");
  return series;
}

}  // namespace meromat
