#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "meromat/funcalc.hpp"
#include "meromat/specdensity.hpp"
#include "meromat/types.hpp"

namespace meromat {

// Matrix JSON: {"dim": n, "entries": [[re, im], ...]} row-major; vectors use
// the same layout with n entries. Doubles round-trip bit-exactly.

nlohmann::json matrix_to_json(const ComplexMatrix& M);
ComplexMatrix matrix_from_json(const nlohmann::json& j);

nlohmann::json vector_to_json(const ComplexVector& v);
ComplexVector vector_from_json(const nlohmann::json& j);

nlohmann::json hmm_to_json(const HiddenMarkovModel& hmm);
HiddenMarkovModel hmm_from_json(const nlohmann::json& j);

LocalFunctionData laurent_from_json(const nlohmann::json& j);

nlohmann::json decomposition_report(const SpectralDecomposition& decomp,
                                    bool include_companions = true);

ComplexMatrix read_matrix_json(const std::string& path);
ComplexVector read_vector_json(const std::string& path);
HiddenMarkovModel read_hmm_json(const std::string& path);
LocalFunctionData read_laurent_json(const std::string& path);
nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

/// 17 significant digits, '.' decimal point, no locale dependence.
std::string format_double(double x);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

void write_csv(const std::string& path, const CsvTable& table);
std::string csv_to_string(const CsvTable& table);

/// Reads numeric CSV, skipping an optional non-numeric header row.
std::vector<std::vector<double>> read_csv(const std::string& path);

/// Complex series CSV (columns re, im) used by simulate/scan.
std::vector<Complex> read_series_csv(const std::string& path);

}  // namespace meromat
