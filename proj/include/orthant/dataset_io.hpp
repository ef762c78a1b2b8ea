#pragma once

#include "orthant/models.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace orthant {

// Datasets are CSV with a header row. Logistic and Poisson files have columns
// x_0..x_{d-1},y; a Poisson dataset also writes <stem>.json holding
// {"exposure": T}. A GMM dataset stores X (columns x_0..x_{p-1}) and a sidecar
// <stem>.json holding {"weights": [...], "covariances": [[[...]]]}.
//
// Returns the paths written.
std::vector<std::filesystem::path> write_dataset(const ModelInstance& model,
                                                 const std::filesystem::path& csv_path);

ModelInstance read_dataset(ModelKind kind, const std::filesystem::path& csv_path,
                           Prior prior = Prior::flat());

// Shortest decimal text that round-trips a double ("%.17g").
std::string format_double(double v);

// Minimal numeric CSV: header tokens plus rows of doubles.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace orthant
