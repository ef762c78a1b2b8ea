#include "orthant/dataset_io.hpp"

#include "orthant/errors.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace orthant {

namespace fs = std::filesystem;
using Index = Eigen::Index;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void write_matrix_csv(const fs::path& path, const RowMatrix& X, const Vector* y) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  for (Index j = 0; j < X.cols(); ++j) out << (j ? "," : "") << "x_" << j;
  if (y) out << ",y";
  out << "\n";
  for (Index i = 0; i < X.rows(); ++i) {
    for (Index j = 0; j < X.cols(); ++j) out << (j ? "," : "") << format_double(X(i, j));
    if (y) out << "," << format_double((*y)[i]);
    out << "\n";
  }
}

fs::path sidecar(const fs::path& csv_path) {
  fs::path p = csv_path;
  p.replace_extension(".json");
  return p;
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path.string() + ": empty file");
  {
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) t.header.push_back(tok);
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(tok, &used));
      } catch (const std::exception&) {
        throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": bad number '" + tok + "'");
      }
    }
    if (row.size() != t.header.size()) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                        std::to_string(t.header.size()) + " columns");
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<fs::path> write_dataset(const ModelInstance& model, const fs::path& csv_path) {
  if (csv_path.has_parent_path()) fs::create_directories(csv_path.parent_path());
  std::vector<fs::path> written{csv_path};
  switch (model.kind()) {
    case ModelKind::logistic:
      write_matrix_csv(csv_path, model.logistic().X, &model.logistic().Y);
      break;
    case ModelKind::poisson: {
      write_matrix_csv(csv_path, model.poisson().A, &model.poisson().Y);
      std::ofstream(sidecar(csv_path)) << nlohmann::json{{"exposure", model.poisson().T}}.dump(2)
                                       << "\n";
      written.push_back(sidecar(csv_path));
      break;
    }
    case ModelKind::gmm: {
      const GmmData& g = model.gmm();
      write_matrix_csv(csv_path, g.X, nullptr);
      nlohmann::json j;
      j["weights"] = std::vector<double>(g.weights.data(), g.weights.data() + g.weights.size());
      j["covariances"] = nlohmann::json::array();
      for (const Matrix& s : g.covariances) {
        nlohmann::json rows = nlohmann::json::array();
        for (Index r = 0; r < s.rows(); ++r) {
          std::vector<double> row(static_cast<std::size_t>(s.cols()));
          for (Index c = 0; c < s.cols(); ++c) row[static_cast<std::size_t>(c)] = s(r, c);
          rows.push_back(row);
        }
        j["covariances"].push_back(rows);
      }
      std::ofstream(sidecar(csv_path)) << j.dump(2) << "\n";
      written.push_back(sidecar(csv_path));
      break;
    }
  }
  return written;
}

ModelInstance read_dataset(ModelKind kind, const fs::path& csv_path, Prior prior) {
  const CsvTable t = read_csv(csv_path);
  const bool has_y = kind != ModelKind::gmm;
  const Index cols = static_cast<Index>(t.header.size()) - (has_y ? 1 : 0);
  if (cols < 1) throw ConfigError(csv_path.string() + ": no feature columns");
  RowMatrix X(static_cast<Index>(t.rows.size()), cols);
  Vector y(static_cast<Index>(t.rows.size()));
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    for (Index j = 0; j < cols; ++j) X(static_cast<Index>(i), j) = t.rows[i][static_cast<std::size_t>(j)];
    if (has_y) y[static_cast<Index>(i)] = t.rows[i].back();
  }
  switch (kind) {
    case ModelKind::logistic: return ModelInstance(LogisticData{std::move(X), std::move(y)}, std::move(prior));
    case ModelKind::poisson: {
      double T = 1.0;
      if (fs::exists(sidecar(csv_path))) T = read_json(sidecar(csv_path)).value("exposure", 1.0);
      return ModelInstance(PoissonData{std::move(X), std::move(y), T}, std::move(prior));
    }
    case ModelKind::gmm: {
      const nlohmann::json j = read_json(sidecar(csv_path));
      GmmData g;
      g.X = std::move(X);
      const auto w = j.at("weights").get<std::vector<double>>();
      g.weights = Eigen::Map<const Vector>(w.data(), static_cast<Index>(w.size()));
      for (const auto& cov : j.at("covariances")) {
        const auto rows = cov.get<std::vector<std::vector<double>>>();
        Matrix s(static_cast<Index>(rows.size()), static_cast<Index>(rows.size()));
        for (std::size_t r = 0; r < rows.size(); ++r) {
          if (rows[r].size() != rows.size()) throw ConfigError("gmm covariance must be square");
          for (std::size_t c = 0; c < rows.size(); ++c) {
            s(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
          }
        }
        g.covariances.push_back(s);
      }
      return ModelInstance(std::move(g), std::move(prior));
    }
  }
  throw ConfigError("unknown model kind");
}

}  // namespace orthant
