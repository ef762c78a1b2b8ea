#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>

namespace orthant {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
// Datasets are stored dense and row-major: one observation per row.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Throws ShapeError when `actual` differs from `expected`.
void require_size(std::size_t actual, std::size_t expected, const std::string& what);

// True iff every coordinate is >= 0 (and finite).
bool in_orthant(const Vector& theta);

}  // namespace orthant
