#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace posewatch {

struct SelectionResult {
  // The top k, descending importance; ties keep schema order.
  std::vector<std::pair<std::string, double>> ranked;
  std::size_t k = 0;
  // Chosen names in their original schema order.
  std::vector<std::string> reduced_schema;
};

// Throws KTooLarge when k exceeds the feature count, InvalidArgument on a
// length mismatch or non-finite importance.
SelectionResult select_top_k(std::span<const std::string> names, std::span<const double> importances,
                             std::size_t k);

using Matrix = std::vector<std::vector<double>>;

struct SymmetricEigen {
  std::vector<double> values;          // descending
  std::vector<std::vector<double>> vectors;  // vectors[i] pairs with values[i]
};

// Cyclic Jacobi rotations on a symmetric matrix.
SymmetricEigen symmetric_eigen(const Matrix& a);

struct PcaResult {
  Matrix components;  // n_components x features, orthonormal rows
  std::vector<double> explained_variance;
  std::vector<double> explained_variance_ratio;
  Matrix projected;  // samples x n_components
  std::vector<double> mean;
  std::vector<double> scale;  // 1 where no standardization was applied
};

// Centers (and z-scores when `standardize`, leaving zero-variance columns at 0)
// and projects onto the leading covariance eigenvectors. Each component's
// largest-magnitude loading is made positive.
// Throws TooFewSamples, TooManyComponents, InvalidArgument.
PcaResult pca_project(const Matrix& data, std::size_t n_components, bool standardize = true);

}  // namespace posewatch
