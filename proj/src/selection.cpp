#include "posewatch/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "posewatch/error.hpp"

namespace posewatch {

SelectionResult select_top_k(std::span<const std::string> names, std::span<const double> importances,
                             std::size_t k) {
  if (names.size() != importances.size()) {
    throw Error(ErrorCode::kInvalidArgument, "names and importances differ in length");
  }
  if (k > names.size()) {
    throw Error(ErrorCode::kKTooLarge,
                "k = " + std::to_string(k) + " exceeds " + std::to_string(names.size()) + " features");
  }
  for (double v : importances) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "non-finite importance");
  }
  std::vector<std::size_t> order(names.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return importances[a] > importances[b]; });
  order.resize(k);

  SelectionResult out;
  out.k = k;
  for (std::size_t i : order) out.ranked.emplace_back(names[i], importances[i]);
  std::sort(order.begin(), order.end());
  for (std::size_t i : order) out.reduced_schema.push_back(names[i]);
  return out;
}

SymmetricEigen symmetric_eigen(const Matrix& input) {
  const std::size_t n = input.size();
  Matrix a = input;
  Matrix v(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;

  double frob = 0.0;
  for (const auto& row : a) {
    for (double x : row) frob += x * x;
  }
  frob = std::sqrt(frob);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    }
    if (std::sqrt(off) <= 1e-15 * std::max(frob, 1e-300)) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p];
          const double akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k];
          const double aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p];
          const double vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a[x][x] > a[y][y]; });
  SymmetricEigen out;
  for (std::size_t i : order) {
    out.values.push_back(a[i][i]);
    std::vector<double> vec(n);
    for (std::size_t k = 0; k < n; ++k) vec[k] = v[k][i];
    out.vectors.push_back(std::move(vec));
  }
  return out;
}

PcaResult pca_project(const Matrix& data, std::size_t n_components, bool standardize) {
  const std::size_t n = data.size();
  if (n < 2) throw Error(ErrorCode::kTooFewSamples, "PCA needs at least 2 samples");
  const std::size_t d = data[0].size();
  for (const auto& row : data) {
    if (row.size() != d) throw Error(ErrorCode::kInvalidArgument, "ragged matrix");
    for (double x : row) {
      if (!std::isfinite(x)) throw Error(ErrorCode::kInvalidArgument, "non-finite cell");
    }
  }
  if (n_components > std::min(n - 1, d)) {
    throw Error(ErrorCode::kTooManyComponents,
                std::to_string(n_components) + " components requested, at most " +
                    std::to_string(std::min(n - 1, d)) + " available");
  }

  PcaResult out;
  out.mean.assign(d, 0.0);
  out.scale.assign(d, 1.0);
  for (const auto& row : data) {
    for (std::size_t j = 0; j < d; ++j) out.mean[j] += row[j];
  }
  for (double& m : out.mean) m /= static_cast<double>(n);

  Matrix centered(n, std::vector<double>(d));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) centered[i][j] = data[i][j] - out.mean[j];
  }
  if (standardize) {
    for (std::size_t j = 0; j < d; ++j) {
      double ss = 0.0;
      for (std::size_t i = 0; i < n; ++i) ss += centered[i][j] * centered[i][j];
      const double sd = std::sqrt(ss / static_cast<double>(n - 1));
      if (sd > 0.0) {
        out.scale[j] = sd;
        for (std::size_t i = 0; i < n; ++i) centered[i][j] /= sd;
      } else {
        out.scale[j] = 0.0;
        for (std::size_t i = 0; i < n; ++i) centered[i][j] = 0.0;
      }
    }
  }

  Matrix cov(d, std::vector<double>(d, 0.0));
  for (std::size_t p = 0; p < d; ++p) {
    for (std::size_t q = p; q < d; ++q) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += centered[i][p] * centered[i][q];
      cov[p][q] = cov[q][p] = s / static_cast<double>(n - 1);
    }
  }

  const auto eig = symmetric_eigen(cov);
  double total = 0.0;
  for (std::size_t j = 0; j < d; ++j) total += cov[j][j];

  for (std::size_t c = 0; c < n_components; ++c) {
    auto vec = eig.vectors[c];
    std::size_t lead = 0;
    for (std::size_t k = 1; k < d; ++k) {
      if (std::abs(vec[k]) > std::abs(vec[lead])) lead = k;
    }
    if (vec[lead] < 0.0) {
      for (double& x : vec) x = -x;
    }
    out.components.push_back(std::move(vec));
    const double ev = std::max(eig.values[c], 0.0);
    out.explained_variance.push_back(ev);
    out.explained_variance_ratio.push_back(total > 0.0 ? ev / total : 0.0);
  }

  out.projected.assign(n, std::vector<double>(n_components, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < n_components; ++c) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += centered[i][j] * out.components[c][j];
      out.projected[i][c] = s;
    }
  }
  return out;
}

}  // namespace posewatch
