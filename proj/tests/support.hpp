#pragma once

// Shared test fixtures: planted Jordan-structured matrices with known
// (a, g, nu), plus small oracles that stay independent of the library's
// decomposition pipeline.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "meromat/types.hpp"

namespace testsupport {

using meromat::Complex;
using meromat::ComplexMatrix;
using meromat::ComplexVector;

inline double mdiff(const ComplexMatrix& A, const ComplexMatrix& B) {
  return (A - B).norm();
}

inline ComplexMatrix cmat(int n, std::initializer_list<Complex> entries) {
  ComplexMatrix M(n, n);
  int k = 0;
  for (Complex v : entries) M(k / n, k % n) = v, ++k;
  return M;
}

struct PlantedRecord {
  Complex lambda;
  int algebraic;
  int geometric;
  int index;
};

struct Planted {
  ComplexMatrix A;
  ComplexMatrix Y;
  double cond_Y = 1.0;
  std::vector<PlantedRecord> records;
};

struct PlantedConfig {
  int dim_min = 2;
  int dim_max = 12;
  int index_max = 4;
  double min_separation = 0.5;
  double cond_max = 1e3;
  bool force_zero_eigenvalue = false;
  int zero_index_min = 1;  // with force_zero: smallest acceptable nu_0
};

inline Planted random_planted(std::mt19937_64& rng, const PlantedConfig& cfg = {}) {
  std::uniform_int_distribution<int> dim_dist(cfg.dim_min, cfg.dim_max);
  const int n = dim_dist(rng);

  // Block sizes summing to n, each at most index_max.
  std::vector<int> sizes;
  int left = n;
  std::uniform_int_distribution<int> size_dist(1, cfg.index_max);
  while (left > 0) {
    int s = std::min(size_dist(rng), left);
    sizes.push_back(s);
    left -= s;
  }
  std::shuffle(sizes.begin(), sizes.end(), rng);

  // Distinct well-separated eigenvalues; each gets at least one block.
  std::uniform_int_distribution<int> count_dist(1, static_cast<int>(sizes.size()));
  int n_eigs = count_dist(rng);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  std::vector<Complex> lambdas;
  while (static_cast<int>(lambdas.size()) < n_eigs) {
    Complex cand = cfg.force_zero_eigenvalue && lambdas.empty()
                       ? Complex(0.0, 0.0)
                       : Complex(coord(rng), coord(rng));
    bool ok = true;
    for (Complex l : lambdas)
      if (std::abs(l - cand) < cfg.min_separation) ok = false;
    if (cfg.force_zero_eigenvalue && !lambdas.empty() &&
        std::abs(cand) < cfg.min_separation)
      ok = false;
    if (ok) lambdas.push_back(cand);
  }

  std::vector<int> owner(sizes.size());
  for (std::size_t b = 0; b < sizes.size(); ++b)
    owner[b] = b < static_cast<std::size_t>(n_eigs)
                   ? static_cast<int>(b)
                   : std::uniform_int_distribution<int>(0, n_eigs - 1)(rng);
  if (cfg.force_zero_eigenvalue && cfg.zero_index_min > 1) {
    // Make sure the zero eigenvalue owns a block of the requested size.
    int want = std::min(cfg.zero_index_min, cfg.index_max);
    int best = -1;
    for (std::size_t b = 0; b < sizes.size(); ++b)
      if (sizes[b] >= want && (best < 0 || sizes[b] < sizes[best]))
        best = static_cast<int>(b);
    if (best >= 0)
      owner[best] = 0;
    else
      sizes[0] = want, owner[0] = 0;  // fallback; sums may shift by a block
  }

  ComplexMatrix J = ComplexMatrix::Zero(n, n);
  int col = 0;
  std::vector<std::pair<int, int>> per_eig_blocks;  // (owner, size) in layout order
  for (std::size_t b = 0; b < sizes.size() && col < n; ++b) {
    int s = std::min(sizes[b], n - col);
    for (int k = 0; k < s; ++k) {
      J(col + k, col + k) = lambdas[owner[b]];
      if (k + 1 < s) J(col + k, col + k + 1) = Complex(1.0, 0.0);
    }
    per_eig_blocks.emplace_back(owner[b], s);
    col += s;
  }

  // Y with a controlled condition number via an SVD construction.
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix raw(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) raw(i, j) = Complex(gauss(rng), gauss(rng));
  Eigen::JacobiSVD<ComplexMatrix> svd(raw, Eigen::ComputeFullU | Eigen::ComputeFullV);
  std::uniform_real_distribution<double> logc(0.0, std::log(cfg.cond_max));
  double cond = std::exp(logc(rng));
  Eigen::VectorXd sing(n);
  for (int i = 0; i < n; ++i)
    sing(i) = std::pow(cond, -static_cast<double>(i) / std::max(1, n - 1));
  ComplexMatrix Y = svd.matrixU() * sing.asDiagonal() * svd.matrixV().adjoint();

  Planted out;
  out.Y = Y;
  out.cond_Y = cond;
  out.A = Y * J * Y.partialPivLu().solve(ComplexMatrix::Identity(n, n));

  for (int e = 0; e < n_eigs; ++e) {
    PlantedRecord rec{lambdas[e], 0, 0, 0};
    for (const auto& [own, s] : per_eig_blocks) {
      if (own != e) continue;
      rec.algebraic += s;
      rec.geometric += 1;
      rec.index = std::max(rec.index, s);
    }
    if (rec.algebraic > 0) out.records.push_back(rec);
  }
  return out;
}

/// Truncated Taylor series for exp; the series oracle, kept away from the
/// decomposition code path.
inline ComplexMatrix expm_taylor(const ComplexMatrix& A, int terms = 60) {
  const int n = static_cast<int>(A.rows());
  ComplexMatrix sum = ComplexMatrix::Identity(n, n);
  ComplexMatrix term = ComplexMatrix::Identity(n, n);
  for (int k = 1; k <= terms; ++k) {
    term = term * A / static_cast<double>(k);
    sum += term;
  }
  return sum;
}

inline ComplexMatrix matrix_power_bruteforce(const ComplexMatrix& A, int L) {
  ComplexMatrix P = ComplexMatrix::Identity(A.rows(), A.cols());
  for (int k = 0; k < L; ++k) P = P * A;
  return P;
}

}  // namespace testsupport
