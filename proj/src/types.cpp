#include "meromat/types.hpp"

#include <algorithm>

namespace meromat {

int Spectrum::find(Complex lambda, double tol) const {
  if (tol < 0.0) tol = cluster_tolerance;
  int best = -1;
  double best_dist = tol;
  for (int i = 0; i < static_cast<int>(records.size()); ++i) {
    double d = std::abs(records[i].lambda - lambda);
    if (d <= best_dist) {
      best = i;
      best_dist = d;
    }
  }
  return best;
}

double Spectrum::spectral_radius() const {
  double rho = 0.0;
  for (const auto& rec : records) rho = std::max(rho, std::abs(rec.lambda));
  return rho;
}

bool Spectrum::diagonalizable() const {
  return std::all_of(records.begin(), records.end(),
                     [](const EigenvalueRecord& r) { return r.index == 1; });
}

ComplexMatrix JordanBasis::jordan_form() const {
  const int n = static_cast<int>(Y.rows());
  ComplexMatrix J = ComplexMatrix::Zero(n, n);
  int col = 0;
  for (const auto& block : blocks) {
    for (int k = 0; k < block.size; ++k) {
      J(col + k, col + k) = block.lambda;
      if (k + 1 < block.size) J(col + k, col + k + 1) = Complex(1.0, 0.0);
    }
    col += block.size;
  }
  return J;
}

double Residuals::max() const {
  return std::max({completeness, orthogonality, dunford_sum, dunford_commute, nilpotency});
}

ComplexMatrix SpectralDecomposition::zero_projector() const {
  int zi = spectrum.zero_index();
  if (zi < 0) return ComplexMatrix::Zero(dim(), dim());
  return companions[zi][0];
}

ComplexMatrix SpectralDecomposition::diagonalizable_part() const {
  ComplexMatrix D = ComplexMatrix::Zero(dim(), dim());
  for (std::size_t i = 0; i < companions.size(); ++i)
    D += spectrum.records[i].lambda * companions[i][0];
  return D;
}

ComplexMatrix SpectralDecomposition::nilpotent_part() const {
  ComplexMatrix N = ComplexMatrix::Zero(dim(), dim());
  for (const auto& fam : companions)
    if (fam.size() > 1) N += fam[1];
  return N;
}

}  // namespace meromat
