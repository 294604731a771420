#pragma once

#include "meromat/types.hpp"

namespace meromat {

struct SpectralOptions {
  double cluster_tolerance = 0.0;   // 0 selects the automatic tolerance
  double rank_safety = 100.0;       // rank threshold = sigma_max * dim * eps * rank_safety
  double invariant_threshold = 1e-6;
};

/// Cluster the numerical eigenvalues of A and attach multiplicities and index
/// to each cluster. A zero tolerance selects dim * eps^(1/5) * max(1, rho)
/// where rho is the raw spectral radius.
Spectrum compute_spectrum(const ComplexMatrix& A, double cluster_tolerance = 0.0,
                          double rank_safety = 100.0);

/// Build a Jordan basis: chain heads are taken from the null-space filtration
/// of (A - lambda I), descendants by repeated application, and the left
/// vectors by inverting Y so the chain duality holds by construction.
JordanBasis jordan_basis(const ComplexMatrix& A, const Spectrum& spectrum,
                         double rank_safety = 100.0);

/// Assemble projectors and nilpotent companions from a Jordan basis, with
/// residual norms attached. Throws InvariantViolation when a residual exceeds
/// `invariant_threshold`.
SpectralDecomposition eigenprojectors(const ComplexMatrix& A, const JordanBasis& basis,
                                      double invariant_threshold = 1e-6);

/// Product-formula projector for an index-one eigenvalue; no Jordan basis
/// required.
ComplexMatrix index_one_projector(const ComplexMatrix& A, const Spectrum& spectrum,
                                  Complex lambda);

/// R(z; A) = sum_l sum_m (z - l)^{-(m+1)} A_{l,m}.
ComplexMatrix resolvent(const SpectralDecomposition& decomp, Complex z);

/// Trapezoidal contour quadrature of (z - lambda)^m R(z; A) on a circle around
/// lambda. Independent of the projector pipeline: direct linear solves only.
ComplexMatrix contour_projector_oracle(const ComplexMatrix& A, Complex lambda,
                                       double radius, int n_points, int m = 0);

/// One-call decomposition. Uses the index-one product route when at most one
/// eigenvalue is defective and the spectrum is small, the Jordan route
/// otherwise; falls back to the Jordan route if residuals disqualify the
/// shortcut.
SpectralDecomposition decompose(const ComplexMatrix& A, const SpectralOptions& opts = {});

/// Decomposition of shift*I + scale*A derived without recomputation:
/// projectors are unchanged, companions pick up scale^m.
SpectralDecomposition affine_map(const SpectralDecomposition& decomp, Complex shift,
                                 Complex scale);

}  // namespace meromat
