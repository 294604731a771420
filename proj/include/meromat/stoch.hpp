#pragma once

#include <functional>

#include "meromat/quadrature.hpp"
#include "meromat/types.hpp"

namespace meromat {

/// Row-stochastic transition matrix; validated on construction.
class StochasticMatrix {
public:
  static StochasticMatrix from(const ComplexMatrix& T, double tol = 1e-12);

  const ComplexMatrix& matrix() const { return T_; }
  int dim() const { return static_cast<int>(T_.rows()); }

private:
  explicit StochasticMatrix(ComplexMatrix T) : T_(std::move(T)) {}
  ComplexMatrix T_;
};

/// Row-sum-zero rate matrix with nonnegative off-diagonal entries. With
/// allow_leak, rows may sum to a negative value: probability escaping a
/// truncated state space, as in the truncated counting generator.
class RateMatrix {
public:
  static RateMatrix from(const ComplexMatrix& G, double tol = 1e-12,
                         bool allow_leak = false);

  const ComplexMatrix& matrix() const { return G_; }
  int dim() const { return static_cast<int>(G_.rows()); }

private:
  explicit RateMatrix(ComplexMatrix G) : G_(std::move(G)) {}
  ComplexMatrix G_;
};

/// Per-state values of a diagonal observable.
using Observable = ComplexVector;

bool is_irreducible(const ComplexMatrix& T);

/// Stationary distribution from the projector at the stationary eigenvalue
/// (1 for a stochastic matrix, 0 for a rate matrix).
RealVector stationary_distribution(const StochasticMatrix& T,
                                   const SpectralDecomposition& decomp);
RealVector stationary_distribution(const RateMatrix& G,
                                   const SpectralDecomposition& decomp);

/// Truncated counting generator: -r on the diagonal, r on the first
/// superdiagonal, (N+1)x(N+1). The final row leaks the probability of counts
/// beyond the truncation.
RateMatrix poisson_generator(int N, double r);

/// exp(t G) for the truncated counting generator, evaluated through the
/// functional calculus. Entry (i, i+n) is the probability of n increments.
ComplexMatrix poisson_transition(int N, double r, double t);

/// Time-varying rate: the transition operator equals the homogeneous one at
/// the average rate over [t0, tf].
ComplexMatrix inhomogeneous_poisson_transition(int N,
                                               const std::function<double(double)>& rate,
                                               double t0, double tf,
                                               const QuadratureOptions& quad = {});

/// kappa = -<A G^D B>_ss, the integrated centered cross-correlation. B
/// defaults to A.
Complex green_kubo(const RateMatrix& G, const SpectralDecomposition& decomp,
                   const Observable& A, const Observable* B = nullptr);

/// kappa = -sum_{l != 0} (1/l) <A G_l A>_ss; requires a diagonalizable rate
/// matrix.
Complex green_kubo_eigen_expansion(const RateMatrix& G,
                                   const SpectralDecomposition& decomp,
                                   const Observable& A);

}  // namespace meromat
