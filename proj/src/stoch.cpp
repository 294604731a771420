#include "meromat/stoch.hpp"

#include <cmath>
#include <vector>

#include "meromat/errors.hpp"
#include "meromat/funcalc.hpp"
#include "meromat/spectral.hpp"

namespace meromat {

namespace {

void require_real_entries(const ComplexMatrix& M, double tol, ErrorKind kind,
                          const char* what) {
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j)
      if (std::abs(M(i, j).imag()) > tol)
        fail(kind, std::string(what) + " must have real entries");
}

RealVector stationary_from_projector(const ComplexMatrix& P) {
  const int n = static_cast<int>(P.rows());
  // Every row of the stationary projector equals pi; average them.
  ComplexVector pi_c = P.colwise().mean();
  RealVector pi(n);
  double sum = 0.0;
  for (int j = 0; j < n; ++j) {
    if (std::abs(pi_c(j).imag()) > 1e-8 || pi_c(j).real() < -1e-8)
      fail(ErrorKind::InvariantViolation,
           "stationary projector does not encode a probability distribution");
    pi(j) = std::max(0.0, pi_c(j).real());
    sum += pi(j);
  }
  if (sum <= 0.0)
    fail(ErrorKind::InvariantViolation, "stationary distribution has zero mass");
  return pi / sum;
}

RealVector stationary_at(const SpectralDecomposition& decomp,
                         Complex stationary_eigenvalue) {
  int idx = decomp.spectrum.find(stationary_eigenvalue);
  if (idx < 0)
    fail(ErrorKind::StationaryEigenvalueMissing,
         "the stationary eigenvalue is not in the spectrum");
  const auto& rec = decomp.spectrum.records[idx];
  if (rec.algebraic > 1)
    fail(ErrorKind::NonUniqueStationary,
         "stationary eigenvalue has algebraic multiplicity " +
             std::to_string(rec.algebraic));
  return stationary_from_projector(decomp.projector(idx));
}

}  // namespace

StochasticMatrix StochasticMatrix::from(const ComplexMatrix& T, double tol) {
  if (T.rows() != T.cols() || T.rows() < 1)
    fail(ErrorKind::NonSquare, "stochastic matrix must be square");
  if (!T.allFinite()) fail(ErrorKind::NonFinite, "stochastic matrix has NaN or Inf");
  require_real_entries(T, tol, ErrorKind::NotStochastic, "a stochastic matrix");
  for (int i = 0; i < T.rows(); ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < T.cols(); ++j) {
      if (T(i, j).real() < -tol)
        fail(ErrorKind::NotStochastic, "negative entry at (" + std::to_string(i) + "," +
                                           std::to_string(j) + ")");
      row_sum += T(i, j).real();
    }
    if (std::abs(row_sum - 1.0) > tol)
      fail(ErrorKind::NotStochastic,
           "row " + std::to_string(i) + " sums to " + std::to_string(row_sum));
  }
  return StochasticMatrix(T);
}

RateMatrix RateMatrix::from(const ComplexMatrix& G, double tol, bool allow_leak) {
  if (G.rows() != G.cols() || G.rows() < 1)
    fail(ErrorKind::NonSquare, "rate matrix must be square");
  if (!G.allFinite()) fail(ErrorKind::NonFinite, "rate matrix has NaN or Inf");
  require_real_entries(G, tol, ErrorKind::NotRateMatrix, "a rate matrix");
  for (int i = 0; i < G.rows(); ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < G.cols(); ++j) {
      if (i != j && G(i, j).real() < -tol)
        fail(ErrorKind::NotRateMatrix, "negative off-diagonal entry at (" +
                                           std::to_string(i) + "," + std::to_string(j) +
                                           ")");
      row_sum += G(i, j).real();
    }
    double slack = tol * std::max(1.0, G.cwiseAbs().maxCoeff());
    bool ok = allow_leak ? row_sum <= slack : std::abs(row_sum) <= slack;
    if (!ok)
      fail(ErrorKind::NotRateMatrix,
           "row " + std::to_string(i) + " sums to " + std::to_string(row_sum));
  }
  return RateMatrix(G);
}

bool is_irreducible(const ComplexMatrix& T) {
  const int n = static_cast<int>(T.rows());
  auto reaches_all = [&](bool transpose) {
    std::vector<bool> seen(n, false);
    std::vector<int> stack{0};
    seen[0] = true;
    int count = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < n; ++v) {
        double w = transpose ? std::abs(T(v, u)) : std::abs(T(u, v));
        if (w > 0.0 && !seen[v]) {
          seen[v] = true;
          ++count;
          stack.push_back(v);
        }
      }
    }
    return count == n;
  };
  return reaches_all(false) && reaches_all(true);
}

RealVector stationary_distribution(const StochasticMatrix& T,
                                   const SpectralDecomposition& decomp) {
  return stationary_at(decomp, Complex(1.0, 0.0));
}

RealVector stationary_distribution(const RateMatrix& G,
                                   const SpectralDecomposition& decomp) {
  return stationary_at(decomp, Complex(0.0, 0.0));
}

RateMatrix poisson_generator(int N, double r) {
  if (N < 1) fail(ErrorKind::InvalidArgument, "count truncation N must be at least 1");
  if (!(r > 0.0) || !std::isfinite(r))
    fail(ErrorKind::InvalidRate, "rate must be positive and finite");
  ComplexMatrix G = ComplexMatrix::Zero(N + 1, N + 1);
  for (int i = 0; i <= N; ++i) {
    G(i, i) = Complex(-r, 0.0);
    if (i < N) G(i, i + 1) = Complex(r, 0.0);
  }
  // The final row keeps only its diagonal: counts beyond N leak out.
  return RateMatrix::from(G, 1e-12, /*allow_leak=*/true);
}

ComplexMatrix poisson_transition(int N, double r, double t) {
  if (t < 0.0 || !std::isfinite(t))
    fail(ErrorKind::InvalidArgument, "duration must be nonnegative and finite");
  if (t == 0.0) return ComplexMatrix::Identity(N + 1, N + 1);
  RateMatrix G = poisson_generator(N, r);
  SpectralDecomposition decomp = decompose(G.matrix());
  return apply_holomorphic(decomp, exp_function(t));
}

ComplexMatrix inhomogeneous_poisson_transition(int N,
                                               const std::function<double(double)>& rate,
                                               double t0, double tf,
                                               const QuadratureOptions& quad) {
  if (!(tf >= t0)) fail(ErrorKind::InvalidArgument, "need tf >= t0");
  if (tf == t0) return ComplexMatrix::Identity(N + 1, N + 1);

  auto guarded = [&rate](double t) {
    double v = rate(t);
    if (!std::isfinite(v) || v < -1e-12)
      fail(ErrorKind::NegativeRate,
           "rate function is negative or nonfinite at t = " + std::to_string(t));
    return std::max(0.0, v);
  };
  double integral = adaptive_gauss_kronrod(guarded, t0, tf, quad);
  double dt = tf - t0;
  double mean_rate = integral / dt;
  if (mean_rate <= 0.0) return ComplexMatrix::Identity(N + 1, N + 1);
  return poisson_transition(N, mean_rate, dt);
}

Complex green_kubo(const RateMatrix& G, const SpectralDecomposition& decomp,
                   const Observable& A, const Observable* B) {
  const int n = G.dim();
  const Observable& Bv = B ? *B : A;
  if (A.size() != n || Bv.size() != n)
    fail(ErrorKind::InvalidArgument, "observable length must match the state count");

  RealVector pi = stationary_distribution(G, decomp);
  ComplexMatrix GD = drazin(decomp);
  ComplexVector right = GD * (Bv.asDiagonal() * ComplexVector::Ones(n));
  ComplexVector left = A.asDiagonal() * right;
  Complex kappa(0.0, 0.0);
  for (int i = 0; i < n; ++i) kappa += pi(i) * left(i);
  return -kappa;
}

Complex green_kubo_eigen_expansion(const RateMatrix& G,
                                   const SpectralDecomposition& decomp,
                                   const Observable& A) {
  const int n = G.dim();
  if (A.size() != n)
    fail(ErrorKind::InvalidArgument, "observable length must match the state count");
  if (!decomp.spectrum.diagonalizable())
    fail(ErrorKind::NotDiagonalizable,
         "the eigen-expansion form requires a diagonalizable rate matrix");

  RealVector pi = stationary_distribution(G, decomp);
  ComplexVector Aones = A.asDiagonal() * ComplexVector::Ones(n);
  Complex kappa(0.0, 0.0);
  for (std::size_t i = 0; i < decomp.companions.size(); ++i) {
    Complex lambda = decomp.spectrum.records[i].lambda;
    if (std::abs(lambda) <= decomp.spectrum.cluster_tolerance) continue;
    ComplexVector w = A.asDiagonal() * (decomp.projector(i) * Aones);
    Complex elem(0.0, 0.0);
    for (int j = 0; j < n; ++j) elem += pi(j) * w(j);
    kappa += elem / lambda;
  }
  return -kappa;
}

}  // namespace meromat
