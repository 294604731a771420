#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace meromat {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// One clustered eigenvalue together with its multiplicities and index.
struct EigenvalueRecord {
  Complex lambda{0.0, 0.0};
  int algebraic = 0;  // cluster size a
  int geometric = 0;  // dim ker(A - lambda I)
  int index = 0;      // size of the largest Jordan block
};

struct Spectrum {
  std::vector<EigenvalueRecord> records;
  double cluster_tolerance = 0.0;
  int dim = 0;

  /// Index of the record within `tol` of lambda, or -1. Negative tol means
  /// "use the cluster tolerance".
  int find(Complex lambda, double tol = -1.0) const;

  /// Index of the zero-eigenvalue record, or -1 when the matrix is nonsingular.
  int zero_index() const { return find(Complex(0.0, 0.0)); }

  double spectral_radius() const;
  bool diagonalizable() const;
};

struct JordanBlock {
  Complex lambda{0.0, 0.0};
  int size = 0;
};

/// Columns of Y are right (generalized) eigenvectors in chain order; rows of
/// Yinv are the dual left vectors, reverse-ordered within each block.
struct JordanBasis {
  ComplexMatrix Y;
  ComplexMatrix Yinv;
  std::vector<JordanBlock> blocks;
  double cluster_tolerance = 0.0;

  ComplexMatrix jordan_form() const;
};

struct Residuals {
  double completeness = 0.0;      // ||sum_l A_l - I||_F
  double orthogonality = 0.0;     // worst companion-product defect
  double dunford_sum = 0.0;       // ||A - (D + N)||_F
  double dunford_commute = 0.0;   // ||DN - ND||_F
  double nilpotency = 0.0;        // worst ||A_l (A - l I)^{nu}||_F
  double companion_scale = 1.0;   // largest companion norm; validation gates
                                  // compare residuals against threshold * scale

  double max() const;
};

/// The full family {A_{lambda,m}} for a matrix, immutable after construction.
/// companions[i][m] is A_{lambda_i, m}; companions[i][0] is the projector.
struct SpectralDecomposition {
  ComplexMatrix source;
  Spectrum spectrum;
  std::vector<std::vector<ComplexMatrix>> companions;
  Residuals residuals;

  int dim() const { return static_cast<int>(source.rows()); }

  const ComplexMatrix& projector(int record) const { return companions[record][0]; }
  const ComplexMatrix& companion(int record, int m) const { return companions[record][m]; }

  /// Projector onto the zero eigenspace; the zero matrix when 0 is not an
  /// eigenvalue.
  ComplexMatrix zero_projector() const;

  /// Diagonalizable part D = sum lambda A_lambda.
  ComplexMatrix diagonalizable_part() const;
  /// Nilpotent part N = sum A_{lambda,1}.
  ComplexMatrix nilpotent_part() const;
};

}  // namespace meromat
