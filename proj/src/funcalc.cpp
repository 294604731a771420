#include "meromat/funcalc.hpp"

#include <Eigen/LU>

#include <cmath>
#include <sstream>

#include "meromat/errors.hpp"

namespace meromat {

namespace {

constexpr double kIntegerTol = 1e-12;

bool nearly_integer(Complex L, long long& out) {
  if (std::abs(L.imag()) > kIntegerTol) return false;
  double r = std::round(L.real());
  if (std::abs(L.real() - r) > kIntegerTol) return false;
  out = static_cast<long long>(r);
  return true;
}

// Integer powers by repeated multiplication; keeps real eigenvalues free of
// spurious imaginary parts that exp/log round trips would introduce.
Complex cpow_int(Complex z, long long k) {
  if (k < 0) return 1.0 / cpow_int(z, -k);
  Complex acc(1.0, 0.0);
  Complex base = z;
  while (k > 0) {
    if (k & 1) acc *= base;
    base *= base;
    k >>= 1;
  }
  return acc;
}

Complex cpow(Complex z, Complex w) {
  long long k;
  if (nearly_integer(w, k)) return cpow_int(z, k);
  return std::pow(z, w);
}

std::string format_complex(Complex z) {
  std::ostringstream os;
  os << z.real();
  if (z.imag() != 0.0) os << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

}  // namespace

HolomorphicFunction exp_function(double time_scale) {
  HolomorphicFunction f;
  f.name = time_scale == 1.0 ? "exp" : "exp(" + std::to_string(time_scale) + " z)";
  f.derivatives = [time_scale](Complex z, std::vector<Complex>& out) {
    Complex v = std::exp(time_scale * z);
    Complex factor(1.0, 0.0);
    for (auto& o : out) {
      o = factor * v;
      factor *= time_scale;
    }
  };
  return f;
}

HolomorphicFunction log_function() {
  HolomorphicFunction f;
  f.name = "log";
  f.derivatives = [](Complex z, std::vector<Complex>& out) {
    out[0] = std::log(z);
    // d^m/dz^m log z = (-1)^(m-1) (m-1)! / z^m
    Complex deriv = 1.0 / z;
    for (std::size_t m = 1; m < out.size(); ++m) {
      out[m] = deriv;
      deriv *= -static_cast<double>(m) / z;
    }
  };
  f.singular_at = [](Complex z) { return std::abs(z) < 1e-12; };
  return f;
}

HolomorphicFunction identity_function() {
  HolomorphicFunction f;
  f.name = "identity";
  f.derivatives = [](Complex z, std::vector<Complex>& out) {
    out[0] = z;
    if (out.size() > 1) out[1] = Complex(1.0, 0.0);
    for (std::size_t m = 2; m < out.size(); ++m) out[m] = Complex(0.0, 0.0);
  };
  return f;
}

HolomorphicFunction constant_function(Complex value) {
  HolomorphicFunction f;
  f.name = "constant";
  f.derivatives = [value](Complex, std::vector<Complex>& out) {
    out[0] = value;
    for (std::size_t m = 1; m < out.size(); ++m) out[m] = Complex(0.0, 0.0);
  };
  return f;
}

HolomorphicFunction polynomial_function(std::vector<Complex> coeffs) {
  HolomorphicFunction f;
  f.name = "polynomial";
  f.derivatives = [coeffs](Complex z, std::vector<Complex>& out) {
    for (std::size_t m = 0; m < out.size(); ++m) {
      // m-th derivative: sum_k k!/(k-m)! c_k z^(k-m)
      Complex acc(0.0, 0.0);
      Complex zp(1.0, 0.0);
      for (std::size_t k = m; k < coeffs.size(); ++k) {
        double fall = 1.0;
        for (std::size_t j = 0; j < m; ++j) fall *= static_cast<double>(k - j);
        acc += fall * coeffs[k] * zp;
        zp *= z;
      }
      out[m] = acc;
    }
  };
  return f;
}

ComplexMatrix apply_meromorphic(const SpectralDecomposition& decomp,
                                const LocalFunctionData& fdata) {
  const int n = decomp.dim();
  const double tol = decomp.spectrum.cluster_tolerance;
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (std::size_t i = 0; i < decomp.companions.size(); ++i) {
    const auto& rec = decomp.spectrum.records[i];
    const LaurentData* match = nullptr;
    double best = tol;
    for (const auto& entry : fdata.entries) {
      double d = std::abs(entry.lambda - rec.lambda);
      if (d <= best) {
        match = &entry;
        best = d;
      }
    }
    if (!match)
      fail(ErrorKind::MissingEigenvalueData,
           "no Laurent data for eigenvalue " + format_complex(rec.lambda));
    if (static_cast<int>(match->coeffs.size()) < rec.index)
      fail(ErrorKind::InsufficientLaurentDepth,
           "eigenvalue " + format_complex(rec.lambda) + " has index " +
               std::to_string(rec.index) + " but only " +
               std::to_string(match->coeffs.size()) + " coefficients were supplied");
    for (int m = 0; m < rec.index; ++m) out += match->coeffs[m] * decomp.companions[i][m];
  }
  return out;
}

ComplexMatrix apply_holomorphic(const SpectralDecomposition& decomp,
                                const HolomorphicFunction& f) {
  LocalFunctionData fdata;
  for (const auto& rec : decomp.spectrum.records) {
    if (f.singular_at && f.singular_at(rec.lambda))
      fail(ErrorKind::FunctionSingularAtEigenvalue,
           f.name + " is singular at eigenvalue " + format_complex(rec.lambda) +
               "; supply explicit Laurent data through apply_meromorphic");
    std::vector<Complex> derivs(rec.index);
    f.derivatives(rec.lambda, derivs);
    LaurentData entry;
    entry.lambda = rec.lambda;
    entry.coeffs.resize(rec.index);
    double factorial = 1.0;
    for (int m = 0; m < rec.index; ++m) {
      if (m > 0) factorial *= m;
      entry.coeffs[m] = derivs[m] / factorial;
    }
    fdata.entries.push_back(std::move(entry));
  }
  return apply_meromorphic(decomp, fdata);
}

Complex generalized_binomial(Complex L, int m) {
  Complex acc(1.0, 0.0);
  for (int n = 1; n <= m; ++n) acc *= (L - static_cast<double>(n - 1)) / static_cast<double>(n);
  return acc;
}

ComplexMatrix matrix_power(const SpectralDecomposition& decomp, Complex L) {
  const int n = decomp.dim();
  const double tol = decomp.spectrum.cluster_tolerance;
  ComplexMatrix out = ComplexMatrix::Zero(n, n);

  long long L_int = 0;
  const bool integer_L = nearly_integer(L, L_int);

  for (std::size_t i = 0; i < decomp.companions.size(); ++i) {
    const auto& rec = decomp.spectrum.records[i];
    if (std::abs(rec.lambda) <= tol) {
      // Zero eigenspace: only an exact integer L = m survives the residue,
      // and A_0 A^m is the stored companion.
      if (integer_L && L_int >= 0 && L_int < rec.index)
        out += decomp.companions[i][static_cast<int>(L_int)];
      continue;
    }
    for (int m = 0; m < rec.index; ++m) {
      Complex coeff = generalized_binomial(L, m) * cpow(rec.lambda, L - static_cast<double>(m));
      out += coeff * decomp.companions[i][m];
    }
  }
  return out;
}

ComplexMatrix drazin(const SpectralDecomposition& decomp) {
  return drazin(decomp, Complex(decomp.spectrum.spectral_radius() + 1.0, 0.0));
}

ComplexMatrix drazin(const SpectralDecomposition& decomp, Complex c) {
  if (c == Complex(0.0, 0.0)) fail(ErrorKind::ZeroC, "Drazin shift c must be nonzero");
  const int n = decomp.dim();
  const ComplexMatrix A0 = decomp.zero_projector();
  const ComplexMatrix I = ComplexMatrix::Identity(n, n);
  ComplexMatrix shifted = decomp.source + c * A0;
  ComplexMatrix inv = shifted.partialPivLu().solve(I);
  if (!inv.allFinite())
    fail(ErrorKind::InvariantViolation,
         "(A + c A_0) is numerically singular; the zero projector is inconsistent");
  return (I - A0) * inv;
}

ComplexMatrix exp_integral(const SpectralDecomposition& decomp, double tau) {
  if (!std::isfinite(tau)) fail(ErrorKind::InvalidArgument, "tau must be finite");
  const int n = decomp.dim();
  ComplexMatrix out = ComplexMatrix::Zero(n, n);

  int zi = decomp.spectrum.zero_index();
  if (zi >= 0) {
    double coeff = tau;  // tau^(m+1) / (m+1)!
    for (int m = 0; m < decomp.spectrum.records[zi].index; ++m) {
      out += coeff * decomp.companions[zi][m];
      coeff *= tau / static_cast<double>(m + 2);
    }
  }
  ComplexMatrix etL = apply_holomorphic(decomp, exp_function(tau));
  out += drazin(decomp) * (etL - ComplexMatrix::Identity(n, n));
  return out;
}

ComplexMatrix fundamental_matrix(const ComplexMatrix& T,
                                 const SpectralDecomposition& decompT) {
  const int n = static_cast<int>(T.rows());
  if (T.rows() != T.cols() || decompT.dim() != n)
    fail(ErrorKind::NonSquare, "stochastic matrix and decomposition sizes disagree");
  for (int i = 0; i < n; ++i) {
    Complex row_sum(0.0, 0.0);
    for (int j = 0; j < n; ++j) {
      Complex v = T(i, j);
      if (std::abs(v.imag()) > 1e-12 || v.real() < -1e-12)
        fail(ErrorKind::NotStochastic, "entries must be real and nonnegative");
      row_sum += v;
    }
    if (std::abs(row_sum - 1.0) > 1e-9)
      fail(ErrorKind::NotStochastic, "row " + std::to_string(i) + " sums to " +
                                         format_complex(row_sum));
  }

  int one = decompT.spectrum.find(Complex(1.0, 0.0));
  if (one < 0)
    fail(ErrorKind::StationaryEigenvalueMissing,
         "1 is not an eigenvalue of the decomposed matrix");
  if (decompT.spectrum.records[one].index != 1)
    fail(ErrorKind::InvariantViolation, "the stationary eigenvalue is defective");

  const ComplexMatrix I = ComplexMatrix::Identity(n, n);
  ComplexMatrix Z = (I - T + decompT.projector(one)).partialPivLu().solve(I);
  if (!Z.allFinite())
    fail(ErrorKind::InvariantViolation, "I - T + T_1 is numerically singular");
  return Z;
}

}  // namespace meromat
