#pragma once

#include <functional>
#include <string>
#include <vector>

#include "meromat/types.hpp"

namespace meromat {

/// Laurent coefficients of a scalar function about one eigenvalue: coeffs[m]
/// multiplies the companion A_{lambda,m}.
struct LaurentData {
  Complex lambda{0.0, 0.0};
  std::vector<Complex> coeffs;
};

struct LocalFunctionData {
  std::vector<LaurentData> entries;
};

/// Scalar function presented through its derivatives: derivatives(z, out)
/// fills f(z), f'(z), ..., f^(k)(z) for k + 1 = out.size(). singular_at may be
/// empty for entire functions.
struct HolomorphicFunction {
  std::string name;
  std::function<void(Complex, std::vector<Complex>&)> derivatives;
  std::function<bool(Complex)> singular_at;
};

HolomorphicFunction exp_function(double time_scale = 1.0);
HolomorphicFunction log_function();  // principal branch, arg in (-pi, pi]
HolomorphicFunction identity_function();
HolomorphicFunction constant_function(Complex value);
HolomorphicFunction polynomial_function(std::vector<Complex> coeffs);

/// f(A) = sum_l sum_{m < nu_l} c_m^(l) A_{l,m} from user-supplied Laurent data.
ComplexMatrix apply_meromorphic(const SpectralDecomposition& decomp,
                                const LocalFunctionData& fdata);

/// f(A) with c_m = f^(m)(lambda) / m!; requires f holomorphic at the spectrum.
ComplexMatrix apply_holomorphic(const SpectralDecomposition& decomp,
                                const HolomorphicFunction& f);

/// A^L for any complex L, including negative and non-integer powers of
/// singular matrices. Non-integer powers use the principal branch.
ComplexMatrix matrix_power(const SpectralDecomposition& decomp, Complex L);

/// Drazin inverse via (I - A_0)(A + c A_0)^{-1}. The default c is
/// spectral_radius + 1; any nonzero c gives the same result.
ComplexMatrix drazin(const SpectralDecomposition& decomp);
ComplexMatrix drazin(const SpectralDecomposition& decomp, Complex c);

/// Integral of exp(t L) over [0, tau]: the transient part through the Drazin
/// inverse plus polynomial terms from the zero eigenspace.
ComplexMatrix exp_integral(const SpectralDecomposition& decomp, double tau);

/// Z = (I - T + T_1)^{-1} for a row-stochastic T with its stationary
/// projector T_1.
ComplexMatrix fundamental_matrix(const ComplexMatrix& T,
                                 const SpectralDecomposition& decompT);

/// binom(L, m) by the product formula; binom(L, 0) = 1.
Complex generalized_binomial(Complex L, int m);

}  // namespace meromat
