#pragma once

#include <cmath>
#include <complex>
#include <utility>

#include <Eigen/Dense>

#include "meromat/errors.hpp"

namespace meromat {

struct QuadratureOptions {
  double abs_tolerance = 1e-10;
  int max_depth = 40;
};

namespace detail {

inline double quad_norm(double x) { return std::abs(x); }
inline double quad_norm(const std::complex<double>& x) { return std::abs(x); }
template <class Derived>
double quad_norm(const Eigen::MatrixBase<Derived>& x) {
  return x.norm();
}

// 15-point Kronrod rule with the embedded 7-point Gauss rule.
inline constexpr double kGK15Nodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kGK15KronrodW[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kGK15GaussW[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
auto gk15(F&& f, double a, double b, double& err) -> decltype(f(a)) {
  using Value = decltype(f(a));
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);

  Value fc = f(mid);
  Value kronrod = kGK15KronrodW[7] * fc;
  Value gauss = kGK15GaussW[3] * fc;
  for (int i = 0; i < 7; ++i) {
    Value lo = f(mid - half * kGK15Nodes[i]);
    Value hi = f(mid + half * kGK15Nodes[i]);
    kronrod += kGK15KronrodW[i] * (lo + hi);
    if (i % 2 == 1) gauss += kGK15GaussW[i / 2] * (lo + hi);
  }
  kronrod *= half;
  gauss *= half;
  err = quad_norm(kronrod - gauss);
  return kronrod;
}

template <class F>
auto gk_adaptive(F&& f, double a, double b, double tol, int depth)
    -> decltype(f(a)) {
  double err = 0.0;
  auto whole = gk15(f, a, b, err);
  if (err <= tol || b - a < 1e-14 * (std::abs(a) + std::abs(b) + 1.0)) return whole;
  if (depth <= 0)
    fail(ErrorKind::QuadratureFailure,
         "adaptive quadrature did not reach the requested tolerance");
  double mid = 0.5 * (a + b);
  return gk_adaptive(f, a, mid, 0.5 * tol, depth - 1) +
         gk_adaptive(f, mid, b, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration to an absolute tolerance. Works for
/// scalar, complex, and dense-matrix integrands.
template <class F>
auto adaptive_gauss_kronrod(F&& f, double a, double b, const QuadratureOptions& opts = {})
    -> decltype(f(a)) {
  if (!(b >= a)) fail(ErrorKind::InvalidArgument, "integration bounds are reversed");
  if (a == b) {
    auto v = f(a);
    return 0.0 * v;
  }
  return detail::gk_adaptive(std::forward<F>(f), a, b, opts.abs_tolerance, opts.max_depth);
}

}  // namespace meromat
