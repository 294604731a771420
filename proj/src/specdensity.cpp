#include "meromat/specdensity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "meromat/errors.hpp"

namespace meromat {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double omega) {
  omega = std::fmod(omega, kTwoPi);
  if (omega < 0.0) omega += kTwoPi;
  return omega;
}

// Scalar weights c_{l,m} = <pi| conj(Omega) A_{l,m} Omega |1>. Plain bilinear
// products; no implicit conjugation of the stationary row.
std::vector<std::vector<Complex>> mode_weights(const SpectralDecomposition& decomp,
                                               const RealVector& pi,
                                               const ComplexMatrix& Omega) {
  const int n = decomp.dim();
  ComplexVector right = Omega * ComplexVector::Ones(n);
  Eigen::RowVectorXcd left = pi.cast<Complex>().transpose() * Omega.conjugate();
  std::vector<std::vector<Complex>> weights(decomp.companions.size());
  for (std::size_t i = 0; i < decomp.companions.size(); ++i) {
    weights[i].resize(decomp.companions[i].size());
    for (std::size_t m = 0; m < decomp.companions[i].size(); ++m)
      weights[i][m] = (left * (decomp.companions[i][m] * right)).value();
  }
  return weights;
}

// In-place radix-2 decimation-in-time FFT.
void fft_pow2(std::vector<Complex>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    double angle = -kTwoPi / static_cast<double>(len);
    Complex wl = std::polar(1.0, angle);
    for (std::size_t i = 0; i < n; i += len) {
      Complex w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        Complex u = a[i + k];
        Complex v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

}  // namespace

HiddenMarkovModel make_hmm(StochasticMatrix T, ComplexVector means,
                           RealVector second_moments,
                           std::optional<EmissionSpec> emissions) {
  const int n = T.dim();
  if (means.size() != n || second_moments.size() != n)
    fail(ErrorKind::InvalidArgument,
         "means and second moments must have one entry per latent state");
  for (int s = 0; s < n; ++s)
    if (second_moments(s) < std::norm(means(s)) - 1e-12)
      fail(ErrorKind::InvalidArgument,
           "second moment of state " + std::to_string(s) +
               " is below the squared mean");
  if (!is_irreducible(T.matrix()))
    fail(ErrorKind::InvalidArgument,
         "latent chain is reducible; stationary analysis is not well defined");
  return HiddenMarkovModel{std::move(T), std::move(means), std::move(second_moments),
                           emissions};
}

ComplexMatrix observation_matrix(const HiddenMarkovModel& hmm) {
  return hmm.means.asDiagonal() * hmm.T.matrix();
}

Complex autocorrelation(const HiddenMarkovModel& hmm, long tau) {
  if (tau == 0) {
    SpectralDecomposition decomp = decompose(hmm.T.matrix());
    RealVector pi = stationary_distribution(hmm.T, decomp);
    double g0 = 0.0;
    for (int s = 0; s < hmm.states(); ++s) g0 += pi(s) * hmm.second_moments(s);
    return Complex(g0, 0.0);
  }
  long a = std::labs(tau);
  SpectralDecomposition decomp = decompose(hmm.T.matrix());
  RealVector pi = stationary_distribution(hmm.T, decomp);
  ComplexMatrix Omega = observation_matrix(hmm);
  ComplexVector w = Omega * ComplexVector::Ones(hmm.states());
  for (long k = 1; k < a; ++k) w = hmm.T.matrix() * w;
  Eigen::RowVectorXcd left = pi.cast<Complex>().transpose() * Omega.conjugate();
  Complex g = (left * w).value();
  return tau > 0 ? g : std::conj(g);
}

std::vector<Complex> autocorrelation_series(const HiddenMarkovModel& hmm, int max_tau) {
  if (max_tau < 0) fail(ErrorKind::InvalidArgument, "max_tau must be nonnegative");
  SpectralDecomposition decomp = decompose(hmm.T.matrix());
  RealVector pi = stationary_distribution(hmm.T, decomp);
  ComplexMatrix Omega = observation_matrix(hmm);

  std::vector<Complex> gamma(max_tau + 1);
  double g0 = 0.0;
  for (int s = 0; s < hmm.states(); ++s) g0 += pi(s) * hmm.second_moments(s);
  gamma[0] = Complex(g0, 0.0);

  ComplexVector w = Omega * ComplexVector::Ones(hmm.states());
  Eigen::RowVectorXcd left = pi.cast<Complex>().transpose() * Omega.conjugate();
  for (int tau = 1; tau <= max_tau; ++tau) {
    gamma[tau] = (left * w).value();
    w = hmm.T.matrix() * w;
  }
  return gamma;
}

PowerSpectrumResult power_spectrum(const HiddenMarkovModel& hmm,
                                   const std::vector<double>& omega_grid,
                                   const PowerSpectrumOptions& opts) {
  SpectralDecomposition decomp = decompose(hmm.T.matrix(), opts.decomposition);
  RealVector pi = stationary_distribution(hmm.T, decomp);
  ComplexMatrix Omega = observation_matrix(hmm);
  auto weights = mode_weights(decomp, pi, Omega);

  double g0 = 0.0;
  for (int s = 0; s < hmm.states(); ++s) g0 += pi(s) * hmm.second_moments(s);

  PowerSpectrumResult out;
  for (std::size_t i = 0; i < decomp.companions.size(); ++i) {
    const auto& rec = decomp.spectrum.records[i];
    if (std::abs(std::abs(rec.lambda) - 1.0) > opts.unit_circle_tolerance) continue;
    if (rec.index != 1)
      fail(ErrorKind::InvariantViolation,
           "unit-circle eigenvalue with index > 1; the discrete-line weights "
           "assume a diagonalizable unit-circle subspace");
    double weight = kTwoPi * (weights[i][0] / rec.lambda).real();
    if (std::abs(weight) > 1e-12)
      out.lines.push_back({wrap_angle(std::arg(rec.lambda)), weight});
  }

  out.omega = omega_grid;
  out.continuous.resize(omega_grid.size());
  for (std::size_t k = 0; k < omega_grid.size(); ++k) {
    Complex z = std::polar(1.0, omega_grid[k]);
    for (const auto& rec : decomp.spectrum.records)
      if (std::abs(std::abs(rec.lambda) - 1.0) <= opts.unit_circle_tolerance &&
          std::abs(z - rec.lambda) <= opts.grid_guard)
        fail(ErrorKind::GridHitsSpectralLine,
             "grid point omega = " + std::to_string(omega_grid[k]) +
                 " coincides with a spectral line");
    double p = g0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      Complex dz = z - decomp.spectrum.records[i].lambda;
      Complex denom = dz;
      for (std::size_t m = 0; m < weights[i].size(); ++m) {
        p += 2.0 * (weights[i][m] / denom).real();
        denom *= dz;
      }
    }
    out.continuous[k] = p;
  }
  return out;
}

HiddenMarkovModel theorem1_reduce(const HiddenMarkovModel& hmm) {
  RealVector collapsed(hmm.states());
  for (int s = 0; s < hmm.states(); ++s) collapsed(s) = std::norm(hmm.means(s));
  return HiddenMarkovModel{hmm.T, hmm.means, std::move(collapsed),
                           EmissionSpec{EmissionType::Deterministic}};
}

PowerSpectrumResult continuous_time_power_spectrum(const RateMatrix& G,
                                                   const SpectralDecomposition& decompG,
                                                   const ComplexMatrix& Omega,
                                                   const std::vector<double>& omega_grid,
                                                   const PowerSpectrumOptions& opts) {
  if (Omega.rows() != G.dim() || Omega.cols() != G.dim())
    fail(ErrorKind::InvalidArgument, "observation matrix size must match the generator");
  RealVector pi = stationary_distribution(G, decompG);
  auto weights = mode_weights(decompG, pi, Omega);

  PowerSpectrumResult out;
  std::vector<double> line_angles;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const auto& rec = decompG.spectrum.records[i];
    if (std::abs(rec.lambda.real()) > opts.unit_circle_tolerance) continue;
    if (rec.index != 1)
      fail(ErrorKind::InvariantViolation,
           "imaginary-axis eigenvalue with index > 1; line weights assume a "
           "diagonalizable persistent subspace");
    line_angles.push_back(rec.lambda.imag());
    double weight = kTwoPi * weights[i][0].real();
    if (std::abs(weight) > 1e-12) out.lines.push_back({rec.lambda.imag(), weight});
  }

  out.omega = omega_grid;
  out.continuous.resize(omega_grid.size());
  for (std::size_t k = 0; k < omega_grid.size(); ++k) {
    const double omega = omega_grid[k];
    for (double angle : line_angles)
      if (std::abs(omega - angle) <= opts.grid_guard)
        fail(ErrorKind::GridHitsSpectralLine,
             "grid point omega = " + std::to_string(omega) +
                 " coincides with a spectral line");
    double p = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      Complex dz = Complex(0.0, omega) - decompG.spectrum.records[i].lambda;
      Complex denom = dz;
      for (std::size_t m = 0; m < weights[i].size(); ++m) {
        p += 2.0 * (weights[i][m] / denom).real();
        denom *= dz;
      }
    }
    out.continuous[k] = p;
  }
  return out;
}

std::vector<Complex> sample_hmm(const HiddenMarkovModel& hmm, std::int64_t n,
                                std::uint64_t seed, EmissionMode mode) {
  if (n < 0) fail(ErrorKind::InvalidArgument, "series length must be nonnegative");
  bool stochastic_emission;
  switch (mode) {
    case EmissionMode::FromSampler:
      if (!hmm.emissions)
        fail(ErrorKind::MissingSampler,
             "stochastic emission requested but the model carries no sampler");
      stochastic_emission = hmm.emissions->type == EmissionType::Gaussian;
      break;
    case EmissionMode::MeansOnly:
      stochastic_emission = false;
      break;
    case EmissionMode::Auto:
    default:
      stochastic_emission =
          hmm.emissions && hmm.emissions->type == EmissionType::Gaussian;
      break;
  }

  SpectralDecomposition decomp = decompose(hmm.T.matrix());
  RealVector pi = stationary_distribution(hmm.T, decomp);
  const int ns = hmm.states();

  std::mt19937_64 rng(seed);
  std::vector<std::discrete_distribution<int>> rows;
  rows.reserve(ns);
  for (int s = 0; s < ns; ++s) {
    std::vector<double> probs(ns);
    for (int j = 0; j < ns; ++j) probs[j] = std::max(0.0, hmm.T.matrix()(s, j).real());
    rows.emplace_back(probs.begin(), probs.end());
  }
  std::discrete_distribution<int> initial(pi.data(), pi.data() + ns);
  std::normal_distribution<double> unit_normal(0.0, 1.0);

  RealVector sigma(ns);
  for (int s = 0; s < ns; ++s)
    sigma(s) = std::sqrt(std::max(0.0, hmm.second_moments(s) - std::norm(hmm.means(s))));

  std::vector<Complex> series(static_cast<std::size_t>(n));
  int state = initial(rng);
  for (std::int64_t k = 0; k < n; ++k) {
    Complex x = hmm.means(state);
    if (stochastic_emission) x += sigma(state) * unit_normal(rng);
    series[static_cast<std::size_t>(k)] = x;
    state = rows[state](rng);
  }
  return series;
}

std::vector<double> periodogram(const std::vector<Complex>& series,
                                const std::vector<double>& omega_grid) {
  if (series.empty()) fail(ErrorKind::EmptySeries, "periodogram of an empty series");
  const double N = static_cast<double>(series.size());
  std::vector<double> out(omega_grid.size());
  for (std::size_t k = 0; k < omega_grid.size(); ++k) {
    Complex rot = std::polar(1.0, -omega_grid[k]);
    Complex w(1.0, 0.0);
    Complex acc(0.0, 0.0);
    for (const Complex& x : series) {
      acc += x * w;
      w *= rot;
    }
    out[k] = std::norm(acc) / N;
  }
  return out;
}

std::vector<double> periodogram_acf(const std::vector<Complex>& series,
                                    const std::vector<double>& omega_grid) {
  if (series.empty()) fail(ErrorKind::EmptySeries, "periodogram of an empty series");
  const std::size_t N = series.size();
  std::vector<Complex> gamma_hat(N);
  for (std::size_t tau = 0; tau < N; ++tau) {
    Complex acc(0.0, 0.0);
    for (std::size_t m = 0; m + tau < N; ++m) acc += std::conj(series[m]) * series[m + tau];
    gamma_hat[tau] = acc / static_cast<double>(N);
  }
  std::vector<double> out(omega_grid.size());
  for (std::size_t k = 0; k < omega_grid.size(); ++k) {
    Complex rot = std::polar(1.0, -omega_grid[k]);
    Complex w = rot;
    Complex acc(0.0, 0.0);
    for (std::size_t tau = 1; tau < N; ++tau) {
      acc += gamma_hat[tau] * w;
      w *= rot;
    }
    out[k] = gamma_hat[0].real() + 2.0 * acc.real();
  }
  return out;
}

WelchResult welch_psd(const std::vector<Complex>& series, int segment_length, int hop) {
  if (series.empty()) fail(ErrorKind::EmptySeries, "Welch estimate of an empty series");
  if (segment_length < 2 || (segment_length & (segment_length - 1)) != 0)
    fail(ErrorKind::InvalidArgument, "segment length must be a power of two");
  if (static_cast<int>(series.size()) < segment_length)
    fail(ErrorKind::InvalidArgument, "series shorter than one segment");
  if (hop <= 0) hop = segment_length / 2;

  const int L = segment_length;
  std::vector<double> window(L);
  double energy = 0.0;
  for (int i = 0; i < L; ++i) {
    window[i] = 0.5 * (1.0 - std::cos(kTwoPi * i / L));
    energy += window[i] * window[i];
  }

  WelchResult out;
  out.omega.resize(L);
  for (int k = 0; k < L; ++k) out.omega[k] = kTwoPi * k / L;
  out.power.assign(L, 0.0);

  int segments = 0;
  std::vector<Complex> buf(L);
  for (std::size_t start = 0; start + L <= series.size(); start += hop) {
    for (int i = 0; i < L; ++i) buf[i] = window[i] * series[start + i];
    fft_pow2(buf);
    for (int k = 0; k < L; ++k) out.power[k] += std::norm(buf[k]);
    ++segments;
  }
  for (int k = 0; k < L; ++k) out.power[k] /= energy * segments;
  return out;
}

Complex ztransform_observations(const std::vector<Complex>& series, Complex z) {
  if (series.empty()) fail(ErrorKind::EmptySeries, "z-transform of an empty series");
  if (std::abs(z) <= 1.0)
    fail(ErrorKind::InsideUnitCircle, "the observation transform needs |z| > 1");
  Complex zinv = 1.0 / z;
  Complex w(1.0, 0.0);
  Complex acc(0.0, 0.0);
  for (const Complex& x : series) {
    acc += x * w;
    w *= zinv;
  }
  return acc * zinv;
}

std::vector<ScanCandidate> eigenvalue_scan(const std::vector<Complex>& series,
                                           double radius,
                                           const std::vector<double>& omega_grid) {
  if (series.size() < 1000)
    fail(ErrorKind::SeriesTooShort, "eigenvalue scan needs at least 1000 samples");
  if (!(radius > 1.0) || radius > 2.0)
    fail(ErrorKind::InvalidArgument, "scan radius must lie in (1, 2]");
  if (omega_grid.size() < 8)
    fail(ErrorKind::InvalidArgument, "scan grid is too coarse");

  // z^{-n} decays geometrically; beyond this horizon terms are below double
  // precision regardless of the series values.
  std::size_t horizon = static_cast<std::size_t>(
      std::min<double>(static_cast<double>(series.size()),
                       40.0 * std::numbers::ln10 / std::log(radius) + 1.0));

  const std::size_t M = omega_grid.size();
  std::vector<double> mag(M);
  for (std::size_t k = 0; k < M; ++k) {
    Complex z = std::polar(radius, omega_grid[k]);
    Complex zinv = 1.0 / z;
    Complex w = zinv;  // includes the leading z^{-1}
    Complex acc(0.0, 0.0);
    for (std::size_t n = 0; n < horizon; ++n) {
      acc += series[n] * w;
      w *= zinv;
    }
    mag[k] = std::abs(acc);
  }

  std::vector<ScanCandidate> candidates;
  for (std::size_t k = 0; k < M; ++k) {
    double prev = mag[(k + M - 1) % M];
    double next = mag[(k + 1) % M];
    if (mag[k] > prev && mag[k] > next)
      candidates.push_back({wrap_angle(omega_grid[k]), mag[k]});
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const ScanCandidate& a, const ScanCandidate& b) {
              return a.magnitude > b.magnitude;
            });
  return candidates;
}

std::vector<double> uniform_grid(int count, double lo, double hi, bool half_offset) {
  if (count < 2) fail(ErrorKind::InvalidArgument, "grid needs at least 2 points");
  std::vector<double> grid(count);
  double step = (hi - lo) / count;
  double offset = half_offset ? 0.5 : 0.0;
  for (int k = 0; k < count; ++k) grid[k] = lo + step * (k + offset);
  return grid;
}

}  // namespace meromat
