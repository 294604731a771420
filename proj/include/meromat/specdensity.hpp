#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "meromat/spectral.hpp"
#include "meromat/stoch.hpp"
#include "meromat/types.hpp"

namespace meromat {

enum class EmissionType { Deterministic, Gaussian };

struct EmissionSpec {
  EmissionType type = EmissionType::Deterministic;
};

/// State-emitting hidden Markov model. The latent chain plus per-state first
/// and second emission moments are all that power spectra need; the optional
/// sampler spec only matters for simulation.
struct HiddenMarkovModel {
  StochasticMatrix T;
  ComplexVector means;
  RealVector second_moments;
  std::optional<EmissionSpec> emissions;

  int states() const { return T.dim(); }
};

HiddenMarkovModel make_hmm(StochasticMatrix T, ComplexVector means,
                           RealVector second_moments,
                           std::optional<EmissionSpec> emissions = std::nullopt);

struct SpectralLine {
  double omega = 0.0;
  double weight = 0.0;
};

struct PowerSpectrumResult {
  std::vector<double> omega;
  std::vector<double> continuous;   // P_c on the grid
  std::vector<SpectralLine> lines;  // delta contributions, never rasterized
};

struct PowerSpectrumOptions {
  double unit_circle_tolerance = 1e-9;  // | |lambda| - 1 | below this is a line
  double grid_guard = 1e-8;             // reject grid points this close to a line
  SpectralOptions decomposition;
};

/// Omega = diag(means) * T.
ComplexMatrix observation_matrix(const HiddenMarkovModel& hmm);

/// gamma(0) = <|x|^2>; for |tau| >= 1, gamma is a matrix element of T^(|tau|-1)
/// between the observation operators. Hermitian in tau.
Complex autocorrelation(const HiddenMarkovModel& hmm, long tau);

/// gamma(0..max_tau) in one pass.
std::vector<Complex> autocorrelation_series(const HiddenMarkovModel& hmm, int max_tau);

/// Continuous power spectrum on the grid plus discrete lines from unit-circle
/// eigenvalues. The continuous values come from the partial-fraction expansion
/// of the resolvent at z = exp(i omega).
PowerSpectrumResult power_spectrum(const HiddenMarkovModel& hmm,
                                   const std::vector<double>& omega_grid,
                                   const PowerSpectrumOptions& opts = {});

/// Same model with every emission collapsed to its mean; shifts the power
/// spectrum by a constant and leaves the lines untouched.
HiddenMarkovModel theorem1_reduce(const HiddenMarkovModel& hmm);

/// Lorentzian-sum spectrum of a continuous-time process: modes on the
/// imaginary axis (the stationary one included) are reported as lines.
PowerSpectrumResult continuous_time_power_spectrum(const RateMatrix& G,
                                                   const SpectralDecomposition& decompG,
                                                   const ComplexMatrix& Omega,
                                                   const std::vector<double>& omega_grid,
                                                   const PowerSpectrumOptions& opts = {});

enum class EmissionMode { Auto, FromSampler, MeansOnly };

/// Stationary simulation of the model; reproducible for a fixed seed.
std::vector<Complex> sample_hmm(const HiddenMarkovModel& hmm, std::int64_t n,
                                std::uint64_t seed,
                                EmissionMode mode = EmissionMode::Auto);

/// (1/N) |sum_n x_n exp(-i omega n)|^2 on an arbitrary grid.
std::vector<double> periodogram(const std::vector<Complex>& series,
                                const std::vector<double>& omega_grid);

/// The windowed-autocorrelation form of the same estimator; agrees with
/// `periodogram` identically on any finite series.
std::vector<double> periodogram_acf(const std::vector<Complex>& series,
                                    const std::vector<double>& omega_grid);

struct WelchResult {
  std::vector<double> omega;  // 2 pi k / segment_length
  std::vector<double> power;
};

/// Hann-windowed averaged periodogram; segment_length must be a power of two.
WelchResult welch_psd(const std::vector<Complex>& series, int segment_length,
                      int hop = -1);

/// O_N(f, z) = z^{-1} sum_n x_n z^{-n}; converges to a matrix element of the
/// resolvent of the hidden dynamic for |z| > 1.
Complex ztransform_observations(const std::vector<Complex>& series, Complex z);

struct ScanCandidate {
  double omega = 0.0;
  double magnitude = 0.0;
};

/// Local maxima of |O_N(f, r exp(i omega))| over the grid, strongest first.
/// Peak-picking only; no pole-order or magnitude fitting.
std::vector<ScanCandidate> eigenvalue_scan(const std::vector<Complex>& series,
                                           double radius,
                                           const std::vector<double>& omega_grid);

/// Evenly spaced grid on [lo, hi); the default half-step offset keeps 0 and
/// pi off the grid so spectral lines are not hit.
std::vector<double> uniform_grid(int count, double lo = 0.0,
                                 double hi = 6.283185307179586476925286766559,
                                 bool half_offset = true);

}  // namespace meromat
