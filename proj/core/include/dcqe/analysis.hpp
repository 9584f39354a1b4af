#pragma once

#include "dcqe/bench_config.hpp"
#include "dcqe/coincidence.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace dcqe {

struct FringePoint {
  double position = 0.0;  ///< microns
  double count = 0.0;
};

/// offset + amplitude * cos(2 pi x / period + phase).
struct FringeFit {
  double offset = 0.0;
  double amplitude = 0.0;  ///< >= 0
  double phase = 0.0;      ///< radians in (-pi, pi], referenced to x = 0
  double period = 0.0;     ///< microns
  double visibility = 0.0; ///< amplitude / offset, clipped to [0, 1]
  double residual_rms = 0.0;

  double offset_sigma = 0.0;
  double amplitude_sigma = 0.0;
  double phase_sigma = 0.0;
  double period_sigma = 0.0;
  double visibility_sigma = 0.0;
  std::size_t iterations = 0;

  double value_at(double position) const;
};

struct FitOptions {
  /// Fix the period instead of searching for it (linear fit, no iterations).
  std::optional<double> period;
  std::size_t max_iterations = 200;
  double tolerance = 1e-9;
};

/// Least-squares sinusoid fit. Without a fixed period the start value comes
/// from a scan over a discrete frequency grid (one period across the span up
/// to the sampling Nyquist limit), followed by Gauss-Newton refinement of
/// (offset, cos/sin amplitudes, wavenumber). Needs >= 8 points spanning at
/// least one period; throws FitError otherwise or on non-convergence.
FringeFit fit_fringe(std::span<const FringePoint> points, const FitOptions& options = {});

/// D = |n_AB - n_A'B| / (n_AB + n_A'B): count imbalance between the two
/// idler ports given the signal B port. Throws InsufficientStatistics on a
/// zero denominator.
double distinguishability(const CountTable& which_way);

/// Spread of the counts about the fitted sinusoid (or about their mean when
/// `detrend` is false) divided by sqrt(mean count). Poisson data gives ~1.
double poisson_consistency(std::span<const FringePoint> points, bool detrend = true,
                           const FitOptions& options = {});

struct ScanComparison {
  double chi2 = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

/// Pearson chi-square between two scans over the four coincidence columns,
/// sum (a - b)^2 / (a + b) with Poisson variance, p from the chi-square
/// survival function. Throws DomainError if the grids differ.
ScanComparison compare_scans(std::span<const ScanRow> a, std::span<const ScanRow> b);

enum class Series { n_AB, n_ApB, n_ABp, n_ApBp };

std::uint64_t series_value(const CountTable& t, Series s);
std::vector<FringePoint> series(std::span<const ScanRow> rows, Series s);

/// |a - b| wrapped into [0, pi].
double phase_separation(double a, double b);

}  // namespace dcqe
