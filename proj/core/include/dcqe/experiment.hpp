#pragma once

#include "dcqe/analysis.hpp"
#include "dcqe/bench_config.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace dcqe {

struct RunOptions {
  unsigned threads = 1;
  /// Keep the per-pair outcome sequence of every scan point.
  bool record_outcomes = false;
};

struct FringeScan {
  std::vector<ScanRow> rows;
  std::vector<std::vector<Outcome>> outcomes;  ///< per row, empty unless recorded
};

/// Actuator positions of the schedule: start + k * step.
std::vector<double> scan_positions(const ScanSchedule& scan);

/// Period of the fringes in actuator microns implied by the calibration.
double fringe_period_um(const ActuatorCalibration& cal);

/// For each step: delta_phi from the calibration, one `dwell_s` interval with
/// seed derive_seed(master_seed, step), then the count table. Output does not
/// depend on the thread count.
FringeScan run_fringe_scan(const BenchConfig& config, const RunOptions& options = {});

enum class DelayMode { none, free_space_2m, fiber_5m };

struct DelayOptions {
  /// Add the matching electrical delay to the signal arm.
  bool compensate = true;
  /// Apply the idler beam-spread collection loss of the mirror detour.
  bool beam_spread_loss = true;
  double free_space_collection = 1.0 / 7.0;
  /// Seed for the delayed scan; defaults to the config's master seed.
  std::optional<std::uint64_t> delayed_seed;
};

inline constexpr double kFreeSpaceDetour = 2.0;   ///< m
inline constexpr double kDelayFiberLength = 5.0;  ///< m, idler arm

/// Bench with the chosen delay stage installed in the idler arm.
/// free_space_2m: +2.0 m free-space detour (optionally 1/7 collection);
/// fiber_5m: idler fibers become 5.0 m. With `compensate`, the signal arm
/// gets the electrical delay equal to the added idler flight time.
BenchConfig apply_delay(const BenchConfig& config, DelayMode mode, const DelayOptions& options);

struct DelayComparison {
  BenchConfig reference_bench;
  BenchConfig delayed_bench;
  FringeScan reference;
  FringeScan delayed;
  OffsetPs added_delay = 0;  ///< idler arrival shift, ps
};

DelayComparison run_delay_comparison(const BenchConfig& config, DelayMode mode,
                                     const DelayOptions& delay = {},
                                     const RunOptions& options = {});

/// Polarizer angles of the CHSH test. Analyzer HWPs sit at half of these.
struct ChshAngles {
  double a = degrees(-45.0);
  double a_prime = degrees(0.0);
  double b = degrees(-22.5);
  double b_prime = degrees(22.5);
};

struct ChshSetting {
  double signal_angle = 0.0;  ///< polarizer angle, radians
  double idler_angle = 0.0;
  CountTable counts;
  double correlation = 0.0;
  double sigma = 0.0;
};

struct ChshResult {
  double S = 0.0;
  double sigma_S = 0.0;
  /// Settings in the order (a,b), (a,b'), (a',b), (a',b').
  std::array<ChshSetting, 4> settings;
};

/// E = (N_AB + N_A'B' - N_AB' - N_A'B) / N_total. Throws
/// InsufficientStatistics when N_total is zero.
double chsh_correlation(const CountTable& counts);

/// S = E(a,b) - E(a,b') + E(a',b) + E(a',b'), each setting one dwell
/// interval at zero interferometer phase; sigma_S from independent Poisson
/// counts, var(E) = (1 - E^2) / N.
ChshResult run_chsh(const BenchConfig& config, const ChshAngles& angles = {});

struct BeamBlockResult {
  std::uint64_t n_HH_blocked = 0;
  std::uint64_t n_HH_unblocked = 0;
  double ratio() const;
};

/// Both analyzers at 0 deg; matched intervals (same seed) with and without
/// the V-path block; N_HH is the (B, A) coincidence count.
BeamBlockResult run_beam_block(const BenchConfig& config);

struct RotationSummary {
  double theta = 0.0;
  std::uint64_t seed = 0;  ///< master seed of both scans at this angle
  FringeScan erasure;
  FringeScan which_way;
  FringeFit erasure_fit;    ///< n_AB, period fixed by the calibration
  FringeFit which_way_fit;  ///< n_AB, period fixed by the calibration
};

/// Erasure (idler 22.5 deg) and which-way (idler 0 deg) scans with a joint
/// HWP rotation `theta` applied right after the source, for every angle.
/// Angle k runs on seed derive_seed(derive_seed(master_seed, 0x2074), k).
std::vector<RotationSummary> run_rotation_invariance(const BenchConfig& config,
                                                     std::span<const double> angles,
                                                     const RunOptions& options = {});

/// Which-way scan with the idler HWP overshooting past 0 deg by `epsilon`,
/// i.e. at -epsilon, continuing the rotation that came down from 22.5 deg.
/// Requires |epsilon| < 5 deg.
FringeScan run_overshoot_study(const BenchConfig& config, double epsilon,
                               const RunOptions& options = {});

/// Erasure and which-way analyzer presets (signal 22.5 deg; idler 22.5 / 0 deg).
BenchConfig erasure_bench(BenchConfig config);
BenchConfig which_way_bench(BenchConfig config);

}  // namespace dcqe
