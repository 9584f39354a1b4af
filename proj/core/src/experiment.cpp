#include "dcqe/experiment.hpp"

#include "dcqe/errors.hpp"
#include "dcqe/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace dcqe {

namespace {

void check(bool ok, const char* field, const char* constraint) {
  if (!ok) throw InvalidField(field, constraint);
}

void check_arm(const ArmGeometry& arm, const std::string& name) {
  const auto field = [&](const char* key) { return name + "." + key; };
  if (!(arm.base_path_length >= 0.0 && std::isfinite(arm.base_path_length)))
    throw InvalidField(field("base_path_length"), "must be finite and >= 0");
  if (!(arm.extra_free_space >= 0.0 && std::isfinite(arm.extra_free_space)))
    throw InvalidField(field("extra_free_space"), "must be finite and >= 0");
  if (!(arm.fiber_length >= 0.0 && std::isfinite(arm.fiber_length)))
    throw InvalidField(field("fiber_length"), "must be finite and >= 0");
  if (!(arm.fiber_speed_fraction > 0.0 && arm.fiber_speed_fraction <= 1.0))
    throw InvalidField(field("fiber_speed_fraction"), "must lie in (0, 1]");
  if (arm.electrical_delay < 0) throw InvalidField(field("electrical_delay_ps"), "must be >= 0");
  if (!(arm.collection_efficiency >= 0.0 && arm.collection_efficiency <= 1.0))
    throw InvalidField(field("collection_efficiency"), "must lie in [0, 1]");
}

// Runs fn(i) for i in [0, n) on up to `threads` workers; first exception wins.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> workers;
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = n;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

// Seed-stream tags for the non-scan experiments.
constexpr std::uint64_t kChshTag = 0xC45Aull;
constexpr std::uint64_t kBeamBlockTag = 0xB10Cull;

}  // namespace

void BenchConfig::validate() const {
  check(source.pair_rate > 0.0 && std::isfinite(source.pair_rate), "source.pair_rate", "must be > 0");
  check(source.coherence >= 0.0 && source.coherence <= 1.0, "source.coherence",
        "must lie in [0, 1]");
  check(std::isfinite(source.alpha), "source.alpha", "must be finite");
  check_arm(signal_arm, "signal_arm");
  check_arm(idler_arm, "idler_arm");
  for (Detector d : kAllDetectors) {
    const auto& spec = detector(d);
    const std::string prefix = "detectors." + std::string(detector_name(d)) + ".";
    if (!(spec.efficiency >= 0.0 && spec.efficiency <= 1.0))
      throw InvalidField(prefix + "efficiency", "must lie in [0, 1]");
    if (!(spec.jitter_sigma >= 0.0 && std::isfinite(spec.jitter_sigma)))
      throw InvalidField(prefix + "jitter_ps", "must be >= 0");
    if (!(spec.dark_rate >= 0.0 && std::isfinite(spec.dark_rate)))
      throw InvalidField(prefix + "dark_rate", "must be >= 0");
  }
  check(std::isfinite(signal_hwp), "analyzers.signal_hwp", "must be finite");
  check(std::isfinite(idler_hwp), "analyzers.idler_hwp", "must be finite");
  check(!source_rotation || std::isfinite(*source_rotation), "analyzers.source_rotation",
        "must be finite");
  for (double d : mirror_deltas) check(std::isfinite(d), "analyzers.mirror_deltas", "must be finite");
  check(coincidence.window > 0, "coincidence.window_ps", "must be > 0");
  check(scan.n_steps >= 1, "scan.n_steps", "must be >= 1");
  check(scan.dwell_s > 0.0 && std::isfinite(scan.dwell_s), "scan.dwell_s", "must be > 0");
  check(scan.step_um != 0.0 && std::isfinite(scan.step_um), "scan.step_um", "must be non-zero");
  check(std::isfinite(scan.start_um), "scan.start_um", "must be finite");
  check(calibration.radians_per_micron > 0.0 && std::isfinite(calibration.radians_per_micron),
        "calibration.radians_per_micron", "must be > 0");
  check(std::isfinite(calibration.origin_offset), "calibration.origin_offset", "must be finite");
}

std::vector<double> scan_positions(const ScanSchedule& scan) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(std::max(scan.n_steps, 0)));
  for (int k = 0; k < scan.n_steps; ++k) out.push_back(scan.start_um + k * scan.step_um);
  return out;
}

double fringe_period_um(const ActuatorCalibration& cal) {
  cal.validate();
  return 2.0 * kPi / cal.radians_per_micron;
}

FringeScan run_fringe_scan(const BenchConfig& config, const RunOptions& options) {
  config.validate();
  const TwoPhotonState source = prepare_state(config.source);
  const std::vector<double> positions = scan_positions(config.scan);

  FringeScan scan;
  scan.rows.resize(positions.size());
  if (options.record_outcomes) scan.outcomes.resize(positions.size());

  parallel_for(positions.size(), options.threads, [&](std::size_t k) {
    const double phase = actuator_to_phase(positions[k], config.calibration);
    IntervalResult r = run_interval(source, config, phase, config.scan.dwell_s,
                                    derive_seed(config.master_seed, k), options.record_outcomes);
    scan.rows[k] = {positions[k], phase,
                    count_table(r.streams, config.coincidence, config.scan.dwell_s)};
    if (options.record_outcomes) scan.outcomes[k] = std::move(r.outcomes);
  });
  return scan;
}

BenchConfig apply_delay(const BenchConfig& config, DelayMode mode, const DelayOptions& options) {
  BenchConfig out = config;
  switch (mode) {
    case DelayMode::none: return out;
    case DelayMode::free_space_2m:
      out.idler_arm.extra_free_space += kFreeSpaceDetour;
      if (options.beam_spread_loss) {
        out.idler_arm.collection_efficiency *= options.free_space_collection;
      }
      break;
    case DelayMode::fiber_5m:
      out.idler_arm.fiber_length = kDelayFiberLength;
      break;
  }
  if (options.compensate) {
    const TimePs before = arrival_time(0, config.idler_arm);
    const TimePs after = arrival_time(0, out.idler_arm);
    out.signal_arm.electrical_delay +=
        static_cast<OffsetPs>(after) - static_cast<OffsetPs>(before);
  }
  if (options.delayed_seed) out.master_seed = *options.delayed_seed;
  return out;
}

DelayComparison run_delay_comparison(const BenchConfig& config, DelayMode mode,
                                     const DelayOptions& delay, const RunOptions& options) {
  DelayComparison out;
  out.reference_bench = config;
  out.delayed_bench = apply_delay(config, mode, delay);
  out.added_delay = static_cast<OffsetPs>(arrival_time(0, out.delayed_bench.idler_arm)) -
                    static_cast<OffsetPs>(arrival_time(0, config.idler_arm));
  out.reference = run_fringe_scan(out.reference_bench, options);
  out.delayed = run_fringe_scan(out.delayed_bench, options);
  return out;
}

double chsh_correlation(const CountTable& c) {
  const auto total = c.coincidences();
  if (total == 0) throw InsufficientStatistics("CHSH setting has zero coincidences");
  const double same = static_cast<double>(c.n_AB + c.n_ApBp);
  const double diff = static_cast<double>(c.n_ABp + c.n_ApB);
  return (same - diff) / static_cast<double>(total);
}

ChshResult run_chsh(const BenchConfig& config, const ChshAngles& angles) {
  config.validate();
  const TwoPhotonState source = prepare_state(config.source);
  const std::array<std::pair<double, double>, 4> pairs = {{{angles.a, angles.b},
                                                           {angles.a, angles.b_prime},
                                                           {angles.a_prime, angles.b},
                                                           {angles.a_prime, angles.b_prime}}};
  ChshResult result;
  double var = 0.0;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    BenchConfig bench = config;
    bench.signal_hwp = pairs[k].first / 2.0;
    bench.idler_hwp = pairs[k].second / 2.0;
    const IntervalResult r =
        run_interval(source, bench, 0.0, config.scan.dwell_s,
                     derive_seed(derive_seed(config.master_seed, kChshTag), k));
    ChshSetting& s = result.settings[k];
    s.signal_angle = pairs[k].first;
    s.idler_angle = pairs[k].second;
    s.counts = count_table(r.streams, config.coincidence, config.scan.dwell_s);
    s.correlation = chsh_correlation(s.counts);
    const double n = static_cast<double>(s.counts.coincidences());
    s.sigma = std::sqrt(std::max(1.0 - s.correlation * s.correlation, 0.0) / n);
    var += s.sigma * s.sigma;
  }
  const auto& st = result.settings;
  result.S = st[0].correlation - st[1].correlation + st[2].correlation + st[3].correlation;
  result.sigma_S = std::sqrt(var);
  return result;
}

double BeamBlockResult::ratio() const {
  if (n_HH_unblocked == 0) throw InsufficientStatistics("beam block: unblocked N_HH is zero");
  return static_cast<double>(n_HH_blocked) / static_cast<double>(n_HH_unblocked);
}

BeamBlockResult run_beam_block(const BenchConfig& config) {
  BenchConfig bench = config;
  bench.signal_hwp = 0.0;
  bench.idler_hwp = 0.0;
  bench.validate();
  const TwoPhotonState source = prepare_state(bench.source);
  const std::uint64_t seed = derive_seed(config.master_seed, kBeamBlockTag);

  BeamBlockResult out;
  bench.beam_block.reset();
  out.n_HH_unblocked =
      count_table(run_interval(source, bench, 0.0, bench.scan.dwell_s, seed).streams,
                  bench.coincidence, bench.scan.dwell_s)
          .n_AB;
  bench.beam_block = BlockedPath::v_path;
  out.n_HH_blocked =
      count_table(run_interval(source, bench, 0.0, bench.scan.dwell_s, seed).streams,
                  bench.coincidence, bench.scan.dwell_s)
          .n_AB;
  return out;
}

BenchConfig erasure_bench(BenchConfig config) {
  config.signal_hwp = degrees(22.5);
  config.idler_hwp = degrees(22.5);
  return config;
}

BenchConfig which_way_bench(BenchConfig config) {
  config.signal_hwp = degrees(22.5);
  config.idler_hwp = 0.0;
  return config;
}

std::vector<RotationSummary> run_rotation_invariance(const BenchConfig& config,
                                                     std::span<const double> angles,
                                                     const RunOptions& options) {
  std::vector<RotationSummary> out;
  const FitOptions fixed{.period = fringe_period_um(config.calibration)};
  for (std::size_t k = 0; k < angles.size(); ++k) {
    RotationSummary s;
    s.theta = angles[k];
    s.seed = derive_seed(derive_seed(config.master_seed, 0x2074), k);
    BenchConfig rotated = config;
    rotated.source_rotation = s.theta;
    rotated.master_seed = s.seed;
    s.erasure = run_fringe_scan(erasure_bench(rotated), options);
    s.which_way = run_fringe_scan(which_way_bench(rotated), options);
    s.erasure_fit = fit_fringe(series(s.erasure.rows, Series::n_AB), fixed);
    s.which_way_fit = fit_fringe(series(s.which_way.rows, Series::n_AB), fixed);
    out.push_back(std::move(s));
  }
  return out;
}

FringeScan run_overshoot_study(const BenchConfig& config, double epsilon,
                               const RunOptions& options) {
  if (!(std::abs(epsilon) < degrees(5.0))) {
    throw DomainError("overshoot epsilon must satisfy |epsilon| < 5 deg");
  }
  BenchConfig bench = which_way_bench(config);
  bench.idler_hwp = -epsilon;
  return run_fringe_scan(bench, options);
}

}  // namespace dcqe
