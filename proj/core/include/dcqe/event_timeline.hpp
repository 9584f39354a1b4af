#pragma once

#include "dcqe/optics.hpp"
#include "dcqe/quantum_state.hpp"
#include "dcqe/rng.hpp"
#include "dcqe/units.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

namespace dcqe {

struct BenchConfig;

/// Detector labels: B/B' in the signal arm, A/A' in the idler arm. The
/// unprimed detector sits on the reflected PBS port.
enum class Detector : std::uint8_t { A = 0, A_prime = 1, B = 2, B_prime = 3 };

inline constexpr std::array<Detector, 4> kAllDetectors = {Detector::A, Detector::A_prime,
                                                          Detector::B, Detector::B_prime};

constexpr std::size_t index(Detector d) { return static_cast<std::size_t>(d); }
std::string_view detector_name(Detector d);  // "A", "Ap", "B", "Bp"
std::optional<Detector> parse_detector(std::string_view name);

constexpr Detector signal_detector(Port p) {
  return p == Port::reflected ? Detector::B : Detector::B_prime;
}
constexpr Detector idler_detector(Port p) {
  return p == Port::reflected ? Detector::A : Detector::A_prime;
}

struct ArmGeometry {
  double base_path_length = 1.0;  ///< m, free space crystal -> coupler
  double extra_free_space = 0.0;  ///< m, mirror detour
  double fiber_length = 1.0;      ///< m
  double fiber_speed_fraction = 2.0 / 3.0;
  OffsetPs electrical_delay = 0;       ///< ps added to the detector signal
  double collection_efficiency = 1.0;  ///< beam-spread loss multiplier

  void validate() const;
  bool operator==(const ArmGeometry&) const = default;
};

struct DetectorSpec {
  double efficiency = 0.30;
  double jitter_sigma = 350.0;  ///< ps, Gaussian
  double dark_rate = 0.0;       ///< counts/s

  void validate() const;
  bool operator==(const DetectorSpec&) const = default;
};

struct PhotonEvent {
  Detector detector = Detector::A;
  TimePs time = 0;

  bool operator==(const PhotonEvent&) const = default;
};

using EventStream = std::vector<PhotonEvent>;
using DetectorStreams = std::array<EventStream, 4>;  ///< indexed by `index(Detector)`

struct PortPair {
  Port signal;
  Port idler;
  bool operator==(const PortPair&) const = default;
};

/// Per-pair analyzer outcome. `signal` is empty when a beam block inside the
/// interferometer absorbed the signal photon.
struct Outcome {
  std::optional<Port> signal;
  Port idler = Port::reflected;
  bool operator==(const Outcome&) const = default;
};

/// Discrete outcome distribution, sampled with one uniform draw per pair.
class OutcomeTable {
 public:
  /// Throws ConsistencyError unless probabilities are >= -1e-12 and sum to 1
  /// within 1e-8.
  OutcomeTable(std::vector<Outcome> outcomes, std::vector<double> probabilities);

  const Outcome& sample(Rng& rng) const;
  double probability(const Outcome& o) const;
  const std::vector<Outcome>& outcomes() const noexcept { return outcomes_; }

 private:
  std::vector<Outcome> outcomes_;
  std::vector<double> probabilities_;
  std::vector<double> cumulative_;
};

/// Outcome table for the four port pairs of analyzers at the given HWP angles.
OutcomeTable port_table(const TwoPhotonState& state, double signal_angle, double idler_angle);

/// Born-rule draw of one (signal port, idler port) pair.
PortPair sample_ports(const TwoPhotonState& state, double signal_angle, double idler_angle,
                      Rng& rng);

/// Full optical chain of a bench at interferometer phase `delta_phi`:
/// optional joint source rotation, interferometer phase and beam block on the
/// signal, mirror phases on the idler, then both analyzers. With a beam
/// block the table also carries the "signal absorbed" branch.
OutcomeTable bench_outcome_table(const TwoPhotonState& source_state, const BenchConfig& bench,
                                 double delta_phi);

/// Flight time of an arm, seconds.
double flight_time(const ArmGeometry& arm);

/// emission + (base + extra)/c + fiber/(fraction c), rounded to the nearest ps.
TimePs arrival_time(TimePs emission, const ArmGeometry& arm);

/// With probability `efficiency`: event at arrival + N(0, jitter) +
/// electrical delay (clamped at t = 0). Otherwise nothing.
std::optional<PhotonEvent> detect(Detector detector, TimePs arrival, const DetectorSpec& spec,
                                  OffsetPs electrical_delay, Rng& rng);

/// Poisson dark counts at `dark_rate`, uniform over [0, duration), sorted.
EventStream dark_events(Detector detector, const DetectorSpec& spec, double duration, Rng& rng);

struct IntervalResult {
  DetectorStreams streams;
  std::vector<Outcome> outcomes;  ///< one per emitted pair, only when requested
  std::size_t pairs_emitted = 0;
};

/// One integration interval: emit_pairs -> outcome sampling -> arrival
/// times -> detection -> dark counts merged. Every stream comes back sorted
/// by time (ties keep generation order). Pure function of its arguments.
IntervalResult run_interval(const TwoPhotonState& source_state, const BenchConfig& bench,
                            double delta_phi, double interval_s, std::uint64_t seed,
                            bool record_outcomes = false);

/// Event dump: header `detector,time_ps`, then one event per line, merged
/// across detectors in time order.
void write_event_dump(std::ostream& out, const DetectorStreams& streams);
DetectorStreams read_event_dump(std::istream& in);

}  // namespace dcqe
