#include "dcqe/event_timeline.hpp"

#include "dcqe/bench_config.hpp"
#include "dcqe/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

namespace dcqe {

std::string_view detector_name(Detector d) {
  switch (d) {
    case Detector::A: return "A";
    case Detector::A_prime: return "Ap";
    case Detector::B: return "B";
    case Detector::B_prime: return "Bp";
  }
  return "?";
}

std::optional<Detector> parse_detector(std::string_view name) {
  for (Detector d : kAllDetectors) {
    if (detector_name(d) == name) return d;
  }
  return std::nullopt;
}

void ArmGeometry::validate() const {
  if (!(base_path_length >= 0.0) || !(extra_free_space >= 0.0) || !(fiber_length >= 0.0)) {
    throw DomainError("arm lengths must be >= 0");
  }
  if (!std::isfinite(base_path_length) || !std::isfinite(extra_free_space) ||
      !std::isfinite(fiber_length)) {
    throw DomainError("arm lengths must be finite");
  }
  if (!(fiber_speed_fraction > 0.0 && fiber_speed_fraction <= 1.0)) {
    throw DomainError("fiber_speed_fraction must lie in (0, 1]");
  }
  if (electrical_delay < 0) throw DomainError("electrical_delay must be >= 0");
  if (!(collection_efficiency >= 0.0 && collection_efficiency <= 1.0)) {
    throw DomainError("collection_efficiency must lie in [0, 1]");
  }
}

void DetectorSpec::validate() const {
  if (!(efficiency >= 0.0 && efficiency <= 1.0)) {
    throw DomainError("detector efficiency must lie in [0, 1]");
  }
  if (!(jitter_sigma >= 0.0) || !std::isfinite(jitter_sigma)) {
    throw DomainError("detector jitter must be >= 0");
  }
  if (!(dark_rate >= 0.0) || !std::isfinite(dark_rate)) {
    throw DomainError("detector dark_rate must be >= 0");
  }
}

OutcomeTable::OutcomeTable(std::vector<Outcome> outcomes, std::vector<double> probabilities)
    : outcomes_(std::move(outcomes)), probabilities_(std::move(probabilities)) {
  if (outcomes_.size() != probabilities_.size() || outcomes_.empty()) {
    throw ConsistencyError("outcome table needs one probability per outcome");
  }
  double total = 0.0;
  for (double& p : probabilities_) {
    if (!(p >= -1e-12)) throw ConsistencyError("negative outcome probability");
    if (p < 0.0) p = 0.0;
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-8) {
    throw ConsistencyError("outcome probabilities sum to " + std::to_string(total));
  }
  cumulative_.reserve(probabilities_.size());
  double acc = 0.0;
  for (double p : probabilities_) {
    acc += p / total;
    cumulative_.push_back(acc);
  }
  cumulative_.back() = 1.0;
}

const Outcome& OutcomeTable::sample(Rng& rng) const {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  for (std::size_t i = 0; i < cumulative_.size(); ++i) {
    if (u < cumulative_[i]) return outcomes_[i];
  }
  return outcomes_.back();
}

double OutcomeTable::probability(const Outcome& o) const {
  for (std::size_t i = 0; i < outcomes_.size(); ++i) {
    if (outcomes_[i] == o) return probabilities_[i];
  }
  return 0.0;
}

namespace {

constexpr std::array<Port, 2> kPorts = {Port::transmitted, Port::reflected};

/// tr((P_s (x) P_i) rho) on an unnormalized matrix.
double weight(const Matrix4& rho, const Matrix2& p_signal, const Matrix2& p_idler) {
  return (rho * kron(p_signal, p_idler)).trace().real();
}

}  // namespace

OutcomeTable port_table(const TwoPhotonState& state, double signal_angle, double idler_angle) {
  std::vector<Outcome> outcomes;
  std::vector<double> probs;
  for (Port s : kPorts) {
    for (Port i : kPorts) {
      outcomes.push_back({s, i});
      probs.push_back(joint_probability(state, MeasurementSetting(signal_angle, s),
                                        MeasurementSetting(idler_angle, i)));
    }
  }
  return {std::move(outcomes), std::move(probs)};
}

PortPair sample_ports(const TwoPhotonState& state, double signal_angle, double idler_angle,
                      Rng& rng) {
  const OutcomeTable table = port_table(state, signal_angle, idler_angle);
  const Outcome& o = table.sample(rng);
  return {*o.signal, o.idler};
}

OutcomeTable bench_outcome_table(const TwoPhotonState& source_state, const BenchConfig& bench,
                                 double delta_phi) {
  TwoPhotonState state = source_state;
  if (bench.source_rotation) state = joint_hwp_rotation(state, *bench.source_rotation);

  PolarizationOperator idler_op = PolarizationOperator::identity();
  for (double delta : bench.mirror_deltas) idler_op = mirror(delta) * idler_op;
  state = transform(state, interferometer_phase(delta_phi), idler_op);

  if (!bench.beam_block) return port_table(state, bench.signal_hwp, bench.idler_hwp);

  // Beam block as a two-outcome filter on the signal: the passed branch goes
  // on to both analyzers, the absorbed branch only leaves an idler photon.
  const Matrix2 pass = beam_block(*bench.beam_block).matrix();
  const Matrix2 absorb = Matrix2::Identity() - pass;
  const Matrix4& rho = state.matrix();

  std::vector<Outcome> outcomes;
  std::vector<double> probs;
  for (Port s : kPorts) {
    const Matrix2 ps =
        analyzer_projector(MeasurementSetting(bench.signal_hwp, s)).matrix() * pass;
    for (Port i : kPorts) {
      const Matrix2 pi = analyzer_projector(MeasurementSetting(bench.idler_hwp, i)).matrix();
      outcomes.push_back({s, i});
      probs.push_back(weight(conjugate(rho, ps, Matrix2::Identity()), Matrix2::Identity(), pi));
    }
  }
  const Matrix4 absorbed = conjugate(rho, absorb, Matrix2::Identity());
  for (Port i : kPorts) {
    const Matrix2 pi = analyzer_projector(MeasurementSetting(bench.idler_hwp, i)).matrix();
    outcomes.push_back({std::nullopt, i});
    probs.push_back(weight(absorbed, Matrix2::Identity(), pi));
  }
  return {std::move(outcomes), std::move(probs)};
}

double flight_time(const ArmGeometry& arm) {
  arm.validate();
  return (arm.base_path_length + arm.extra_free_space) / kSpeedOfLight +
         arm.fiber_length / (arm.fiber_speed_fraction * kSpeedOfLight);
}

TimePs arrival_time(TimePs emission, const ArmGeometry& arm) {
  return emission + static_cast<TimePs>(std::llround(flight_time(arm) * kPsPerSecond));
}

namespace {

// `unit` keeps the spare variate of the polar method between calls.
std::optional<PhotonEvent> detect_with(Detector detector, TimePs arrival, const DetectorSpec& spec,
                                       OffsetPs electrical_delay, Rng& rng,
                                       std::normal_distribution<double>& unit) {
  if (!std::bernoulli_distribution(spec.efficiency)(rng)) return std::nullopt;
  double jitter = 0.0;
  if (spec.jitter_sigma > 0.0) jitter = spec.jitter_sigma * unit(rng);
  const auto t = static_cast<OffsetPs>(arrival) + std::llround(jitter) + electrical_delay;
  return PhotonEvent{detector, static_cast<TimePs>(std::max<OffsetPs>(t, 0))};
}

}  // namespace

std::optional<PhotonEvent> detect(Detector detector, TimePs arrival, const DetectorSpec& spec,
                                  OffsetPs electrical_delay, Rng& rng) {
  std::normal_distribution<double> unit;
  return detect_with(detector, arrival, spec, electrical_delay, rng, unit);
}

EventStream dark_events(Detector detector, const DetectorSpec& spec, double duration, Rng& rng) {
  spec.validate();
  EventStream out;
  if (spec.dark_rate <= 0.0 || !(duration > 0.0)) return out;
  const auto n = std::poisson_distribution<std::uint64_t>(spec.dark_rate * duration)(rng);
  out.reserve(n);
  std::uniform_real_distribution<double> when(0.0, duration);
  for (std::uint64_t k = 0; k < n; ++k) {
    out.push_back({detector, static_cast<TimePs>(std::llround(when(rng) * kPsPerSecond))});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const PhotonEvent& a, const PhotonEvent& b) { return a.time < b.time; });
  return out;
}

IntervalResult run_interval(const TwoPhotonState& source_state, const BenchConfig& bench,
                            double delta_phi, double interval_s, std::uint64_t seed,
                            bool record_outcomes) {
  bench.validate();
  if (!(interval_s > 0.0)) throw DomainError("interval must be > 0");

  IntervalResult result;
  const std::vector<TimePs> emissions =
      emission_times(bench.source.pair_rate, interval_s,
                     derive_seed(seed, static_cast<std::uint64_t>(RngStream::emission)));
  result.pairs_emitted = emissions.size();

  const OutcomeTable table = bench_outcome_table(source_state, bench, delta_phi);
  Rng outcome_rng = make_rng(seed, RngStream::outcomes);
  Rng signal_rng = make_rng(seed, RngStream::detect_signal);
  Rng idler_rng = make_rng(seed, RngStream::detect_idler);
  std::normal_distribution<double> signal_unit;
  std::normal_distribution<double> idler_unit;

  const auto signal_flight =
      static_cast<TimePs>(std::llround(flight_time(bench.signal_arm) * kPsPerSecond));
  const auto idler_flight =
      static_cast<TimePs>(std::llround(flight_time(bench.idler_arm) * kPsPerSecond));

  std::array<DetectorSpec, 4> effective = bench.detectors;
  for (Detector d : {Detector::B, Detector::B_prime}) {
    effective[index(d)].efficiency *= bench.signal_arm.collection_efficiency;
  }
  for (Detector d : {Detector::A, Detector::A_prime}) {
    effective[index(d)].efficiency *= bench.idler_arm.collection_efficiency;
  }

  if (record_outcomes) result.outcomes.reserve(emissions.size());
  for (auto& s : result.streams) s.reserve(emissions.size() / 2 + 16);

  for (TimePs t : emissions) {
    const Outcome& o = table.sample(outcome_rng);
    if (record_outcomes) result.outcomes.push_back(o);
    if (o.signal) {
      const Detector d = signal_detector(*o.signal);
      if (auto ev = detect_with(d, t + signal_flight, effective[index(d)],
                                bench.signal_arm.electrical_delay, signal_rng, signal_unit)) {
        result.streams[index(d)].push_back(*ev);
      }
    }
    const Detector d = idler_detector(o.idler);
    if (auto ev = detect_with(d, t + idler_flight, effective[index(d)],
                              bench.idler_arm.electrical_delay, idler_rng, idler_unit)) {
      result.streams[index(d)].push_back(*ev);
    }
  }

  const auto by_time = [](const PhotonEvent& a, const PhotonEvent& b) { return a.time < b.time; };
  for (Detector d : kAllDetectors) {
    auto& stream = result.streams[index(d)];
    Rng dark_rng{derive_seed(derive_seed(seed, static_cast<std::uint64_t>(RngStream::dark)),
                             index(d))};
    const bool signal_side = d == Detector::B || d == Detector::B_prime;
    const OffsetPs delay =
        signal_side ? bench.signal_arm.electrical_delay : bench.idler_arm.electrical_delay;
    EventStream dark = dark_events(d, bench.detector(d), interval_s, dark_rng);
    for (auto& ev : dark) ev.time += static_cast<TimePs>(delay);
    stream.insert(stream.end(), dark.begin(), dark.end());
    if (!std::is_sorted(stream.begin(), stream.end(), by_time)) {
      std::stable_sort(stream.begin(), stream.end(), by_time);
    }
  }
  return result;
}

void write_event_dump(std::ostream& out, const DetectorStreams& streams) {
  std::vector<PhotonEvent> merged;
  for (const auto& s : streams) merged.insert(merged.end(), s.begin(), s.end());
  std::stable_sort(merged.begin(), merged.end(), [](const PhotonEvent& a, const PhotonEvent& b) {
    return a.time != b.time ? a.time < b.time : index(a.detector) < index(b.detector);
  });
  out << "detector,time_ps\n";
  for (const auto& ev : merged) out << detector_name(ev.detector) << ',' << ev.time << '\n';
}

DetectorStreams read_event_dump(std::istream& in) {
  DetectorStreams streams;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != "detector,time_ps") {
        throw DomainError("event dump line " + std::to_string(line_no) +
                          ": expected header 'detector,time_ps'");
      }
      header_seen = true;
      continue;
    }
    const auto comma = line.find(',');
    std::optional<Detector> det;
    if (comma != std::string::npos) det = parse_detector(std::string_view(line).substr(0, comma));
    TimePs t = 0;
    const char* first = line.data() + (comma == std::string::npos ? 0 : comma + 1);
    const char* last = line.data() + line.size();
    const auto [ptr, ec] = std::from_chars(first, last, t);
    if (!det || ec != std::errc() || ptr != last) {
      throw DomainError("event dump line " + std::to_string(line_no) + ": malformed record");
    }
    streams[index(*det)].push_back({*det, t});
  }
  for (const auto& s : streams) {
    if (!std::is_sorted(s.begin(), s.end(), [](const PhotonEvent& a, const PhotonEvent& b) {
          return a.time < b.time;
        })) {
      throw DomainError("event dump is not time-sorted");
    }
  }
  return streams;
}

}  // namespace dcqe
