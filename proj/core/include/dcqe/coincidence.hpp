#pragma once

#include "dcqe/event_timeline.hpp"
#include "dcqe/units.hpp"

#include <array>
#include <cstdint>
#include <span>

namespace dcqe {

/// Coincidence logic parameters.
///
/// `window` is the full coincidence-window width tau_c: two events pair when
/// |t_X - t_Y| <= tau_c / 2 (closed interval). `compensation` is a delay
/// added to every timestamp of the given detector before matching.
struct CoincidenceSpec {
  TimePs window = 8000;
  std::array<OffsetPs, 4> compensation{};

  void validate() const;
  bool operator==(const CoincidenceSpec&) const = default;
};

struct CountTable {
  std::uint64_t n_AB = 0;
  std::uint64_t n_ApB = 0;
  std::uint64_t n_ABp = 0;
  std::uint64_t n_ApBp = 0;
  std::array<std::uint64_t, 4> singles{};  ///< indexed by `index(Detector)`
  double interval = 0.0;                   ///< seconds

  std::uint64_t coincidences() const { return n_AB + n_ApB + n_ABp + n_ApBp; }
  std::uint64_t single(Detector d) const { return singles[index(d)]; }
  bool operator==(const CountTable&) const = default;
};

/// Greedy earliest-first two-pointer match over two time-sorted streams.
/// Each event joins at most one pair. On sorted input this is a maximum
/// matching for the window relation. Throws DomainError if a stream is not
/// sorted after compensation.
std::uint64_t count_pairs(std::span<const PhotonEvent> x, std::span<const PhotonEvent> y,
                          const CoincidenceSpec& spec);

/// count_pairs over (A,B), (A',B), (A,B'), (A',B') plus singles.
CountTable count_table(const DetectorStreams& streams, const CoincidenceSpec& spec,
                       double interval);

/// Expected accidental coincidence rate of two uncorrelated streams:
/// R_X * R_Y * tau_c. Each X event opens a window of total width tau_c (the
/// closed |dt| <= tau_c/2 rule above). Counters that accept |dt| <= tau_c
/// would see twice this.
double accidental_rate(double rate_x, double rate_y, const CoincidenceSpec& spec);

}  // namespace dcqe
