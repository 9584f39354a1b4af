#include "dcqe/coincidence.hpp"

#include "dcqe/errors.hpp"

namespace dcqe {

void CoincidenceSpec::validate() const {
  if (window == 0) throw DomainError("coincidence.window must be > 0");
}

namespace {

OffsetPs shifted(const PhotonEvent& ev, const CoincidenceSpec& spec) {
  return static_cast<OffsetPs>(ev.time) + spec.compensation[index(ev.detector)];
}

void require_sorted(std::span<const PhotonEvent> s, const CoincidenceSpec& spec,
                    const char* which) {
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (shifted(s[i], spec) < shifted(s[i - 1], spec)) {
      throw DomainError(std::string("count_pairs: stream ") + which + " is not time-sorted");
    }
  }
}

}  // namespace

std::uint64_t count_pairs(std::span<const PhotonEvent> x, std::span<const PhotonEvent> y,
                          const CoincidenceSpec& spec) {
  spec.validate();
  require_sorted(x, spec, "X");
  require_sorted(y, spec, "Y");

  // |dt| <= window/2, compared as 2|dt| <= window to stay in integers.
  const auto window = static_cast<OffsetPs>(spec.window);
  std::uint64_t pairs = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < x.size() && j < y.size()) {
    const OffsetPs tx = shifted(x[i], spec);
    const OffsetPs ty = shifted(y[j], spec);
    const OffsetPs dt = tx - ty;
    if (2 * (dt < 0 ? -dt : dt) <= window) {
      ++pairs;
      ++i;
      ++j;
    } else if (tx < ty) {
      ++i;
    } else {
      ++j;
    }
  }
  return pairs;
}

CountTable count_table(const DetectorStreams& streams, const CoincidenceSpec& spec,
                       double interval) {
  const auto& a = streams[index(Detector::A)];
  const auto& ap = streams[index(Detector::A_prime)];
  const auto& b = streams[index(Detector::B)];
  const auto& bp = streams[index(Detector::B_prime)];
  CountTable t;
  t.n_AB = count_pairs(a, b, spec);
  t.n_ApB = count_pairs(ap, b, spec);
  t.n_ABp = count_pairs(a, bp, spec);
  t.n_ApBp = count_pairs(ap, bp, spec);
  for (Detector d : kAllDetectors) t.singles[index(d)] = streams[index(d)].size();
  t.interval = interval;
  return t;
}

double accidental_rate(double rate_x, double rate_y, const CoincidenceSpec& spec) {
  if (!(rate_x >= 0.0) || !(rate_y >= 0.0)) throw DomainError("rates must be >= 0");
  return rate_x * rate_y * static_cast<double>(spec.window) / kPsPerSecond;
}

}  // namespace dcqe
