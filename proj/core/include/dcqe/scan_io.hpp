#pragma once

#include "dcqe/bench_config.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace dcqe {

inline constexpr const char* kScanHeader =
    "actuator_um,delta_phi_rad,n_AB,n_ApB,n_ABp,n_ApBp,singles_A,singles_Ap,singles_B,"
    "singles_Bp,dwell_s";

/// `# key=value` lines written ahead of the CSV header, in order.
using ScanMetadata = std::vector<std::pair<std::string, std::string>>;

struct ScanFile {
  ScanMetadata metadata;
  std::vector<ScanRow> rows;

  /// Value of a metadata key, empty when absent.
  std::string meta(const std::string& key) const;
};

void write_scan(std::ostream& out, const std::vector<ScanRow>& rows,
                const ScanMetadata& metadata = {});
void write_scan(const std::filesystem::path& path, const std::vector<ScanRow>& rows,
                const ScanMetadata& metadata = {});

/// Throws DomainError on a bad header or malformed row (message has the line).
ScanFile read_scan(std::istream& in);
ScanFile read_scan(const std::filesystem::path& path);

}  // namespace dcqe
