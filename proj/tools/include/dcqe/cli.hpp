#pragma once

#include "dcqe/config.hpp"
#include "dcqe/scan_io.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dcqe::cli {

enum ExitCode { kSuccess = 0, kUsageError = 1, kRuntimeFailure = 2 };

/// Entry point shared by the binary and the tests. Output dir precedence:
/// --out, then $DCQE_OUTPUT_DIR, then the manifest's output_dir, then the
/// manifest's own directory.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct RunRequest {
  std::filesystem::path manifest;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  unsigned threads = 1;
};

/// Executes a manifest and returns the files written, in order.
std::vector<std::filesystem::path> run(const RunRequest& request);

/// Fit-report CSV for every coincidence column of a scan.
void analyze(const ScanFile& scan, std::optional<double> period, std::ostream& out);

/// Summary of every known output in `dir` with PASS/FAIL lines; also
/// written to dir/report.txt.
std::string report(const std::filesystem::path& dir);

}  // namespace dcqe::cli
