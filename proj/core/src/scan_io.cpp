#include "dcqe/scan_io.hpp"

#include "dcqe/errors.hpp"
#include "dcqe/text.hpp"

#include <fstream>
#include <istream>
#include <ostream>

namespace dcqe {

std::string ScanFile::meta(const std::string& key) const {
  for (const auto& [k, v] : metadata) {
    if (k == key) return v;
  }
  return {};
}

void write_scan(std::ostream& out, const std::vector<ScanRow>& rows,
                const ScanMetadata& metadata) {
  for (const auto& [k, v] : metadata) out << "# " << k << "=" << v << "\n";
  out << kScanHeader << "\n";
  for (const ScanRow& r : rows) {
    const CountTable& c = r.counts;
    out << format_double(r.actuator_um) << ',' << format_double(r.delta_phi_rad) << ','
        << c.n_AB << ',' << c.n_ApB << ',' << c.n_ABp << ',' << c.n_ApBp;
    for (Detector d : kAllDetectors) out << ',' << c.single(d);
    out << ',' << format_double(c.interval) << "\n";
  }
}

void write_scan(const std::filesystem::path& path, const std::vector<ScanRow>& rows,
                const ScanMetadata& metadata) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ResourceError("cannot write " + path.string());
  write_scan(out, rows, metadata);
  if (!out) throw ResourceError("write failed: " + path.string());
}

ScanFile read_scan(std::istream& in) {
  ScanFile file;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto where = [&] { return "scan line " + std::to_string(line_no) + ": "; };
    if (!header) {
      if (line.front() == '#') {
        const std::string_view body = trim(std::string_view(line).substr(1));
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) throw DomainError(where() + "metadata needs key=value");
        file.metadata.emplace_back(std::string(trim(body.substr(0, eq))),
                                   std::string(trim(body.substr(eq + 1))));
        continue;
      }
      if (line != kScanHeader) throw DomainError(where() + "unexpected header '" + line + "'");
      header = true;
      continue;
    }
    std::vector<std::string_view> cells;
    std::string_view rest = line;
    for (;;) {
      const auto comma = rest.find(',');
      cells.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (cells.size() != 11) throw DomainError(where() + "expected 11 columns");
    ScanRow row;
    const auto real = [&](std::string_view s) {
      const auto v = parse_number<double>(s);
      if (!v) throw DomainError(where() + "bad number '" + std::string(s) + "'");
      return *v;
    };
    const auto count = [&](std::string_view s) {
      const auto v = parse_number<std::uint64_t>(s);
      if (!v) throw DomainError(where() + "bad count '" + std::string(s) + "'");
      return *v;
    };
    row.actuator_um = real(cells[0]);
    row.delta_phi_rad = real(cells[1]);
    row.counts.n_AB = count(cells[2]);
    row.counts.n_ApB = count(cells[3]);
    row.counts.n_ABp = count(cells[4]);
    row.counts.n_ApBp = count(cells[5]);
    for (std::size_t d = 0; d < 4; ++d) row.counts.singles[d] = count(cells[6 + d]);
    row.counts.interval = real(cells[10]);
    file.rows.push_back(row);
  }
  if (!header) throw DomainError("scan file has no header line");
  return file;
}

ScanFile read_scan(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ResourceError("cannot read " + path.string());
  return read_scan(in);
}

}  // namespace dcqe
