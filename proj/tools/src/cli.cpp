#include "dcqe/cli.hpp"

#include "dcqe/analysis.hpp"
#include "dcqe/errors.hpp"
#include "dcqe/experiment.hpp"
#include "dcqe/text.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace dcqe::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kSeriesNames[] = {"n_AB", "n_ApB", "n_ABp", "n_ApBp"};
constexpr Series kAllSeries[] = {Series::n_AB, Series::n_ApB, Series::n_ABp, Series::n_ApBp};

std::string setting_name(const BenchConfig& b) {
  const double tol = 1e-9;
  if (std::abs(b.signal_hwp - degrees(22.5)) > tol) return "custom";
  if (std::abs(b.idler_hwp - degrees(22.5)) < tol) return "erasure";
  if (std::abs(b.idler_hwp) < tol) return "which_way";
  return "custom";
}

ScanMetadata scan_metadata(const RunManifest& m, const BenchConfig& b) {
  return {{"format_version", std::to_string(m.format_version)},
          {"experiment", std::string(experiment_name(m.experiment))},
          {"master_seed", std::to_string(b.master_seed)},
          {"setting", setting_name(b)},
          {"source_kind", std::string(source_kind_name(b.source.kind))},
          {"coherence", format_double(b.source.coherence)},
          {"signal_hwp_rad", format_double(b.signal_hwp)},
          {"idler_hwp_rad", format_double(b.idler_hwp)},
          {"period_um", format_double(fringe_period_um(b.calibration))}};
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ResourceError("cannot write " + path.string());
  return out;
}

void write_meta(std::ostream& out, const ScanMetadata& meta) {
  for (const auto& [k, v] : meta) out << "# " << k << "=" << v << "\n";
}

// Reads `# key=value` lines and the rest of a small CSV.
struct Table {
  ScanMetadata meta;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string get(const std::string& key) const {
    for (const auto& [k, v] : meta)
      if (k == key) return v;
    return {};
  }
  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw DomainError("missing column " + name);
  }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

Table read_table(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ResourceError("cannot read " + path.string());
  Table t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos)
        t.meta.emplace_back(std::string(trim(line.substr(1, eq - 1))), line.substr(eq + 1));
      continue;
    }
    if (t.header.empty()) {
      t.header = split(line);
    } else {
      t.rows.push_back(split(line));
    }
  }
  return t;
}

double to_double(const std::string& s) {
  const auto v = parse_number<double>(s);
  if (!v) throw DomainError("bad number '" + s + "'");
  return *v;
}

std::optional<double> meta_period(const ScanFile& f) {
  const std::string p = f.meta("period_um");
  if (p.empty()) return std::nullopt;
  return parse_number<double>(p);
}

FringeFit fit_nab(const ScanFile& f) {
  return fit_fringe(series(f.rows, Series::n_AB), FitOptions{.period = meta_period(f)});
}

std::string pass(bool ok) { return ok ? "PASS" : "FAIL"; }

std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

void report_scan(std::ostream& r, const fs::path& path) {
  const ScanFile f = read_scan(path);
  const FringeFit fit = fit_nab(f);
  const std::string setting = f.meta("setting");
  r << path.filename().string() << " (" << (setting.empty() ? "unknown" : setting)
    << ", seed " << f.meta("master_seed") << ")\n";
  r << "  n_AB visibility " << fixed(fit.visibility) << " +- " << fixed(fit.visibility_sigma)
    << ", phase " << fixed(fit.phase) << " rad, period " << fixed(fit.period) << " um\n";
  if (setting == "erasure" && f.meta("source_kind") == "entangled") {
    const bool ok = fit.visibility >= 0.71 && fit.visibility <= 0.77;
    r << "  visibility " << fixed(fit.visibility, 3)
      << " in [0.71, 0.77] vs target band [0.72, 0.75]: " << pass(ok) << "\n";
  } else if (setting == "which_way") {
    const bool ok = fit.visibility < 0.05;
    r << "  which-way visibility " << fixed(fit.visibility, 3) << " < 0.05: " << pass(ok) << "\n";
  }
}

void report_delay(std::ostream& r, const fs::path& dir) {
  const ScanFile a = read_scan(dir / "scan_reference.csv");
  const ScanFile b = read_scan(dir / "scan_delayed.csv");
  const ScanComparison cmp = compare_scans(a.rows, b.rows);
  const FringeFit fa = fit_nab(a);
  const FringeFit fb = fit_nab(b);
  const double sigma = std::hypot(fa.visibility_sigma, fb.visibility_sigma);
  const double z = sigma > 0 ? std::abs(fa.visibility - fb.visibility) / sigma : 0.0;
  r << "delay comparison (" << b.meta("delay_mode") << ", compensate " << b.meta("compensate")
    << ")\n";
  r << "  chi2 " << fixed(cmp.chi2, 2) << " / dof " << cmp.dof << ", p = " << fixed(cmp.p_value)
    << " > 0.01: " << pass(cmp.p_value > 0.01) << "\n";
  r << "  visibility " << fixed(fa.visibility) << " vs " << fixed(fb.visibility) << " ("
    << fixed(z, 2) << " sigma) within 3 sigma: " << pass(z <= 3.0) << "\n";
}

void report_chsh(std::ostream& r, const fs::path& path) {
  const Table t = read_table(path);
  const double s = to_double(t.get("S"));
  const double sigma = to_double(t.get("sigma_S"));
  r << "CHSH (" << t.get("source_kind") << ")\n";
  r << "  S = " << fixed(s) << " +- " << fixed(sigma) << " (reference 2.523 +- 0.005)\n";
  r << "  S > 2 (Bell violation): " << pass(s > 2.0) << "\n";
}

void report_beam_block(std::ostream& r, const fs::path& path) {
  const Table t = read_table(path);
  for (const auto& row : t.rows) {
    const std::string kind = row[t.column("source_kind")];
    const double ratio = to_double(row[t.column("ratio")]);
    r << "beam block (" << kind << ")\n  N_HH blocked/unblocked = " << fixed(ratio, 3);
    if (kind == "entangled") {
      r << " vs expected 1.00 +- 0.05: " << pass(std::abs(ratio - 1.0) <= 0.05) << "\n";
    } else if (kind == "mixed_diagonal") {
      r << " vs reference 0.50 +- 0.05: " << pass(std::abs(ratio - 0.5) <= 0.05) << "\n";
    } else {
      r << "\n";
    }
  }
}

void report_rotation(std::ostream& r, const fs::path& path) {
  const Table t = read_table(path);
  const auto vi = t.column("erasure_visibility");
  const auto si = t.column("erasure_visibility_sigma");
  double worst = 0.0;
  r << "rotation invariance (" << t.get("source_kind") << ")\n";
  for (const auto& row : t.rows) {
    r << "  theta " << fixed(to_double(row[t.column("theta_deg")]), 2) << " deg: erasure V " << fixed(to_double(row[vi]))
      << " +- " << fixed(to_double(row[si])) << ", which-way V "
      << fixed(to_double(row[t.column("which_way_visibility")])) << "\n";
  }
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    for (std::size_t j = i + 1; j < t.rows.size(); ++j) {
      const double d = std::abs(to_double(t.rows[i][vi]) - to_double(t.rows[j][vi]));
      const double s = std::hypot(to_double(t.rows[i][si]), to_double(t.rows[j][si]));
      if (s > 0) worst = std::max(worst, d / s);
    }
  }
  if (t.get("source_kind") == "entangled") {
    r << "  erasure visibilities agree within 3 sigma (worst " << fixed(worst, 2)
      << "): " << pass(worst <= 3.0) << "\n";
  }
}

void report_overshoot(std::ostream& r, const fs::path& dir) {
  const ScanFile over = read_scan(dir / "scan_overshoot.csv");
  const ScanFile eras = read_scan(dir / "scan_erasure.csv");
  const FringeFit fo = fit_nab(over);
  const FringeFit fe = fit_nab(eras);
  const double sep = phase_separation(fo.phase, fe.phase);
  r << "overshoot (epsilon " << over.meta("epsilon_deg") << " deg)\n";
  r << "  residual visibility " << fixed(fo.visibility) << " +- " << fixed(fo.visibility_sigma)
    << ", predicted " << over.meta("predicted_visibility") << "\n";
  r << "  phase separation from erasure " << fixed(sep) << " rad, pi +- 0.3: "
    << pass(std::abs(sep - kPi) <= 0.3) << "\n";
}

}  // namespace

std::vector<fs::path> run(const RunRequest& request) {
  RunManifest m = load_manifest(request.manifest);
  BenchConfig bench = load_config(m.config_path);
  if (m.master_seed) bench.master_seed = *m.master_seed;
  if (request.seed) bench.master_seed = *request.seed;

  fs::path dir;
  if (request.out) {
    dir = *request.out;
  } else if (const char* env = std::getenv("DCQE_OUTPUT_DIR"); env && *env) {
    dir = env;
  } else if (!m.output_dir.empty()) {
    dir = m.output_dir.is_relative() ? request.manifest.parent_path() / m.output_dir
                                     : m.output_dir;
  } else {
    dir = request.manifest.parent_path();
  }
  if (dir.empty()) dir = ".";
  fs::create_directories(dir);

  const RunOptions options{.threads = request.threads};
  std::vector<fs::path> written;
  const auto scan_file = [&](const std::string& name, const BenchConfig& b,
                             const std::vector<ScanRow>& rows, ScanMetadata extra = {}) {
    ScanMetadata meta = scan_metadata(m, b);
    meta.insert(meta.end(), extra.begin(), extra.end());
    write_scan(dir / name, rows, meta);
    written.push_back(dir / name);
  };

  switch (m.experiment) {
    case Experiment::fringe: {
      scan_file("scan.csv", bench, run_fringe_scan(bench, options).rows);
      break;
    }
    case Experiment::delay_compare: {
      DelayOptions d;
      d.compensate = m.params.compensate;
      d.beam_spread_loss = m.params.beam_spread_loss;
      d.delayed_seed = m.params.delayed_seed;
      const DelayComparison cmp = run_delay_comparison(bench, m.params.delay_mode, d, options);
      const ScanMetadata extra = {{"delay_mode", std::string(delay_mode_name(m.params.delay_mode))},
                                  {"compensate", m.params.compensate ? "true" : "false"},
                                  {"added_delay_ps", std::to_string(cmp.added_delay)}};
      scan_file("scan_reference.csv", cmp.reference_bench, cmp.reference.rows, extra);
      scan_file("scan_delayed.csv", cmp.delayed_bench, cmp.delayed.rows, extra);
      break;
    }
    case Experiment::chsh: {
      const ChshResult res = run_chsh(bench, m.params.chsh);
      const fs::path path = dir / "chsh.csv";
      auto out = open_out(path);
      ScanMetadata meta = scan_metadata(m, bench);
      meta.emplace_back("S", format_double(res.S));
      meta.emplace_back("sigma_S", format_double(res.sigma_S));
      write_meta(out, meta);
      out << "signal_angle_rad,idler_angle_rad,n_AB,n_ApB,n_ABp,n_ApBp,E,sigma_E\n";
      for (const ChshSetting& s : res.settings) {
        out << format_double(s.signal_angle) << ',' << format_double(s.idler_angle) << ','
            << s.counts.n_AB << ',' << s.counts.n_ApB << ',' << s.counts.n_ABp << ','
            << s.counts.n_ApBp << ',' << format_double(s.correlation) << ','
            << format_double(s.sigma) << "\n";
      }
      written.push_back(path);
      break;
    }
    case Experiment::beam_block: {
      const BeamBlockResult res = run_beam_block(bench);
      const fs::path path = dir / "beam_block.csv";
      auto out = open_out(path);
      write_meta(out, scan_metadata(m, bench));
      out << "source_kind,n_HH_blocked,n_HH_unblocked,ratio\n";
      out << source_kind_name(bench.source.kind) << ',' << res.n_HH_blocked << ','
          << res.n_HH_unblocked << ',' << format_double(res.ratio()) << "\n";
      written.push_back(path);
      break;
    }
    case Experiment::rotation: {
      const auto results = run_rotation_invariance(bench, m.params.rotation_angles, options);
      const fs::path path = dir / "rotation.csv";
      auto out = open_out(path);
      write_meta(out, scan_metadata(m, bench));
      out << "theta_deg,erasure_visibility,erasure_visibility_sigma,erasure_phase_rad,"
             "which_way_visibility,which_way_visibility_sigma\n";
      for (std::size_t k = 0; k < results.size(); ++k) {
        const RotationSummary& s = results[k];
        out << format_double(to_degrees(s.theta)) << ',' << format_double(s.erasure_fit.visibility)
            << ',' << format_double(s.erasure_fit.visibility_sigma) << ','
            << format_double(s.erasure_fit.phase) << ','
            << format_double(s.which_way_fit.visibility) << ','
            << format_double(s.which_way_fit.visibility_sigma) << "\n";
        BenchConfig rotated = bench;
        rotated.source_rotation = s.theta;
        rotated.master_seed = s.seed;
        const ScanMetadata extra = {{"theta_deg", format_double(to_degrees(s.theta))}};
        scan_file("scan_rotation_" + std::to_string(k) + "_erasure.csv", erasure_bench(rotated),
                  s.erasure.rows, extra);
        scan_file("scan_rotation_" + std::to_string(k) + "_which_way.csv",
                  which_way_bench(rotated), s.which_way.rows, extra);
      }
      written.insert(written.begin(), path);
      break;
    }
    case Experiment::overshoot: {
      const double eps = m.params.overshoot_epsilon;
      const FringeScan over = run_overshoot_study(bench, eps, options);
      const BenchConfig eras_bench = erasure_bench(bench);
      const FringeScan eras = run_fringe_scan(eras_bench, options);
      BenchConfig over_bench = which_way_bench(bench);
      over_bench.idler_hwp = -eps;
      const double predicted = bench.source.coherence * std::abs(std::sin(4.0 * eps));
      const ScanMetadata extra = {{"epsilon_deg", format_double(to_degrees(eps))},
                                  {"predicted_visibility", format_double(predicted)}};
      scan_file("scan_overshoot.csv", over_bench, over.rows, extra);
      scan_file("scan_erasure.csv", eras_bench, eras.rows, extra);
      break;
    }
  }
  return written;
}

void analyze(const ScanFile& scan, std::optional<double> period, std::ostream& out) {
  if (!period) period = meta_period(scan);
  out << "series,offset,amplitude,phase_rad,period_um,visibility,visibility_sigma,residual_rms,"
         "poisson_ratio\n";
  for (std::size_t i = 0; i < 4; ++i) {
    const auto pts = series(scan.rows, kAllSeries[i]);
    const FitOptions opts{.period = period};
    const FringeFit f = fit_fringe(pts, opts);
    std::string ratio = "nan";
    if (pts.size() >= 10) ratio = format_double(poisson_consistency(pts, true, opts));
    out << kSeriesNames[i] << ',' << format_double(f.offset) << ',' << format_double(f.amplitude)
        << ',' << format_double(f.phase) << ',' << format_double(f.period) << ','
        << format_double(f.visibility) << ',' << format_double(f.visibility_sigma) << ','
        << format_double(f.residual_rms) << ',' << ratio << "\n";
  }
}

std::string report(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ResourceError("not a directory: " + dir.string());
  std::ostringstream r;
  bool any = false;
  const auto has = [&](const char* name) { return fs::exists(dir / name); };
  if (has("scan.csv")) {
    report_scan(r, dir / "scan.csv");
    any = true;
  }
  if (has("scan_reference.csv") && has("scan_delayed.csv")) {
    report_delay(r, dir);
    any = true;
  }
  if (has("chsh.csv")) {
    report_chsh(r, dir / "chsh.csv");
    any = true;
  }
  if (has("beam_block.csv")) {
    report_beam_block(r, dir / "beam_block.csv");
    any = true;
  }
  if (has("rotation.csv")) {
    report_rotation(r, dir / "rotation.csv");
    any = true;
  }
  if (has("scan_overshoot.csv") && has("scan_erasure.csv")) {
    report_overshoot(r, dir);
    any = true;
  }
  if (!any) throw ResourceError("no recognised outputs in " + dir.string());
  const std::string text = r.str();
  auto out = open_out(dir / "report.txt");
  out << text;
  return text;
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Delayed-choice quantum eraser simulator"};
  app.require_subcommand(1);

  RunRequest req;
  std::string manifest;
  std::uint64_t seed = 0;
  std::string out_dir;
  auto* run_cmd = app.add_subcommand("run", "Execute a run manifest and write CSVs");
  run_cmd->add_option("manifest", manifest, "Run manifest")->required();
  auto* seed_opt = run_cmd->add_option("--seed", seed, "Override the master seed");
  auto* out_opt = run_cmd->add_option("--out", out_dir, "Output directory");
  run_cmd->add_option("--threads", req.threads, "Worker threads for scan points")
      ->check(CLI::PositiveNumber);

  std::string scan_path;
  double period = 0.0;
  auto* analyze_cmd = app.add_subcommand("analyze", "Fit every coincidence column of a scan CSV");
  analyze_cmd->add_option("scan", scan_path, "Scan CSV")->required();
  auto* period_opt =
      analyze_cmd->add_option("--period", period, "Fix the fringe period (um)")
          ->check(CLI::PositiveNumber);

  std::string report_dir;
  auto* report_cmd = app.add_subcommand("report", "Summarize a run directory against targets");
  report_cmd->add_option("dir", report_dir, "Run output directory")->required();

  std::string config_path;
  auto* validate_cmd = app.add_subcommand("validate", "Check a bench config without running");
  validate_cmd->add_option("config", config_path, "Bench config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "dcqe: " << e.what() << "\n" << app.help();
    return kUsageError;
  }

  try {
    if (*run_cmd) {
      req.manifest = manifest;
      if (*seed_opt) req.seed = seed;
      if (*out_opt) req.out = out_dir;
      for (const fs::path& p : run(req)) out << p.string() << "\n";
    } else if (*analyze_cmd) {
      std::optional<double> fixed_period;
      if (*period_opt) fixed_period = period;
      analyze(read_scan(fs::path(scan_path)), fixed_period, out);
    } else if (*report_cmd) {
      out << report(report_dir);
    } else if (*validate_cmd) {
      load_config(config_path);
      out << config_path << ": ok\n";
    }
  } catch (const std::exception& e) {
    err << "dcqe: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  return kSuccess;
}

}  // namespace dcqe::cli
