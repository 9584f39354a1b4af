#pragma once

#include "dcqe/bench_config.hpp"
#include "dcqe/experiment.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dcqe {

/// Parse an INI-style bench description. Sections [source], [signal_arm],
/// [idler_arm], [detectors], [analyzers], [coincidence], [scan],
/// [calibration], [run]. Unknown or repeated keys are errors; so is a
/// missing source.kind. Throws ConfigError carrying line and column.
BenchConfig parse_config(std::string_view text);
BenchConfig load_config(const std::filesystem::path& path);

/// Text that parse_config maps back to an equal BenchConfig. Angles are
/// written in radians, doubles in shortest round-trip form.
std::string serialize_config(const BenchConfig& config);

std::string_view source_kind_name(SourceKind k);
std::optional<SourceKind> parse_source_kind(std::string_view name);

enum class Experiment { fringe, delay_compare, chsh, beam_block, rotation, overshoot };

std::string_view experiment_name(Experiment e);
std::optional<Experiment> parse_experiment(std::string_view name);
std::string_view delay_mode_name(DelayMode m);
std::optional<DelayMode> parse_delay_mode(std::string_view name);

struct ExperimentParams {
  DelayMode delay_mode = DelayMode::free_space_2m;
  bool compensate = true;
  bool beam_spread_loss = true;
  std::optional<std::uint64_t> delayed_seed;
  ChshAngles chsh;
  std::vector<double> rotation_angles = {0.0, degrees(10.0), degrees(20.0), degrees(30.0)};
  double overshoot_epsilon = degrees(1.0);

  bool operator==(const ExperimentParams&) const = default;
};

struct RunManifest {
  int format_version = 1;
  std::filesystem::path config_path;  ///< relative paths resolve against the manifest
  Experiment experiment = Experiment::fringe;
  std::filesystem::path output_dir;
  std::optional<std::uint64_t> master_seed;  ///< overrides the config's [run] seed
  ExperimentParams params;
};

/// Root keys format_version, config, experiment, output_dir, master_seed,
/// plus an optional [params] section.
RunManifest parse_manifest(std::string_view text);
RunManifest load_manifest(const std::filesystem::path& path);

}  // namespace dcqe
