#include "dcqe/config.hpp"

#include "dcqe/errors.hpp"
#include "dcqe/text.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace dcqe {

namespace {

struct Entry {
  std::string key;
  std::string value;
  std::size_t line = 0;
  std::size_t key_col = 0;
  std::size_t value_col = 0;
  bool used = false;
};

struct Section {
  std::string name;
  std::vector<Entry> entries;
  std::size_t line = 0;  // first header
  std::size_t col = 0;
};

class Document {
 public:
  explicit Document(std::string_view text) {
    sections_.push_back({"", {}});
    std::size_t line_no = 0;
    std::size_t pos = 0;
    std::size_t current = 0;
    while (pos <= text.size()) {
      const auto end = std::min(text.find('\n', pos), text.size());
      std::string_view line = text.substr(pos, end - pos);
      pos = end + 1;
      ++line_no;
      if (const auto c = line.find_first_of("#;"); c != std::string_view::npos) {
        line = line.substr(0, c);
      }
      const std::string_view body = trim(line);
      if (body.empty()) continue;
      const std::size_t col = static_cast<std::size_t>(body.data() - line.data()) + 1;
      if (body.front() == '[') {
        if (body.back() != ']') throw ConfigError("unterminated section header", "", line_no, col);
        const std::string name(trim(body.substr(1, body.size() - 2)));
        if (name.empty()) throw ConfigError("empty section name", "", line_no, col);
        current = section_index(name);
        if (sections_[current].line == 0) {
          sections_[current].line = line_no;
          sections_[current].col = col;
        }
        continue;
      }
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) {
        throw ConfigError("expected 'key = value'", "", line_no, col);
      }
      const std::string_view key = trim(body.substr(0, eq));
      if (key.empty()) throw ConfigError("missing key", "", line_no, col);
      const std::string_view raw_value = body.substr(eq + 1);
      const std::string_view value = trim(raw_value);
      const std::size_t value_col =
          value.empty() ? col + eq + 1
                        : static_cast<std::size_t>(value.data() - line.data()) + 1;
      Section& s = sections_[current];
      for (const Entry& e : s.entries) {
        if (e.key == key) {
          throw ConfigError("duplicate key (first set on line " + std::to_string(e.line) + ")",
                            qualified(s.name, e.key), line_no, col);
        }
      }
      s.entries.push_back({std::string(key), std::string(value), line_no, col, value_col});
    }
  }

  Entry* find(std::string_view section, std::string_view key) {
    for (Section& s : sections_) {
      if (s.name != section) continue;
      for (Entry& e : s.entries) {
        if (e.key == key) {
          e.used = true;
          return &e;
        }
      }
    }
    return nullptr;
  }

  std::vector<Section>& sections() { return sections_; }

  /// Every entry must have been consumed by now.
  void reject_unknown(const std::vector<std::string>& known_sections) {
    for (const Section& s : sections_) {
      bool known = false;
      for (const auto& k : known_sections) known = known || k == s.name;
      if (!known && !s.entries.empty()) {
        throw ConfigError("unknown section [" + s.name + "]", s.name, s.line, s.col);
      }
      for (const Entry& e : s.entries) {
        if (e.used) continue;
        throw ConfigError("unknown key", qualified(s.name, e.key), e.line, e.key_col);
      }
    }
  }

  static std::string qualified(const std::string& section, const std::string& key) {
    return section.empty() ? key : section + "." + key;
  }

 private:
  std::size_t section_index(const std::string& name) {
    for (std::size_t i = 0; i < sections_.size(); ++i) {
      if (sections_[i].name == name) return i;
    }
    sections_.push_back({name, {}});
    return sections_.size() - 1;
  }

  std::vector<Section> sections_;
};

ConfigError value_error(const std::string& section, const Entry& e, const std::string& what) {
  return ConfigError(what + " (got '" + e.value + "')", Document::qualified(section, e.key),
                     e.line, e.value_col);
}

class Reader {
 public:
  Reader(Document& doc, std::string section) : doc_(doc), section_(std::move(section)) {}

  // Positions of fields for post-validation error messages.
  std::map<std::string, std::pair<std::size_t, std::size_t>>* locations = nullptr;

  Entry* get(std::string_view key) {
    Entry* e = doc_.find(section_, key);
    if (e && locations) {
      (*locations)[Document::qualified(section_, std::string(key))] = {e->line, e->key_col};
    }
    return e;
  }

  void number(std::string_view key, double& out) {
    if (Entry* e = get(key)) out = parse_double(*e);
  }

  /// `key` in radians or `key_deg` in degrees, not both.
  void angle(const std::string& key, double& out) {
    Entry* rad = get(key);
    Entry* deg = get(key + "_deg");
    if (rad && deg) {
      throw ConfigError("set either " + key + " or " + key + "_deg, not both",
                        Document::qualified(section_, key), deg->line, deg->key_col);
    }
    if (rad) out = parse_double(*rad);
    if (deg) {
      out = degrees(parse_double(*deg));
      if (locations) (*locations)[Document::qualified(section_, key)] = {deg->line, deg->key_col};
    }
  }

  bool optional_angle(const std::string& key, std::optional<double>& out) {
    double v = 0.0;
    const bool present = doc_.find(section_, key) || doc_.find(section_, key + "_deg");
    if (!present) return false;
    angle(key, v);
    out = v;
    return true;
  }

  void angle_list(const std::string& key, std::vector<double>& out) {
    Entry* rad = get(key);
    Entry* deg = get(key + "_deg");
    if (rad && deg) {
      throw ConfigError("set either " + key + " or " + key + "_deg, not both",
                        Document::qualified(section_, key), deg->line, deg->key_col);
    }
    Entry* e = rad ? rad : deg;
    if (!e) return;
    out.clear();
    std::string_view rest = e->value;
    while (!trim(rest).empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = rest.substr(0, comma);
      const auto v = parse_number<double>(item);
      if (!v) throw value_error(section_, *e, "expected a comma-separated list of numbers");
      out.push_back(deg ? degrees(*v) : *v);
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
      if (trim(rest).empty()) throw value_error(section_, *e, "trailing comma in list");
    }
  }

  template <typename Int>
  void integer(std::string_view key, Int& out) {
    if (Entry* e = get(key)) {
      const auto v = parse_number<Int>(e->value);
      if (!v) throw value_error(section_, *e, "expected an integer");
      out = *v;
    }
  }

  void boolean(std::string_view key, bool& out) {
    if (Entry* e = get(key)) {
      if (e->value == "true") {
        out = true;
      } else if (e->value == "false") {
        out = false;
      } else {
        throw value_error(section_, *e, "expected true or false");
      }
    }
  }

  double parse_double(const Entry& e) const {
    const auto v = parse_number<double>(e.value);
    if (!v) throw value_error(section_, e, "expected a number");
    return *v;
  }

  const std::string& section() const { return section_; }

 private:
  Document& doc_;
  std::string section_;
};

void read_arm(Reader r, ArmGeometry& arm) {
  r.number("base_path_length", arm.base_path_length);
  r.number("extra_free_space", arm.extra_free_space);
  r.number("fiber_length", arm.fiber_length);
  r.number("fiber_speed_fraction", arm.fiber_speed_fraction);
  r.integer("electrical_delay_ps", arm.electrical_delay);
  r.number("collection_efficiency", arm.collection_efficiency);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string(), "");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

BenchConfig parse_config(std::string_view text) {
  Document doc(text);
  if (const Section& root = doc.sections().front(); !root.entries.empty()) {
    const Entry& e = root.entries.front();
    throw ConfigError("key outside any section", e.key, e.line, e.key_col);
  }
  BenchConfig cfg;
  std::map<std::string, std::pair<std::size_t, std::size_t>> where;
  auto reader = [&](const char* section) {
    Reader r(doc, section);
    r.locations = &where;
    return r;
  };

  {
    Reader r = reader("source");
    Entry* kind = r.get("kind");
    if (!kind) throw ConfigError("required key is missing", "source.kind");
    const auto k = parse_source_kind(kind->value);
    if (!k) throw value_error("source", *kind, "expected entangled, mixed_diagonal or mixed_hv");
    cfg.source.kind = *k;
    r.angle("alpha", cfg.source.alpha);
    r.number("coherence", cfg.source.coherence);
    r.number("pair_rate", cfg.source.pair_rate);
    r.number("duration", cfg.source.duration);
  }
  read_arm(reader("signal_arm"), cfg.signal_arm);
  read_arm(reader("idler_arm"), cfg.idler_arm);
  {
    Reader r = reader("detectors");
    DetectorSpec shared;
    r.number("efficiency", shared.efficiency);
    r.number("jitter_ps", shared.jitter_sigma);
    r.number("dark_rate", shared.dark_rate);
    for (Detector d : kAllDetectors) {
      DetectorSpec& spec = cfg.detector(d);
      spec = shared;
      const std::string p(detector_name(d));
      r.number(p + ".efficiency", spec.efficiency);
      r.number(p + ".jitter_ps", spec.jitter_sigma);
      r.number(p + ".dark_rate", spec.dark_rate);
    }
  }
  {
    Reader r = reader("analyzers");
    r.angle("signal_hwp", cfg.signal_hwp);
    r.angle("idler_hwp", cfg.idler_hwp);
    r.optional_angle("source_rotation", cfg.source_rotation);
    r.angle_list("mirror_deltas", cfg.mirror_deltas);
    if (Entry* e = r.get("beam_block")) {
      if (e->value == "none") {
        cfg.beam_block.reset();
      } else if (e->value == "h_path") {
        cfg.beam_block = BlockedPath::h_path;
      } else if (e->value == "v_path") {
        cfg.beam_block = BlockedPath::v_path;
      } else {
        throw value_error("analyzers", *e, "expected none, h_path or v_path");
      }
    }
  }
  {
    Reader r = reader("coincidence");
    r.integer("window_ps", cfg.coincidence.window);
    for (Detector d : kAllDetectors) {
      r.integer("compensation_" + std::string(detector_name(d)) + "_ps",
                cfg.coincidence.compensation[index(d)]);
    }
  }
  {
    Reader r = reader("scan");
    r.number("start_um", cfg.scan.start_um);
    r.number("step_um", cfg.scan.step_um);
    r.integer("n_steps", cfg.scan.n_steps);
    r.number("dwell_s", cfg.scan.dwell_s);
  }
  {
    Reader r = reader("calibration");
    r.number("radians_per_micron", cfg.calibration.radians_per_micron);
    r.number("origin_offset", cfg.calibration.origin_offset);
  }
  reader("run").integer("master_seed", cfg.master_seed);

  doc.reject_unknown({"source", "signal_arm", "idler_arm", "detectors", "analyzers",
                      "coincidence", "scan", "calibration", "run"});

  try {
    cfg.validate();
    cfg.source.validate();
  } catch (const InvalidField& e) {
    std::size_t line = 0;
    std::size_t col = 0;
    std::string lookup = e.field();
    // detectors.A.efficiency may come from the shared detectors.efficiency key
    if (!where.count(lookup) && lookup.rfind("detectors.", 0) == 0) {
      lookup = "detectors." + lookup.substr(lookup.rfind('.') + 1);
    }
    if (auto it = where.find(lookup); it != where.end()) std::tie(line, col) = it->second;
    throw ConfigError(e.constraint(), e.field(), line, col);
  } catch (const DomainError& e) {
    throw ConfigError(e.what(), "");
  }
  return cfg;
}

BenchConfig load_config(const std::filesystem::path& path) { return parse_config(read_text(path)); }

std::string serialize_config(const BenchConfig& c) {
  std::ostringstream out;
  const auto num = [](double v) { return format_double(v); };
  out << "[source]\n"
      << "kind = " << source_kind_name(c.source.kind) << "\n"
      << "alpha = " << num(c.source.alpha) << "\n"
      << "coherence = " << num(c.source.coherence) << "\n"
      << "pair_rate = " << num(c.source.pair_rate) << "\n"
      << "duration = " << num(c.source.duration) << "\n";
  const auto arm = [&](const char* name, const ArmGeometry& a) {
    out << "\n[" << name << "]\n"
        << "base_path_length = " << num(a.base_path_length) << "\n"
        << "extra_free_space = " << num(a.extra_free_space) << "\n"
        << "fiber_length = " << num(a.fiber_length) << "\n"
        << "fiber_speed_fraction = " << num(a.fiber_speed_fraction) << "\n"
        << "electrical_delay_ps = " << a.electrical_delay << "\n"
        << "collection_efficiency = " << num(a.collection_efficiency) << "\n";
  };
  arm("signal_arm", c.signal_arm);
  arm("idler_arm", c.idler_arm);
  out << "\n[detectors]\n";
  for (Detector d : kAllDetectors) {
    const auto& s = c.detector(d);
    const std::string p(detector_name(d));
    out << p << ".efficiency = " << num(s.efficiency) << "\n"
        << p << ".jitter_ps = " << num(s.jitter_sigma) << "\n"
        << p << ".dark_rate = " << num(s.dark_rate) << "\n";
  }
  out << "\n[analyzers]\n"
      << "signal_hwp = " << num(c.signal_hwp) << "\n"
      << "idler_hwp = " << num(c.idler_hwp) << "\n";
  if (c.source_rotation) out << "source_rotation = " << num(*c.source_rotation) << "\n";
  out << "mirror_deltas =";
  for (std::size_t i = 0; i < c.mirror_deltas.size(); ++i) {
    out << (i ? ", " : " ") << num(c.mirror_deltas[i]);
  }
  out << "\nbeam_block = "
      << (!c.beam_block ? "none" : *c.beam_block == BlockedPath::h_path ? "h_path" : "v_path")
      << "\n";
  out << "\n[coincidence]\nwindow_ps = " << c.coincidence.window << "\n";
  for (Detector d : kAllDetectors) {
    out << "compensation_" << detector_name(d) << "_ps = " << c.coincidence.compensation[index(d)]
        << "\n";
  }
  out << "\n[scan]\n"
      << "start_um = " << num(c.scan.start_um) << "\n"
      << "step_um = " << num(c.scan.step_um) << "\n"
      << "n_steps = " << c.scan.n_steps << "\n"
      << "dwell_s = " << num(c.scan.dwell_s) << "\n";
  out << "\n[calibration]\n"
      << "radians_per_micron = " << num(c.calibration.radians_per_micron) << "\n"
      << "origin_offset = " << num(c.calibration.origin_offset) << "\n";
  out << "\n[run]\nmaster_seed = " << c.master_seed << "\n";
  return out.str();
}

std::string_view source_kind_name(SourceKind k) {
  switch (k) {
    case SourceKind::entangled: return "entangled";
    case SourceKind::mixed_diagonal: return "mixed_diagonal";
    case SourceKind::mixed_hv: return "mixed_hv";
  }
  return "?";
}

std::optional<SourceKind> parse_source_kind(std::string_view s) {
  if (s == "entangled") return SourceKind::entangled;
  if (s == "mixed_diagonal") return SourceKind::mixed_diagonal;
  if (s == "mixed_hv") return SourceKind::mixed_hv;
  return std::nullopt;
}

std::string_view experiment_name(Experiment e) {
  switch (e) {
    case Experiment::fringe: return "fringe";
    case Experiment::delay_compare: return "delay_compare";
    case Experiment::chsh: return "chsh";
    case Experiment::beam_block: return "beam_block";
    case Experiment::rotation: return "rotation";
    case Experiment::overshoot: return "overshoot";
  }
  return "?";
}

std::optional<Experiment> parse_experiment(std::string_view name) {
  for (Experiment e : {Experiment::fringe, Experiment::delay_compare, Experiment::chsh,
                       Experiment::beam_block, Experiment::rotation, Experiment::overshoot}) {
    if (experiment_name(e) == name) return e;
  }
  return std::nullopt;
}

std::string_view delay_mode_name(DelayMode m) {
  switch (m) {
    case DelayMode::none: return "none";
    case DelayMode::free_space_2m: return "free_space_2m";
    case DelayMode::fiber_5m: return "fiber_5m";
  }
  return "?";
}

std::optional<DelayMode> parse_delay_mode(std::string_view name) {
  for (DelayMode m : {DelayMode::none, DelayMode::free_space_2m, DelayMode::fiber_5m}) {
    if (delay_mode_name(m) == name) return m;
  }
  return std::nullopt;
}

RunManifest parse_manifest(std::string_view text) {
  Document doc(text);
  RunManifest m;
  Reader root(doc, "");
  root.integer("format_version", m.format_version);
  if (m.format_version != 1) {
    Entry* e = doc.find("", "format_version");
    throw ConfigError("unsupported format_version", "format_version", e->line, e->value_col);
  }
  Entry* config = root.get("config");
  if (!config) throw ConfigError("required key is missing", "config");
  if (config->value.empty()) throw value_error("", *config, "expected a path");
  m.config_path = config->value;
  Entry* experiment = root.get("experiment");
  if (!experiment) throw ConfigError("required key is missing", "experiment");
  const auto e = parse_experiment(experiment->value);
  if (!e) {
    throw value_error("", *experiment,
                      "expected fringe, delay_compare, chsh, beam_block, rotation or overshoot");
  }
  m.experiment = *e;
  if (Entry* out = root.get("output_dir")) m.output_dir = out->value;
  if (doc.find("", "master_seed")) {
    std::uint64_t seed = 0;
    root.integer("master_seed", seed);
    m.master_seed = seed;
  }

  Reader p(doc, "params");
  if (Entry* mode = p.get("delay_mode")) {
    const auto d = parse_delay_mode(mode->value);
    if (!d) throw value_error("params", *mode, "expected none, free_space_2m or fiber_5m");
    m.params.delay_mode = *d;
  }
  p.boolean("compensate", m.params.compensate);
  p.boolean("beam_spread_loss", m.params.beam_spread_loss);
  if (doc.find("params", "delayed_seed")) {
    std::uint64_t seed = 0;
    p.integer("delayed_seed", seed);
    m.params.delayed_seed = seed;
  }
  p.angle("chsh_a", m.params.chsh.a);
  p.angle("chsh_a_prime", m.params.chsh.a_prime);
  p.angle("chsh_b", m.params.chsh.b);
  p.angle("chsh_b_prime", m.params.chsh.b_prime);
  p.angle_list("rotation_angles", m.params.rotation_angles);
  p.angle("overshoot_epsilon", m.params.overshoot_epsilon);

  doc.reject_unknown({"", "params"});
  return m;
}

RunManifest load_manifest(const std::filesystem::path& path) {
  RunManifest m = parse_manifest(read_text(path));
  if (m.config_path.is_relative()) m.config_path = path.parent_path() / m.config_path;
  return m;
}

}  // namespace dcqe
