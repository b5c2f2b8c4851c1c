#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mtb/errors.hpp"
#include "mtb/geometry.hpp"
#include "mtb/loadtrain_config.hpp"
#include "mtb/material.hpp"
#include "mtb/profile.hpp"
#include "mtb/sensors.hpp"

namespace mtb {

/// Everything one simulation run needs, resolved from a config file.
/// External units are um/mN/MPa/GPa; fields here are strict SI.
struct SimulationSpec {
  MaterialModel model;
  std::string preset_name; // empty when the material was given explicitly
  bool yield_assumed = false;
  SpecimenGeometry geometry;
  LoadTrainConfig loadtrain;
  double strain_rate = 3.3e-4;   // 1/s
  double target_strain = 3.3e-3;
  double hold_s = 60.0;
  double zero_hold_s = 30.0;
  int cycles = 3;
  double sample_rate_hz = 10.0;
  SensorSpec sensors;
  std::uint64_t seed = 0;
  bool seed_from_config = false;
  std::vector<std::string> applied_defaults; // provenance: defaulted keys
};

// Equality over the physical configuration; provenance fields
// (applied_defaults, yield_assumed) do not affect identity.
inline bool operator==(const SimulationSpec& a, const SimulationSpec& b) {
  return a.model == b.model && a.preset_name == b.preset_name && a.geometry == b.geometry &&
         a.loadtrain == b.loadtrain && a.strain_rate == b.strain_rate &&
         a.target_strain == b.target_strain && a.hold_s == b.hold_s &&
         a.zero_hold_s == b.zero_hold_s && a.cycles == b.cycles &&
         a.sample_rate_hz == b.sample_rate_hz && a.sensors == b.sensors && a.seed == b.seed &&
         a.seed_from_config == b.seed_from_config;
}

inline TestProfile build_profile(const SimulationSpec& spec) {
  TestProfile profile = standard_cycle(spec.strain_rate, spec.target_strain, spec.hold_s,
                                       spec.zero_hold_s, spec.cycles);
  profile.sample_rate_hz = spec.sample_rate_hz;
  return profile;
}

inline std::string material_label(const SimulationSpec& spec) {
  return spec.preset_name.empty() ? std::string("custom") : spec.preset_name;
}

inline std::vector<std::string> material_notes(const SimulationSpec& spec) {
  std::vector<std::string> notes;
  if (spec.yield_assumed && spec.model.plastic.enabled)
    notes.push_back("yield stress " + std::to_string(spec.model.plastic.yield_stress / 1e6) +
                    " MPa for preset " + spec.preset_name + " is assumed, not a measured value");
  return notes;
}

namespace detail {

struct ConfigEntry {
  std::string value;
  int line = 0;
  bool used = false;
};

struct ConfigTable {
  std::map<std::string, ConfigEntry> entries; // key = "section.name"

  bool has(const std::string& key) const { return entries.count(key) != 0; }

  std::optional<std::string> take(const std::string& key) {
    auto it = entries.find(key);
    if (it == entries.end()) return std::nullopt;
    it->second.used = true;
    return it->second.value;
  }

  int line_of(const std::string& key) const {
    auto it = entries.find(key);
    return it == entries.end() ? 0 : it->second.line;
  }
};

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline ConfigTable tokenize_config(const std::string& text) {
  ConfigTable table;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw config_error("line " + std::to_string(line_no) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw config_error("line " + std::to_string(line_no) + ": empty section name");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw config_error("line " + std::to_string(line_no) + ": expected key = value");
    const std::string path = section.empty() ? key : section + "." + key;
    if (table.entries.count(path))
      throw config_error("line " + std::to_string(line_no) + ": duplicate key " + path);
    table.entries[path] = {value, line_no, false};
  }
  return table;
}

inline double parse_number(const std::string& key, const std::string& value, int line) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0' || !std::isfinite(v))
    throw config_error("line " + std::to_string(line) + ": " + key +
                       " expects a number, got '" + value + "'");
  return v;
}

inline bool parse_bool(const std::string& key, const std::string& value, int line) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw config_error("line " + std::to_string(line) + ": " + key +
                     " expects true or false, got '" + value + "'");
}

inline std::uint64_t parse_seed(const std::string& key, const std::string& value, int line) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0' || value.front() == '-')
    throw config_error("line " + std::to_string(line) + ": " + key +
                       " expects a nonnegative integer");
  return v;
}

// Unit conversions use exact power-of-ten constants in both directions
// (1e-6 is not exactly representable, 1e6 is), so a parse/serialize cycle can
// reproduce every field bit-exactly.
struct UnitScale {
  double num = 1.0; // to SI: v * num / den; one of the two is 1.0
  double den = 1.0;

  double to_si(double external) const { return external * num / den; }
  double to_external(double si) const { return si * den / num; }
};

inline constexpr UnitScale unit_plain{1.0, 1.0};
inline constexpr UnitScale unit_um{1.0, 1e6};
inline constexpr UnitScale unit_nm{1.0, 1e9};
inline constexpr UnitScale unit_GPa{1e9, 1.0};
inline constexpr UnitScale unit_MPa{1e6, 1.0};
inline constexpr UnitScale unit_mN{1.0, 1e3};

// External value whose parse maps back to exactly `si`; the first rounding
// can land one ulp off, so search the neighbors.
inline double exact_external(double si, const UnitScale& scale) {
  double ext = scale.to_external(si);
  if (scale.to_si(ext) == si) return ext;
  for (int dir : {1, -1}) {
    double e = ext;
    for (int step = 0; step < 3; ++step) {
      e = std::nextafter(e, dir > 0 ? std::numeric_limits<double>::infinity()
                                    : -std::numeric_limits<double>::infinity());
      if (scale.to_si(e) == si) return e;
    }
  }
  return ext;
}

// Reads "section.key"; applies the unit scale to convert external units to
// SI. Records a provenance note when the key is absent and the default kept.
class KeyReader {
public:
  KeyReader(ConfigTable& table, std::vector<std::string>& defaults)
      : table_(table), defaults_(defaults) {}

  double number(const std::string& key, double default_si, const UnitScale& scale) {
    if (auto v = table_.take(key))
      return scale.to_si(parse_number(key, *v, table_.line_of(key)));
    note(key, scale.to_external(default_si));
    return default_si;
  }

  // like number() but without a default note (value comes from a preset)
  std::optional<double> explicit_number(const std::string& key, const UnitScale& scale) {
    if (auto v = table_.take(key))
      return scale.to_si(parse_number(key, *v, table_.line_of(key)));
    return std::nullopt;
  }

  bool flag(const std::string& key, bool default_value) {
    if (auto v = table_.take(key)) return parse_bool(key, *v, table_.line_of(key));
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s = %s (default)", key.c_str(),
                  default_value ? "true" : "false");
    defaults_.push_back(buf);
    return default_value;
  }

  int integer(const std::string& key, int default_value) {
    if (auto v = table_.take(key)) {
      const double d = parse_number(key, *v, table_.line_of(key));
      if (d != std::floor(d))
        throw config_error("line " + std::to_string(table_.line_of(key)) + ": " + key +
                           " expects an integer");
      return static_cast<int>(d);
    }
    note(key, default_value);
    return default_value;
  }

private:
  void note(const std::string& key, double shown_default) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s = %.9g (default)", key.c_str(), shown_default);
    defaults_.push_back(buf);
  }

  ConfigTable& table_;
  std::vector<std::string>& defaults_;
};

} // namespace detail

/// Strict parse of the documented key set: unknown keys, type mismatches and
/// invariant violations are errors carrying the key path and line number;
/// every applied default is echoed into the spec's provenance list.
inline SimulationSpec parse_config(const std::string& text) {
  detail::ConfigTable table = detail::tokenize_config(text);
  SimulationSpec spec;
  detail::KeyReader read(table, spec.applied_defaults);

  // material: a preset or an explicit modulus is required
  const MaterialPreset* preset = nullptr;
  if (auto name = table.take("material.preset")) {
    preset = find_material_preset(*name);
    if (!preset)
      throw config_error("line " + std::to_string(table.line_of("material.preset")) +
                         ": unknown preset '" + *name +
                         "' (available: cu200, aucr200, tan400, tan800)");
    spec.preset_name = *name;
  }
  const auto explicit_modulus = read.explicit_number("material.modulus_GPa", detail::unit_GPa);
  if (!preset && !explicit_modulus)
    throw config_error(
        "missing required keys: [material] needs either preset or modulus_GPa");

  spec.model.elastic.modulus = explicit_modulus
                                   ? *explicit_modulus
                                   : preset->modulus;
  if (preset && !explicit_modulus)
    spec.applied_defaults.push_back("material.modulus_GPa = " +
                                    std::to_string(preset->modulus / 1e9) + " (preset " +
                                    spec.preset_name + ")");

  const auto explicit_yield = read.explicit_number("material.yield_MPa", detail::unit_MPa);
  double yield = 0.0;
  if (explicit_yield) {
    yield = *explicit_yield;
  } else if (preset) {
    yield = preset->yield_stress;
    spec.yield_assumed = preset->yield_assumed;
    spec.applied_defaults.push_back("material.yield_MPa = " +
                                    std::to_string(preset->yield_stress / 1e6) + " (preset " +
                                    spec.preset_name + ")");
  }
  spec.model.plastic.yield_stress = yield;
  spec.model.plastic.hardening_modulus = read.number("material.hardening_GPa", 0.0, detail::unit_GPa);
  const bool plasticity_explicit = table.has("material.plasticity");
  const bool plasticity_flag = read.flag("material.plasticity", yield > 0.0);
  if (plasticity_explicit && plasticity_flag && !(yield > 0.0))
    throw config_error("material.plasticity = true requires yield_MPa (or a preset)");
  spec.model.plastic.enabled = plasticity_flag && yield > 0.0;

  spec.model.wrinkle.enabled = read.flag("material.wrinkle", false);
  spec.model.wrinkle.characteristic_strain = read.number("material.wrinkle_strain", 0.0, detail::unit_plain);
  spec.model.relaxation.enabled = read.flag("material.relaxation", false);
  spec.model.relaxation.arm_modulus = read.number("material.relaxation_modulus_GPa", 0.0, detail::unit_GPa);
  spec.model.relaxation.time_constant = read.number("material.relaxation_tau_s", 0.0, detail::unit_plain);

  // geometry; preset names bind their film thickness
  const double default_thickness = preset ? preset->default_thickness : 200e-9;
  spec.geometry.gauge_length = read.number("geometry.gauge_length_um", 600e-6, detail::unit_um);
  spec.geometry.width = read.number("geometry.width_um", 100e-6, detail::unit_um);
  if (auto t = read.explicit_number("geometry.thickness_nm", detail::unit_nm)) {
    spec.geometry.thickness = *t;
  } else {
    spec.geometry.thickness = default_thickness;
    char buf[96];
    std::snprintf(buf, sizeof buf, "geometry.thickness_nm = %.9g (%s)", default_thickness * 1e9,
                  preset ? ("preset " + spec.preset_name).c_str() : "default");
    spec.applied_defaults.push_back(buf);
  }

  spec.loadtrain.spring1_stiffness = read.number("loadtrain.k1_N_per_m", 1e6, detail::unit_plain);
  spec.loadtrain.spring3_stiffness = read.number("loadtrain.k3_N_per_m", 1e4, detail::unit_plain);
  spec.loadtrain.travel_limit = read.number("loadtrain.travel_limit_um", 50e-6, detail::unit_um);
  spec.loadtrain.actuator_resolution =
      read.number("loadtrain.actuator_resolution_um", 0.1e-6, detail::unit_um);

  spec.strain_rate = read.number("profile.strain_rate_per_s", 3.3e-4, detail::unit_plain);
  spec.target_strain = read.number("profile.target_strain", 3.3e-3, detail::unit_plain);
  spec.hold_s = read.number("profile.hold_s", 60.0, detail::unit_plain);
  spec.zero_hold_s = read.number("profile.zero_hold_s", 30.0, detail::unit_plain);
  spec.cycles = read.integer("profile.cycles", 3);
  spec.sample_rate_hz = read.number("profile.sample_rate_hz", 10.0, detail::unit_plain);

  spec.sensors.displacement_resolution =
      read.number("sensors.displacement_resolution_um", 0.1e-6, detail::unit_um);
  spec.sensors.load_resolution = read.number("sensors.load_resolution_mN", 0.1e-3, detail::unit_mN);
  spec.sensors.noise_sd_displacement =
      read.number("sensors.noise_sd_displacement_um", 0.0, detail::unit_um);
  spec.sensors.noise_sd_load = read.number("sensors.noise_sd_load_mN", 0.0, detail::unit_mN);
  spec.sensors.drift_rate_load = read.number("sensors.drift_mN_per_s", 0.0, detail::unit_mN);
  spec.sensors.quantization_enabled = read.flag("sensors.quantization", true);
  spec.sensors.noise_enabled = read.flag("sensors.noise", false);
  spec.sensors.drift_enabled = read.flag("sensors.drift", false);
  spec.sensors.ambient_temperature = read.number("sensors.temperature_C", 23.0, detail::unit_plain);

  if (auto v = table.take("run.seed")) {
    spec.seed = detail::parse_seed("run.seed", *v, table.line_of("run.seed"));
    spec.seed_from_config = true;
  }

  for (const auto& [key, entry] : table.entries) {
    if (!entry.used)
      throw config_error("line " + std::to_string(entry.line) + ": unknown key " + key);
  }

  // surface invariant violations with config context
  validate_model(spec.model);
  validate_geometry(spec.geometry);
  validate_loadtrain(spec.loadtrain);
  validate_sensors(spec.sensors);
  if (!(spec.sample_rate_hz > 0.0)) throw config_error("profile.sample_rate_hz must be > 0");
  if (spec.cycles < 1) throw config_error("profile.cycles must be >= 1");
  return spec;
}

/// Canonical text form; parse_config(serialize_config(spec)) reproduces the
/// spec exactly.
inline std::string serialize_config(const SimulationSpec& spec) {
  std::string out;
  char buf[128];
  const auto put = [&](const char* key, double si,
                       const detail::UnitScale& scale = detail::unit_plain) {
    std::snprintf(buf, sizeof buf, "%s = %.17g\n", key, detail::exact_external(si, scale));
    out += buf;
  };
  const auto put_flag = [&](const char* key, bool value) {
    std::snprintf(buf, sizeof buf, "%s = %s\n", key, value ? "true" : "false");
    out += buf;
  };

  out += "[material]\n";
  if (!spec.preset_name.empty()) out += "preset = " + spec.preset_name + "\n";
  put("modulus_GPa", spec.model.elastic.modulus, detail::unit_GPa);
  put("yield_MPa", spec.model.plastic.yield_stress, detail::unit_MPa);
  put("hardening_GPa", spec.model.plastic.hardening_modulus, detail::unit_GPa);
  put_flag("plasticity", spec.model.plastic.enabled);
  put_flag("wrinkle", spec.model.wrinkle.enabled);
  put("wrinkle_strain", spec.model.wrinkle.characteristic_strain);
  put_flag("relaxation", spec.model.relaxation.enabled);
  put("relaxation_modulus_GPa", spec.model.relaxation.arm_modulus, detail::unit_GPa);
  put("relaxation_tau_s", spec.model.relaxation.time_constant);

  out += "\n[geometry]\n";
  put("gauge_length_um", spec.geometry.gauge_length, detail::unit_um);
  put("width_um", spec.geometry.width, detail::unit_um);
  put("thickness_nm", spec.geometry.thickness, detail::unit_nm);

  out += "\n[loadtrain]\n";
  put("k1_N_per_m", spec.loadtrain.spring1_stiffness);
  put("k3_N_per_m", spec.loadtrain.spring3_stiffness);
  put("travel_limit_um", spec.loadtrain.travel_limit, detail::unit_um);
  put("actuator_resolution_um", spec.loadtrain.actuator_resolution, detail::unit_um);

  out += "\n[profile]\n";
  put("strain_rate_per_s", spec.strain_rate);
  put("target_strain", spec.target_strain);
  put("hold_s", spec.hold_s);
  put("zero_hold_s", spec.zero_hold_s);
  std::snprintf(buf, sizeof buf, "cycles = %d\n", spec.cycles);
  out += buf;
  put("sample_rate_hz", spec.sample_rate_hz);

  out += "\n[sensors]\n";
  put("displacement_resolution_um", spec.sensors.displacement_resolution, detail::unit_um);
  put("load_resolution_mN", spec.sensors.load_resolution, detail::unit_mN);
  put("noise_sd_displacement_um", spec.sensors.noise_sd_displacement, detail::unit_um);
  put("noise_sd_load_mN", spec.sensors.noise_sd_load, detail::unit_mN);
  put("drift_mN_per_s", spec.sensors.drift_rate_load, detail::unit_mN);
  put_flag("quantization", spec.sensors.quantization_enabled);
  put_flag("noise", spec.sensors.noise_enabled);
  put_flag("drift", spec.sensors.drift_enabled);
  put("temperature_C", spec.sensors.ambient_temperature);

  if (spec.seed_from_config) {
    out += "\n[run]\n";
    std::snprintf(buf, sizeof buf, "seed = %llu\n",
                  static_cast<unsigned long long>(spec.seed));
    out += buf;
  }
  return out;
}

} // namespace mtb
