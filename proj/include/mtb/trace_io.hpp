#pragma once

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "mtb/errors.hpp"
#include "mtb/trace.hpp"
#include "mtb/version.hpp"

namespace mtb {

namespace detail {

inline std::string fmt_g12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline const char* trace_header = "time_s,commanded_u_um,measured_u_um,measured_F_mN,temperature_C";

} // namespace detail

/// Trace CSV: `#`-prefixed key=value metadata lines, one header row, then one
/// row per sample with external units (um, mN). Values carry 12 significant
/// digits so a write/read cycle preserves every field to well under 1e-9
/// relative.
inline std::string serialize_trace(const Trace& trace) {
  validate_trace(trace);
  std::string out;
  const auto meta = [&](const std::string& key, const std::string& value) {
    out += "# " + key + " = " + value + "\n";
  };
  using detail::fmt_g12;
  meta("tool_version", version_string);
  meta("gauge_length_um", fmt_g12(trace.meta.geometry.gauge_length * 1e6));
  meta("width_um", fmt_g12(trace.meta.geometry.width * 1e6));
  meta("thickness_nm", fmt_g12(trace.meta.geometry.thickness * 1e9));
  meta("k1_N_per_m", fmt_g12(trace.meta.loadtrain.spring1_stiffness));
  meta("k3_N_per_m", fmt_g12(trace.meta.loadtrain.spring3_stiffness));
  meta("travel_limit_um", fmt_g12(trace.meta.loadtrain.travel_limit * 1e6));
  meta("actuator_resolution_um", fmt_g12(trace.meta.loadtrain.actuator_resolution * 1e6));
  meta("machine_compliance_m_per_N", fmt_g12(trace.meta.machine_compliance));
  meta("sample_rate_hz", fmt_g12(trace.meta.sample_rate_hz));
  meta("seed", std::to_string(trace.meta.seed));
  meta("cycles", std::to_string(trace.meta.cycles));
  if (!trace.meta.profile_digest.empty()) meta("profile_digest", trace.meta.profile_digest);
  if (!trace.meta.material_label.empty()) meta("material", trace.meta.material_label);
  for (std::size_t i = 0; i < trace.meta.notes.size(); ++i)
    meta("note_" + std::to_string(i), trace.meta.notes[i]);
  for (std::size_t i = 0; i < trace.meta.applied_defaults.size(); ++i)
    meta("default_" + std::to_string(i), trace.meta.applied_defaults[i]);
  if (!trace.segments.empty()) {
    std::string table;
    for (const SegmentSpan& s : trace.segments) {
      if (!table.empty()) table += ";";
      table += std::string(to_string(s.kind)) + ":" + std::to_string(s.begin) + ":" +
               std::to_string(s.end);
    }
    meta("segments", table);
  }

  out += detail::trace_header;
  out += "\n";
  for (const TraceSample& s : trace.samples) {
    out += fmt_g12(s.time);
    out += ",";
    out += fmt_g12(s.commanded_u * 1e6);
    out += ",";
    out += fmt_g12(s.measured_u * 1e6);
    out += ",";
    out += fmt_g12(s.measured_force * 1e3);
    out += ",";
    out += fmt_g12(s.temperature);
    out += "\n";
  }
  return out;
}

inline void write_trace(const Trace& trace, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot open " + path + " for writing");
  f << serialize_trace(trace);
  if (!f) throw io_error("write failed: " + path);
}

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

inline double parse_field(const std::string& text, int line_no) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0')
    throw io_error("line " + std::to_string(line_no) + ": malformed row");
  return v;
}

} // namespace detail

/// Parse a trace from its CSV form. Only the measured channels exist in the
/// file, so the returned trace carries no ground truth.
inline Trace parse_trace(const std::string& text) {
  Trace trace;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool header_seen = false;

  const auto handle_meta = [&](const std::string& key, const std::string& value) {
    TraceMetadata& m = trace.meta;
    try {
      if (key == "gauge_length_um") m.geometry.gauge_length = std::stod(value) / 1e6;
      else if (key == "width_um") m.geometry.width = std::stod(value) / 1e6;
      else if (key == "thickness_nm") m.geometry.thickness = std::stod(value) / 1e9;
      else if (key == "k1_N_per_m") m.loadtrain.spring1_stiffness = std::stod(value);
      else if (key == "k3_N_per_m") m.loadtrain.spring3_stiffness = std::stod(value);
      else if (key == "travel_limit_um") m.loadtrain.travel_limit = std::stod(value) / 1e6;
      else if (key == "actuator_resolution_um")
        m.loadtrain.actuator_resolution = std::stod(value) / 1e6;
      else if (key == "machine_compliance_m_per_N") m.machine_compliance = std::stod(value);
      else if (key == "sample_rate_hz") m.sample_rate_hz = std::stod(value);
      else if (key == "seed") m.seed = std::stoull(value);
      else if (key == "cycles") m.cycles = std::stoi(value);
      else if (key == "profile_digest") m.profile_digest = value;
      else if (key == "material") m.material_label = value;
      else if (key.rfind("note_", 0) == 0) m.notes.push_back(value);
      else if (key.rfind("default_", 0) == 0) m.applied_defaults.push_back(value);
      else if (key == "segments") {
        for (const std::string& entry : detail::split(value, ';')) {
          const std::vector<std::string> parts = detail::split(entry, ':');
          SegmentSpan span;
          if (parts.size() != 3 || !segment_kind_from_string(parts[0], span.kind))
            throw io_error("line " + std::to_string(line_no) + ": bad segment table entry");
          span.begin = std::stoul(parts[1]);
          span.end = std::stoul(parts[2]);
          trace.segments.push_back(span);
        }
      }
      // unrecognized metadata keys are ignored: comments are free-form
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      throw io_error("line " + std::to_string(line_no) + ": bad metadata value for " + key);
    }
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::size_t eq = line.find('=');
      if (eq != std::string::npos) {
        std::string key = line.substr(1, eq - 1);
        std::string value = line.substr(eq + 1);
        const auto trim = [](std::string& t) {
          while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.erase(t.begin());
          while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
        };
        trim(key);
        trim(value);
        handle_meta(key, value);
      }
      continue;
    }
    if (!header_seen) {
      if (line != detail::trace_header) {
        const std::vector<std::string> have = detail::split(line, ',');
        const std::vector<std::string> want = detail::split(detail::trace_header, ',');
        for (const std::string& col : want) {
          bool found = false;
          for (const std::string& h : have)
            if (h == col) found = true;
          if (!found)
            throw io_error("header error: missing required column " + col);
        }
        throw io_error("header error: expected '" + std::string(detail::trace_header) + "'");
      }
      header_seen = true;
      continue;
    }
    const std::vector<std::string> fields = detail::split(line, ',');
    if (fields.size() != 5)
      throw io_error("line " + std::to_string(line_no) + ": malformed row (expected 5 fields)");
    TraceSample s;
    s.time = detail::parse_field(fields[0], line_no);
    s.commanded_u = detail::parse_field(fields[1], line_no) / 1e6;
    s.measured_u = detail::parse_field(fields[2], line_no) / 1e6;
    s.measured_force = detail::parse_field(fields[3], line_no) / 1e3;
    s.temperature = detail::parse_field(fields[4], line_no);
    s.true_u = std::numeric_limits<double>::quiet_NaN();
    s.true_force = std::numeric_limits<double>::quiet_NaN();
    if (!trace.samples.empty() && !(s.time > trace.samples.back().time))
      throw io_error("line " + std::to_string(line_no) + ": time not strictly increasing");
    trace.samples.push_back(s);
  }
  if (!header_seen) throw io_error("header error: missing header row");
  if (trace.samples.empty()) throw io_error("trace has no samples");

  for (std::size_t i = 0; i < trace.samples.size(); ++i)
    trace.samples[i].segment_index = owning_segment(trace.segments, i);
  trace.has_ground_truth = false;
  return trace;
}

inline Trace read_trace(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot open " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_trace(buf.str());
}

} // namespace mtb
