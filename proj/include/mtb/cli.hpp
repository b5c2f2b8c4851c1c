#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mtb/analysis.hpp"
#include "mtb/config.hpp"
#include "mtb/errors.hpp"
#include "mtb/loadtrain.hpp"
#include "mtb/report.hpp"
#include "mtb/trace_io.hpp"

namespace mtb::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_validation = 1;
inline constexpr int exit_solver = 2;

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot open " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

// flag > config > MTB_SEED environment variable > 0
inline std::uint64_t resolve_seed(const SimulationSpec& spec,
                                  const std::optional<std::uint64_t>& flag_seed) {
  if (flag_seed) return *flag_seed;
  if (spec.seed_from_config) return spec.seed;
  if (const char* env = std::getenv("MTB_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0') return v;
  }
  return 0;
}

inline int exit_code_for(const Error& e) {
  return e.kind() == ErrorKind::solver ? exit_solver : exit_validation;
}

inline Trace simulate_spec(const SimulationSpec& spec, std::uint64_t seed, std::ostream& err) {
  const TestProfile profile = build_profile(spec);
  const ProfileValidation check = validate_profile(profile, spec.loadtrain, spec.geometry);
  for (const std::string& w : check.warnings) err << "warning: " << w << "\n";
  for (const std::string& w : geometry_warnings(spec.geometry)) err << "warning: " << w << "\n";
  if (!check.ok()) {
    for (const std::string& e : check.errors) err << "error: " << e << "\n";
    throw profile_error(check.errors.front());
  }
  Trace trace = run_profile(spec.loadtrain, spec.geometry, spec.model, profile, spec.sensors, seed);
  trace.meta.material_label = material_label(spec);
  trace.meta.notes = material_notes(spec);
  trace.meta.applied_defaults = spec.applied_defaults;
  return trace;
}

} // namespace detail

struct SimulateOptions {
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
};

inline int simulate(const SimulateOptions& opt, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  try {
    const SimulationSpec spec = parse_config(detail::read_file(opt.config_path));
    const std::uint64_t seed = detail::resolve_seed(spec, opt.seed);
    const Trace trace = detail::simulate_spec(spec, seed, err);
    write_trace(trace, opt.out_path);
    out << "wrote " << trace.samples.size() << " samples to " << opt.out_path << "\n";
    return exit_ok;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return detail::exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_validation;
  }
}

struct AnalyzeOptions {
  std::string trace_path;
  std::string out_path;
  std::optional<double> gauge_length_um;
  std::optional<double> width_um;
  std::optional<double> thickness_nm;
  std::optional<double> compliance_m_per_N;
  std::optional<double> bulk_modulus_GPa;
  double offset = 0.002;
  std::optional<std::string> timestamp; // override for byte-stable output
};

inline int analyze(const AnalyzeOptions& opt, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  try {
    const Trace trace = read_trace(opt.trace_path);
    SpecimenGeometry geometry = trace.meta.geometry;
    if (opt.gauge_length_um) geometry.gauge_length = *opt.gauge_length_um / 1e6;
    if (opt.width_um) geometry.width = *opt.width_um / 1e6;
    if (opt.thickness_nm) geometry.thickness = *opt.thickness_nm / 1e9;
    const double cm = opt.compliance_m_per_N.value_or(trace.meta.machine_compliance);

    AnalysisOptions options;
    options.offset = opt.offset;
    if (opt.bulk_modulus_GPa) options.bulk_modulus = *opt.bulk_modulus_GPa * 1e9;
    const AnalysisReport report = analyze_trace(trace, geometry, cm, options);

    ReportProvenance prov;
    prov.profile_digest = trace.meta.profile_digest;
    prov.seed = trace.meta.seed;
    prov.seed_meaningful = true;
    prov.applied_defaults = trace.meta.applied_defaults;
    if (opt.timestamp) prov.timestamp = *opt.timestamp;
    write_report(report, prov, opt.out_path);
    out << "modulus " << report.modulus.modulus / 1e9 << " GPa";
    if (report.yield.found) out << ", offset yield " << report.yield.stress / 1e6 << " MPa";
    out << "; report written to " << opt.out_path << "\n";
    return exit_ok;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return detail::exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_validation;
  }
}

struct HallPetchOptions {
  std::string points_path;
  std::string out_path;
};

/// Points file: CSV with header `grain_size_nm,yield_stress_MPa`.
inline std::vector<HallPetchPoint> read_hall_petch_points(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  std::vector<HallPetchPoint> points;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != "grain_size_nm,yield_stress_MPa")
        throw io_error("header error: expected 'grain_size_nm,yield_stress_MPa'");
      header_seen = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw io_error("line " + std::to_string(line_no) + ": malformed row");
    char* end = nullptr;
    const std::string a = line.substr(0, comma);
    const std::string b = line.substr(comma + 1);
    const double d_nm = std::strtod(a.c_str(), &end);
    if (end == a.c_str() || *end != '\0')
      throw io_error("line " + std::to_string(line_no) + ": malformed row");
    const double y_mpa = std::strtod(b.c_str(), &end);
    if (end == b.c_str() || *end != '\0')
      throw io_error("line " + std::to_string(line_no) + ": malformed row");
    points.push_back({d_nm / 1e9, y_mpa * 1e6});
  }
  if (!header_seen) throw io_error("header error: missing header row");
  return points;
}

inline int hallpetch(const HallPetchOptions& opt, std::ostream& out = std::cout,
                     std::ostream& err = std::cerr) {
  try {
    const std::vector<HallPetchPoint> points =
        read_hall_petch_points(detail::read_file(opt.points_path));
    const HallPetchFit fit = fit_hall_petch(points);
    nlohmann::ordered_json j;
    j["hall_petch"] = hall_petch_to_json(fit, points.size());
    j["provenance"] = {{"tool_version", version_string}, {"timestamp", utc_timestamp()}};
    write_json(j, opt.out_path);
    out << "sigma_i " << fit.friction_stress / 1e6 << " MPa, k " << fit.coefficient_k / 1e6
        << " MPa*sqrt(m); report written to " << opt.out_path << "\n";
    return exit_ok;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return detail::exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_validation;
  }
}

struct RoundtripOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_trace_path;
  std::optional<std::string> out_report_path;
};

/// Simulate with the config's ground truth, analyze the simulated trace, and
/// print truth vs recovered values with relative errors.
inline int roundtrip(const RoundtripOptions& opt, std::ostream& out = std::cout,
                     std::ostream& err = std::cerr) {
  try {
    const SimulationSpec spec = parse_config(detail::read_file(opt.config_path));
    const std::uint64_t seed = detail::resolve_seed(spec, opt.seed);
    const Trace trace = detail::simulate_spec(spec, seed, err);
    if (opt.out_trace_path) write_trace(trace, *opt.out_trace_path);

    const double cm = machine_compliance(spec.loadtrain);
    const AnalysisReport report = analyze_trace(trace, spec.geometry, cm);
    if (opt.out_report_path) {
      ReportProvenance prov;
      prov.profile_digest = trace.meta.profile_digest;
      prov.seed = seed;
      prov.seed_meaningful = true;
      prov.applied_defaults = spec.applied_defaults;
      write_report(report, prov, *opt.out_report_path);
    }

    char buf[160];
    out << "roundtrip " << material_label(spec) << " (seed " << seed << ", "
        << trace.samples.size() << " samples)\n";
    out << "  quantity          truth         recovered     rel_error\n";
    const double e_truth = spec.model.elastic.modulus;
    const double e_rec = report.modulus.modulus;
    std::snprintf(buf, sizeof buf, "  modulus_GPa       %-13.6g %-13.6g %.3g\n", e_truth / 1e9,
                  e_rec / 1e9, std::fabs(e_rec - e_truth) / e_truth);
    out << buf;
    if (spec.model.plastic.enabled) {
      const double y_truth = spec.model.plastic.yield_stress +
                             spec.model.plastic.hardening_modulus * report.yield.offset;
      if (report.yield.found) {
        std::snprintf(buf, sizeof buf, "  offset_yield_MPa  %-13.6g %-13.6g %.3g\n",
                      y_truth / 1e6, report.yield.stress / 1e6,
                      std::fabs(report.yield.stress - y_truth) / y_truth);
      } else {
        std::snprintf(buf, sizeof buf, "  offset_yield_MPa  %-13.6g (no yield observed)\n",
                      y_truth / 1e6);
      }
      out << buf;
    }
    return exit_ok;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return detail::exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_validation;
  }
}

} // namespace mtb::cli
