#pragma once

#include <ctime>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mtb/analysis.hpp"
#include "mtb/errors.hpp"
#include "mtb/version.hpp"

namespace mtb {

struct ReportProvenance {
  std::string tool_version = version_string;
  std::string timestamp; // ISO 8601 UTC, empty = fill at write time
  std::string profile_digest;
  std::uint64_t seed = 0;
  bool seed_meaningful = false;
  std::vector<std::string> applied_defaults;
};

inline std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Report JSON. All stresses in MPa, moduli in GPa, lengths in um; the unit
/// is part of every key name.
inline nlohmann::ordered_json report_to_json(const AnalysisReport& report,
                                             const ReportProvenance& provenance) {
  using json = nlohmann::ordered_json;
  json j;
  j["curve_digest"] = report.curve_digest;

  json fit;
  fit["modulus_GPa"] = report.modulus.modulus / 1e9;
  fit["window_strain_lo"] = report.modulus.window.strain_lo;
  fit["window_strain_hi"] = report.modulus.window.strain_hi;
  fit["r_squared"] = report.modulus.r_squared;
  fit["point_count"] = report.modulus.point_count;
  j["modulus_fit"] = fit;

  if (report.yield.found)
    j["offset_yield_MPa"] = report.yield.stress / 1e6;
  else
    j["offset_yield_MPa"] = nullptr;
  j["offset_used"] = report.yield.offset;

  json holds = json::array();
  for (const RelaxationMetric& m : report.relaxation) {
    json h;
    h["segment_index"] = m.segment_index;
    h["sigma_start_MPa"] = m.sigma_start / 1e6;
    h["sigma_end_MPa"] = m.sigma_end / 1e6;
    h["delta_sigma_MPa"] = m.delta_sigma / 1e6;
    h["relative_drop"] = m.relative_drop;
    h["hold_duration_s"] = m.hold_duration;
    holds.push_back(h);
  }
  j["relaxation_holds"] = holds;

  if (report.bulk_ratio) j["bulk_modulus_ratio"] = *report.bulk_ratio;

  json geom;
  geom["gauge_length_um"] = report.geometry.gauge_length * 1e6;
  geom["width_um"] = report.geometry.width * 1e6;
  geom["thickness_nm"] = report.geometry.thickness * 1e9;
  j["geometry"] = geom;
  j["machine_compliance_m_per_N"] = report.machine_compliance;

  j["warnings"] = report.warnings;

  json prov;
  prov["tool_version"] = provenance.tool_version;
  prov["timestamp"] = provenance.timestamp.empty() ? utc_timestamp() : provenance.timestamp;
  if (!provenance.profile_digest.empty()) prov["profile_digest"] = provenance.profile_digest;
  if (provenance.seed_meaningful) prov["seed"] = provenance.seed;
  prov["applied_defaults"] = provenance.applied_defaults;
  j["provenance"] = prov;
  return j;
}

inline nlohmann::ordered_json hall_petch_to_json(const HallPetchFit& fit, std::size_t points) {
  nlohmann::ordered_json j;
  j["sigma_i_MPa"] = fit.friction_stress / 1e6;
  j["k_MPa_sqrt_m"] = fit.coefficient_k / 1e6;
  j["rms_residual_MPa"] = fit.rms_residual / 1e6;
  j["point_count"] = points;
  return j;
}

inline void write_json(const nlohmann::ordered_json& j, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot open " + path + " for writing");
  f << j.dump(2) << "\n";
  if (!f) throw io_error("write failed: " + path);
}

inline void write_report(const AnalysisReport& report, const ReportProvenance& provenance,
                         const std::string& path) {
  write_json(report_to_json(report, provenance), path);
}

} // namespace mtb
