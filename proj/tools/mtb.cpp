// mtb: virtual micro-tensile test bench for freestanding thin films.
// Subcommands: simulate, analyze, hallpetch, roundtrip.

#include <cstdint>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mtb/cli.hpp"
#include "mtb/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"virtual micro-tensile test bench"};
  app.set_version_flag("--version", mtb::version_string);
  app.require_subcommand(1);

  mtb::cli::SimulateOptions sim;
  std::optional<std::uint64_t> sim_seed;
  CLI::App* simulate = app.add_subcommand("simulate", "run a test profile and write the trace CSV");
  simulate->add_option("--config", sim.config_path, "simulation config file")->required();
  simulate->add_option("--out", sim.out_path, "output trace CSV path")->required();
  simulate->add_option("--seed", sim_seed, "noise seed (overrides config and MTB_SEED)");

  mtb::cli::AnalyzeOptions ana;
  CLI::App* analyze = app.add_subcommand("analyze", "reduce a trace CSV to a report JSON");
  analyze->add_option("--trace", ana.trace_path, "input trace CSV")->required();
  analyze->add_option("--out", ana.out_path, "output report JSON path")->required();
  analyze->add_option("--gauge-um", ana.gauge_length_um, "gauge length override (um)");
  analyze->add_option("--width-um", ana.width_um, "specimen width override (um)");
  analyze->add_option("--thickness-nm", ana.thickness_nm, "film thickness override (nm)");
  analyze->add_option("--compliance", ana.compliance_m_per_N,
                      "machine compliance override (m/N)");
  analyze->add_option("--bulk-gpa", ana.bulk_modulus_GPa,
                      "bulk modulus (GPa) for the comparison ratio");
  analyze->add_option("--offset", ana.offset, "yield offset strain (default 0.002)");

  mtb::cli::HallPetchOptions hp;
  CLI::App* hallpetch =
      app.add_subcommand("hallpetch", "fit sigma_0 = sigma_i + k*D^(-1/2) to a points CSV");
  hallpetch->add_option("--points", hp.points_path, "CSV: grain_size_nm,yield_stress_MPa")
      ->required();
  hallpetch->add_option("--out", hp.out_path, "output report JSON path")->required();

  mtb::cli::RoundtripOptions rt;
  std::optional<std::uint64_t> rt_seed;
  std::optional<std::string> rt_trace, rt_report;
  CLI::App* roundtrip = app.add_subcommand(
      "roundtrip", "simulate + analyze and print ground truth vs recovered values");
  roundtrip->add_option("--config", rt.config_path, "simulation config file")->required();
  roundtrip->add_option("--seed", rt_seed, "noise seed (overrides config and MTB_SEED)");
  roundtrip->add_option("--out", rt_trace, "also write the trace CSV here");
  roundtrip->add_option("--report", rt_report, "also write the report JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e); // prints help/usage; 0 for --help
    return code == 0 ? 0 : 1;
  }

  if (simulate->parsed()) {
    sim.seed = sim_seed;
    return mtb::cli::simulate(sim);
  }
  if (analyze->parsed()) return mtb::cli::analyze(ana);
  if (hallpetch->parsed()) return mtb::cli::hallpetch(hp);
  rt.seed = rt_seed;
  rt.out_trace_path = rt_trace;
  rt.out_report_path = rt_report;
  return mtb::cli::roundtrip(rt);
}
