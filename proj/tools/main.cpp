// rres — command-line front end over the C API (librres).
//
// Subcommands: dump-potential, scan-phase, find-resonances, interfere,
// process-intensity. Configs are JSON; curves go out as CSV, fit reports as
// JSON. All physics is deterministic; --seed only drives the optional
// intensity noise.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rres/rres.h"

namespace {

int report_failure(rres_status status) {
  std::fprintf(stderr, "error: %s: %s\n", rres_status_name(status),
               rres_last_error());
  return 1;
}

#define CHECK_RRES(call)                         \
  do {                                           \
    rres_status status_ = (call);                \
    if (status_ != RRES_OK) return report_failure(status_); \
  } while (0)

using PotentialPtr = std::unique_ptr<rres_potential, decltype(&rres_potential_free)>;

int load_potential(const std::string& config, PotentialPtr& out) {
  rres_potential* raw = nullptr;
  rres_status status = rres_potential_from_json_file(config.c_str(), &raw);
  if (status != RRES_OK) return report_failure(status);
  out.reset(raw);
  return 0;
}

std::vector<double> make_grid(double lo, double hi, double step) {
  std::vector<double> g;
  auto n = static_cast<size_t>((hi - lo) / step + 1e-9) + 1;
  for (size_t i = 0; i < n; ++i) g.push_back(lo + step * i);
  return g;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reflection resonance toolkit"};
  app.require_subcommand(1);

  std::string config, out_path = "out.csv", in_path, fits_path;
  double e_min = 0.0, e_max = 0.0, tol = 0.3, dv = 0.0;
  std::uint64_t seed = 0;
  int grid_n = 971;

  auto* dump = app.add_subcommand("dump-potential", "sample V(x) to CSV");
  dump->add_option("--config", config, "potential config JSON")->required();
  dump->add_option("--out", out_path, "output CSV path");
  dump->add_option("--n", grid_n, "number of grid points");

  auto* scan = app.add_subcommand("scan-phase", "phase curve phi(E) to CSV");
  scan->add_option("--config", config)->required();
  scan->add_option("--out", out_path);
  scan->add_option("--emin", e_min, "eV")->required();
  scan->add_option("--emax", e_max, "eV")->required();
  scan->add_option("--tol", tol, "refinement jump tolerance, rad");

  auto* find = app.add_subcommand("find-resonances", "fit resonances to JSON");
  find->add_option("--config", config)->required();
  find->add_option("--out", out_path, "report JSON path");
  find->add_option("--emin", e_min, "eV")->required();
  find->add_option("--emax", e_max, "eV")->required();
  find->add_option("--tol", tol, "refinement jump tolerance, rad");
  std::string curve_csv;
  find->add_option("--csv", curve_csv, "also write the scanned phase curve CSV");

  auto* interfere = app.add_subcommand("interfere", "intensity I(V) to CSV");
  interfere->add_option("--config", config, "config with interferometer section")
      ->required();
  interfere->add_option("--out", out_path);
  interfere->add_option("--dv", dv, "override bias separation, eV");
  interfere->add_option("--seed", seed, "noise RNG seed");

  auto* process =
      app.add_subcommand("process-intensity", "normalized-derivative processing");
  process->add_option("--config", config,
                      "config with interferometer section (simulation path)");
  process->add_option("--in", in_path, "externally produced intensity CSV");
  process->add_option("--dv", dv, "bias separation for recovery, eV");
  process->add_option("--out", out_path, "processed CSV path");
  process->add_option("--fits-out", fits_path, "recovered fits JSON path");
  process->add_option("--seed", seed, "noise RNG seed");

  CLI11_PARSE(app, argc, argv);

  if (dump->parsed()) {
    PotentialPtr pot(nullptr, &rres_potential_free);
    if (int rc = load_potential(config, pot)) return rc;
    double x_min, x_max;
    CHECK_RRES(rres_potential_range(pot.get(), &x_min, &x_max, nullptr, nullptr));
    CHECK_RRES(rres_potential_write_profile_csv(
        pot.get(), x_min, x_max, static_cast<size_t>(grid_n), out_path.c_str()));
    return 0;
  }

  if (scan->parsed() || find->parsed()) {
    PotentialPtr pot(nullptr, &rres_potential_free);
    if (int rc = load_potential(config, pot)) return rc;
    rres_scan_options opts{};
    opts.jump_tol_rad = tol;
    rres_phase_curve* curve = nullptr;
    CHECK_RRES(rres_scan_phase(pot.get(), e_min, e_max, &opts, &curve));
    std::unique_ptr<rres_phase_curve, decltype(&rres_phase_curve_free)> curve_owner(
        curve, &rres_phase_curve_free);

    if (scan->parsed()) {
      CHECK_RRES(rres_phase_curve_write_csv(curve, out_path.c_str()));
      return 0;
    }
    if (!curve_csv.empty())
      CHECK_RRES(rres_phase_curve_write_csv(curve, curve_csv.c_str()));
    rres_resonance_list* list = nullptr;
    CHECK_RRES(rres_find_resonances(curve, &list));
    std::unique_ptr<rres_resonance_list, decltype(&rres_resonance_list_free)>
        list_owner(list, &rres_resonance_list_free);
    CHECK_RRES(rres_resonance_report_write_json(curve, list, out_path.c_str()));
    std::printf("resonances: %zu\n", rres_resonance_list_size(list));
    return 0;
  }

  if (interfere->parsed() || process->parsed()) {
    std::unique_ptr<rres_intensity_curve, decltype(&rres_intensity_curve_free)>
        intensity(nullptr, &rres_intensity_curve_free);
    double delta_v = dv;

    if (process->parsed() && !in_path.empty()) {
      // experimental data path
      rres_intensity_curve* raw = nullptr;
      CHECK_RRES(rres_intensity_read_csv(in_path.c_str(), &raw));
      intensity.reset(raw);
      if (!(delta_v > 0)) {
        std::fprintf(stderr, "error: InvalidArgument: --dv is required with --in\n");
        return 1;
      }
    } else {
      if (config.empty()) {
        std::fprintf(stderr,
                     "error: InvalidArgument: need --config or --in for this command\n");
        return 1;
      }
      PotentialPtr pot(nullptr, &rres_potential_free);
      if (int rc = load_potential(config, pot)) return rc;
      rres_interferometer_config cfg{};
      double v_min, v_max, v_step;
      CHECK_RRES(rres_interferometer_config_from_json_file(config.c_str(), &cfg,
                                                           &v_min, &v_max, &v_step));
      if (dv > 0) cfg.delta_v_ev = dv;
      cfg.seed = seed;
      delta_v = cfg.delta_v_ev;
      std::vector<double> grid = make_grid(v_min, v_max, v_step);
      rres_intensity_curve* raw = nullptr;
      CHECK_RRES(rres_simulate_intensity(pot.get(), &cfg, grid.data(), grid.size(),
                                         &raw));
      intensity.reset(raw);
    }

    if (interfere->parsed()) {
      CHECK_RRES(rres_intensity_write_csv(intensity.get(), out_path.c_str()));
      size_t crit = 0;
      CHECK_RRES(rres_count_critical_points(intensity.get(), 0, &crit));
      std::printf("critical points: %zu\n", crit);
      return 0;
    }

    rres_processed_curve* processed = nullptr;
    CHECK_RRES(rres_process_intensity(intensity.get(), &processed));
    std::unique_ptr<rres_processed_curve, decltype(&rres_processed_curve_free)>
        processed_owner(processed, &rres_processed_curve_free);
    CHECK_RRES(rres_processed_write_csv(processed, out_path.c_str()));

    rres_resonance_list* list = nullptr;
    CHECK_RRES(rres_recover_resonances(processed, delta_v, &list));
    std::unique_ptr<rres_resonance_list, decltype(&rres_resonance_list_free)>
        list_owner(list, &rres_resonance_list_free);
    if (!fits_path.empty())
      CHECK_RRES(rres_recovered_report_write_json(list, delta_v, fits_path.c_str()));
    rres_resonance_fit first{};
    CHECK_RRES(rres_resonance_list_get(list, 0, &first));
    std::printf("recovered resonance bias: %.6f eV (halfwidth %.6g eV)\n",
                first.e0_ev, first.halfwidth_ev);
    return 0;
  }

  return 0;
}
