// Copyright 2026 The tqb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// tqb <verb> MANIFEST [key=value ...]
//
// Exit status: 0 success, 1 a grid point or check failed, 2 bad input.

#include "tqb/analysis.hpp"
#include "tqb/convergence.hpp"
#include "tqb/errors.hpp"
#include "tqb/fit_pipeline.hpp"
#include "tqb/manifest.hpp"
#include "tqb/plots.hpp"
#include "tqb/sweep.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace tqb;

namespace {

struct Common {
  std::string manifest;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("manifest", c.manifest, "Run manifest")->required()->check(CLI::ExistingFile);
  cmd->add_option("overrides", c.overrides, "Overrides, section.key=value");
}

RunManifest load(const Common& c) {
  RunManifest m = parse_manifest(c.manifest);
  for (const auto& o : c.overrides) apply_override(m, o);
  apply_environment(m);
  m.validate();
  return m;
}

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

int cmd_spectrum(const Common& c) {
  const RunManifest m = load(c);
  const Spectrum s = solve_spectrum(m.transmon, false);
  const fs::path dir(m.output_dir);
  fs::create_directories(dir);
  {
    std::ofstream os(dir / "spectrum.csv", std::ios::binary);
    write_spectrum_csv(os, s);
  }
  std::vector<double> ngs;
  for (int i = 0; i <= 40; ++i) ngs.push_back(-1.0 + 0.05 * i);
  {
    std::ofstream os(dir / "dispersion.csv", std::ios::binary);
    write_dispersion_csv(os, charge_dispersion(m.transmon, ngs, 4));
  }
  std::printf("ej_over_ec      %g\n", m.transmon.ej_over_ec);
  std::printf("E_0 [E_C]       %.10g\n", s.ground_energy());
  std::printf("E_f [E_C]       %.10g\n", s.e_f);
  std::printf("omega_p [E_C]   %.10g\n", m.transmon.plasma_frequency());
  std::printf("bound states    %d (estimate %.3g)\n", s.bound_count, bound_state_estimate(m.transmon));
  if (s.dim() > 1) std::printf("|N_10|          %.10g\n", std::abs(s.charge_matrix(1, 0)));
  std::printf("converged       %s (shift %.3g)\n", s.converged ? "yes" : "no", s.convergence_shift);
  std::printf("wrote %s, %s\n", (dir / "spectrum.csv").string().c_str(), (dir / "dispersion.csv").string().c_str());
  return s.converged ? 0 : 1;
}

int cmd_run(const Common& c) {
  const RunManifest m = load(c);
  if (m.product_size() != 1) {
    throw ValidationError("run needs a single grid point, the manifest has " +
                          std::to_string(m.product_size()) + "; use sweep");
  }
  const ProtocolConfig cfg = m.grid().front();
  const Trajectory t = run_protocol(cfg);
  const fs::path path = fs::path(m.output_dir) / point_file_name(cfg);
  fs::create_directories(m.output_dir);
  {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    write_trajectory_csv(os, t);
  }
  const Series s = Series::stored_energy(t);
  const std::size_t k = first_maximum_index(s);
  const auto& p = t.points[k];
  std::printf("wrote %s (%zu rows)\n", path.string().c_str(), t.points.size());
  std::printf("first maximum   n = %ld, dE = %.6f E_f, ergotropy = %.6f E_f", p.n, p.stored_energy, p.ergotropy);
  if (p.efficiency) std::printf(", efficiency = %.4f", *p.efficiency);
  std::printf("\nshape           %s\n", classify_shape(s) == Shape::oscillatory ? "oscillatory" : "saturating");
  if (!cfg.in_strong_coupling_regime()) std::printf("note: g outside 1e-3 <= g/omega_p < 1e-1\n");
  return 0;
}

int cmd_sweep(const Common& c, bool quiet) {
  const RunManifest m = load(c);
  std::printf("product size %zu\n", m.product_size());
  const SweepSummary s = run_sweep(m, quiet ? nullptr : &std::cerr);
  std::printf("index %s\n", s.index_path.c_str());
  for (const auto& p : s.points)
    if (!p.ok) std::printf("failed point %zu: %s\n", p.id, p.error.c_str());
  return s.failed ? 1 : 0;
}

int cmd_fit(const Common& c, const FitPipelineOptions& o) {
  const RunManifest m = load(c);
  const fs::path index = fs::path(m.output_dir) / "index.json";
  const std::string doc = run_fit_pipeline(read_index(index.string()), o);
  const fs::path out = fs::path(m.output_dir) / "fits.json";
  write_file(out, doc);
  std::printf("wrote %s\n", out.string().c_str());
  return 0;
}

int cmd_converge(const Common& c, const std::vector<std::string>& variant_text) {
  const RunManifest m = load(c);
  const ProtocolConfig probe = m.grid().front();
  std::vector<TruncationVariant> variants;
  for (const auto& v : variant_text) {
    const auto colon = v.find(':');
    if (colon == std::string::npos) throw ValidationError("variant '" + v + "' is not cutoff:levels");
    variants.push_back({std::stoi(v.substr(0, colon)), std::stoi(v.substr(colon + 1))});
  }
  if (variants.empty()) variants = default_variants(probe.transmon);
  const ConvergenceReport r = convergence_report(probe, variants);
  std::printf("bound-level shift at cutoff %d vs %d: %.3g (%s)\n", probe.transmon.charge_cutoff,
              probe.transmon.charge_cutoff + kConvergenceCutoffStep, r.bound_level_shift,
              r.bound_levels_converged ? "ok" : "FLAGGED");
  std::printf("%8s %8s %14s  %s\n", "cutoff", "levels", "max dev [E_f]", "status");
  std::printf("%8d %8d %14s  probe\n", probe.transmon.charge_cutoff, probe.transmon.battery_levels, "0");
  for (const auto& row : r.rows) {
    if (!row.error.empty()) {
      std::printf("%8d %8d %14s  error: %s\n", row.variant.charge_cutoff, row.variant.battery_levels, "-",
                  row.error.c_str());
      continue;
    }
    std::printf("%8d %8d %14.3e  %s\n", row.variant.charge_cutoff, row.variant.battery_levels, row.deviation,
                row.flagged ? "FLAGGED" : "ok");
  }
  fs::create_directories(m.output_dir);
  std::ofstream os(fs::path(m.output_dir) / "convergence.csv", std::ios::binary);
  write_convergence_csv(os, r);
  return 0;
}

int cmd_plots(const Common& c) {
  const RunManifest m = load(c);
  const fs::path index = fs::path(m.output_dir) / "index.json";
  const PlotScripts p = emit_plot_scripts(index.string(), (fs::path(m.output_dir) / "plots").string());
  for (const auto& w : p.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  for (const auto& s : p.written) std::printf("%s\n", s.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transmon quantum battery charged by repeated collisions"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Suppress progress output");

  Common c_spec, c_run, c_sweep, c_fit, c_conv, c_plots;
  auto* spectrum = app.add_subcommand("spectrum", "Solve the transmon spectrum and charge dispersion");
  add_common(spectrum, c_spec);
  auto* run = app.add_subcommand("run", "Run a single charging trajectory");
  add_common(run, c_run);
  auto* sweep = app.add_subcommand("sweep", "Run every grid point of the manifest");
  add_common(sweep, c_sweep);
  auto* fit = app.add_subcommand("fit", "Fit the trajectories of a completed sweep");
  add_common(fit, c_fit);
  FitPipelineOptions fit_opts;
  fit->add_option("--damping-window", fit_opts.damping_window, "Collisions used for the damping fit");
  fit->add_option("--saturation-window", fit_opts.saturation_window, "Collisions used for the saturation fit");
  fit->add_option("--frequency-cap", fit_opts.frequency_cap, "Upper bound of the frequency window");
  bool fixed_amplitude = false;
  fit->add_flag("--fixed-amplitude", fixed_amplitude, "Fix the damping-fit amplitude at E_f/2");
  auto* converge = app.add_subcommand("converge", "Truncation report for the first grid point");
  add_common(converge, c_conv);
  std::vector<std::string> variants;
  converge->add_option("--variant", variants, "Truncation to compare, cutoff:levels (repeatable)");
  auto* plots = app.add_subcommand("plots", "Emit plotting scripts for a completed sweep");
  add_common(plots, c_plots);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*spectrum) return cmd_spectrum(c_spec);
    if (*run) return cmd_run(c_run);
    if (*sweep) return cmd_sweep(c_sweep, quiet);
    if (*fit) {
      fit_opts.damping_free_amplitude = !fixed_amplitude;
      return cmd_fit(c_fit, fit_opts);
    }
    if (*converge) return cmd_converge(c_conv, variants);
    if (*plots) return cmd_plots(c_plots);
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
