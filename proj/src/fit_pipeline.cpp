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

#include "tqb/fit_pipeline.hpp"

#include "tqb/errors.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <map>

namespace tqb {

using nlohmann::json;

namespace {

json covariance_json(const RMatrix& c) {
  json rows = json::array();
  for (Index i = 0; i < c.rows(); ++i) {
    json r = json::array();
    for (Index j = 0; j < c.cols(); ++j) r.push_back(c(i, j));
    rows.push_back(r);
  }
  return rows;
}

json scaling_json(const ScalingFit& f, const std::map<std::string, std::string>& rename = {}) {
  json j;
  json names = json::array();
  for (const auto& n : f.names) {
    const auto it = rename.find(n);
    const std::string out = it == rename.end() ? n : it->second;
    j[out] = f.at(n);
    names.push_back(out);
  }
  j["parameters"] = names;
  j["covariance"] = covariance_json(f.covariance);
  j["residual_rms"] = f.residual_rms;
  return j;
}

std::string label(const char* prefix, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s%.6g", prefix, v);
  return buf;
}

}  // namespace

std::string run_fit_pipeline(const IndexDocument& index, const FitPipelineOptions& o) {
  json doc;
  doc["trajectories"] = json::object();
  // Grouped by (tau, c, detuning) so a law never mixes collision durations.
  struct Group {
    std::vector<ScalingPoint> omega, gamma_damped, f, gamma_sat;
  };
  std::map<std::string, Group> groups;

  for (const auto& e : index.points) {
    if (!e.ok || e.file.empty()) continue;
    if (!std::filesystem::exists(e.file)) throw ValidationError("index references missing file '" + e.file + "'");
    const std::string stem = std::filesystem::path(e.file).stem().string();
    char gk[96];
    std::snprintf(gk, sizeof gk, "tau%.6g_c%.6g_det%.6g", e.config.tau, e.config.c, e.config.detuning);
    Group& grp = groups[gk];

    const Trajectory t = read_trajectory_csv(e.file);
    const Series s = Series::stored_energy(t);
    json tj;
    tj["g"] = e.config.coupling_g;
    tj["q"] = e.config.q;
    tj["tau"] = e.config.tau;
    tj["c"] = e.config.c;
    try {
      if (classify_shape(s) == Shape::oscillatory) {
        tj["shape"] = "oscillatory";
        const Window fw = frequency_window(s, o.frequency_periods, o.frequency_cap);
        const DampedCosineFit ff = fit_damped_cosine(s, fw, false);
        tj["Omega"] = ff.omega;
        tj["Gamma_fixed_amplitude"] = ff.gamma;
        tj["frequency_window"] = fw.last;
        tj["frequency_residual_rms"] = ff.residual_rms;
        tj["frequency_converged"] = ff.converged;
        if (ff.converged && e.config.q > 0.0 && e.config.q < 1.0) grp.omega.push_back({e.config.coupling_g, e.config.q, ff.omega});
        const DampedCosineFit fd = fit_damped_cosine(s, {0.0, o.damping_window}, o.damping_free_amplitude);
        tj["Gamma"] = fd.gamma;
        tj["damping_amplitude"] = {fd.amplitude_scale, fd.oscillation_amplitude};
        tj["damping_residual_rms"] = fd.residual_rms;
        tj["damping_converged"] = fd.converged;
        if (fd.converged && fd.gamma > 0) grp.gamma_damped.push_back({e.config.coupling_g, e.config.q, fd.gamma});
      } else {
        tj["shape"] = "saturating";
        const SaturationFit sf = fit_saturation(s, {0.0, o.saturation_window});
        tj["f"] = sf.f;
        tj["gamma"] = sf.gamma;
        tj["residual_rms"] = sf.residual_rms;
        tj["converged"] = sf.converged;
        if (sf.converged) {
          grp.f.push_back({e.config.coupling_g, e.config.q, sf.f});
          grp.gamma_sat.push_back({e.config.coupling_g, e.config.q, sf.gamma});
        }
      }
    } catch (const Error& err) {
      tj["error"] = err.what();
    }
    doc["trajectories"][stem] = tj;
  }

  auto attempt = [](json& slot, const auto& body) {
    try {
      body();
    } catch (const Error& err) {
      slot = {{"error", err.what()}};
    }
  };
  for (auto& [key, g] : groups) {
    json& law = doc["laws"][key];
    if (!g.omega.empty()) {
      attempt(law["frequency"], [&] {
        law["frequency"] = scaling_json(fit_frequency_scaling(g.omega), {{"omega_star", "Omega_star"}});
      });
    }
    if (!g.gamma_damped.empty()) {
      attempt(law["damping"], [&] {
        const DampingScalingFit d = fit_damping_scaling(g.gamma_damped);
        json j;
        for (const auto& [q, f] : d.coupling_exponent_by_q) {
          j["coupling_exponent"][label("q", q)] =
              scaling_json(f, {{"exponent", "beta"}, {"prefactor", "prefactor"}});
        }
        if (!d.coupling_exponent_by_q.empty()) j["beta_mean"] = d.coupling_exponent;
        for (const auto& [gv, f] : d.shape_by_g) {
          j["per_coupling"][label("g", gv)] = scaling_json(f, {{"gamma_star", "Gamma_star"}, {"offset", "c"}});
        }
        law["damping"] = j;
      });
    }
    if (!g.f.empty()) {
      attempt(law["f"], [&] { law["f"] = scaling_json(fit_saturation_level(g.f)); });
      attempt(law["gamma"], [&] {
        std::map<double, std::vector<ScalingPoint>> by_q;
        for (const auto& p : g.gamma_sat) by_q[p.q].push_back(p);
        json j;
        for (const auto& [q, pts] : by_q) {
          try {
            j[label("q", q)] = scaling_json(fit_gamma_scaling(pts));
          } catch (const Error& err) {
            j[label("q", q)] = {{"error", err.what()}};
          }
        }
        law["gamma"] = j;
      });
    }
  }
  return doc.dump(2) + "\n";
}

}  // namespace tqb
