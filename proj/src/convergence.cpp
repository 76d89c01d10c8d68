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

#include "tqb/convergence.hpp"

#include "tqb/csv.hpp"
#include "tqb/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

namespace tqb {

double trajectory_deviation(const Trajectory& a, const Trajectory& b) {
  std::map<long, double> ea;
  for (const auto& p : a.points) ea[p.n] = p.stored_energy;
  double dev = 0.0;
  bool any = false;
  for (const auto& p : b.points) {
    const auto it = ea.find(p.n);
    if (it == ea.end()) continue;
    dev = std::max(dev, std::abs(it->second - p.stored_energy));
    any = true;
  }
  if (!any) throw ShapeError("trajectories share no collision index");
  return dev;
}

std::vector<TruncationVariant> default_variants(const TransmonSpec& s) {
  return {{2 * s.charge_cutoff, s.battery_levels},
          {s.charge_cutoff, 2 * s.battery_levels},
          {s.charge_cutoff, s.battery_levels + 5}};
}

ConvergenceReport convergence_report(const ProtocolConfig& probe,
                                     const std::vector<TruncationVariant>& variants, double threshold) {
  ConvergenceReport rep;
  rep.probe = probe;
  rep.threshold = threshold;

  const Spectrum base = solve_spectrum(probe.transmon, false);
  TransmonSpec wider = probe.transmon;
  wider.charge_cutoff += kConvergenceCutoffStep;
  wider.battery_levels = std::max(1, base.bound_count);
  TransmonSpec bound = probe.transmon;
  bound.battery_levels = wider.battery_levels;
  const Spectrum a = solve_spectrum(bound, false);
  const Spectrum b = solve_spectrum(wider, false);
  for (Index m = 0; m < a.dim(); ++m) {
    const double scale = std::max(1.0, std::abs(a.levels(m)));
    rep.bound_level_shift = std::max(rep.bound_level_shift, std::abs(a.levels(m) - b.levels(m)) / scale);
  }
  rep.bound_levels_converged = rep.bound_level_shift <= kConvergenceTolerance;

  const Trajectory reference = run_protocol(probe);
  for (const auto& v : variants) {
    ConvergenceRow row{v, 0.0, false, {}};
    try {
      ProtocolConfig c = probe;
      c.transmon.charge_cutoff = v.charge_cutoff;
      c.transmon.battery_levels = v.battery_levels;
      row.deviation = trajectory_deviation(reference, run_protocol(c));
      row.flagged = row.deviation > threshold;
    } catch (const Error& e) {
      row.error = e.what();
      row.flagged = true;
    }
    rep.any_flagged = rep.any_flagged || row.flagged;
    rep.rows.push_back(row);
  }
  return rep;
}

ConvergenceReport convergence_report(const ProtocolConfig& probe) {
  return convergence_report(probe, default_variants(probe.transmon));
}

void write_convergence_csv(std::ostream& os, const ConvergenceReport& r) {
  os << "charge_cutoff,battery_levels,max_deviation[E_f],flagged\n";
  os << r.probe.transmon.charge_cutoff << ',' << r.probe.transmon.battery_levels << ",0,0\n";
  for (const auto& row : r.rows) {
    os << row.variant.charge_cutoff << ',' << row.variant.battery_levels << ','
       << (row.error.empty() ? csv::number(row.deviation) : std::string("nan")) << ','
       << (row.flagged ? 1 : 0) << '\n';
  }
}

}  // namespace tqb
