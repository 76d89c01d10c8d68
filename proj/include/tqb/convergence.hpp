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

// Truncation checks: how far the stored-energy trajectory moves when the
// charge cutoff or the number of retained levels changes.

#pragma once

#include "tqb/collision.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace tqb {

inline constexpr double kTruncationThreshold = 1e-3;  // E_f

/// max_n |dE_a(n) - dE_b(n)| over the collision indices both record.
double trajectory_deviation(const Trajectory& a, const Trajectory& b);

struct TruncationVariant {
  int charge_cutoff;
  int battery_levels;
};

struct ConvergenceRow {
  TruncationVariant variant;
  double deviation = 0.0;  // E_f, against the probe truncation
  bool flagged = false;    // deviation > threshold
  std::string error;       // set when the variant could not be run
};

struct ConvergenceReport {
  ProtocolConfig probe;
  double threshold = kTruncationThreshold;
  std::vector<ConvergenceRow> rows;
  // Bound levels at the probe cutoff against cutoff + 10.
  double bound_level_shift = 0.0;
  bool bound_levels_converged = false;
  bool any_flagged = false;
};

/// Default variants: doubled cutoff, doubled levels, levels + 5.
std::vector<TruncationVariant> default_variants(const TransmonSpec& spec);

ConvergenceReport convergence_report(const ProtocolConfig& probe,
                                     const std::vector<TruncationVariant>& variants,
                                     double threshold = kTruncationThreshold);
ConvergenceReport convergence_report(const ProtocolConfig& probe);

/// CSV: charge_cutoff,battery_levels,max_deviation[E_f],flagged
void write_convergence_csv(std::ostream& os, const ConvergenceReport& report);

}  // namespace tqb
