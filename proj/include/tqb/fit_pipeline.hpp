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

// Fits every trajectory listed in a sweep index and the scaling laws the
// grid supports. The result document is flat JSON keyed by law name:
//
//   trajectories.<file stem>         shape, damped-cosine or saturation parameters
//   laws.<tau,c,detuning>.frequency  Omega_star, alpha, beta
//   laws.<...>.damping               beta per q; Gamma_star, delta, c per g
//   laws.<...>.gamma                 gamma_star, beta per q
//   laws.<...>.f                     a, b
//
// Laws the grid cannot support carry an "error" entry instead.

#pragma once

#include "tqb/analysis.hpp"
#include "tqb/sweep.hpp"

#include <string>

namespace tqb {

struct FitPipelineOptions {
  double frequency_periods = 2.2;
  double frequency_cap = 6000.0;
  double damping_window = 20000.0;
  bool damping_free_amplitude = true;
  double saturation_window = 5000.0;
};

/// Returns the JSON text of the fit document.
std::string run_fit_pipeline(const IndexDocument& index, const FitPipelineOptions& options = {});

}  // namespace tqb
