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

// Run manifests: flat sectioned text.
//
//   # comment
//   name = density_low_g
//   [transmon]
//   ej_over_ec = 100
//   [ancilla]
//   q = 0:1:0.05          # start:stop:step, inclusive
//   c = 1
//   [protocol]
//   g = 4e-3, 8e-3        # comma-separated list
//   tau = 1
//   n_collisions = 5000
//   [sweep]
//   output_dir = out/density_low_g
//
// Keys may appear once. Anything not given takes its default.

#pragma once

#include "tqb/collision.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tqb {

struct RunManifest {
  std::string name = "run";
  TransmonSpec transmon;
  std::vector<double> q{0.5};
  std::vector<double> c{1.0};
  std::optional<double> delta;       // default E_1 - E_0
  std::vector<double> detuning{0.0};  // relative
  std::vector<double> g{4e-3};       // g / omega_p
  std::vector<double> tau{1.0};      // tau / tau_p
  long n_collisions = 1000;
  long record_every = 1;
  Frame frame = Frame::interaction;
  EnergyReference energy_reference = EnergyReference::ground;
  std::string output_dir = "tqb-out";
  int threads = 0;  // 0: hardware concurrency

  /// Throws ValidationError naming the offending field.
  void validate() const;
  std::size_t product_size() const;
  /// Grid points ordered g, tau, c, detuning, q (q varies fastest).
  std::vector<ProtocolConfig> grid() const;
  int effective_threads() const;
};

/// Parses manifest text; `source` prefixes error messages.
RunManifest parse_manifest_text(const std::string& text, const std::string& source = "manifest");
RunManifest parse_manifest(const std::string& path);

/// Canonical text form; parse(serialize(m)) == m.
std::string serialize_manifest(const RunManifest& m);

/// Applies "section.key=value" (or "key=value" when the key is unambiguous).
void apply_override(RunManifest& m, const std::string& assignment);

/// TQB_OUTPUT_ROOT replaces output_dir, TQB_THREADS replaces threads.
void apply_environment(RunManifest& m);

bool operator==(const RunManifest& a, const RunManifest& b);

/// Expands "a:b:s" ranges and comma lists.
std::vector<double> parse_grid(const std::string& value);

}  // namespace tqb
