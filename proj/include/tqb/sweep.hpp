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

// Parameter sweeps. Grid points run on a bounded worker pool; a single
// collector writes every file. Output directory layout:
//
//   traj_*.csv     one trajectory per grid point
//   density_*.csv  (n, q, delta_E) per (g, tau, c, detuning) when q has > 1 value
//   index.json     manifest with all defaults, grid points, files and status
//   summary.json   wall time and validity counters (not deterministic)

#pragma once

#include "tqb/manifest.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace tqb {

struct PointResult {
  std::size_t id = 0;
  ProtocolConfig config;
  std::string file;  // relative to the output directory; empty on failure
  bool ok = false;
  std::string error;
  double seconds = 0.0;
  RunStats stats;
};

struct SweepSummary {
  std::string output_dir;
  std::size_t product_size = 0;
  std::size_t failed = 0;
  int threads = 1;
  double wall_seconds = 0.0;
  long validity_checks = 0;
  std::vector<PointResult> points;     // ordered by id
  std::vector<std::string> density_files;
  std::string index_path;
};

/// File name for a grid point; appends the detuning when it is non-zero.
std::string point_file_name(const ProtocolConfig& config);

/// Runs every grid point and writes the directory described above. Per-point
/// failures are recorded, never thrown. `log` receives progress lines.
SweepSummary run_sweep(const RunManifest& manifest, std::ostream* log = nullptr);

/// Reads index.json and returns the (ok) trajectory files with their configs.
struct IndexEntry {
  ProtocolConfig config;
  std::string file;  // absolute or relative to the working directory
  bool ok = false;
};
struct IndexDocument {
  std::string output_dir;
  std::vector<IndexEntry> points;
  std::vector<std::string> density_files;
};
IndexDocument read_index(const std::string& path);

}  // namespace tqb
