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

#include "tqb/plots.hpp"

#include "tqb/errors.hpp"
#include "tqb/sweep.hpp"

#include <filesystem>
#include <fstream>

namespace tqb {

namespace fs = std::filesystem;

namespace {

constexpr const char* kTrajectoryTemplate = R"(#!/usr/bin/env python3
# Stored energy and extraction efficiency against collision number.
import csv
import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
SOURCE = os.path.join(HERE, "@CSV@")

n, de, eta = [], [], []
with open(SOURCE, newline="") as fh:
    for row in csv.DictReader(fh):
        n.append(float(row["n"]))
        de.append(float(row["delta_E[E_f]"]))
        eta.append(float(row["efficiency"]) if row["efficiency"] else float("nan"))

fig, (top, bottom) = plt.subplots(2, 1, sharex=True, figsize=(6, 5))
top.plot(n, de, lw=1)
top.set_ylabel(r"$\Delta E / E_f$")
top.set_title("@TITLE@")
bottom.plot(n, eta, lw=1, color="C1")
bottom.set_ylabel(r"$\eta$")
bottom.set_xlabel("n")
fig.tight_layout()
fig.savefig(os.path.join(HERE, "@STEM@.png"), dpi=150)
)";

constexpr const char* kDensityTemplate = R"(#!/usr/bin/env python3
# Stored energy over (n, q).
import csv
import os

import numpy as np
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
SOURCE = os.path.join(HERE, "@CSV@")

rows = []
with open(SOURCE, newline="") as fh:
    for row in csv.DictReader(fh):
        rows.append((float(row["n"]), float(row["q"]), float(row["delta_E[E_f]"])))
ns = sorted({r[0] for r in rows})
qs = sorted({r[1] for r in rows})
grid = np.full((len(qs), len(ns)), np.nan)
ni = {v: i for i, v in enumerate(ns)}
qi = {v: i for i, v in enumerate(qs)}
for n, q, e in rows:
    grid[qi[q], ni[n]] = e

fig, ax = plt.subplots(figsize=(6, 4))
mesh = ax.pcolormesh(ns, qs, grid, shading="nearest", cmap="viridis")
fig.colorbar(mesh, ax=ax, label=r"$\Delta E / E_f$")
ax.set_xlabel("n")
ax.set_ylabel("q")
ax.set_title("@TITLE@")
fig.tight_layout()
fig.savefig(os.path.join(HERE, "@STEM@.png"), dpi=150)
)";

std::string fill(std::string text, const std::string& csv, const std::string& stem) {
  auto replace = [&](const std::string& key, const std::string& value) {
    for (auto pos = text.find(key); pos != std::string::npos; pos = text.find(key, pos + value.size())) {
      text.replace(pos, key.size(), value);
    }
  };
  replace("@CSV@", csv);
  replace("@STEM@", stem);
  replace("@TITLE@", stem);
  return text;
}

std::string write_script(const fs::path& dir, const std::string& tmpl, const std::string& csv_path) {
  if (!fs::exists(csv_path)) throw ValidationError("index references missing CSV '" + csv_path + "'");
  const std::string stem = fs::path(csv_path).stem().string();
  const std::string rel = fs::relative(fs::absolute(csv_path), fs::absolute(dir)).generic_string();
  const fs::path out = dir / ("plot_" + stem + ".py");
  std::ofstream os(out, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot write '" + out.string() + "'");
  os << fill(tmpl, rel, stem);
  return out.string();
}

}  // namespace

PlotScripts emit_plot_scripts(const std::string& index_path, const std::string& script_dir) {
  const IndexDocument index = read_index(index_path);
  PlotScripts out;
  if (index.points.empty()) {
    out.warnings.push_back("index '" + index_path + "' lists no trajectories; nothing to plot");
    return out;
  }
  // Check every reference before writing anything.
  for (const auto& p : index.points) {
    if (p.ok && !fs::exists(p.file)) throw ValidationError("index references missing CSV '" + p.file + "'");
  }
  for (const auto& d : index.density_files) {
    if (!fs::exists(d)) throw ValidationError("index references missing CSV '" + d + "'");
  }
  fs::create_directories(script_dir);
  for (const auto& p : index.points) {
    if (!p.ok) {
      out.warnings.push_back("skipping failed grid point");
      continue;
    }
    out.written.push_back(write_script(script_dir, kTrajectoryTemplate, p.file));
  }
  for (const auto& d : index.density_files) out.written.push_back(write_script(script_dir, kDensityTemplate, d));
  return out;
}

}  // namespace tqb
