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

// Plot-script emission. Nothing is drawn in-process: each script is a
// standalone matplotlib program that reads the CSVs next to it.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tqb {

struct PlotScripts {
  std::vector<std::string> written;  // paths of emitted scripts
  std::vector<std::string> warnings;
};

/// One two-panel script (dE and efficiency) per trajectory and one heat map
/// per density table in the index. Scripts land in `script_dir` and refer to
/// the CSVs by relative path. An index without points is a no-op with a
/// warning; a referenced CSV that does not exist is a ValidationError.
PlotScripts emit_plot_scripts(const std::string& index_path, const std::string& script_dir);

}  // namespace tqb
