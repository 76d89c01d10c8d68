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

#include "tqb/sweep.hpp"

#include "tqb/csv.hpp"
#include "tqb/errors.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

namespace tqb {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Finished {
  std::size_t id;
  std::string csv;  // empty on failure
  std::string error;
  double seconds;
  RunStats stats;
  std::vector<long> n;
  std::vector<double> stored;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

std::string group_key(const ProtocolConfig& c) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "density_ej%.6g_g%.6g_tau%.6g_c%.6g", c.transmon.ej_over_ec,
                c.coupling_g, c.tau, c.c);
  std::string s = buf;
  if (c.detuning != 0.0) {
    std::snprintf(buf, sizeof buf, "_det%.6g", c.detuning);
    s += buf;
  }
  return s + ".csv";
}

json manifest_json(const RunManifest& m) {
  json j;
  j["name"] = m.name;
  j["transmon"] = {{"ej_over_ec", m.transmon.ej_over_ec},
                   {"ng", m.transmon.ng},
                   {"charge_cutoff", m.transmon.charge_cutoff},
                   {"battery_levels", m.transmon.battery_levels}};
  j["ancilla"] = {{"q", m.q}, {"c", m.c}, {"detuning", m.detuning}};
  j["ancilla"]["delta"] = m.delta ? json(*m.delta) : json("resonant");
  j["protocol"] = {{"g", m.g},
                   {"tau", m.tau},
                   {"n_collisions", m.n_collisions},
                   {"record_every", m.record_every},
                   {"frame", to_string(m.frame)},
                   {"energy_reference", to_string(m.energy_reference)}};
  j["sweep"] = {{"output_dir", m.output_dir}};
  return j;
}

json point_json(const PointResult& p) {
  const auto& c = p.config;
  json j = {{"id", p.id},
            {"file", p.file},
            {"status", p.ok ? "ok" : "failed"},
            {"ej_over_ec", c.transmon.ej_over_ec},
            {"ng", c.transmon.ng},
            {"charge_cutoff", c.transmon.charge_cutoff},
            {"battery_levels", c.transmon.battery_levels},
            {"g", c.coupling_g},
            {"tau", c.tau},
            {"q", c.q},
            {"c", c.c},
            {"detuning", c.detuning},
            {"n_collisions", c.n_collisions},
            {"record_every", c.record_every},
            {"frame", to_string(c.frame)},
            {"energy_reference", to_string(c.energy_reference)}};
  j["delta"] = c.delta ? json(*c.delta) : json("resonant");
  if (!p.ok) j["error"] = p.error;
  return j;
}

}  // namespace

std::string point_file_name(const ProtocolConfig& config) {
  std::string name = trajectory_file_name(config);
  if (config.detuning != 0.0) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "_det%.6g.csv", config.detuning);
    name = name.substr(0, name.size() - 4) + buf;
  }
  return name;
}

SweepSummary run_sweep(const RunManifest& manifest, std::ostream* log) {
  manifest.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<ProtocolConfig> grid = manifest.grid();
  const fs::path dir(manifest.output_dir);
  fs::create_directories(dir);

  SweepSummary summary;
  summary.output_dir = manifest.output_dir;
  summary.product_size = grid.size();
  summary.threads = std::max(1, std::min<int>(manifest.effective_threads(), static_cast<int>(grid.size())));
  summary.points.resize(grid.size());
  if (log) *log << "sweep '" << manifest.name << "': " << grid.size() << " grid points on "
                << summary.threads << " thread(s)\n";

  std::optional<Spectrum> spectrum;
  std::string spectrum_error;
  try {
    spectrum = solve_spectrum(manifest.transmon);
  } catch (const Error& e) {
    spectrum_error = e.what();
  }
  PropagatorCache cache;

  std::mutex mu;
  std::condition_variable cv;
  std::deque<Finished> queue;
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (;;) {
      const std::size_t id = next.fetch_add(1);
      if (id >= grid.size()) return;
      const auto w0 = std::chrono::steady_clock::now();
      Finished f{id, {}, {}, 0.0, {}, {}, {}};
      try {
        if (!spectrum) throw ConvergenceError(spectrum_error);
        const Trajectory t = run_protocol(grid[id], *spectrum, &cache);
        std::ostringstream os;
        write_trajectory_csv(os, t);
        f.csv = os.str();
        f.stats = t.stats;
        for (const auto& p : t.points) {
          f.n.push_back(p.n);
          f.stored.push_back(p.stored_energy);
        }
      } catch (const std::exception& e) {
        f.error = e.what();
      }
      f.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - w0).count();
      {
        std::lock_guard lock(mu);
        queue.push_back(std::move(f));
      }
      cv.notify_one();
    }
  };

  std::vector<std::thread> pool;
  for (int i = 0; i < summary.threads; ++i) pool.emplace_back(worker);

  // Collector: the only writer of output files.
  std::map<std::size_t, std::pair<std::vector<long>, std::vector<double>>> stored_by_id;
  for (std::size_t done = 0; done < grid.size(); ++done) {
    Finished f;
    {
      std::unique_lock lock(mu);
      cv.wait(lock, [&] { return !queue.empty(); });
      f = std::move(queue.front());
      queue.pop_front();
    }
    PointResult& p = summary.points[f.id];
    p.id = f.id;
    p.config = grid[f.id];
    p.seconds = f.seconds;
    p.stats = f.stats;
    const std::string name = point_file_name(p.config);
    std::error_code ec;
    fs::remove(dir / name, ec);  // no stale output from an earlier run
    if (f.error.empty()) {
      try {
        write_text(dir / name, f.csv);
        p.ok = true;
        p.file = name;
        stored_by_id[f.id] = {std::move(f.n), std::move(f.stored)};
      } catch (const std::exception& e) {
        p.error = e.what();
      }
    } else {
      p.error = f.error;
    }
    if (!p.ok) ++summary.failed;
    summary.validity_checks += p.stats.validity_checks;
    if (log) {
      *log << "[" << (done + 1) << "/" << grid.size() << "] " << name << (p.ok ? " ok" : " FAILED: ")
           << (p.ok ? "" : p.error) << "\n";
    }
  }
  for (auto& t : pool) t.join();

  // Density tables over q, one per remaining axis combination.
  if (manifest.q.size() > 1) {
    std::map<std::string, std::vector<std::size_t>> groups;
    std::vector<std::string> order;
    for (std::size_t id = 0; id < grid.size(); ++id) {
      const std::string key = group_key(grid[id]);
      if (!groups.count(key)) order.push_back(key);
      groups[key].push_back(id);
    }
    for (const auto& key : order) {
      std::string text = "n,q,delta_E[E_f]\n";
      std::vector<std::size_t> ok_ids;
      for (std::size_t id : groups[key])
        if (stored_by_id.count(id)) ok_ids.push_back(id);
      if (ok_ids.empty()) continue;
      const auto& ns = stored_by_id[ok_ids.front()].first;
      for (std::size_t k = 0; k < ns.size(); ++k) {
        for (std::size_t id : ok_ids) {
          const auto& [n, e] = stored_by_id[id];
          if (k >= n.size()) continue;
          text += std::to_string(n[k]) + "," + csv::number(grid[id].q) + "," + csv::number(e[k]) + "\n";
        }
      }
      write_text(dir / key, text);
      summary.density_files.push_back(key);
    }
  }

  json index;
  index["format"] = "tqb-index/1";
  index["manifest"] = manifest_json(manifest);
  index["product_size"] = grid.size();
  index["points"] = json::array();
  for (const auto& p : summary.points) index["points"].push_back(point_json(p));
  index["density"] = summary.density_files;
  index["failed"] = summary.failed;
  summary.index_path = (dir / "index.json").string();
  write_text(summary.index_path, index.dump(2) + "\n");

  summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json s;
  s["wall_seconds"] = summary.wall_seconds;
  s["threads"] = summary.threads;
  s["product_size"] = summary.product_size;
  s["failed"] = summary.failed;
  s["validity_checks"] = summary.validity_checks;
  s["propagator_cache"] = {{"hits", cache.hits()}, {"misses", cache.misses()}};
  double max_trace = 0.0, max_herm = 0.0, min_eig = 0.0;
  for (const auto& p : summary.points) {
    max_trace = std::max(max_trace, p.stats.max_trace_error);
    max_herm = std::max(max_herm, p.stats.max_hermitian_defect);
    min_eig = std::min(min_eig, p.stats.min_eigenvalue);
  }
  s["max_trace_error"] = max_trace;
  s["max_hermitian_defect"] = max_herm;
  s["min_eigenvalue"] = min_eig;
  s["failures"] = json::array();
  for (const auto& p : summary.points)
    if (!p.ok) s["failures"].push_back({{"id", p.id}, {"error", p.error}});
  write_text(dir / "summary.json", s.dump(2) + "\n");
  if (log) *log << "done in " << summary.wall_seconds << " s, " << summary.failed << " failed\n";
  return summary;
}

IndexDocument read_index(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open index '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("index '" + path + "' is not valid JSON: " + e.what());
  }
  const fs::path base = fs::path(path).parent_path();
  IndexDocument doc;
  doc.output_dir = base.string();
  try {
    for (const auto& p : j.at("points")) {
      IndexEntry e;
      auto& c = e.config;
      c.transmon.ej_over_ec = p.at("ej_over_ec").get<double>();
      c.transmon.ng = p.at("ng").get<double>();
      c.transmon.charge_cutoff = p.at("charge_cutoff").get<int>();
      c.transmon.battery_levels = p.at("battery_levels").get<int>();
      c.coupling_g = p.at("g").get<double>();
      c.tau = p.at("tau").get<double>();
      c.q = p.at("q").get<double>();
      c.c = p.at("c").get<double>();
      c.detuning = p.at("detuning").get<double>();
      c.n_collisions = p.at("n_collisions").get<long>();
      c.record_every = p.at("record_every").get<long>();
      c.frame = frame_from_string(p.at("frame").get<std::string>());
      c.energy_reference = energy_reference_from_string(p.at("energy_reference").get<std::string>());
      if (p.at("delta").is_number()) c.delta = p.at("delta").get<double>();
      e.ok = p.at("status").get<std::string>() == "ok";
      const std::string file = p.at("file").get<std::string>();
      if (!file.empty()) e.file = (base / file).string();
      doc.points.push_back(std::move(e));
    }
    for (const auto& d : j.value("density", json::array())) doc.density_files.push_back((base / d.get<std::string>()).string());
  } catch (const json::exception& e) {
    throw ValidationError("index '" + path + "' is malformed: " + e.what());
  }
  return doc;
}

}  // namespace tqb
