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

#include "tqb/manifest.hpp"

#include "tqb/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace tqb {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& raw) {
  const std::string s = trim(raw);
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || p != end || !std::isfinite(v)) {
    throw ValidationError("'" + s + "' is not a finite number");
  }
  return v;
}

long parse_long(const std::string& raw) {
  const std::string s = trim(raw);
  long v = 0;
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || p != end) throw ValidationError("'" + s + "' is not an integer");
  return v;
}

std::string exact(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += exact(v[i]);
  }
  return out;
}

void require_in(const std::vector<double>& v, double lo, double hi, const char* what) {
  for (double x : v) {
    if (!(x >= lo && x <= hi)) {
      throw ValidationError(std::string(what) + " value " + exact(x) + " outside [" + exact(lo) + ", " +
                            exact(hi) + "]");
    }
  }
}

void require_positive(const std::vector<double>& v, const char* what) {
  for (double x : v) {
    if (!(x > 0.0)) throw ValidationError(std::string(what) + " values must be positive, got " + exact(x));
  }
}

struct Field {
  std::function<void(RunManifest&, const std::string&)> set;
  std::function<std::string(const RunManifest&)> get;
};

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = {
      {"name",
       {[](RunManifest& m, const std::string& v) {
          if (v.empty()) throw ValidationError("name must not be empty");
          m.name = v;
        },
        [](const RunManifest& m) { return m.name; }}},
      {"transmon.ej_over_ec",
       {[](RunManifest& m, const std::string& v) {
          m.transmon.ej_over_ec = parse_double(v);
          if (!(m.transmon.ej_over_ec > 0)) throw ValidationError("ej_over_ec must be positive");
        },
        [](const RunManifest& m) { return exact(m.transmon.ej_over_ec); }}},
      {"transmon.ng",
       {[](RunManifest& m, const std::string& v) { m.transmon.ng = parse_double(v); },
        [](const RunManifest& m) { return exact(m.transmon.ng); }}},
      {"transmon.charge_cutoff",
       {[](RunManifest& m, const std::string& v) {
          const long x = parse_long(v);
          if (x <= 0 || x > 10000) throw ValidationError("charge_cutoff must lie in [1, 10000]");
          m.transmon.charge_cutoff = static_cast<int>(x);
        },
        [](const RunManifest& m) { return std::to_string(m.transmon.charge_cutoff); }}},
      {"transmon.battery_levels",
       {[](RunManifest& m, const std::string& v) {
          const long x = parse_long(v);
          if (x <= 1 || x > 10000) throw ValidationError("battery_levels must lie in [2, 10000]");
          m.transmon.battery_levels = static_cast<int>(x);
        },
        [](const RunManifest& m) { return std::to_string(m.transmon.battery_levels); }}},
      {"ancilla.q",
       {[](RunManifest& m, const std::string& v) {
          auto g = parse_grid(v);
          require_in(g, 0.0, 1.0, "q");
          m.q = std::move(g);
        },
        [](const RunManifest& m) { return join(m.q); }}},
      {"ancilla.c",
       {[](RunManifest& m, const std::string& v) {
          auto g = parse_grid(v);
          require_in(g, 0.0, 1.0, "c");
          m.c = std::move(g);
        },
        [](const RunManifest& m) { return join(m.c); }}},
      {"ancilla.delta",
       {[](RunManifest& m, const std::string& v) {
          if (trim(v) == "resonant") {
            m.delta.reset();
            return;
          }
          m.delta = parse_double(v);
        },
        [](const RunManifest& m) { return m.delta ? exact(*m.delta) : std::string("resonant"); }}},
      {"ancilla.detuning",
       {[](RunManifest& m, const std::string& v) {
          auto g = parse_grid(v);
          require_in(g, -0.99, 10.0, "detuning");
          m.detuning = std::move(g);
        },
        [](const RunManifest& m) { return join(m.detuning); }}},
      {"protocol.g",
       {[](RunManifest& m, const std::string& v) {
          auto g = parse_grid(v);
          require_positive(g, "g");
          require_in(g, 0.0, 0.999, "g (units of omega_p)");
          m.g = std::move(g);
        },
        [](const RunManifest& m) { return join(m.g); }}},
      {"protocol.tau",
       {[](RunManifest& m, const std::string& v) {
          auto g = parse_grid(v);
          require_positive(g, "tau");
          m.tau = std::move(g);
        },
        [](const RunManifest& m) { return join(m.tau); }}},
      {"protocol.n_collisions",
       {[](RunManifest& m, const std::string& v) {
          m.n_collisions = parse_long(v);
          if (m.n_collisions <= 0) throw ValidationError("n_collisions must be positive");
        },
        [](const RunManifest& m) { return std::to_string(m.n_collisions); }}},
      {"protocol.record_every",
       {[](RunManifest& m, const std::string& v) {
          m.record_every = parse_long(v);
          if (m.record_every <= 0) throw ValidationError("record_every must be positive");
        },
        [](const RunManifest& m) { return std::to_string(m.record_every); }}},
      {"protocol.frame",
       {[](RunManifest& m, const std::string& v) { m.frame = frame_from_string(trim(v)); },
        [](const RunManifest& m) { return std::string(to_string(m.frame)); }}},
      {"protocol.energy_reference",
       {[](RunManifest& m, const std::string& v) { m.energy_reference = energy_reference_from_string(trim(v)); },
        [](const RunManifest& m) { return std::string(to_string(m.energy_reference)); }}},
      {"sweep.output_dir",
       {[](RunManifest& m, const std::string& v) {
          if (v.empty()) throw ValidationError("output_dir must not be empty");
          m.output_dir = v;
        },
        [](const RunManifest& m) { return m.output_dir; }}},
      {"sweep.threads",
       {[](RunManifest& m, const std::string& v) {
          const long x = parse_long(v);
          if (x < 0 || x > 1024) throw ValidationError("threads must lie in [0, 1024]");
          m.threads = static_cast<int>(x);
        },
        [](const RunManifest& m) { return std::to_string(m.threads); }}},
  };
  return table;
}

std::string resolve_key(const std::string& key) {
  const auto& t = fields();
  if (t.count(key)) return key;
  std::string found;
  for (const auto& [k, f] : t) {
    const auto dot = k.find('.');
    if (dot != std::string::npos && k.substr(dot + 1) == key) {
      if (!found.empty()) throw ValidationError("ambiguous key '" + key + "'");
      found = k;
    }
  }
  if (found.empty()) throw ValidationError("unknown key '" + key + "'");
  return found;
}

}  // namespace

std::vector<double> parse_grid(const std::string& raw) {
  const std::string value = trim(raw);
  if (value.empty()) throw ValidationError("empty grid");
  std::vector<double> out;
  if (value.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(value);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw ValidationError("range must be start:stop:step, got '" + value + "'");
    const double a = parse_double(parts[0]), b = parse_double(parts[1]), s = parse_double(parts[2]);
    if (!(s > 0.0) || b < a) throw ValidationError("range '" + value + "' needs step > 0 and stop >= start");
    const double steps = (b - a) / s;
    const long count = static_cast<long>(std::floor(steps + 1e-9)) + 1;
    if (count > 1000000) throw ValidationError("range '" + value + "' is too long");
    for (long i = 0; i < count; ++i) {
      // Round to 12 significant digits so 0.1 * 3 reads back as 0.3.
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.12g", a + static_cast<double>(i) * s);
      out.push_back(std::strtod(buf, nullptr));
    }
    return out;
  }
  std::stringstream ss(value);
  for (std::string p; std::getline(ss, p, ',');) {
    if (trim(p).empty()) throw ValidationError("empty list element in '" + value + "'");
    out.push_back(parse_double(p));
  }
  return out;
}

void RunManifest::validate() const {
  auto field = [](const std::string& f, const std::string& what) {
    return ValidationError(f + ": " + what);
  };
  const std::pair<const char*, const std::vector<double>*> grids[] = {
      {"ancilla.q", &q}, {"ancilla.c", &c}, {"ancilla.detuning", &detuning},
      {"protocol.g", &g}, {"protocol.tau", &tau}};
  for (const auto& [n, v] : grids) {
    if (v->empty()) throw field(n, "grid is empty");
  }
  try {
    transmon.validate();
  } catch (const Error& e) {
    throw field("transmon", e.what());
  }
  for (double x : q)
    if (!(x >= 0 && x <= 1)) throw field("ancilla.q", "value outside [0, 1]");
  for (double x : c)
    if (!(x >= 0 && x <= 1)) throw field("ancilla.c", "value outside [0, 1]");
  for (double x : g)
    if (!(x > 0 && x < 1)) throw field("protocol.g", "value outside (0, 1) in units of omega_p");
  for (double x : tau)
    if (!(x > 0)) throw field("protocol.tau", "value must be positive");
  for (double x : detuning)
    if (!(x > -1)) throw field("ancilla.detuning", "value must exceed -1");
  if (n_collisions <= 0) throw field("protocol.n_collisions", "must be positive");
  if (record_every <= 0) throw field("protocol.record_every", "must be positive");
  if (threads < 0) throw field("sweep.threads", "must be non-negative");
  if (output_dir.empty()) throw field("sweep.output_dir", "must not be empty");
}

std::size_t RunManifest::product_size() const {
  return g.size() * tau.size() * c.size() * detuning.size() * q.size();
}

std::vector<ProtocolConfig> RunManifest::grid() const {
  std::vector<ProtocolConfig> out;
  out.reserve(product_size());
  for (double gv : g)
    for (double tv : tau)
      for (double cv : c)
        for (double dv : detuning)
          for (double qv : q) {
            ProtocolConfig p;
            p.transmon = transmon;
            p.q = qv;
            p.c = cv;
            p.delta = delta;
            p.detuning = dv;
            p.coupling_g = gv;
            p.tau = tv;
            p.n_collisions = n_collisions;
            p.record_every = record_every;
            p.frame = frame;
            p.energy_reference = energy_reference;
            out.push_back(p);
          }
  return out;
}

int RunManifest::effective_threads() const {
  if (threads > 0) return threads;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

RunManifest parse_manifest_text(const std::string& text, const std::string& source) {
  static const std::set<std::string> sections = {"transmon", "ancilla", "protocol", "sweep"};
  RunManifest m;
  std::map<std::string, int> seen;
  std::string section;
  std::istringstream is(text);
  int line_no = 0;
  for (std::string raw; std::getline(is, raw);) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(source + ": malformed section header '" + line + "'", line_no);
      section = trim(line.substr(1, line.size() - 2));
      if (!sections.count(section)) throw ParseError(source + ": unknown section [" + section + "]", line_no);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(source + ": expected key = value, got '" + line + "'", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string full = section.empty() ? key : section + "." + key;
    const auto it = fields().find(full);
    if (it == fields().end()) throw ParseError(source + ": unknown key '" + full + "'", line_no);
    if (const auto prev = seen.find(full); prev != seen.end()) {
      throw ParseError(source + ": duplicate key '" + full + "' (first set on line " +
                           std::to_string(prev->second) + ")",
                       line_no);
    }
    seen[full] = line_no;
    try {
      it->second.set(m, value);
    } catch (const Error& e) {
      throw ParseError(source + ": " + full + ": " + e.what(), line_no);
    }
  }
  m.validate();
  return m;
}

RunManifest parse_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open manifest '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_manifest_text(ss.str(), path);
}

std::string serialize_manifest(const RunManifest& m) {
  std::string out = "name = " + m.name + "\n";
  std::string current;
  for (const auto& [key, f] : fields()) {
    const auto dot = key.find('.');
    if (dot == std::string::npos) continue;
    const std::string sec = key.substr(0, dot);
    if (sec != current) {
      out += "\n[" + sec + "]\n";
      current = sec;
    }
    out += key.substr(dot + 1) + " = " + f.get(m) + "\n";
  }
  return out;
}

void apply_override(RunManifest& m, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ValidationError("override '" + assignment + "' is not key=value");
  const std::string key = resolve_key(trim(assignment.substr(0, eq)));
  try {
    fields().at(key).set(m, trim(assignment.substr(eq + 1)));
  } catch (const Error& e) {
    throw ValidationError("override " + key + ": " + e.what());
  }
}

void apply_environment(RunManifest& m) {
  if (const char* root = std::getenv("TQB_OUTPUT_ROOT"); root && *root) m.output_dir = root;
  if (const char* th = std::getenv("TQB_THREADS"); th && *th) {
    try {
      fields().at("sweep.threads").set(m, th);
    } catch (const Error& e) {
      throw ValidationError(std::string("TQB_THREADS: ") + e.what());
    }
  }
}

bool operator==(const RunManifest& a, const RunManifest& b) {
  return serialize_manifest(a) == serialize_manifest(b);
}

}  // namespace tqb
