// Copyright 2026 The rydfalqon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rydfalqon/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

namespace rydfalqon {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return j.at(key).get<T>();
}

std::vector<double> number_list(const json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(v.get<double>());
  return out;
}

AxisRange parse_range(const json& j, const char* what) {
  // [start, stop, step] or a single number.
  if (j.is_number()) return {j.get<double>(), j.get<double>(), 1.0};
  if (!j.is_array() || (j.size() != 3 && j.size() != 1)) {
    throw ConfigError(std::string(what) + " must be [start, stop, step]");
  }
  if (j.size() == 1) return {j[0].get<double>(), j[0].get<double>(), 1.0};
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json range_json(const AxisRange& r) { return json::array({r.start, r.stop, r.step}); }

PulseParams parse_pulse(const json& j, PulseParams p) {
  p.omega0_mhz = get_or(j, "omega0_mhz", p.omega0_mhz);
  p.t_quarter_us = get_or(j, "t_quarter_us", p.t_quarter_us);
  p.d_omega1 = get_or(j, "d_omega1", p.d_omega1);
  p.d_omega2 = get_or(j, "d_omega2", p.d_omega2);
  return p;
}

GateSetting parse_gate_setting(const json& j, GateSetting g) {
  g.pulse = parse_pulse(j, g.pulse);
  g.delta1ph_mhz = get_or(j, "delta1ph_mhz", g.delta1ph_mhz);
  g.delta2ph_khz = get_or(j, "delta2ph_khz", g.delta2ph_khz);
  if (j.contains("backend")) g.backend = parse_channel_backend(j.at("backend").get<std::string>());
  g.target_fidelity = get_or(j, "target_fidelity", g.target_fidelity);
  return g;
}

json gate_setting_json(const GateSetting& g) {
  json j = to_json(g.pulse);
  j["delta1ph_mhz"] = g.delta1ph_mhz;
  j["delta2ph_khz"] = g.delta2ph_khz;
  j["backend"] = to_string(g.backend);
  j["target_fidelity"] = g.target_fidelity;
  return j;
}

AtomModel parse_atom(const json& j, AtomModel m) {
  m.omega2_mhz = get_or(j, "omega2_mhz", m.omega2_mhz);
  m.urr_mhz = get_or(j, "urr_mhz", m.urr_mhz);
  m.tau_p_us = get_or(j, "tau_p_us", m.tau_p_us);
  m.tau_r_us = get_or(j, "tau_r_us", m.tau_r_us);
  m.gamma1_dp_khz = get_or(j, "gamma1_dp_khz", m.gamma1_dp_khz);
  m.gamma2_dp_khz = get_or(j, "gamma2_dp_khz", m.gamma2_dp_khz);
  m.spontaneous_emission = get_or(j, "spontaneous_emission", m.spontaneous_emission);
  m.platform_constrained = get_or(j, "platform_constrained", m.platform_constrained);
  if (j.contains("branching_p")) {
    const auto b = number_list(j.at("branching_p"), "branching_p");
    if (b.size() != 3) throw ConfigError("branching_p needs 3 entries (0, 1, d)");
    m.b0p = b[0], m.b1p = b[1], m.bdp = b[2];
  }
  if (j.contains("branching_r")) {
    const auto b = number_list(j.at("branching_r"), "branching_r");
    if (b.size() != 4) throw ConfigError("branching_r needs 4 entries (0, 1, d, p)");
    m.b0r = b[0], m.b1r = b[1], m.bdr = b[2], m.bpr = b[3];
  }
  return m;
}

json atom_json(const AtomModel& m) {
  json j = to_json(m);
  // Detunings belong to the gate settings in a run config.
  j.erase("delta1ph_mhz");
  j.erase("delta2ph_khz");
  return j;
}

Graph parse_graph(const json& j, const fs::path& base_dir, std::string& label) {
  if (j.is_string()) {
    label = j.get<std::string>();
    return graph_preset(label);
  }
  if (j.contains("preset")) {
    label = j.at("preset").get<std::string>();
    return graph_preset(label);
  }
  if (j.contains("file")) {
    const fs::path p = base_dir / j.at("file").get<std::string>();
    std::ifstream in(p);
    if (!in) throw ConfigError("graph file not found: " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    label = j.value("label", p.filename().string());
    return parse_edge_list(ss.str());
  }
  const int n = j.at("n").get<int>();
  std::vector<Edge> edges;
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() < 2 || e.size() > 3) throw ConfigError("edges must be [u, v] or [u, v, w]");
    edges.push_back({e[0].get<int>(), e[1].get<int>(), e.size() == 3 ? e[2].get<double>() : 1.0});
  }
  label = j.value("label", std::string("custom"));
  return Graph(n, std::move(edges));
}

json graph_json(const Graph& g, const std::string& label) {
  json edges = json::array();
  for (const auto& e : g.edges()) edges.push_back({e.u, e.v, e.weight});
  return {{"label", label}, {"n", g.vertex_count()}, {"edges", edges}};
}

int default_layers(int n) {
  switch (n) {
    case 2: return 20;
    case 3: return 30;
    default: return 40;
  }
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::gate_fidelity: return "gate-fidelity";
    case Experiment::gate_optimize: return "gate-optimize";
    case Experiment::gate_channel: return "gate-channel";
    case Experiment::gate_scan: return "gate-scan";
    case Experiment::falqon: return "falqon";
    case Experiment::falqon_sweep: return "falqon-sweep";
  }
  return "unknown";
}

Experiment parse_experiment(const std::string& s) {
  for (auto e : {Experiment::gate_fidelity, Experiment::gate_optimize, Experiment::gate_channel,
                 Experiment::gate_scan, Experiment::falqon, Experiment::falqon_sweep}) {
    if (to_string(e) == s) return e;
  }
  throw ConfigError("unknown experiment: " + s);
}

std::string to_string(ChannelBackend b) {
  switch (b) {
    case ChannelBackend::extracted: return "extracted";
    case ChannelBackend::depolarized: return "depolarized";
    case ChannelBackend::unitary: return "unitary";
  }
  return "unknown";
}

ChannelBackend parse_channel_backend(const std::string& s) {
  if (s == "extracted") return ChannelBackend::extracted;
  if (s == "depolarized") return ChannelBackend::depolarized;
  if (s == "unitary") return ChannelBackend::unitary;
  throw ConfigError("unknown channel backend: " + s);
}

AtomModel RunConfig::cp_model() const {
  AtomModel m = atom;
  m.delta1ph_mhz = cp.delta1ph_mhz;
  m.delta2ph_khz = cp.delta2ph_khz;
  return m;
}

AtomModel RunConfig::cz_model() const {
  AtomModel m = atom;
  m.delta1ph_mhz = cz.delta1ph_mhz;
  m.delta2ph_khz = cz.delta2ph_khz;
  return m;
}

void RunConfig::validate() const {
  cp_model().validate();
  cz_model().validate();
  cp.pulse.validate();
  cz.pulse.validate();
  cp_spec().validate();
  falqon.validate();
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  if (scheme != "ideal") parse_scheme(scheme);
  if (cz.target_fidelity <= 0.25 || cz.target_fidelity > 1.0 || cp.target_fidelity <= 0.25 ||
      cp.target_fidelity > 1.0) {
    throw ConfigError("target_fidelity must lie in (0.25, 1]");
  }
  if (!(integrator.step_us > 0.0)) throw ConfigError("integrator step must be positive");
  const bool needs_graph = experiment == Experiment::falqon || experiment == Experiment::falqon_sweep;
  if (needs_graph && !graph) throw ConfigError("falqon experiments need a graph");
  if (experiment == Experiment::gate_optimize) {
    grid.omega0_mhz.values();
    grid.delta1ph_mhz.values();
    if (grid.delta2ph_khz) grid.delta2ph_khz->values();
  }
  if (experiment == Experiment::gate_scan) {
    if (scan.xs.empty()) throw ConfigError("scan needs at least one value");
    if (scan.axis == ScanAxis::dephasing && scan.ys.empty()) {
      throw ConfigError("dephasing scan needs gamma2 values");
    }
  }
  if (experiment == Experiment::falqon_sweep && sweep.dts.empty() && sweep.delta2ph_khz.empty()) {
    throw ConfigError("sweep needs dt and/or delta2ph_khz values");
  }
}

RunConfig parse_config(const json& j, const fs::path& base_dir) {
  RunConfig c;
  try {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    if (j.contains("experiment")) c.experiment = parse_experiment(j.at("experiment").get<std::string>());
    if (j.contains("graph")) c.graph = parse_graph(j.at("graph"), base_dir, c.graph_label);
    if (j.contains("falqon")) {
      const auto& f = j.at("falqon");
      c.falqon.dt = get_or(f, "dt", c.falqon.dt);
      c.falqon.k = get_or(f, "k", c.falqon.k);
      c.falqon.beta1 = get_or(f, "beta1", c.falqon.beta1);
      if (f.contains("layers")) {
        c.falqon.layers = f.at("layers").get<int>();
        c.layers_explicit = true;
      }
    }
    if (!c.layers_explicit && c.graph) c.falqon.layers = default_layers(c.graph->vertex_count());
    c.scheme = get_or(j, "scheme", c.scheme);
    if (j.contains("atom")) c.atom = parse_atom(j.at("atom"), c.atom);
    if (j.contains("cp")) c.cp = parse_gate_setting(j.at("cp"), c.cp);
    if (j.contains("cz")) c.cz = parse_gate_setting(j.at("cz"), c.cz);
    c.theta = get_or(j, "theta", c.theta);
    if (j.contains("integrator")) {
      const auto& o = j.at("integrator");
      const std::string method = get_or<std::string>(o, "method", "rk4");
      if (method != "rk4" && method != "dopri5") throw ConfigError("integrator method must be rk4 or dopri5");
      c.integrator.method = method == "rk4" ? IntegratorMethod::rk4 : IntegratorMethod::dopri5;
      c.integrator.step_us = get_or(o, "step_us", c.integrator.step_us);
      c.integrator.rtol = get_or(o, "rtol", c.integrator.rtol);
      c.integrator.atol = get_or(o, "atol", c.integrator.atol);
      c.check_convergence = get_or(o, "check_convergence", c.check_convergence);
    }
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      if (g.contains("omega0_mhz")) c.grid.omega0_mhz = parse_range(g.at("omega0_mhz"), "grid.omega0_mhz");
      if (g.contains("delta1ph_mhz")) {
        c.grid.delta1ph_mhz = parse_range(g.at("delta1ph_mhz"), "grid.delta1ph_mhz");
      }
      if (g.contains("delta2ph_khz") && !g.at("delta2ph_khz").is_null()) {
        c.grid.delta2ph_khz = parse_range(g.at("delta2ph_khz"), "grid.delta2ph_khz");
      }
      c.refine = get_or(g, "refine", c.refine);
    }
    if (j.contains("scan")) {
      const auto& s = j.at("scan");
      c.scan.axis = parse_scan_axis(s.at("axis").get<std::string>());
      if (s.contains("values")) c.scan.xs = number_list(s.at("values"), "scan.values");
      if (s.contains("range")) c.scan.xs = parse_range(s.at("range"), "scan.range").values();
      if (s.contains("values2")) c.scan.ys = number_list(s.at("values2"), "scan.values2");
      if (s.contains("range2")) c.scan.ys = parse_range(s.at("range2"), "scan.range2").values();
    }
    if (j.contains("sweep")) {
      const auto& s = j.at("sweep");
      if (s.contains("dt")) c.sweep.dts = number_list(s.at("dt"), "sweep.dt");
      if (s.contains("delta2ph_khz")) c.sweep.delta2ph_khz = number_list(s.at("delta2ph_khz"), "sweep.delta2ph_khz");
      c.sweep.reoptimize = get_or(s, "reoptimize", c.sweep.reoptimize);
      if (s.contains("gate_table")) {
        for (const auto& row : s.at("gate_table")) {
          c.sweep.gate_table.push_back({row.at("theta").get<double>(), row.at("omega0_mhz").get<double>(),
                                        row.at("delta1ph_mhz").get<double>(),
                                        get_or(row, "delta2ph_khz", 0.0)});
        }
      }
    }
    if (j.contains("output")) {
      const auto& o = j.at("output");
      c.output_dir = get_or(o, "dir", c.output_dir);
      c.channel_cache = get_or(o, "channel_cache", c.channel_cache);
    }
    c.jobs = get_or(j, "jobs", c.jobs);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j, path.parent_path());
}

json to_json(const RunConfig& c) {
  json j;
  j["experiment"] = to_string(c.experiment);
  if (c.graph) j["graph"] = graph_json(*c.graph, c.graph_label);
  j["falqon"] = {{"dt", c.falqon.dt}, {"k", c.falqon.k}, {"beta1", c.falqon.beta1}};
  if (c.layers_explicit || c.graph) j["falqon"]["layers"] = c.falqon.layers;
  j["scheme"] = c.scheme;
  j["atom"] = atom_json(c.atom);
  j["cp"] = gate_setting_json(c.cp);
  j["cz"] = gate_setting_json(c.cz);
  j["theta"] = c.theta;
  j["integrator"] = to_json(c.integrator);
  j["integrator"]["check_convergence"] = c.check_convergence;
  j["grid"] = {{"omega0_mhz", range_json(c.grid.omega0_mhz)},
               {"delta1ph_mhz", range_json(c.grid.delta1ph_mhz)},
               {"delta2ph_khz", c.grid.delta2ph_khz ? range_json(*c.grid.delta2ph_khz) : json(nullptr)},
               {"refine", c.refine}};
  j["scan"] = {{"axis", to_string(c.scan.axis)}, {"values", c.scan.xs}, {"values2", c.scan.ys}};
  json table = json::array();
  for (const auto& row : c.sweep.gate_table) {
    table.push_back({{"theta", row.theta},
                     {"omega0_mhz", row.omega0_mhz},
                     {"delta1ph_mhz", row.delta1ph_mhz},
                     {"delta2ph_khz", row.delta2ph_khz}});
  }
  j["sweep"] = {{"dt", c.sweep.dts},
                {"delta2ph_khz", c.sweep.delta2ph_khz},
                {"reoptimize", c.sweep.reoptimize},
                {"gate_table", table}};
  j["output"] = {{"dir", c.output_dir}, {"channel_cache", c.channel_cache}};
  j["jobs"] = c.jobs;
  return j;
}

std::vector<std::string> preset_names() {
  return {"edge",     "path3",    "type-1",       "type-2",       "type-3", "n2-edge",
          "n3-path", "n4-cycle", "cp-0.4",       "cp-0.4-tuned", "cp-0.8-tuned", "cz-2us"};
}

void apply_preset(RunConfig& c, const std::string& name) {
  auto set_graph = [&](const std::string& g) {
    c.graph = graph_preset(g);
    c.graph_label = g;
    if (!c.layers_explicit) c.falqon.layers = default_layers(c.graph->vertex_count());
  };
  if (name == "edge" || name == "path3" || name == "type-1" || name == "type-2" || name == "type-3") {
    set_graph(name);
  } else if (name == "n2-edge" || name == "n3-path") {
    set_graph(name == "n2-edge" ? "edge" : "path3");
    c.falqon.dt = 0.2;
    c.falqon.k = 2.0;
    c.falqon.layers = name == "n2-edge" ? 20 : 30;
    c.layers_explicit = true;
  } else if (name == "n4-cycle") {
    set_graph("type-3");
    c.falqon.dt = 0.2;
    c.falqon.k = 2.0;
  } else if (name == "cp-0.4" || name == "cp-0.4-tuned") {
    c.theta = 0.4;
    c.cp.pulse.omega0_mhz = 24.0;
    c.cp.pulse.t_quarter_us = 0.25;
    c.cp.delta1ph_mhz = 160.0;
    c.cp.delta2ph_khz = name == "cp-0.4" ? 0.0 : -5.6;
  } else if (name == "cp-0.8-tuned") {
    c.theta = 0.8;
    c.cp.pulse.t_quarter_us = 0.25;
    c.cp.delta2ph_khz = -6.0;
  } else if (name == "cz-2us") {
    c.theta = std::numbers::pi;
    c.cz = RunConfig{}.cz;
    c.cp = c.cz;
  } else {
    throw ConfigError("unknown preset: " + name);
  }
}

json to_json(const RunRecord& r) {
  return {{"config", r.config},
          {"version", r.version},
          {"wall_seconds", r.wall_seconds},
          {"diagnostics", r.diagnostics},
          {"result", r.result}};
}

std::string ChannelCache::key(const AtomModel& m, const PulseParams& p, const GateSpec& g,
                              const IntegratorOptions& o) {
  const json j = {{"atom", to_json(m)}, {"pulse", to_json(p)}, {"gate", to_json(g)}, {"integrator", to_json(o)}};
  return hex(fnv1a(j.dump()));
}

fs::path ChannelCache::path_for(const std::string& key) const { return dir_ / ("channel-" + key + ".json"); }

std::optional<TwoQubitChannel> ChannelCache::load(const std::string& key) const {
  std::ifstream in(path_for(key));
  if (!in) return std::nullopt;
  json j;
  try {
    in >> j;
  } catch (const json::exception&) {
    return std::nullopt;
  }
  return channel_from_json(j);
}

void ChannelCache::store(const std::string& key, const TwoQubitChannel& ch) const {
  fs::create_directories(dir_);
  const fs::path final_path = path_for(key);
  fs::path tmp = final_path;
  std::ostringstream tag;
  tag << std::this_thread::get_id() << '-' << std::chrono::steady_clock::now().time_since_epoch().count();
  tmp += ".tmp-" + hex(fnv1a(tag.str()));
  {
    std::ofstream out(tmp);
    if (!out) throw ConfigError("cannot write channel cache: " + tmp.string());
    out << to_json(ch).dump(1) << '\n';
  }
  fs::rename(tmp, final_path);
}

TwoQubitChannel obtain_channel(const AtomModel& m, const PulseParams& p, const GateSpec& g,
                               const IntegratorOptions& o, const std::string& cache_dir, int jobs,
                               json* diagnostics) {
  const std::string key = ChannelCache::key(m, p, g, o);
  std::optional<ChannelCache> cache;
  if (!cache_dir.empty()) cache.emplace(cache_dir);
  if (cache) {
    if (auto hit = cache->load(key)) {
      if (diagnostics) (*diagnostics)["channels"].push_back({{"key", key}, {"cached", true}});
      return *hit;
    }
  }
  IntegratorStats stats;
  TwoQubitChannel ch = extract_channel(m, p, g, o, jobs, &stats);
  ch.parameters["id"] = key;
  if (cache) cache->store(key, ch);
  if (diagnostics) {
    (*diagnostics)["channels"].push_back(
        {{"key", key}, {"cached", false}, {"steps", stats.steps}, {"rhs_evaluations", stats.rhs_evaluations}});
  }
  return ch;
}

namespace {

TwoQubitChannel realize_gate(const RunConfig& c, const GateSetting& setting, double theta,
                             json& diagnostics) {
  const CMatrix u = controlled_phase(theta);
  const double duration = setting.pulse.duration_us();
  switch (setting.backend) {
    case ChannelBackend::unitary: return TwoQubitChannel::from_unitary(u, theta, duration);
    case ChannelBackend::depolarized:
      return TwoQubitChannel::depolarized(u, (1.0 - setting.target_fidelity) / 0.75, theta, duration);
    case ChannelBackend::extracted: {
      AtomModel m = c.atom;
      m.delta1ph_mhz = setting.delta1ph_mhz;
      m.delta2ph_khz = setting.delta2ph_khz;
      return obtain_channel(m, setting.pulse, {theta, duration}, c.integrator, c.channel_cache, c.jobs,
                            &diagnostics);
    }
  }
  throw ConfigError("unknown channel backend");
}

// Gate setting for a small-angle gate of angle theta: table entry, grid re-optimization, or as configured.
GateSetting cp_setting_for(const RunConfig& c, double theta, json& diagnostics) {
  GateSetting s = c.cp;
  if (std::abs(theta - c.theta) <= 1e-9) return s;
  for (const auto& row : c.sweep.gate_table) {
    if (std::abs(row.theta - theta) <= 1e-9) {
      s.pulse.omega0_mhz = row.omega0_mhz;
      s.delta1ph_mhz = row.delta1ph_mhz;
      s.delta2ph_khz = row.delta2ph_khz;
      return s;
    }
  }
  if (c.sweep.reoptimize && s.backend == ChannelBackend::extracted) {
    const auto opt = optimize_gate(c.cp_model(), s.pulse, {theta, s.pulse.duration_us()}, c.grid, c.integrator,
                                   c.jobs, c.refine);
    s.pulse.omega0_mhz = opt.best.omega0_mhz;
    s.delta1ph_mhz = opt.best.delta1ph_mhz;
    s.delta2ph_khz = opt.best.delta2ph_khz;
    diagnostics["reoptimized"].push_back({{"theta", theta},
                                          {"omega0_mhz", opt.best.omega0_mhz},
                                          {"delta1ph_mhz", opt.best.delta1ph_mhz},
                                          {"delta2ph_khz", opt.best.delta2ph_khz},
                                          {"fidelity", opt.best.fidelity}});
    return s;
  }
  diagnostics["warnings"].push_back("gate for theta=" + fmt(theta) +
                                    " uses the configured pulse tuned for theta=" + fmt(c.theta));
  return s;
}

ChannelSet channels_for(const RunConfig& c, const IsingHamiltonian& hp, const FalqonParams& p, Scheme scheme,
                        json& diagnostics) {
  ChannelSet set;
  std::set<double> angles;
  for (const auto& op : phase_separation_schedule(hp, p.dt, scheme)) {
    if (op.kind == GateKind::two_qubit) angles.insert(op.angle);
  }
  for (double theta : angles) {
    if (scheme == Scheme::two_cz) {
      set.add(realize_gate(c, c.cz, theta, diagnostics));
    } else {
      const GateSetting s = cp_setting_for(c, theta, diagnostics);
      set.add(realize_gate(c, s, theta, diagnostics));
    }
  }
  return set;
}

struct FalqonOutcome {
  FalqonTrace trace;
  EntanglingReport report;
};

FalqonOutcome falqon_once(const RunConfig& c, const FalqonParams& p, json& diagnostics) {
  const IsingHamiltonian hp = maxcut_hamiltonian(*c.graph);
  FalqonOutcome out;
  if (c.scheme == "ideal") {
    out.trace = run_ideal(hp, p);
    out.report = entangling_report(hp, p, Scheme::small_angle_cp);
  } else {
    const Scheme scheme = parse_scheme(c.scheme);
    const ChannelSet channels = channels_for(c, hp, p, scheme, diagnostics);
    out.trace = run_noisy(hp, p, scheme, channels);
    const Schedule one = bind_channels(phase_separation_schedule(hp, p.dt, scheme), channels);
    out.report = {entangling_gate_count(one) * p.layers, total_entangling_time(one) * p.layers};
  }
  if (!out.trace.ratio_defined) throw ConfigError("graph has zero ground energy; r_A is undefined");
  return out;
}

json falqon_summary(const FalqonOutcome& o) {
  const auto& last = o.trace.layers.back();
  const int peak = o.trace.peak_success_layer();
  return {{"final_r_A", last.ratio},
          {"final_energy", last.energy},
          {"peak_phi", o.trace.layers[static_cast<std::size_t>(peak - 1)].success},
          {"peak_phi_layer", peak},
          {"entangling_gates", o.report.gates},
          {"entangling_time_us", o.report.time_us},
          {"final_trace", last.trace}};
}

RunRecord start_record(const RunConfig& c) {
  c.validate();
  RunRecord r;
  r.config = to_json(c);
  return r;
}

}  // namespace

EntanglingReport entangling_report(const IsingHamiltonian& hp, const FalqonParams& p, Scheme scheme,
                                   const EntanglingDurations& d) {
  const Schedule layer = phase_separation_schedule(hp, p.dt, scheme);
  return {entangling_gate_count(layer) * p.layers, total_entangling_time(layer, d) * p.layers};
}

RunRecord cmd_gate_fidelity(const RunConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  RunRecord r = start_record(c);
  IntegratorStats stats;
  const double f = gate_fidelity(c.cp_model(), c.cp.pulse, c.cp_spec(), c.integrator, &stats);
  r.result = {{"fidelity", f}, {"theta", c.theta}};
  r.diagnostics["steps"] = stats.steps;
  r.diagnostics["rhs_evaluations"] = stats.rhs_evaluations;
  if (c.check_convergence) {
    const double delta = fidelity_step_sensitivity(c.cp_model(), c.cp.pulse, c.cp_spec(), c.integrator);
    r.diagnostics["step_halving_delta"] = delta;
    r.result["converged"] = delta < 1e-7;
  }
  r.files.emplace_back("result.json", r.result.dump(2) + "\n");
  r.wall_seconds = seconds_since(t0);
  return r;
}

RunRecord cmd_gate_optimize(const RunConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  RunRecord r = start_record(c);
  const GateOptimum opt =
      optimize_gate(c.cp_model(), c.cp.pulse, c.cp_spec(), c.grid, c.integrator, c.jobs, c.refine);
  std::ostringstream csv;
  csv << "omega0_mhz,delta1ph_mhz,delta2ph_khz,fidelity\n";
  for (const auto& p : opt.map) {
    csv << fmt(p.omega0_mhz) << ',' << fmt(p.delta1ph_mhz) << ',' << fmt(p.delta2ph_khz) << ','
        << fmt(p.fidelity) << '\n';
  }
  json refinement = json::array();
  for (const auto& p : opt.refinement) {
    refinement.push_back({p.omega0_mhz, p.delta1ph_mhz, p.delta2ph_khz, p.fidelity});
  }
  r.result = {{"best",
               {{"omega0_mhz", opt.best.omega0_mhz},
                {"delta1ph_mhz", opt.best.delta1ph_mhz},
                {"delta2ph_khz", opt.best.delta2ph_khz},
                {"fidelity", opt.best.fidelity}}},
              {"theta", c.theta},
              {"grid_points", opt.map.size()},
              {"refinement", refinement}};
  r.files.emplace_back("fidelity_map.csv", csv.str());
  r.files.emplace_back("best.json", r.result.dump(2) + "\n");
  r.wall_seconds = seconds_since(t0);
  return r;
}

RunRecord cmd_gate_channel(const RunConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  RunRecord r = start_record(c);
  const TwoQubitChannel ch = realize_gate(c, c.cp, c.theta, r.diagnostics);
  r.result = to_json(ch);
  r.files.emplace_back("channel.json", r.result.dump(1) + "\n");
  r.wall_seconds = seconds_since(t0);
  return r;
}

RunRecord cmd_gate_scan(const RunConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  RunRecord r = start_record(c);
  const auto points = scan_robustness(c.cp_model(), c.cp.pulse, c.cp_spec(), c.scan.axis, c.scan.xs,
                                      c.scan.ys, c.integrator, c.jobs);
  std::ostringstream csv;
  const bool two_d = c.scan.axis == ScanAxis::dephasing;
  csv << (two_d ? "gamma1_dp_khz,gamma2_dp_khz,fidelity\n" : "offset,fidelity\n");
  json rows = json::array();
  for (const auto& p : points) {
    if (two_d) {
      csv << fmt(p.x) << ',' << fmt(p.y) << ',' << fmt(p.fidelity) << '\n';
      rows.push_back({p.x, p.y, p.fidelity});
    } else {
      csv << fmt(p.x) << ',' << fmt(p.fidelity) << '\n';
      rows.push_back({p.x, p.fidelity});
    }
  }
  r.result = {{"axis", to_string(c.scan.axis)}, {"points", rows}};
  r.files.emplace_back("scan.csv", csv.str());
  r.wall_seconds = seconds_since(t0);
  return r;
}

RunRecord cmd_falqon(const RunConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  RunRecord r = start_record(c);
  const FalqonOutcome o = falqon_once(c, c.falqon, r.diagnostics);
  r.result = falqon_summary(o);
  r.result["scheme"] = c.scheme;
  r.result["graph"] = c.graph_label;
  r.result["edge_order"] = graph_json(*c.graph, c.graph_label)["edges"];
  r.files.emplace_back("trace.csv", trace_to_csv(o.trace));
  r.files.emplace_back("trace.json", to_json(o.trace).dump(1) + "\n");
  r.files.emplace_back("summary.json", r.result.dump(2) + "\n");
  const IsingHamiltonian hp = maxcut_hamiltonian(*c.graph);
  const Scheme audit = c.scheme == "two-cz" ? Scheme::two_cz : Scheme::small_angle_cp;
  r.files.emplace_back("schedule.json",
                       schedule_to_json(layer_schedule(hp, c.falqon, audit, c.falqon.beta1)).dump(1) + "\n");
  r.wall_seconds = seconds_since(t0);
  return r;
}

RunRecord cmd_falqon_sweep(const RunConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  RunRecord r = start_record(c);
  const std::vector<double> dts = c.sweep.dts.empty() ? std::vector<double>{c.falqon.dt} : c.sweep.dts;
  const std::vector<double> deltas =
      c.sweep.delta2ph_khz.empty() ? std::vector<double>{c.cp.delta2ph_khz} : c.sweep.delta2ph_khz;

  struct Point {
    double dt;
    double delta2;
    FalqonOutcome outcome;
    json diagnostics = json::object();
  };
  std::vector<Point> points;
  for (double dt : dts) {
    for (double d2 : deltas) points.push_back({dt, d2, {}, json::object()});
  }
  // Workers get one thread each when there are several points; the cache tolerates
  // concurrent writers because each store renames a private temp file.
  const int inner_jobs = points.size() > 1 ? 1 : c.jobs;
  parallel_for(points.size(), c.jobs, [&](std::size_t i) {
    auto& pt = points[i];
    RunConfig sub = c;
    sub.falqon.dt = pt.dt;
    sub.cp.delta2ph_khz = pt.delta2;
    sub.jobs = inner_jobs;
    pt.outcome = falqon_once(sub, sub.falqon, pt.diagnostics);
  });

  std::ostringstream csv;
  csv << "dt,delta2ph_khz,layer,beta,energy,r_A,phi,trace\n";
  json summary = json::array();
  for (const auto& pt : points) {
    for (const auto& l : pt.outcome.trace.layers) {
      csv << fmt(pt.dt) << ',' << fmt(pt.delta2) << ',' << l.layer << ',' << fmt(l.beta) << ','
          << fmt(l.energy) << ',' << fmt(l.ratio) << ',' << fmt(l.success) << ',' << fmt(l.trace) << '\n';
    }
    json s = falqon_summary(pt.outcome);
    s["dt"] = pt.dt;
    s["delta2ph_khz"] = pt.delta2;
    summary.push_back(s);
    if (!pt.diagnostics.empty()) r.diagnostics["points"].push_back(pt.diagnostics);
  }
  r.result = {{"scheme", c.scheme}, {"graph", c.graph_label}, {"points", summary}};
  r.files.emplace_back("sweep.csv", csv.str());
  r.files.emplace_back("summary.json", r.result.dump(2) + "\n");
  r.wall_seconds = seconds_since(t0);
  return r;
}

RunRecord run_experiment(const RunConfig& c) {
  switch (c.experiment) {
    case Experiment::gate_fidelity: return cmd_gate_fidelity(c);
    case Experiment::gate_optimize: return cmd_gate_optimize(c);
    case Experiment::gate_channel: return cmd_gate_channel(c);
    case Experiment::gate_scan: return cmd_gate_scan(c);
    case Experiment::falqon: return cmd_falqon(c);
    case Experiment::falqon_sweep: return cmd_falqon_sweep(c);
  }
  throw ConfigError("unknown experiment");
}

void write_record(const RunRecord& r, const fs::path& dir) {
  fs::create_directories(dir);
  for (const auto& [name, contents] : r.files) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw ConfigError("cannot write output file: " + (dir / name).string());
    out << contents;
  }
  std::ofstream out(dir / "record.json");
  if (!out) throw ConfigError("cannot write record.json");
  out << to_json(r).dump(2) << '\n';
}

}  // namespace rydfalqon
