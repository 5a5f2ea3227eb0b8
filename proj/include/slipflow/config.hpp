#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "slipflow/diagnostics.hpp"
#include "slipflow/picard.hpp"

namespace slipflow {

using Json = nlohmann::json;

enum class DumpKind { u, w, v, rho };

inline const char* dump_name(DumpKind d) {
  switch (d) {
    case DumpKind::u: return "u";
    case DumpKind::w: return "w";
    case DumpKind::v: return "v";
    case DumpKind::rho: return "rho";
  }
  return "?";
}

struct OutputConfig {
  std::string directory = "out";
  std::vector<DumpKind> dumps{DumpKind::u, DumpKind::w, DumpKind::v, DumpKind::rho};

  bool wants(DumpKind d) const { return std::find(dumps.begin(), dumps.end(), d) != dumps.end(); }
};

struct VerifyConfig {
  std::vector<int> levels{8, 16, 32};
  double min_rate_u = 1.8;
};

struct TransportTestConfig {
  std::vector<int> levels{8, 16, 32, 64};
  int trials = 100;
  double min_rate = 0.8;
  double exact_tol = 1e-10;
};

struct RunConfig {
  GeometryConfig geometry;
  FlowParams physics;
  BoundaryDataSpec data;
  SolverConfig solver;
  SplitTransport split_transport = SplitTransport::upwind;
  OutputConfig output;
  DiagnosticTolerances tolerances;
  VerifyConfig verify;
  TransportTestConfig transport_test;

  ProblemSetup setup() const {
    return make_setup(geometry, physics, data, solver);
  }

  LinearSolveConfig linear() const {
    LinearSolveConfig c = solver.linear();
    c.transport = split_transport;
    return c;
  }
};

namespace config_detail {

inline std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

inline std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

/// Rejects keys of `obj` outside `known`, naming the closest known key.
inline void check_keys(const Json& obj, const std::string& prefix, std::initializer_list<const char*> known) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const std::string& key = it.key();
    bool ok = false;
    std::string best;
    std::size_t best_d = std::numeric_limits<std::size_t>::max();
    for (const char* k : known) {
      if (key == k) ok = true;
      const std::size_t d = edit_distance(key, k);
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    if (!ok)
      throw ConfigError("unknown key '" + join(prefix, key) + "'" +
                        (best.empty() ? "" : " (nearest known key: '" + join(prefix, best) + "')"));
  }
}

inline const Json* block(const Json& obj, const char* key, const std::string& prefix) {
  if (!obj.contains(key)) return nullptr;
  const Json& b = obj.at(key);
  if (!b.is_object()) throw ConfigError(join(prefix, key) + " must be an object");
  return &b;
}

inline void read(const Json& obj, const char* key, const std::string& prefix, double& out) {
  if (!obj.contains(key)) return;
  const Json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(join(prefix, key) + " must be a number");
  out = v.get<double>();
}

inline void read(const Json& obj, const char* key, const std::string& prefix, int& out) {
  if (!obj.contains(key)) return;
  const Json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(join(prefix, key) + " must be an integer");
  const auto x = v.get<std::int64_t>();
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
    throw ConfigError(join(prefix, key) + " is out of range");
  out = static_cast<int>(x);
}

inline void read(const Json& obj, const char* key, const std::string& prefix, std::uint64_t& out) {
  if (!obj.contains(key)) return;
  const Json& v = obj.at(key);
  if (!v.is_number_unsigned()) throw ConfigError(join(prefix, key) + " must be a non-negative integer");
  out = v.get<std::uint64_t>();
}

inline void read(const Json& obj, const char* key, const std::string& prefix, std::string& out) {
  if (!obj.contains(key)) return;
  const Json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(join(prefix, key) + " must be a string");
  out = v.get<std::string>();
}

inline void read(const Json& obj, const char* key, const std::string& prefix, std::vector<int>& out) {
  if (!obj.contains(key)) return;
  const Json& v = obj.at(key);
  const std::string path = join(prefix, key);
  if (!v.is_array()) throw ConfigError(path + " must be an array of integers");
  out.clear();
  for (const auto& e : v) {
    if (!e.is_number_integer()) throw ConfigError(path + " must be an array of integers");
    out.push_back(e.get<int>());
  }
}

/// Converts a ConfigError message thrown by a module into one naming `path`.
template <class Fn>
inline void with_key(const std::string& path, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.rfind(path, 0) == 0) throw;
    throw ConfigError(path + ": " + msg);
  }
}

inline std::size_t line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

inline Profile read_profile(const Json& obj, const char* key, const std::string& prefix, Profile def) {
  std::string s = profile_name(def);
  read(obj, key, prefix, s);
  Profile p = def;
  with_key(join(prefix, key), [&] { p = parse_profile(s); });
  return p;
}

}  // namespace config_detail

/// Builds and validates a RunConfig from a parsed document. Missing keys take
/// their defaults; unknown keys and out-of-range values are errors.
inline RunConfig config_from_json(const Json& doc) {
  using namespace config_detail;
  if (!doc.is_object()) throw ConfigError("config root must be an object");
  check_keys(doc, "", {"geometry", "physics", "data", "solver", "output", "diagnostics", "verify", "transport_test"});
  RunConfig c;

  if (const Json* b = block(doc, "geometry", "")) {
    check_keys(*b, "geometry", {"length", "width2", "width3", "n1", "n2", "n3"});
    read(*b, "length", "geometry", c.geometry.length);
    read(*b, "width2", "geometry", c.geometry.width2);
    read(*b, "width3", "geometry", c.geometry.width3);
    read(*b, "n1", "geometry", c.geometry.n1);
    read(*b, "n2", "geometry", c.geometry.n2);
    read(*b, "n3", "geometry", c.geometry.n3);
  }
  const std::pair<const char*, double> ext[] = {
      {"length", c.geometry.length}, {"width2", c.geometry.width2}, {"width3", c.geometry.width3}};
  for (const auto& [k, v] : ext)
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string("geometry.") + k + " must be > 0");
  const std::pair<const char*, int> cells[] = {{"n1", c.geometry.n1}, {"n2", c.geometry.n2}, {"n3", c.geometry.n3}};
  for (const auto& [k, v] : cells)
    if (v < kMinCells) throw ConfigError(std::string("geometry.") + k + " must be >= " + std::to_string(kMinCells));

  if (const Json* b = block(doc, "physics", "")) {
    check_keys(*b, "physics", {"mu", "nu", "f", "pressure"});
    read(*b, "mu", "physics", c.physics.mu);
    read(*b, "nu", "physics", c.physics.nu);
    read(*b, "f", "physics", c.physics.f);
    if (const Json* pb = block(*b, "pressure", "physics")) {
      check_keys(*pb, "physics.pressure", {"kind", "kappa", "K"});
      std::string kind = "power";
      read(*pb, "kind", "physics.pressure", kind);
      if (kind == "power") {
        c.physics.pressure = PressureLaw::power(2.0);
        if (pb->contains("K")) throw ConfigError("physics.pressure.K applies only to kind 'linear'");
        read(*pb, "kappa", "physics.pressure", c.physics.pressure.kappa);
      } else if (kind == "linear") {
        c.physics.pressure = PressureLaw::linear(1.0);
        if (pb->contains("kappa")) throw ConfigError("physics.pressure.kappa applies only to kind 'power'");
        read(*pb, "K", "physics.pressure", c.physics.pressure.K);
      } else {
        throw ConfigError("physics.pressure.kind must be 'power' or 'linear'");
      }
    }
  }
  c.physics.validate();

  if (const Json* b = block(doc, "data", "")) {
    check_keys(*b, "data", {"epsilon", "profiles"});
    read(*b, "epsilon", "data", c.data.epsilon);
    if (const Json* pb = block(*b, "profiles", "data")) {
      const std::string pre = "data.profiles";
      check_keys(*pb, pre,
                 {"normal_inflow", "normal_outflow", "slip_lateral", "slip_inflow", "slip_outflow", "density_inflow"});
      c.data.normal_inflow = read_profile(*pb, "normal_inflow", pre, c.data.normal_inflow);
      c.data.normal_outflow = read_profile(*pb, "normal_outflow", pre, c.data.normal_outflow);
      c.data.slip_lateral = read_profile(*pb, "slip_lateral", pre, c.data.slip_lateral);
      c.data.slip_inflow = read_profile(*pb, "slip_inflow", pre, c.data.slip_inflow);
      c.data.slip_outflow = read_profile(*pb, "slip_outflow", pre, c.data.slip_outflow);
      c.data.density_inflow = read_profile(*pb, "density_inflow", pre, c.data.density_inflow);
    }
  }
  c.data.validate();

  if (const Json* b = block(doc, "solver", "")) {
    const std::string pre = "solver";
    check_keys(*b, pre,
               {"mode", "outer_tol", "max_outer", "relaxation", "linear_tol", "inner_tol", "max_sweeps", "p", "seed",
                "A_limit", "split_transport"});
    std::string mode = mode_name(c.solver.mode);
    read(*b, "mode", pre, mode);
    with_key("solver.mode", [&] { c.solver.mode = parse_mode(mode); });
    read(*b, "outer_tol", pre, c.solver.outer_tol);
    read(*b, "max_outer", pre, c.solver.max_outer);
    read(*b, "relaxation", pre, c.solver.relaxation);
    read(*b, "linear_tol", pre, c.solver.linear_tol);
    read(*b, "inner_tol", pre, c.solver.inner_tol);
    read(*b, "max_sweeps", pre, c.solver.max_sweeps);
    read(*b, "p", pre, c.solver.p);
    read(*b, "seed", pre, c.solver.seed);
    read(*b, "A_limit", pre, c.solver.A_limit);
    std::string st = "upwind";
    read(*b, "split_transport", pre, st);
    if (st == "upwind") c.split_transport = SplitTransport::upwind;
    else if (st == "characteristics") c.split_transport = SplitTransport::characteristics;
    else throw ConfigError("solver.split_transport must be 'upwind' or 'characteristics'");
  }
  c.solver.validate();
  if (!(c.solver.A_limit > 0.0)) throw ConfigError("solver.A_limit must be > 0");

  if (const Json* b = block(doc, "output", "")) {
    check_keys(*b, "output", {"directory", "dumps"});
    read(*b, "directory", "output", c.output.directory);
    if (c.output.directory.empty()) throw ConfigError("output.directory must not be empty");
    if (b->contains("dumps")) {
      const Json& d = b->at("dumps");
      if (!d.is_array()) throw ConfigError("output.dumps must be an array of field names");
      c.output.dumps.clear();
      for (const auto& e : d) {
        const std::string s = e.is_string() ? e.get<std::string>() : "";
        if (s == "u") c.output.dumps.push_back(DumpKind::u);
        else if (s == "w") c.output.dumps.push_back(DumpKind::w);
        else if (s == "v") c.output.dumps.push_back(DumpKind::v);
        else if (s == "rho") c.output.dumps.push_back(DumpKind::rho);
        else throw ConfigError("output.dumps entries must be one of u, w, v, rho");
      }
    }
  }

  if (const Json* b = block(doc, "diagnostics", "")) {
    const std::string pre = "diagnostics";
    check_keys(*b, pre,
               {"energy", "vorticity", "helmholtz_div", "helmholtz_curl", "gradient_structure", "apriori",
                "reflection", "momentum", "continuity", "slip", "normal", "inflow"});
    auto& t = c.tolerances;
    const std::pair<const char*, double*> fields[] = {
        {"energy", &t.energy},         {"vorticity", &t.vorticity},
        {"helmholtz_div", &t.helmholtz_div}, {"helmholtz_curl", &t.helmholtz_curl},
        {"gradient_structure", &t.gradient_structure}, {"apriori", &t.apriori},
        {"reflection", &t.reflection}, {"momentum", &t.momentum},
        {"continuity", &t.continuity}, {"slip", &t.slip},
        {"normal", &t.normal},         {"inflow", &t.inflow}};
    for (const auto& [k, ptr] : fields) {
      read(*b, k, pre, *ptr);
      if (!(*ptr > 0.0)) throw ConfigError(pre + "." + k + " must be > 0");
    }
  }

  if (const Json* b = block(doc, "verify", "")) {
    check_keys(*b, "verify", {"levels", "min_rate_u"});
    read(*b, "levels", "verify", c.verify.levels);
    read(*b, "min_rate_u", "verify", c.verify.min_rate_u);
  }
  if (c.verify.levels.size() < 2) throw ConfigError("verify.levels needs at least two entries");
  for (int n : c.verify.levels)
    if (n < kMinCells) throw ConfigError("verify.levels entries must be >= " + std::to_string(kMinCells));

  if (const Json* b = block(doc, "transport_test", "")) {
    check_keys(*b, "transport_test", {"levels", "trials", "min_rate", "exact_tol"});
    read(*b, "levels", "transport_test", c.transport_test.levels);
    read(*b, "trials", "transport_test", c.transport_test.trials);
    read(*b, "min_rate", "transport_test", c.transport_test.min_rate);
    read(*b, "exact_tol", "transport_test", c.transport_test.exact_tol);
  }
  if (c.transport_test.levels.size() < 2) throw ConfigError("transport_test.levels needs at least two entries");
  for (int n : c.transport_test.levels)
    if (n < kMinCells) throw ConfigError("transport_test.levels entries must be >= " + std::to_string(kMinCells));
  if (c.transport_test.trials < 1) throw ConfigError("transport_test.trials must be >= 1");
  return c;
}

/// Parses JSON text; syntax errors report the line.
inline RunConfig parse_config_text(const std::string& text, const std::string& origin = "<config>") {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(origin + ":" + std::to_string(config_detail::line_of(text, e.byte)) + ": " + e.what());
  }
  return config_from_json(doc);
}

inline RunConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

/// Fully expanded form of a config. Parsing it back yields the same RunConfig.
inline Json config_to_json(const RunConfig& c) {
  Json j;
  j["geometry"] = {{"length", c.geometry.length}, {"width2", c.geometry.width2}, {"width3", c.geometry.width3},
                   {"n1", c.geometry.n1},         {"n2", c.geometry.n2},         {"n3", c.geometry.n3}};
  Json pressure;
  if (c.physics.pressure.kind == PressureLaw::Kind::power)
    pressure = {{"kind", "power"}, {"kappa", c.physics.pressure.kappa}};
  else
    pressure = {{"kind", "linear"}, {"K", c.physics.pressure.K}};
  j["physics"] = {{"mu", c.physics.mu}, {"nu", c.physics.nu}, {"f", c.physics.f}, {"pressure", pressure}};
  j["data"] = {{"epsilon", c.data.epsilon},
               {"profiles",
                {{"normal_inflow", profile_name(c.data.normal_inflow)},
                 {"normal_outflow", profile_name(c.data.normal_outflow)},
                 {"slip_lateral", profile_name(c.data.slip_lateral)},
                 {"slip_inflow", profile_name(c.data.slip_inflow)},
                 {"slip_outflow", profile_name(c.data.slip_outflow)},
                 {"density_inflow", profile_name(c.data.density_inflow)}}}};
  j["solver"] = {{"mode", mode_name(c.solver.mode)},
                 {"outer_tol", c.solver.outer_tol},
                 {"max_outer", c.solver.max_outer},
                 {"relaxation", c.solver.relaxation},
                 {"linear_tol", c.solver.linear_tol},
                 {"inner_tol", c.solver.inner_tol},
                 {"max_sweeps", c.solver.max_sweeps},
                 {"p", c.solver.p},
                 {"seed", c.solver.seed},
                 {"A_limit", c.solver.A_limit},
                 {"split_transport", c.split_transport == SplitTransport::upwind ? "upwind" : "characteristics"}};
  Json dumps = Json::array();
  for (DumpKind d : c.output.dumps) dumps.push_back(dump_name(d));
  j["output"] = {{"directory", c.output.directory}, {"dumps", dumps}};
  const auto& t = c.tolerances;
  j["diagnostics"] = {{"energy", t.energy},
                      {"vorticity", t.vorticity},
                      {"helmholtz_div", t.helmholtz_div},
                      {"helmholtz_curl", t.helmholtz_curl},
                      {"gradient_structure", t.gradient_structure},
                      {"apriori", t.apriori},
                      {"reflection", t.reflection},
                      {"momentum", t.momentum},
                      {"continuity", t.continuity},
                      {"slip", t.slip},
                      {"normal", t.normal},
                      {"inflow", t.inflow}};
  j["verify"] = {{"levels", c.verify.levels}, {"min_rate_u", c.verify.min_rate_u}};
  j["transport_test"] = {{"levels", c.transport_test.levels},
                         {"trials", c.transport_test.trials},
                         {"min_rate", c.transport_test.min_rate},
                         {"exact_tol", c.transport_test.exact_tol}};
  return j;
}

}  // namespace slipflow
