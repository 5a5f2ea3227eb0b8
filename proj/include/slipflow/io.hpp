#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "slipflow/diagnostics.hpp"
#include "slipflow/error.hpp"
#include "slipflow/picard.hpp"

namespace slipflow {

class IoError : public Error {
 public:
  using Error::Error;
};

namespace fs = std::filesystem;

/// Writes `content` to `<path>.tmp` and renames it over `path`, so readers
/// never see a half-written file.
inline void write_file_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() + "'");
  }
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// %.17g, enough to round-trip any double.
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// ---------------------------------------------------------------------------
// history.csv

inline std::string history_csv(const SolutionBundle& b) {
  std::string s = "n,A_n,d_n,r_n,F_lp,G_w1p,verdict\n";
  for (std::size_t k = 0; k < b.history.size(); ++k) {
    const auto& r = b.history[k];
    const bool last = k + 1 == b.history.size();
    s += std::to_string(r.n) + "," + format_double(r.A) + "," + format_double(r.d) + "," + format_double(r.r) + "," +
         format_double(r.F_lp) + "," + format_double(r.G_w1p) + "," + (last ? verdict_name(b.verdict) : "running") +
         "\n";
  }
  return s;
}

// ---------------------------------------------------------------------------
// Field dumps
//
//   nodes <N1> <N2> <N3>
//   spacing <h1> <h2> <h3>
//   field <name> <components>
//   one row per node, i fastest, components separated by spaces

struct FieldDump {
  std::string name;
  std::array<int, 3> nodes{};
  std::array<double, 3> spacing{};
  int components = 0;
  std::vector<double> values;  ///< node-major, components interleaved
};

inline std::string dump_text(const Grid& g, const std::string& name, const std::vector<const ScalarField*>& comps) {
  const auto& n = g.nodes();
  const auto& h = g.spacing();
  std::string s;
  s.reserve(g.size() * comps.size() * 25 + 128);
  s += "nodes " + std::to_string(n[0]) + " " + std::to_string(n[1]) + " " + std::to_string(n[2]) + "\n";
  s += "spacing " + format_double(h[0]) + " " + format_double(h[1]) + " " + format_double(h[2]) + "\n";
  s += "field " + name + " " + std::to_string(comps.size()) + "\n";
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    for (std::size_t c = 0; c < comps.size(); ++c) {
      if (c) s += ' ';
      s += format_double((*comps[c])[idx]);
    }
    s += '\n';
  }
  return s;
}

inline std::string dump_text(const std::string& name, const ScalarField& f) { return dump_text(f.grid(), name, {&f}); }

inline std::string dump_text(const std::string& name, const VectorField& v) {
  return dump_text(v.grid(), name, {&v[0], &v[1], &v[2]});
}

inline FieldDump parse_dump(const std::string& text, const std::string& origin = "<dump>") {
  std::istringstream in(text);
  FieldDump d;
  std::string tag;
  auto fail = [&](const std::string& what) { throw IoError(origin + ": " + what); };
  if (!(in >> tag >> d.nodes[0] >> d.nodes[1] >> d.nodes[2]) || tag != "nodes") fail("bad 'nodes' header");
  if (!(in >> tag >> d.spacing[0] >> d.spacing[1] >> d.spacing[2]) || tag != "spacing") fail("bad 'spacing' header");
  if (!(in >> tag >> d.name >> d.components) || tag != "field" || d.components < 1) fail("bad 'field' header");
  for (int a = 0; a < 3; ++a)
    if (d.nodes[a] < 2) fail("bad node count");
  const std::size_t count = static_cast<std::size_t>(d.nodes[0]) * d.nodes[1] * d.nodes[2] * d.components;
  d.values.reserve(count);
  std::string tok;
  while (in >> tok) {
    char* end = nullptr;
    const double x = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size()) fail("bad number '" + tok + "'");
    d.values.push_back(x);
  }
  if (d.values.size() != count)
    fail("expected " + std::to_string(count) + " values, found " + std::to_string(d.values.size()));
  return d;
}

inline void check_dump_grid(const FieldDump& d, const Grid& g, const std::string& origin) {
  if (d.nodes != g.nodes()) throw IoError(origin + ": node counts do not match the configured grid");
  for (int a = 0; a < 3; ++a)
    if (std::abs(d.spacing[a] - g.h(a)) > 1e-12 * g.h(a))
      throw IoError(origin + ": spacings do not match the configured grid");
}

inline ScalarField load_scalar(const fs::path& path, const Grid& g) {
  const FieldDump d = parse_dump(read_file(path), path.string());
  check_dump_grid(d, g, path.string());
  if (d.components != 1) throw IoError(path.string() + ": expected a scalar field");
  ScalarField s(g);
  for (std::size_t n = 0; n < g.size(); ++n) s[n] = d.values[n];
  return s;
}

inline VectorField load_vector(const fs::path& path, const Grid& g) {
  const FieldDump d = parse_dump(read_file(path), path.string());
  check_dump_grid(d, g, path.string());
  if (d.components != 3) throw IoError(path.string() + ": expected a 3-component field");
  VectorField v(g);
  for (std::size_t n = 0; n < g.size(); ++n)
    for (int c = 0; c < 3; ++c) v[c][n] = d.values[3 * n + static_cast<std::size_t>(c)];
  return v;
}

// ---------------------------------------------------------------------------
// Flat reports: key -> {value, tolerance, pass}

inline nlohmann::json report_json(const std::vector<DiagnosticEntry>& entries) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& e : entries) j[e.key] = {{"value", e.value}, {"tolerance", e.tolerance}, {"pass", e.pass}};
  return j;
}

inline std::string json_text(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace slipflow
