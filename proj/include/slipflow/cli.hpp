#pragma once

#include <chrono>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "slipflow/config.hpp"
#include "slipflow/diagnostics.hpp"
#include "slipflow/io.hpp"
#include "slipflow/picard.hpp"
#include "slipflow/verification/manufactured.hpp"
#include "slipflow/verification/transport_cases.hpp"

namespace slipflow::cli {

enum ExitCode : int { kOk = 0, kVerdictFailed = 1, kUsage = 2, kRuntime = 3 };

struct Invocation {
  std::string command;
  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::string> mode;
};

/// Loads the config and applies command-line overrides.
inline RunConfig effective_config(const Invocation& inv) {
  RunConfig cfg = parse_config(inv.config_path);
  if (inv.out) {
    if (inv.out->empty()) throw ConfigError("--out must not be empty");
    cfg.output.directory = *inv.out;
  }
  if (inv.mode) cfg.solver.mode = parse_mode(*inv.mode);
  return cfg;
}

inline fs::path out_path(const RunConfig& cfg, const std::string& name) { return fs::path(cfg.output.directory) / name; }

inline void echo_config(const RunConfig& cfg) {
  write_file_atomic(out_path(cfg, "config.json"), json_text(config_to_json(cfg)));
}

inline void write_dumps(const RunConfig& cfg, const SolutionBundle& b) {
  if (cfg.output.wants(DumpKind::u)) write_file_atomic(out_path(cfg, "u.field"), dump_text("u", b.u));
  if (cfg.output.wants(DumpKind::w)) write_file_atomic(out_path(cfg, "w.field"), dump_text("w", b.w));
  if (cfg.output.wants(DumpKind::v)) write_file_atomic(out_path(cfg, "v.field"), dump_text("v", b.v));
  if (cfg.output.wants(DumpKind::rho)) write_file_atomic(out_path(cfg, "rho.field"), dump_text("rho", b.rho));
}

inline int run_solve(const RunConfig& cfg, std::ostream& log) {
  const ProblemSetup setup = cfg.setup();
  const auto t0 = std::chrono::steady_clock::now();
  const SolutionBundle b = picard_solve(setup);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  echo_config(cfg);
  write_file_atomic(out_path(cfg, "history.csv"), history_csv(b));
  write_dumps(cfg, b);

  const bool ok = b.verdict == Verdict::converged;
  const double last_d = b.history.empty() ? 0.0 : b.history.back().d;
  DiagnosticReport rep;
  rep.add("picard_final_d", last_d, cfg.solver.outer_tol, "H1 x LinfL2", "Cauchy distance of the last step");
  rep.add("picard_iterations", static_cast<double>(b.history.size()), cfg.solver.max_outer, "count", "outer steps");
  rep.add("picard_final_A", b.final_A, cfg.solver.A_limit, "W2p + W1p", "strong measure of the limit");
  write_file_atomic(out_path(cfg, "summary.json"), json_text(report_json(rep.entries)));

  log << "solve: " << verdict_name(b.verdict) << " after " << b.history.size() << " iterations ("
      << mode_name(cfg.solver.mode) << ", " << secs << " s)";
  if (!b.reason.empty()) log << ": " << b.reason;
  log << "\n  b_measure = " << setup.data.b_measure << ", final A = " << b.final_A << ", last d = " << last_d << "\n";
  return ok ? kOk : kVerdictFailed;
}

inline int run_verify(const RunConfig& cfg, std::ostream& log) {
  const auto res = verification::manufactured_study(cfg.geometry, cfg.physics, cfg.solver.mode, cfg.verify.levels, {},
                                                    cfg.linear());
  std::string csv = "n1,err_u_l2,err_u_max,err_w_l2,err_w_max,rate_u,rate_w\n";
  char line[256];
  log << "verify (" << mode_name(cfg.solver.mode) << ")\n";
  std::snprintf(line, sizeof line, "  %6s %14s %14s %8s %8s\n", "n1", "err_u_l2", "err_w_l2", "rate_u", "rate_w");
  log << line;
  for (std::size_t l = 0; l < res.levels.size(); ++l) {
    const auto& L = res.levels[l];
    const double ru = l ? res.rate_u[l - 1] : 0.0, rw = l ? res.rate_w[l - 1] : 0.0;
    csv += std::to_string(L.n1) + "," + format_double(L.err_u_l2) + "," + format_double(L.err_u_max) + "," +
           format_double(L.err_w_l2) + "," + format_double(L.err_w_max) + "," + (l ? format_double(ru) : "") + "," +
           (l ? format_double(rw) : "") + "\n";
    if (l)
      std::snprintf(line, sizeof line, "  %6d %14.6e %14.6e %8.3f %8.3f\n", L.n1, L.err_u_l2, L.err_w_l2, ru, rw);
    else
      std::snprintf(line, sizeof line, "  %6d %14.6e %14.6e %8s %8s\n", L.n1, L.err_u_l2, L.err_w_l2, "-", "-");
    log << line;
  }
  echo_config(cfg);
  write_file_atomic(out_path(cfg, "verify.csv"), csv);
  const double ru = res.min_rate_u();
  nlohmann::json j = nlohmann::json::object();
  j["min_rate_u"] = {{"value", ru}, {"tolerance", cfg.verify.min_rate_u}, {"pass", ru >= cfg.verify.min_rate_u}};
  j["min_rate_w"] = {{"value", res.min_rate_w()}, {"tolerance", nullptr}, {"pass", true}};
  write_file_atomic(out_path(cfg, "verify.json"), json_text(j));
  const bool ok = ru >= cfg.verify.min_rate_u;
  log << "  min u rate " << ru << (ok ? " >= " : " < ") << cfg.verify.min_rate_u << "\n";
  return ok ? kOk : kVerdictFailed;
}

inline int run_diagnose(const RunConfig& cfg, std::ostream& log) {
  const ProblemSetup setup = cfg.setup();
  const VectorField u = load_vector(out_path(cfg, "u.field"), setup.grid);
  const ScalarField w = load_scalar(out_path(cfg, "w.field"), setup.grid);
  const DiagnosticReport rep = run_diagnostics(setup, u, w, cfg.tolerances);
  echo_config(cfg);
  write_file_atomic(out_path(cfg, "report.json"), json_text(report_json(rep.entries)));
  char line[256];
  log << "diagnose\n";
  for (const auto& e : rep.entries) {
    std::snprintf(line, sizeof line, "  %-26s %14.6e  tol %10.3e  %s\n", e.key.c_str(), e.value, e.tolerance,
                  e.pass ? "pass" : "FAIL");
    log << line;
  }
  return rep.all_pass() ? kOk : kVerdictFailed;
}

inline int run_transport_test(const RunConfig& cfg, std::ostream& log) {
  const auto& tt = cfg.transport_test;
  const auto study = verification::transport_study(cfg.geometry, tt.levels);
  const double exact = verification::constant_field_error(Grid(cfg.geometry));
  const ProblemSetup setup = cfg.setup();
  const auto est =
      verification::s_estimate_check(TransportField::from_convect(setup.data.u0), tt.trials, cfg.solver.seed);

  std::string csv = "n1,difference,rate\n";
  log << "transport-test\n";
  char line[256];
  for (std::size_t l = 0; l < study.levels.size(); ++l) {
    const auto& L = study.levels[l];
    csv += std::to_string(L.n1) + "," + format_double(L.difference) + "," +
           (l ? format_double(study.rates[l - 1]) : "") + "\n";
    std::snprintf(line, sizeof line, "  n1 = %4d  |S v - march v|_L2 = %.6e  rate %s\n", L.n1, L.difference,
                  l ? std::to_string(study.rates[l - 1]).c_str() : "-");
    log << line;
  }
  const double rate = study.min_rate();
  DiagnosticReport rep;
  rep.add("constant_field_error", exact, tt.exact_tol, "max abs", "closed-form constant-field cases");
  rep.add("s_estimate_violations", est.violations, 0.0, "count", "bound on |S v|_{LinfL2}");
  rep.add("s_estimate_worst_ratio", est.worst_ratio, 1.0, "lhs / rhs", "bound on |S v|_{LinfL2}");
  nlohmann::json j = report_json(rep.entries);
  j["min_rate"] = {{"value", rate}, {"tolerance", tt.min_rate}, {"pass", rate >= tt.min_rate}};
  echo_config(cfg);
  write_file_atomic(out_path(cfg, "transport.csv"), csv);
  write_file_atomic(out_path(cfg, "transport.json"), json_text(j));
  log << "  min rate " << rate << ", constant-field error " << exact << ", S bound: " << est.violations << "/"
      << est.trials << " violations (worst ratio " << est.worst_ratio << ", J = " << est.jacobian << ")\n";
  const bool ok = rate >= tt.min_rate && rep.all_pass();
  return ok ? kOk : kVerdictFailed;
}

inline const char* error_kind(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return "config";
  if (dynamic_cast<const IoError*>(&e)) return "io";
  if (dynamic_cast<const DomainError*>(&e)) return "domain";
  if (dynamic_cast<const ConvergenceError*>(&e)) return "convergence";
  if (dynamic_cast<const TransportError*>(&e)) return "transport";
  return "internal";
}

/// Runs one command. Errors are reported on `err` as a one-line JSON object.
inline int run_command(const Invocation& inv, std::ostream& log, std::ostream& err) {
  try {
    const RunConfig cfg = effective_config(inv);
    if (inv.command == "solve") return run_solve(cfg, log);
    if (inv.command == "verify") return run_verify(cfg, log);
    if (inv.command == "diagnose") return run_diagnose(cfg, log);
    if (inv.command == "transport-test") return run_transport_test(cfg, log);
    throw ConfigError("unknown command '" + inv.command + "'");
  } catch (const std::exception& e) {
    nlohmann::json j = {{"command", inv.command}, {"error", error_kind(e)}, {"message", e.what()}};
    if (const auto* ce = dynamic_cast<const ConvergenceError*>(&e)) {
      j["best_residual"] = ce->best_residual();
      j["iterations"] = ce->iterations();
    }
    err << j.dump() << "\n";
    return dynamic_cast<const ConfigError*>(&e) ? kUsage : kRuntime;
  }
}

inline int main(int argc, char** argv, std::ostream& log = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Steady slip-flow perturbation solver"};
  app.require_subcommand(1);
  Invocation inv;
  for (const char* name : {"solve", "verify", "diagnose", "transport-test"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", inv.config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option_function<std::string>("--out", [&](const std::string& s) { inv.out = s; }, "output directory");
    sub->add_option_function<std::string>("--mode", [&](const std::string& s) { inv.mode = s; },
                                          "linear solve mode")
        ->check(CLI::IsMember({"split", "monolithic"}));
    sub->callback([&inv, sub] { inv.command = sub->get_name(); });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, log, err);
    return code == 0 ? kOk : kUsage;
  }
  return run_command(inv, log, err);
}

}  // namespace slipflow::cli
