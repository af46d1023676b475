// peakforge command-line front end: JSON experiment configs in, CSV/JSON
// reports out. Subcommands: constants | build | sweep | pohozaev | spectrum |
// extension-check. Exit codes: 0 ok, 1 config error, 2 verification failure,
// 3 solver failure.
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "peakforge/bubble.hpp"
#include "peakforge/energy.hpp"
#include "peakforge/extension.hpp"
#include "peakforge/io.hpp"
#include "peakforge/norms.hpp"
#include "peakforge/pohozaev.hpp"
#include "peakforge/reduction.hpp"

using nlohmann::json;
using namespace peakforge;

namespace {

struct CliError {
  int code;
  std::string message;
};

[[noreturn]] void die(int code, const std::string& msg) { throw CliError{code, msg}; }

json builtin_preset(const std::string& name) {
  // Flat-bottom wells (two same-center Gaussians with the r^2 terms cancelling)
  // keep the expansion's V(xi)-law clean at desk-scale epsilon; the baseline
  // keeps the far-field mass term of the periodic box well away from zero.
  json j;
  if (name == "k1-default") {
    j["dim"] = 1;
    j["s"] = 0.2;
    j["epsilon"] = 0.2;
    j["grid"] = {{"L", 512.0}, {"M", 0}};
    j["potential"] = {{"baseline", 0.5},
                      {"bumps",
                       {{{"center", {0.0}}, {"amplitude", 0.15}, {"width", 4.0}},
                        {{"center", {0.0}}, {"amplitude", -0.6}, {"width", 16.0}}}},
                      {"critical_points", {{0.0}}}};
    j["peaks"] = {{"initial_xi", {{0.0}}}, {"delta", 4.0}, {"pin_xi", true}};
  } else if (name == "k2-default") {
    j["dim"] = 1;
    j["s"] = 0.2;
    j["epsilon"] = 0.2;
    j["grid"] = {{"L", 512.0}, {"M", 0}};
    j["potential"] = {{"baseline", 0.5},
                      {"bumps",
                       {{{"center", {-24.0}}, {"amplitude", -0.45}, {"width", 4.0}},
                        {{"center", {24.0}}, {"amplitude", -0.45}, {"width", 4.0}}}},
                      {"critical_points", {{-24.0}, {24.0}}}};
    j["peaks"] = {{"initial_xi", {{-24.0}, {24.0}}}, {"delta", 4.5}, {"pin_xi", false}};
  } else if (name == "exact-bubble") {
    j["dim"] = 1;
    j["s"] = 0.2;
    j["epsilon"] = 0.0;
    j["grid"] = {{"L", 40.0}, {"M", 2048}};
    j["potential"] = {{"baseline", 0.0}, {"bumps", json::array()}, {"critical_points", {{0.0}}}};
    j["peaks"] = {{"initial_xi", {{0.0}}}, {"delta", 0.0}, {"pin_xi", true}};
    j["pohozaev"] = {{"rho", 1.5}, {"closed_form", true}};
  } else {
    die(1, "unknown preset '" + name + "'");
  }
  j["tolerances"] = json::object();
  return j;
}

json load_config(const std::string& config_path, const std::string& preset,
                 const std::vector<std::string>& overrides) {
  json j;
  if (!preset.empty()) j = builtin_preset(preset);
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) die(1, "cannot open config file " + config_path);
    json file_cfg;
    try {
      in >> file_cfg;
    } catch (const std::exception& e) {
      die(1, std::string("config parse error: ") + e.what());
    }
    if (j.is_null())
      j = file_cfg;
    else
      j.merge_patch(file_cfg);
  }
  if (j.is_null()) die(1, "no config: pass --config FILE or --preset NAME");
  for (const std::string& ov : overrides) {
    auto eq = ov.find('=');
    if (eq == std::string::npos) die(1, "override must look like path.to.leaf=value: " + ov);
    std::string path = ov.substr(0, eq), value = ov.substr(eq + 1);
    json* node = &j;
    std::size_t pos = 0;
    while (true) {
      auto dot = path.find('.', pos);
      std::string key = path.substr(pos, dot == std::string::npos ? dot : dot - pos);
      if (dot == std::string::npos) {
        try {
          (*node)[key] = json::parse(value);
        } catch (...) {
          (*node)[key] = value;
        }
        break;
      }
      node = &(*node)[key];
      pos = dot + 1;
    }
  }
  return j;
}

std::string config_hash(const json& j) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(j.dump())));
  return buf;
}

double require_number(const json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_number()) die(1, "config: missing numeric field '" + key + "'");
  return j[key].get<double>();
}

PotentialModel parse_potential(const json& j, int dim) {
  if (!j.contains("potential")) die(1, "config: missing 'potential'");
  const json& p = j["potential"];
  PotentialModel m;
  m.dim = dim;
  m.baseline = require_number(p, "baseline");
  if (p.contains("bumps"))
    for (const json& b : p["bumps"]) {
      PotentialBump bump;
      auto c = b.at("center");
      for (int d = 0; d < dim && d < static_cast<int>(c.size()); ++d) bump.center[d] = c[d];
      bump.amplitude = b.at("amplitude").get<double>();
      bump.width = b.at("width").get<double>();
      if (bump.width <= 0) die(1, "config: potential bump width must be positive");
      m.bumps.push_back(bump);
    }
  if (p.contains("critical_points"))
    for (const json& c : p["critical_points"]) {
      Point pt = {0, 0, 0};
      for (int d = 0; d < dim && d < static_cast<int>(c.size()); ++d) pt[d] = c[d];
      m.declared_critical_points.push_back(pt);
    }
  return m;
}

struct RunSetup {
  int dim = 1;
  double s = 0.2;
  double L = 128.0;
  int M = 0;
  PotentialModel V;
  SolveOptions opts;
};

RunSetup parse_run(const json& j) {
  RunSetup r;
  r.dim = static_cast<int>(require_number(j, "dim"));
  if (r.dim != 1) die(1, "solver runs are wired for dim = 1");
  r.s = require_number(j, "s");
  if (!j.contains("grid")) die(1, "config: missing 'grid'");
  r.L = require_number(j["grid"], "L");
  r.M = j["grid"].value("M", 0);
  r.V = parse_potential(j, r.dim);
  if (!j.contains("peaks") || !j["peaks"].contains("initial_xi"))
    die(1, "config: missing 'peaks.initial_xi'");
  for (const json& x : j["peaks"]["initial_xi"]) {
    Point pt = {0, 0, 0};
    for (int d = 0; d < r.dim && d < static_cast<int>(x.size()); ++d) pt[d] = x[d];
    r.opts.xi_init.push_back(pt);
  }
  r.opts.s = r.s;
  r.opts.delta = j["peaks"].value("delta", 0.0);
  r.opts.pin_xi = j["peaks"].value("pin_xi", false);
  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    r.opts.tols.krylov = t.value("krylov", r.opts.tols.krylov);
    r.opts.tols.fixed_point = t.value("fixed_point", r.opts.tols.fixed_point);
    r.opts.tols.newton_rel = t.value("newton", r.opts.tols.newton_rel);
  }
  return r;
}

Grid grid_for(const RunSetup& r, double eps) {
  if (r.M > 0) return make_grid(r.dim, r.L, r.M);
  double lam_max = 1.0;
  ExpansionConstants c = expansion_constants(r.dim, r.s);
  for (const Point& xi : r.opts.xi_init)
    lam_max = std::max(lam_max, predicted_lambda(eps, potential_value(xi, r.V), c));
  return auto_grid_1d(r.L, lam_max, 0.2);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) die(1, "cannot open output file " + path);
  return out;
}

int worker_count() {
  const char* env = std::getenv("PEAKFORGE_THREADS");
  if (!env) return 1;
  int n = std::atoi(env);
  return n > 0 ? n : 1;
}

int cmd_constants(const json& cfg, const std::string& out_path) {
  std::vector<std::pair<int, double>> pairs;
  if (cfg.contains("pairs"))
    for (const json& p : cfg["pairs"]) pairs.emplace_back(p.at(0).get<int>(), p.at(1).get<double>());
  else
    pairs = {{1, 0.2}, {2, 0.3}, {3, 0.5}, {6, 0.9}, {7, 0.99}};
  std::ofstream out = open_out(out_path);
  out << "# " << kVersion << " config=" << config_hash(cfg) << "\n";
  out << "N,s,gamma,A,B,quad_err\n";
  for (auto [N, s] : pairs) {
    ExpansionConstants c;
    try {
      c = expansion_constants(N, s);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::QuadratureNonConvergent) die(2, e.what());
      throw;
    }
    out << N << "," << csv_number(s) << "," << csv_number(gamma_const(N, s)) << ","
        << csv_number(c.A) << "," << csv_number(c.B) << ","
        << csv_number(c.quadrature_error_estimate) << "\n";
  }
  std::fprintf(stderr, "constants written to %s\n", out_path.c_str());
  return 0;
}

int cmd_build(const json& cfg, const std::string& out_prefix) {
  RunSetup r = parse_run(cfg);
  double eps = require_number(cfg, "epsilon");
  Grid g = grid_for(r, eps);
  Solution sol;
  try {
    sol = solve_peaks(g, eps, r.V, r.opts);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotContracting || e.code() == ErrorCode::OuterNewtonDiverged)
      die(3, std::string("solver failure: ") + e.what());
    throw;
  }
  write_solution(out_prefix + ".json", out_prefix + ".field", sol, eps, config_hash(cfg));
  std::ofstream prof = open_out(out_prefix + "_profile.csv");
  prof << "# " << kVersion << " config=" << config_hash(cfg) << "\n";
  prof << "peak,r,u\n";
  ModeExpansion1D modes = mode_expansion_1d(sol.u);
  for (std::size_t i = 0; i < sol.state.cfg.peaks.size(); ++i) {
    const Peak& p = sol.state.cfg.peaks[i];
    for (int q = 0; q <= 400; ++q) {
      double rr = 10.0 * q / (400.0 * p.lambda) * 8.0;
      prof << i << "," << csv_number(rr) << "," << csv_number(modes.eval(p.xi[0] + rr)) << "\n";
    }
  }
  std::fprintf(stderr, "solution written to %s.{json,field}\n", out_prefix.c_str());
  return 0;
}

int cmd_sweep(const json& cfg, const std::string& out_path) {
  RunSetup r = parse_run(cfg);
  if (!cfg.contains("epsilon_list")) die(1, "sweep needs 'epsilon_list'");
  std::vector<double> eps_list = cfg["epsilon_list"].get<std::vector<double>>();
  struct Row {
    double eps;
    bool ok = false;
    std::string error;
    double lambda = 0, lambda_pred = 0, phi_norm = 0, residual = 0;
  };
  std::vector<Row> rows(eps_list.size());
  std::atomic<std::size_t> next{0};
  int nw = std::min<int>(worker_count(), static_cast<int>(eps_list.size()));
  auto work = [&]() {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= eps_list.size()) return;
      Row& row = rows[i];
      row.eps = eps_list[i];
      try {
        Grid g = grid_for(r, row.eps);
        Solution sol = solve_peaks(g, row.eps, r.V, r.opts);
        row.ok = true;
        row.lambda = sol.state.cfg.peaks[0].lambda;
        row.lambda_pred = sol.predicted_lambda[0];
        row.phi_norm = weighted_sup_norm(sol.state.phi, sol.state.cfg, WeightKind::Star);
        row.residual = sol.pde_residual;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < nw; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  std::ofstream out = open_out(out_path);
  out << "# " << kVersion << " config=" << config_hash(cfg) << "\n";
  out << "eps,lambda,lambda_pred,phi_norm,residual,status\n";
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const Row& row : rows) {
    if (row.ok) {
      out << csv_number(row.eps) << "," << csv_number(row.lambda) << ","
          << csv_number(row.lambda_pred) << "," << csv_number(row.phi_norm) << ","
          << csv_number(row.residual) << ",ok\n";
      double x = std::log(row.eps), y = std::log(row.lambda);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++n;
    } else {
      out << csv_number(row.eps) << ",,,,,failed: " << row.error << "\n";
    }
  }
  if (n >= 2) {
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    out << "# fitted log-log slope," << csv_number(slope) << "\n";
    std::fprintf(stderr, "sweep slope = %.6f (theory %.6f)\n", slope, -0.5 / r.s);
  }
  bool all_ok = true;
  for (const Row& row : rows) all_ok = all_ok && row.ok;
  return all_ok ? 0 : 3;
}

int cmd_pohozaev(const json& cfg, const std::string& out_path) {
  json out_json;
  out_json["version"] = kVersion;
  out_json["config_hash"] = config_hash(cfg);
  double s = require_number(cfg, "s");
  IdentityContext ctx;
  ctx.s = s;
  ctx.p_s = (1.0 + 2.0 * s) / (1.0 - 2.0 * s);
  ctx.eps = cfg.value("epsilon", 0.0);
  ctx.V = parse_potential(cfg, 1);

  auto report_to_json = [](const IdentityReport& rep) {
    json jr;
    jr["kind"] = rep.kind;
    jr["lhs"] = rep.lhs;
    jr["rhs"] = rep.rhs;
    jr["residual"] = rep.residual;
    jr["rho"] = rep.rho;
    jr["term_scale"] = rep.term_scale();
    jr["terms"] = rep.terms;
    return jr;
  };

  bool closed = cfg.contains("pohozaev") && cfg["pohozaev"].value("closed_form", false);
  double worst_rel = 0.0;
  if (closed) {
    double rho = cfg["pohozaev"].value("rho", 1.5);
    BubbleParams bp{1.0, {0, 0, 0}, 1, s};
    ScalarFn U = [&](const Point& x) { return bubble(x, bp); };
    IdentityReport dil = dilation_identity_closed(U, make_point(0.0), rho, ctx);
    IdentityReport tr = translation_identity_closed(U, make_point(0.0), rho, 0, ctx);
    out_json["reports"].push_back(report_to_json(dil));
    out_json["reports"].push_back(report_to_json(tr));
    worst_rel = std::max(std::abs(dil.residual) / dil.term_scale(),
                         std::abs(tr.residual) / (tr.term_scale() + 1e-30));
  } else {
    if (!cfg.contains("solution_file")) die(1, "pohozaev: need 'solution_file' or closed_form");
    double s_in = 0, eps_in = 0;
    Field u = read_field_binary(cfg["solution_file"].get<std::string>(), &s_in, &eps_in);
    ctx.s = s_in;
    ctx.p_s = (1.0 + 2.0 * s_in) / (1.0 - 2.0 * s_in);
    ctx.eps = eps_in;
    double rho = cfg.contains("pohozaev") ? cfg["pohozaev"].value("rho", 0.0) : 0.0;
    Point center = {0, 0, 0};
    if (cfg.contains("pohozaev") && cfg["pohozaev"].contains("center"))
      center[0] = cfg["pohozaev"]["center"][0];
    if (rho <= 0) {
      double delta = cfg.contains("peaks") ? cfg["peaks"].value("delta", 4.0) : 4.0;
      rho = pick_rho(center, delta, u, u, ctx);
    }
    IdentityReport dil = dilation_identity(u, u, center, rho, ctx);
    IdentityReport tr = translation_identity(u, u, center, rho, 0, ctx);
    out_json["reports"].push_back(report_to_json(dil));
    out_json["reports"].push_back(report_to_json(tr));
    worst_rel = std::max(std::abs(dil.residual) / dil.term_scale(),
                         std::abs(tr.residual) / (tr.term_scale() + 1e-30));
  }
  out_json["worst_relative_residual"] = worst_rel;
  std::ofstream out = open_out(out_path);
  out << out_json.dump(2) << "\n";
  double tol = cfg.value("tolerance", 1e-5);
  if (closed && worst_rel > tol) die(2, "pohozaev verification failed");
  return 0;
}

int cmd_spectrum(const json& cfg, const std::string& out_path) {
  if (!cfg.contains("solution_file")) die(1, "spectrum: need 'solution_file'");
  double s = 0, eps = 0;
  Field u = read_field_binary(cfg["solution_file"].get<std::string>(), &s, &eps);
  PotentialModel V = parse_potential(cfg, 1);
  int count = cfg.value("count", 6);
  double p_s = (1.0 + 2.0 * s) / (1.0 - 2.0 * s);
  std::vector<double> eigs;
  try {
    eigs = nondegeneracy_spectrum(u, eps, V, s, p_s, count);
  } catch (const Error& e) {
    die(2, std::string("spectrum failure: ") + e.what());
  }
  std::ofstream out = open_out(out_path);
  out << "# " << kVersion << " config=" << config_hash(cfg) << "\n";
  out << "index,eigenvalue\n";
  for (std::size_t i = 0; i < eigs.size(); ++i)
    out << i << "," << csv_number(eigs[i]) << "\n";
  double gap = eigs.empty() ? 0.0 : std::abs(eigs[0]);
  std::fprintf(stderr, "min |eigenvalue| = %.6e\n", gap);
  if (gap <= 0.0) die(2, "spectrum: vanishing gap");
  return 0;
}

int cmd_extension_check(const json& cfg, const std::string& out_path) {
  double s = require_number(cfg, "s");
  double L = cfg.contains("grid") ? require_number(cfg["grid"], "L") : 512.0;
  int M = cfg.contains("grid") ? static_cast<int>(require_number(cfg["grid"], "M")) : 16384;
  Grid g = make_grid(1, L, M);
  BubbleParams bp{1.0, {0, 0, 0}, 1, s};
  Field U = bubble_field(g, bp);
  Field lap = frac_laplacian_spectral(U, s);
  ModeExpansion1D lap_modes = mode_expansion_1d(lap);
  std::vector<double> tseq = {1.0, 0.5, 0.25, 0.125};
  std::ofstream out = open_out(out_path);
  out << "# " << kVersion << " config=" << config_hash(cfg) << "\n";
  out << "x,dtn_residual,reference\n";
  double worst = 0.0;
  for (double x : {0.0, 0.5, -0.8, 1.2, 2.0, -2.5, 3.0, 4.0, -5.0, 6.0}) {
    double res = dtn_residual(U, x, s, tseq);
    double ref = lap_modes.eval(x);
    out << csv_number(x) << "," << csv_number(res) << "," << csv_number(ref) << "\n";
    worst = std::max(worst, std::abs(res) / std::abs(ref));
  }
  std::fprintf(stderr, "worst relative DtN residual = %.3e\n", worst);
  if (worst > cfg.value("tolerance", 1e-2)) die(2, "extension-check failed");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"peakforge: multi-peak solutions of the fractional Schrodinger equation"};
  app.require_subcommand(1);
  std::string config_path, preset, output = "peakforge_out";
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "JSON experiment config");
  app.add_option("--preset", preset, "built-in preset (k1-default, k2-default, exact-bubble)");
  app.add_option("--output", output, "output path or prefix");
  app.add_option("--set", overrides, "dotted-path config override, e.g. --set grid.M=512");

  auto* c_const = app.add_subcommand("constants", "expansion constants table");
  auto* c_build = app.add_subcommand("build", "construct a k-peak solution");
  auto* c_sweep = app.add_subcommand("sweep", "epsilon sweep of the parameter law");
  auto* c_poho = app.add_subcommand("pohozaev", "evaluate the local Pohozaev identities");
  auto* c_spec = app.add_subcommand("spectrum", "linearized-operator spectrum probe");
  auto* c_ext = app.add_subcommand("extension-check", "Dirichlet-to-Neumann residual table");

  CLI11_PARSE(app, argc, argv);
  try {
    json cfg = load_config(config_path, preset, overrides);
    if (c_const->parsed()) return cmd_constants(cfg, output + ".csv");
    if (c_build->parsed()) return cmd_build(cfg, output);
    if (c_sweep->parsed()) return cmd_sweep(cfg, output + ".csv");
    if (c_poho->parsed()) return cmd_pohozaev(cfg, output + ".json");
    if (c_spec->parsed()) return cmd_spectrum(cfg, output + ".csv");
    if (c_ext->parsed()) return cmd_extension_check(cfg, output + ".csv");
  } catch (const CliError& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    return e.code;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
