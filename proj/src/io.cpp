#include "peakforge/io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace peakforge {

void write_field_binary(const std::string& path, const Field& f, double s, double eps) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::BadArgument, "cannot open " + path + " for writing");
  std::uint32_t dims = f.grid.dim, M = f.grid.points_per_dim;
  double L = f.grid.half_length;
  out.write(reinterpret_cast<const char*>(&dims), sizeof dims);
  out.write(reinterpret_cast<const char*>(&L), sizeof L);
  out.write(reinterpret_cast<const char*>(&M), sizeof M);
  out.write(reinterpret_cast<const char*>(&s), sizeof s);
  out.write(reinterpret_cast<const char*>(&eps), sizeof eps);
  out.write(reinterpret_cast<const char*>(f.values.data()),
            static_cast<std::streamsize>(f.values.size() * sizeof(double)));
}

Field read_field_binary(const std::string& path, double* s_out, double* eps_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::BadArgument, "cannot open " + path);
  std::uint32_t dims = 0, M = 0;
  double L = 0, s = 0, eps = 0;
  in.read(reinterpret_cast<char*>(&dims), sizeof dims);
  in.read(reinterpret_cast<char*>(&L), sizeof L);
  in.read(reinterpret_cast<char*>(&M), sizeof M);
  in.read(reinterpret_cast<char*>(&s), sizeof s);
  in.read(reinterpret_cast<char*>(&eps), sizeof eps);
  Field f(make_grid(static_cast<int>(dims), L, static_cast<int>(M)));
  in.read(reinterpret_cast<char*>(f.values.data()),
          static_cast<std::streamsize>(f.values.size() * sizeof(double)));
  if (!in) fail(ErrorCode::BadArgument, "truncated field file " + path);
  if (s_out) *s_out = s;
  if (eps_out) *eps_out = eps;
  return f;
}

void write_solution(const std::string& json_path, const std::string& field_path,
                    const Solution& sol, double eps, const std::string& config_hash) {
  const PeakConfig& cfg = sol.state.cfg;
  write_field_binary(field_path, sol.u, cfg.order.s, eps);
  nlohmann::json j;
  j["version"] = kVersion;
  j["config_hash"] = config_hash;
  j["field_file"] = field_path;
  j["s"] = cfg.order.s;
  j["p_s"] = cfg.order.p_s;
  j["sigma"] = cfg.order.sigma;
  j["eps"] = eps;
  j["delta"] = cfg.delta;
  j["pde_residual"] = sol.pde_residual;
  j["phi_norm_star"] = sol.state.residual_star_star;
  j["fixed_point_iterations"] = sol.state.iterations;
  j["contraction_factor"] = sol.state.contraction_factor;
  j["newton_iterations"] = sol.newton_iterations;
  j["multipliers"] = sol.state.multipliers;
  j["reduced_residuals"] = sol.reduced_residuals;
  for (std::size_t i = 0; i < cfg.peaks.size(); ++i) {
    nlohmann::json p;
    p["lambda"] = cfg.peaks[i].lambda;
    std::vector<double> xi(cfg.peaks[i].xi.begin(), cfg.peaks[i].xi.begin() + sol.u.grid.dim);
    p["xi"] = xi;
    p["lambda_pred"] = sol.predicted_lambda[i];
    p["parameter_law_error"] = sol.parameter_law_error[i];
    j["peaks"].push_back(p);
  }
  std::ofstream out(json_path);
  if (!out) fail(ErrorCode::BadArgument, "cannot open " + json_path);
  out << j.dump(2) << "\n";
}

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace peakforge
