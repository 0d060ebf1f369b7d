#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "erexp/channel_io.hpp"
#include "erexp/exponents.hpp"
#include "erexp/forney.hpp"
#include "erexp/moments.hpp"
#include "erexp/simulator.hpp"

// Reproducible output plumbing: fixed 12-significant-digit floats for CSV,
// snake_case JSON, and a run manifest that accompanies every output file.
// Quantities measured in nats are multiplied by unit.scale on the way out
// (1 for nats, 1/ln 2 for bits); dimensionless ones (s, rho, delta) never are.

namespace erexp::io {

constexpr const char* kToolVersion = "1.0.0";

struct unit {
  double scale = 1.0;
};

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline std::string fmt(double v, const unit& u) { return fmt(v * u.scale); }

inline const char* fmt(bool v) { return v ? "true" : "false"; }

inline std::string sweep_csv(const std::vector<sweep_row>& rows, bool with_forney,
                             const unit& u = {}) {
  std::string out = "R,T,s_R,s_opt,branch,e1_star,e2_star";
  if (with_forney) out += ",forney_e1,gap";
  out += "\n";
  const double nan = std::nan("");
  for (const auto& row : rows) {
    out += fmt(row.rate, u);
    out += ',';
    out += fmt(row.threshold, u);
    out += ',';
    if (row.ok) {
      out += fmt(row.result.s_r);
      out += ',';
      out += fmt(row.result.s_opt);
      out += ',';
      out += to_string(row.result.branch);
      out += ',';
      out += fmt(row.result.e1_star, u);
      out += ',';
      out += fmt(row.result.e2_star, u);
    } else {
      // failed points keep the schema: numbers become nan, the branch column
      // carries the reason
      out += fmt(nan) + "," + fmt(nan) + "," + row.error + "," + fmt(nan) + "," + fmt(nan);
    }
    if (with_forney) {
      if (row.ok && row.forney_e1.has_value()) {
        out += ',';
        out += fmt(*row.forney_e1, u);
        out += ',';
        out += fmt(row.result.e1_star - *row.forney_e1, u);
      } else {
        out += "," + fmt(nan) + "," + fmt(nan);
      }
    }
    out += '\n';
  }
  return out;
}

inline std::string moments_csv(const std::vector<moments::moment_report>& rows,
                               const unit& u = {}) {
  std::string out = "n,R,s,delta,regime,predicted,oracle,abs_error\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n);
    out += ',';
    out += fmt(r.rate, u);
    out += ',';
    out += fmt(r.s);
    out += ',';
    out += fmt(r.delta);
    out += ',';
    out += r.in_concentration ? "concentration" : "complement";
    out += ',';
    out += fmt(r.predicted, u);
    out += ',';
    out += fmt(r.oracle, u);
    out += ',';
    out += fmt(r.abs_error, u);
    out += '\n';
  }
  return out;
}

struct oracle_row {
  double rate = 0.0;
  double s = 0.0;
  double s_r = 0.0;
  double lambda_closed = 0.0;
  double lambda_oracle = 0.0;
  bool on_boundary = false;
};

inline std::string oracle_csv(const std::vector<oracle_row>& rows, const unit& u = {}) {
  std::string out = "R,s,s_R,lambda_closed,lambda_oracle,abs_error,on_boundary\n";
  for (const auto& r : rows) {
    out += fmt(r.rate, u);
    out += ',';
    out += fmt(r.s);
    out += ',';
    out += fmt(r.s_r);
    out += ',';
    out += fmt(r.lambda_closed, u);
    out += ',';
    out += fmt(r.lambda_oracle, u);
    out += ',';
    out += fmt(std::fabs(r.lambda_oracle - r.lambda_closed), u);
    out += ',';
    out += fmt(r.on_boundary);
    out += '\n';
  }
  return out;
}

inline nlohmann::json exponent_json(double rate, double threshold, const exponent_result& res,
                                    const unit& u = {}) {
  return {{"rate", rate * u.scale},
          {"threshold", threshold * u.scale},
          {"e1_star", res.e1_star * u.scale},
          {"e2_star", res.e2_star * u.scale},
          {"s_opt", res.s_opt},
          {"s_r", res.s_r},
          {"branch", to_string(res.branch)}};
}

inline nlohmann::json forney_json(double rate, double threshold, const forney_result& res,
                                  const unit& u = {}) {
  return {{"rate", rate * u.scale},
          {"threshold", threshold * u.scale},
          {"e1", res.value * u.scale},
          {"s", res.s},
          {"rho", res.rho},
          {"at_origin", res.at_origin}};
}

inline nlohmann::json symmetry_json(const symmetry_report& rep) {
  return {{"symmetric", rep.symmetric},
          {"max_deviation", rep.max_deviation},
          {"tolerance", rep.tolerance},
          {"worst_s", rep.worst_s},
          {"worst_y", rep.worst_y}};
}

inline nlohmann::json interval_json(const sim::interval& iv) {
  return {{"estimate", iv.estimate}, {"lo", iv.lo}, {"hi", iv.hi}};
}

inline nlohmann::json exponent_estimate_json(const sim::exponent_estimate& e, const unit& u) {
  return {{"value", e.value * u.scale}, {"is_lower_bound", e.is_lower_bound}};
}

inline nlohmann::json sim_json(const sim::sim_result& res, const unit& u = {}) {
  return {{"trials", res.trials},
          {"count_e1", res.count_e1},
          {"count_e2", res.count_e2},
          {"count_erase", res.count_erase},
          {"p_e1", interval_json(res.p_e1)},
          {"p_e2", interval_json(res.p_e2)},
          {"p_r0", interval_json(res.p_r0)},
          {"empirical_exponents",
           {{"e1", exponent_estimate_json(res.exp_e1, u)},
            {"e2", exponent_estimate_json(res.exp_e2, u)},
            {"r0", exponent_estimate_json(res.exp_r0, u)}}}};
}

inline std::string sim_csv(const sim::sim_result& res, const unit& u = {}) {
  std::string out =
      "trials,count_e1,count_e2,count_erase,"
      "p_e1,p_e1_lo,p_e1_hi,p_e2,p_e2_lo,p_e2_hi,p_r0,p_r0_lo,p_r0_hi,"
      "exp_e1,exp_e1_lower_bound,exp_e2,exp_e2_lower_bound,exp_r0,exp_r0_lower_bound\n";
  out += std::to_string(res.trials);
  out += ',';
  out += std::to_string(res.count_e1);
  out += ',';
  out += std::to_string(res.count_e2);
  out += ',';
  out += std::to_string(res.count_erase);
  for (const auto* iv : {&res.p_e1, &res.p_e2, &res.p_r0}) {
    out += ',';
    out += fmt(iv->estimate);
    out += ',';
    out += fmt(iv->lo);
    out += ',';
    out += fmt(iv->hi);
  }
  for (const auto* e : {&res.exp_e1, &res.exp_e2, &res.exp_r0}) {
    out += ',';
    out += fmt(e->value, u);
    out += ',';
    out += fmt(e->is_lower_bound);
  }
  out += '\n';
  return out;
}

// Provenance sidecar: command line, the options as resolved after defaulting,
// any seeds, the tool version, and wall time.
inline nlohmann::json make_manifest(const std::vector<std::string>& argv,
                                    nlohmann::json resolved_config,
                                    const std::vector<std::uint64_t>& seeds,
                                    double wall_seconds) {
  return {{"command_line", argv},
          {"config", std::move(resolved_config)},
          {"seeds", seeds},
          {"tool_version", kToolVersion},
          {"wall_time_s", wall_seconds}};
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw file_error("cannot open output file '" + path + "'");
  out << content;
  out.flush();
  if (!out) throw file_error("failed writing output file '" + path + "'");
}

}  // namespace erexp::io
