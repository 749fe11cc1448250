#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "downlink/errors.hpp"
#include "downlink/fluid.hpp"
#include "downlink/invariant.hpp"
#include "downlink/model.hpp"
#include "downlink/sim.hpp"
#include "downlink/spectral.hpp"

namespace downlink::io {

using nlohmann::json;

// ---------------------------------------------------------------------------
// model parameters

inline ModelParams paramsFromJson(const json& doc) {
  if (!doc.is_object()) throw ValidationError("config: expected a JSON object");
  for (const char* key : {"A", "lambda", "mu"}) {
    if (!doc.contains(key) || !doc[key].is_array())
      throw ValidationError(std::string("config: missing array field '") + key + "'");
  }
  for (const char* key : {"c", "c0"}) {
    if (!doc.contains(key) || !doc[key].is_number())
      throw ValidationError(std::string("config: missing numeric field '") + key + "'");
  }
  ModelParams p;
  for (const auto& v : doc["A"]) {
    if (!v.is_number_integer())
      throw ValidationError("config: A entries must be integers");
    p.A.push_back(v.get<int>());
  }
  for (const auto& v : doc["lambda"]) {
    if (!v.is_number()) throw ValidationError("config: lambda entries must be numbers");
    p.lambda.push_back(v.get<double>());
  }
  for (const auto& v : doc["mu"]) {
    if (!v.is_number()) throw ValidationError("config: mu entries must be numbers");
    p.mu.push_back(v.get<double>());
  }
  if (p.lambda.size() != p.A.size() || p.mu.size() != p.A.size())
    throw ValidationError("config: A, lambda, mu lengths disagree");
  p.c = doc["c"].get<double>();
  p.c0 = doc["c0"].get<double>();
  if (doc.contains("N")) {
    if (!doc["N"].is_number_integer())
      throw ValidationError("config: N must be an integer");
    p.scale_n = doc["N"].get<std::int64_t>();
  }
  return p;
}

inline json paramsToJson(const ModelParams& p) {
  json doc;
  doc["A"] = p.A;
  doc["lambda"] = p.lambda;
  doc["mu"] = p.mu;
  doc["c"] = p.c;
  doc["c0"] = p.c0;
  if (p.scale_n > 0) doc["N"] = p.scale_n;
  return doc;
}

inline SimConfig simConfigFromJson(const json& doc) {
  SimConfig cfg;
  cfg.params = paramsFromJson(doc);
  if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
  if (!doc.contains("horizon") || !doc["horizon"].is_number())
    throw ValidationError("config: simulate needs a numeric 'horizon'");
  cfg.horizon = doc["horizon"].get<double>();
  if (doc.contains("warmup")) cfg.warmup = doc["warmup"].get<double>();
  if (doc.contains("initial_state")) {
    for (const auto& v : doc["initial_state"])
      cfg.initial_state.push_back(v.get<std::int64_t>());
  }
  if (doc.contains("trace_dt")) cfg.trace_dt = doc["trace_dt"].get<double>();
  if (doc.contains("state_histogram"))
    cfg.state_histogram = doc["state_histogram"].get<bool>();
  return cfg;
}

// ---------------------------------------------------------------------------
// reports

inline json regimeToJson(const RegimeReport& r) {
  json doc;
  doc["condition_R"] = r.condition_r;
  doc["condition_R1"] = r.condition_r1;
  doc["condition_R2"] = r.condition_r2;
  doc["feasible"] = r.feasible;
  doc["Lambda"] = r.total_rate;
  doc["offered_occupancy"] = r.offered;
  doc["Lambda_A"] = r.excess_unit_rate;
  doc["rho"] = r.rho;
  doc["notes"] = r.notes;
  return doc;
}

inline json rootsToJson(const RootProfile& roots) {
  const auto pairs = [](const std::vector<Complex>& v) {
    json arr = json::array();
    for (const Complex& z : v) arr.push_back({z.real(), z.imag()});
    return arr;
  };
  json doc;
  doc["z1"] = roots.z1;
  doc["z2"] = roots.z2;
  doc["p1_in_disk"] = pairs(roots.p1_in_disk);
  doc["p2_in_disk"] = pairs(roots.p2_in_disk);
  doc["p2_out_disk"] = pairs(roots.p2_out_disk);
  return doc;
}

inline json stabilityToJson(const StabilityReport& rep) {
  json doc;
  json mat = json::array();
  for (int i = 0; i < rep.b.rows(); ++i) {
    json row = json::array();
    for (int k = 0; k < rep.b.cols(); ++k) row.push_back(rep.b(i, k));
    mat.push_back(row);
  }
  doc["B"] = mat;
  json evs = json::array();
  for (const auto& ev : rep.eigenvalues) evs.push_back({ev.real(), ev.imag()});
  doc["eigenvalues"] = evs;
  doc["max_real_part"] = rep.max_real_part;
  doc["e_b"] = rep.e_b;
  doc["F_at_zero"] = rep.f_at_zero;
  doc["fixed_point_tail"] = rep.fixed_point_tail;
  return doc;
}

inline json outcomeToJson(const SimOutcome& out) {
  json doc;
  json counts = json::array();
  for (const SimCounts& c : out.counts)
    counts.push_back({{"arrived", c.arrived},
                      {"accepted_full", c.accepted_full},
                      {"downgraded", c.downgraded},
                      {"rejected", c.rejected}});
  doc["counts"] = counts;
  json hist = json::array();
  for (const auto& [m, w] : out.m_histogram) hist.push_back({{"m", m}, {"time", w}});
  doc["m_histogram"] = hist;
  if (!out.state_histogram.empty()) {
    json sh = json::array();
    for (const auto& [s, w] : out.state_histogram)
      sh.push_back({{"state", s}, {"time", w}});
    doc["state_histogram"] = sh;
  }
  doc["final_state"] = out.final_state;
  doc["capacity_units"] = out.capacity_units;
  doc["threshold_units"] = out.threshold_units;
  doc["seed"] = out.seed;
  doc["horizon"] = out.horizon;
  doc["warmup"] = out.warmup;
  doc["replicas"] = out.replicas;
  doc["prng"] = out.prng;
  return doc;
}

// ---------------------------------------------------------------------------
// CSV: header row, '.' decimal separator, 12 significant digits, newline
// terminated.

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string fmt(std::int64_t v) { return std::to_string(v); }
inline std::string fmt(int v) { return std::to_string(v); }
inline std::string fmt(const std::string& v) { return v; }
inline std::string fmt(const char* v) { return v; }

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : out_(path) {
    if (!out_) throw ValidationError("csv: cannot open " + path);
  }
  void header(const std::vector<std::string>& cols) { writeRow(cols); }
  template <typename... Ts>
  void row(const Ts&... vals) {
    std::vector<std::string> cells{fmt(vals)...};
    writeRow(cells);
  }

 private:
  void writeRow(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }
  std::ofstream out_;
};

}  // namespace downlink::io
