#pragma once

#include <cstdio>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bounds.hpp"

// Serialization boundary: JSON records for signals, network parameters, and
// distance reports; CSV for measures, matrices, and bound report tables.
// Every number a file can carry goes through %.17g (CSV) or the exact
// round-trip JSON writer, so identical inputs produce identical bytes.

namespace graphop {

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---- signals ----------------------------------------------------------------

inline nlohmann::json signal_to_json(const Signal& f) {
  if (f.repr() == SignalRepr::Analytic)
    throw std::invalid_argument("signal_to_json: analytic signals are not serializable");
  nlohmann::json j;
  const bool pc = f.repr() == SignalRepr::PiecewiseConstant;
  j["repr"] = pc ? "piecewise-constant" : "piecewise-linear";
  j["n"] = f.resolution();
  j[pc ? "values" : "node_values"] = f.values();
  j["range_bound"] = f.range_bound();
  if (f.lipschitz_const())
    j["lipschitz_const"] = *f.lipschitz_const();
  else
    j["lipschitz_const"] = nullptr;
  return j;
}

inline Signal signal_from_json(const nlohmann::json& j) {
  const std::string repr = j.at("repr").get<std::string>();
  std::optional<double> lip;
  if (j.contains("lipschitz_const") && !j.at("lipschitz_const").is_null())
    lip = j.at("lipschitz_const").get<double>();
  if (repr == "piecewise-constant") {
    Signal f = Signal::piecewise_constant(j.at("values").get<std::vector<double>>());
    return f.with_metadata(j.at("range_bound").get<double>(), lip);
  }
  if (repr == "piecewise-linear") {
    Signal f = Signal::piecewise_linear(j.at("node_values").get<std::vector<double>>());
    return f.with_metadata(j.at("range_bound").get<double>(), lip);
  }
  throw std::invalid_argument("signal_from_json: unknown repr '" + repr + "'");
}

inline nlohmann::json finite_signal_to_json(const FiniteSignal& x) {
  nlohmann::json j;
  j["repr"] = "finite";
  j["n"] = x.n();
  j["values"] = x.values;
  return j;
}

inline FiniteSignal finite_signal_from_json(const nlohmann::json& j) {
  if (j.at("repr").get<std::string>() != "finite")
    throw std::invalid_argument("finite_signal_from_json: repr must be 'finite'");
  FiniteSignal x;
  x.values = j.at("values").get<std::vector<double>>();
  if (x.values.empty()) throw std::invalid_argument("finite_signal_from_json: empty values");
  return x;
}

// ---- measures ----------------------------------------------------------------

// One atom per row, coordinates comma-separated.
inline std::string measure_to_csv(const EmpiricalMeasure& m) {
  m.validate();
  std::string out;
  for (int i = 0; i < m.size(); ++i) {
    const double* a = m.atom(i);
    for (int d = 0; d < m.dim; ++d) {
      if (d) out += ',';
      out += format_double(a[d]);
    }
    out += '\n';
  }
  return out;
}

// ---- distance reports ----------------------------------------------------------

inline nlohmann::json dm_report_to_json(const DmReport& rep) {
  nlohmann::json j;
  j["per_k"] = nlohmann::json::array();
  for (const DmPerK& p : rep.per_k)
    j["per_k"].push_back({{"k", p.k}, {"dH_estimate", p.dH}, {"num_tuples", p.num_tuples}});
  j["total"] = rep.total;
  j["remainder_bound"] = rep.remainder_bound;
  j["estimator"] = rep.estimator == ProfileConfig::Estimator::Paired ? "paired" : "cross";
  j["seed"] = rep.seed;
  return j;
}

// ---- network parameters ---------------------------------------------------------

inline const char* activation_name(Activation a) {
  switch (a) {
    case Activation::Clip: return "clip";
    case Activation::Tanh: return "tanh";
    case Activation::LeakyAbs: return "leaky-abs";
  }
  throw std::invalid_argument("activation_name: unknown activation");
}

inline Activation activation_from_name(const std::string& s) {
  if (s == "clip") return Activation::Clip;
  if (s == "tanh") return Activation::Tanh;
  if (s == "leaky-abs") return Activation::LeakyAbs;
  throw std::invalid_argument("activation_from_name: unknown activation '" + s + "'");
}

inline nlohmann::json gnn_params_to_json(const GnnParams& p) {
  p.validate();
  nlohmann::json j;
  j["L"] = p.L;
  j["widths"] = p.widths;
  j["K"] = p.K;
  j["activation"] = activation_name(p.activation);
  j["h"] = p.h;
  return j;
}

inline GnnParams gnn_params_from_json(const nlohmann::json& j) {
  GnnParams p;
  p.L = j.at("L").get<int>();
  p.widths = j.at("widths").get<std::vector<int>>();
  p.K = j.at("K").get<int>();
  p.activation = activation_from_name(j.at("activation").get<std::string>());
  p.h = j.at("h").get<std::vector<std::vector<std::vector<std::vector<double>>>>>();
  p.validate();
  return p;
}

// ---- matrices --------------------------------------------------------------------

// First line holds n, then n rows of n comma-separated entries.
inline std::vector<std::vector<double>> load_matrix_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("load_matrix_csv: empty input");
  int n = 0;
  try {
    n = std::stoi(line);
  } catch (const std::exception&) {
    throw std::invalid_argument("load_matrix_csv: first line must be the dimension");
  }
  if (n < 1) throw std::invalid_argument("load_matrix_csv: dimension must be >= 1");
  std::vector<std::vector<double>> M(n);
  for (int r = 0; r < n; ++r) {
    if (!std::getline(in, line))
      throw std::invalid_argument("load_matrix_csv: expected " + std::to_string(n) + " rows");
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        M[r].push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::invalid_argument("load_matrix_csv: bad number '" + cell + "' in row " +
                                    std::to_string(r + 1));
      }
    }
    if (static_cast<int>(M[r].size()) != n)
      throw std::invalid_argument("load_matrix_csv: row " + std::to_string(r + 1) + " has " +
                                  std::to_string(M[r].size()) + " entries, expected " +
                                  std::to_string(n));
  }
  return M;
}

// ---- bound report tables ------------------------------------------------------------

inline constexpr const char* kBoundCsvHeader =
    "theorem,variant,n,m,C_A,C_v,C_c,K,L,n_max,bound,measured,pass,num_tuples,seed,"
    "hypothesis_ok";

inline std::string bound_report_csv_row(const BoundReport& r) {
  std::string out;
  out += theorem_name(r.theorem);
  out += ',';
  if (r.variant) out += variant_name(*r.variant);
  const BoundConstants& c = r.constants;
  out += ',' + std::to_string(c.n) + ',' + std::to_string(c.m);
  out += ',' + format_double(c.C_A) + ',' + format_double(c.C_v) + ',' + format_double(c.C_c);
  out += ',' + std::to_string(c.K) + ',' + std::to_string(c.L) + ',' + std::to_string(c.n_max);
  out += ',' + format_double(r.bound_value);
  out += ',';
  if (r.measured) out += format_double(*r.measured);
  out += ',';
  if (r.pass) out += *r.pass ? "true" : "false";
  out += ',' + std::to_string(r.num_tuples) + ',' + std::to_string(r.seed);
  out += r.hypothesis_ok ? ",true" : ",false";
  return out;
}

inline std::string bound_reports_to_csv(const std::vector<BoundReport>& rows) {
  std::string out = kBoundCsvHeader;
  out += '\n';
  for (const BoundReport& r : rows) {
    out += bound_report_csv_row(r);
    out += '\n';
  }
  return out;
}

inline nlohmann::json bound_report_to_json(const BoundReport& r) {
  nlohmann::json j;
  j["theorem"] = theorem_name(r.theorem);
  j["variant"] = r.variant ? nlohmann::json(variant_name(*r.variant)) : nlohmann::json(nullptr);
  j["constants"] = {{"C_A", r.constants.C_A},   {"C_v", r.constants.C_v},
                    {"C_c", r.constants.C_c},   {"K", r.constants.K},
                    {"L", r.constants.L},       {"n_max", r.constants.n_max},
                    {"n", r.constants.n},       {"m", r.constants.m}};
  j["bound"] = r.bound_value;
  j["measured"] = r.measured ? nlohmann::json(*r.measured) : nlohmann::json(nullptr);
  j["pass"] = r.pass ? nlohmann::json(*r.pass) : nlohmann::json(nullptr);
  j["hypothesis_ok"] = r.hypothesis_ok;
  j["num_tuples"] = r.num_tuples;
  j["seed"] = r.seed;
  return j;
}

inline nlohmann::json bound_reports_to_json(const std::vector<BoundReport>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const BoundReport& r : rows) arr.push_back(bound_report_to_json(r));
  return arr;
}

}  // namespace graphop
