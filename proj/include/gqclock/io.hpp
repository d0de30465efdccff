#pragma once

// JSON serialization of reports and tables, and the JSON configuration file.
//
// Configuration layout (every section optional):
//   {
//     "constants":  {"G": .., "c": .., "hbar": ..},
//     "params":     {"eps1": .., "eps2": .., "xi": ..},
//     "si_params":  {"delta_e1_J": .., "delta_e2_J": .., "x_m": ..},
//     "delta_p": ..,  or  "delta_s": ..,
//     "sweep":      {"kind": .., "axis": {"name","lo","hi","step"},
//                    "series": {"name","values"}, "fixed": {name: value},
//                    "delta_p": .., "qfi_step": ..},
//     "estimate":   {"delta_p", "n", "replicates", "base_seed", "window": [lo, hi],
//                    "grid_points", "relative_tolerance"},
//     "metrology":  {"n", "step"}
//   }

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "gqclock/error.hpp"
#include "gqclock/estimation.hpp"
#include "gqclock/format.hpp"
#include "gqclock/metrology.hpp"
#include "gqclock/protocol.hpp"
#include "gqclock/sweep.hpp"
#include "gqclock/units.hpp"

namespace gqclock {

using Json = nlohmann::json;

// Non-finite doubles serialize as null.
inline Json finite_or_null(double value) {
  return std::isfinite(value) ? Json(value) : Json(nullptr);
}

inline Json to_json(const ClockParams& p) {
  return {{"eps1", p.eps1}, {"eps2", p.eps2}, {"xi", p.xi}};
}

inline Json to_json(const MeasurementRecord& rec) {
  return {{"n", rec.n}, {"k_plus", rec.k_plus}, {"seed", rec.seed}, {"config_hash", rec.config_hash}};
}

inline MeasurementRecord measurement_record_from_json(const Json& j) {
  try {
    MeasurementRecord rec{j.at("n").get<std::uint64_t>(), j.at("k_plus").get<std::uint64_t>(),
                          j.at("seed").get<std::uint64_t>(), j.at("config_hash").get<std::string>()};
    detail::require(rec.k_plus <= rec.n, "k_plus exceeds n");
    return rec;
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("malformed measurement record: ") + e.what());
  }
}

inline Json to_json(const EstimateReport& r) {
  return {{"delta_hat", r.delta_hat},
          {"window", {r.window.lo, r.window.hi}},
          {"log_likelihood", finite_or_null(r.log_likelihood)},
          {"stderr_cr", finite_or_null(r.stderr_cr)},
          {"grid_step", r.grid_step}};
}

inline Json to_json(const MetrologyReport& r) {
  return {{"qfi_numerical", r.qfi_numerical},
          {"qfi_closed_form", r.qfi_closed_form},
          {"classical_fisher", r.classical_fisher},
          {"delta_precision", finite_or_null(r.delta_precision)},
          {"discrepancy_flag", r.discrepancy_flag},
          {"n", r.n}};
}

inline Json to_json(const ModeComparison& m) {
  return {{"paper", {{"conditioning_probability", m.paper_conditioning_probability},
                     {"p_plus", m.paper_p_plus}}},
          {"full", {{"conditioning_probability", m.full_conditioning_probability},
                    {"p_plus", m.full_p_plus}}},
          {"state_fidelity", m.state_fidelity}};
}

inline Json to_json(const SweepTable& table) {
  Json meta = Json::object();
  for (const auto& [key, value] : table.meta) meta[key] = value;
  Json rows = Json::array();
  for (const auto& row : table.rows) {
    Json r = Json::array();
    for (double v : row) r.push_back(finite_or_null(v));
    rows.push_back(std::move(r));
  }
  return {{"meta", meta}, {"header", table.header}, {"rows", rows}};
}

inline Json to_json(const ExperimentReport& r) {
  Json reps = Json::array();
  for (const auto& rep : r.replicates) {
    reps.push_back({{"replicate", rep.replicate},
                    {"seed", rep.seed},
                    {"k_plus", rep.k_plus},
                    {"delta_hat", rep.delta_hat},
                    {"log_likelihood", finite_or_null(rep.log_likelihood)}});
  }
  return {{"meta", {{"tool_version", std::string(kToolVersion)},
                    {"config_hash", r.config_hash},
                    {"seed", r.spec.base_seed}}},
          {"params", to_json(r.spec.params)},
          {"delta_p", r.spec.delta_p},
          {"n", r.spec.n},
          {"window", {r.window.lo, r.window.hi}},
          {"replicates", reps},
          {"summary",
           {{"mean", r.mean},
            {"variance", r.variance},
            {"standard_error", r.standard_error},
            {"bias", r.bias},
            {"bias_in_standard_errors", finite_or_null(r.bias_in_standard_errors)},
            {"fisher_classical", r.fisher_classical},
            {"fisher_quantum", r.fisher_quantum},
            {"cr_variance_classical", finite_or_null(r.cr_variance_classical)},
            {"cr_variance_quantum", finite_or_null(r.cr_variance_quantum)},
            {"variance_ratio_classical", finite_or_null(r.variance_ratio_classical)},
            {"variance_ratio_quantum", finite_or_null(r.variance_ratio_quantum)},
            {"coverage_1sigma", r.coverage_1sigma},
            {"coverage_2sigma", r.coverage_2sigma},
            {"coverage_3sigma", r.coverage_3sigma}}}};
}

// ---------------------------------------------------------------------------
// Configuration

struct Config {
  PhysicalConstants constants = PhysicalConstants::codata2018();
  std::optional<ClockParams> params;
  std::optional<double> delta_p;
  Json sweep = Json::object();
  Json estimate = Json::object();
  Json metrology = Json::object();
  std::string canonical;  // sorted-key dump of the source document
};

namespace detail {

inline void reject_unknown_keys(const Json& object, const std::set<std::string>& allowed,
                                const std::string& where) {
  require(object.is_object(), where + " must be a JSON object");
  for (const auto& item : object.items()) {
    require(allowed.contains(item.key()), "unknown key '" + item.key() + "' in " + where);
  }
}

inline double number_at(const Json& object, const char* key) {
  const Json& v = object.at(key);
  require(v.is_number(), std::string("'") + key + "' must be a number");
  return v.get<double>();
}

}  // namespace detail

inline Config parse_config(const Json& doc) {
  try {
    detail::reject_unknown_keys(doc,
                                {"constants", "params", "si_params", "delta_p", "delta_s",
                                 "sweep", "estimate", "metrology"},
                                "config");
    Config cfg;
    cfg.canonical = doc.dump();
    if (doc.contains("constants")) {
      const Json& k = doc["constants"];
      detail::reject_unknown_keys(k, {"G", "c", "hbar"}, "constants");
      if (k.contains("G")) cfg.constants.G = detail::number_at(k, "G");
      if (k.contains("c")) cfg.constants.c = detail::number_at(k, "c");
      if (k.contains("hbar")) cfg.constants.hbar = detail::number_at(k, "hbar");
      validate(cfg.constants);
    }
    detail::require(!(doc.contains("params") && doc.contains("si_params")),
                    "give either params or si_params, not both");
    if (doc.contains("params")) {
      const Json& p = doc["params"];
      detail::reject_unknown_keys(p, {"eps1", "eps2", "xi"}, "params");
      ClockParams params{detail::number_at(p, "eps1"), detail::number_at(p, "eps2"),
                         detail::number_at(p, "xi")};
      validate(params);
      cfg.params = params;
    } else if (doc.contains("si_params")) {
      const Json& s = doc["si_params"];
      detail::reject_unknown_keys(s, {"delta_e1_J", "delta_e2_J", "x_m"}, "si_params");
      cfg.params = to_dimensionless({detail::number_at(s, "delta_e1_J"),
                                     detail::number_at(s, "delta_e2_J"), detail::number_at(s, "x_m")},
                                    cfg.constants);
    }
    detail::require(!(doc.contains("delta_p") && doc.contains("delta_s")),
                    "give either delta_p or delta_s, not both");
    if (doc.contains("delta_p")) cfg.delta_p = detail::number_at(doc, "delta_p");
    if (doc.contains("delta_s")) {
      cfg.delta_p = seconds_to_planck_time(detail::number_at(doc, "delta_s"), cfg.constants);
    }
    if (doc.contains("sweep")) {
      cfg.sweep = doc["sweep"];
      detail::reject_unknown_keys(cfg.sweep,
                                  {"kind", "axis", "series", "fixed", "delta_p", "qfi_step"},
                                  "sweep");
    }
    if (doc.contains("estimate")) {
      cfg.estimate = doc["estimate"];
      detail::reject_unknown_keys(cfg.estimate,
                                  {"delta_p", "n", "replicates", "base_seed", "window",
                                   "grid_points", "relative_tolerance"},
                                  "estimate");
    }
    if (doc.contains("metrology")) {
      cfg.metrology = doc["metrology"];
      detail::reject_unknown_keys(cfg.metrology, {"n", "step"}, "metrology");
    }
    return cfg;
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::exception& e) {
    throw InvalidArgument("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

// Default sweep for `kind`, overridden field by field from the config's
// "sweep" section.
inline SweepSpec sweep_spec_from(const Config& cfg, SweepKind kind) {
  try {
    const Json& s = cfg.sweep;
    if (s.contains("kind")) {
      detail::require(parse_sweep_kind(s["kind"].get<std::string>()) == kind,
                      std::string("config sweep.kind does not match the ") + to_string(kind) +
                          " command");
    }
    SweepSpec spec = default_sweep(kind);
    if (s.contains("axis")) {
      const Json& a = s["axis"];
      detail::reject_unknown_keys(a, {"name", "lo", "hi", "step"}, "sweep.axis");
      spec.axis = {parse_parameter(a.at("name").get<std::string>()), detail::number_at(a, "lo"),
                   detail::number_at(a, "hi"), detail::number_at(a, "step")};
    }
    if (s.contains("series")) {
      const Json& se = s["series"];
      detail::reject_unknown_keys(se, {"name", "values"}, "sweep.series");
      spec.series = {parse_parameter(se.at("name").get<std::string>()),
                     se.at("values").get<std::vector<double>>()};
    }
    if (s.contains("fixed")) {
      spec.fixed.clear();
      for (const auto& item : s["fixed"].items()) {
        detail::require(item.value().is_number(), "sweep.fixed values must be numbers");
        spec.fixed[parse_parameter(item.key())] = item.value().get<double>();
      }
    }
    if (s.contains("delta_p")) spec.delta_p = detail::number_at(s, "delta_p");
    if (s.contains("qfi_step")) spec.qfi_step = detail::number_at(s, "qfi_step");
    validate(spec);
    return spec;
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("config sweep: ") + e.what());
  }
}

inline ExperimentSpec experiment_spec_from(const Config& cfg) {
  try {
    const Json& e = cfg.estimate;
    ExperimentSpec spec;
    spec.params = cfg.params.value_or(ClockParams{10.0, 10.0, 20.0});
    spec.delta_p = cfg.delta_p.value_or(std::numbers::pi / 10.0);
    spec.n = 100000;
    spec.replicates = 200;
    spec.base_seed = 0;
    if (e.contains("delta_p")) spec.delta_p = detail::number_at(e, "delta_p");
    if (e.contains("n")) spec.n = e["n"].get<std::uint64_t>();
    if (e.contains("replicates")) spec.replicates = e["replicates"].get<std::uint64_t>();
    if (e.contains("base_seed")) spec.base_seed = e["base_seed"].get<std::uint64_t>();
    if (e.contains("window")) {
      const auto w = e["window"].get<std::vector<double>>();
      detail::require(w.size() == 2, "estimate.window must be [lo, hi]");
      spec.window = Window{w[0], w[1]};
    }
    if (e.contains("grid_points")) spec.estimator.grid_points = e["grid_points"].get<std::size_t>();
    if (e.contains("relative_tolerance")) {
      spec.estimator.relative_tolerance = detail::number_at(e, "relative_tolerance");
    }
    return spec;
  } catch (const Json::exception& ex) {
    throw InvalidArgument(std::string("config estimate: ") + ex.what());
  }
}

}  // namespace gqclock
