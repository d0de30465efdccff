#pragma once

// Parameter sweeps over the clock model and Monte Carlo estimation
// experiments. Rows are computed concurrently but always stored in
// axis-major, series-minor order, so output never depends on scheduling.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "gqclock/clock_model.hpp"
#include "gqclock/error.hpp"
#include "gqclock/estimation.hpp"
#include "gqclock/format.hpp"
#include "gqclock/metrology.hpp"
#include "gqclock/protocol.hpp"
#include "gqclock/qops.hpp"

namespace gqclock {

enum class SweepKind { probability, qfi, entanglement };

// delta is delta_p for probability/QFI sweeps and the evolution time t for
// entanglement sweeps.
enum class Parameter { eps1, eps2, xi, delta };

inline const char* to_string(SweepKind kind) {
  switch (kind) {
    case SweepKind::probability: return "probability";
    case SweepKind::qfi: return "qfi";
    case SweepKind::entanglement: return "entanglement";
  }
  return "?";
}

inline const char* to_string(Parameter p) {
  switch (p) {
    case Parameter::eps1: return "eps1";
    case Parameter::eps2: return "eps2";
    case Parameter::xi: return "xi";
    case Parameter::delta: return "delta_p";
  }
  return "?";
}

inline SweepKind parse_sweep_kind(const std::string& name) {
  if (name == "probability") return SweepKind::probability;
  if (name == "qfi") return SweepKind::qfi;
  if (name == "entanglement") return SweepKind::entanglement;
  throw InvalidArgument("unknown sweep kind '" + name + "'");
}

inline Parameter parse_parameter(const std::string& name) {
  if (name == "eps1" || name == "epsilon1") return Parameter::eps1;
  if (name == "eps2" || name == "epsilon2") return Parameter::eps2;
  if (name == "xi") return Parameter::xi;
  if (name == "delta_p" || name == "t") return Parameter::delta;
  throw InvalidArgument("unknown sweep parameter '" + name + "'");
}

struct Axis {
  Parameter parameter;
  double lo;
  double hi;
  double step;
};

struct Series {
  Parameter parameter;
  std::vector<double> values;
};

struct SweepSpec {
  SweepKind kind;
  std::map<Parameter, double> fixed;
  Axis axis;
  Series series;
  double delta_p;                   // used unless delta is the axis or series
  std::optional<double> qfi_step;  // finite-difference step override
};

struct SweepOptions {
  std::uint64_t seed = 0;  // echoed in metadata; sweeps are deterministic
  unsigned threads = 0;    // 0 = hardware concurrency
};

struct SweepTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, std::string>> meta;
};

inline SweepSpec default_probability_sweep() {
  const double pi = std::numbers::pi;
  return {SweepKind::probability, {{Parameter::eps2, 10.0}}, {Parameter::eps1, 0.0, 20.0, 0.01},
          {Parameter::xi, {1.0, 2.0, 10.0}}, pi / 5.0, std::nullopt};
}

inline SweepSpec default_qfi_sweep() {
  const double pi = std::numbers::pi;
  return {SweepKind::qfi, {{Parameter::eps1, 10.0}}, {Parameter::eps2, 1.0, 20.0, 0.01},
          {Parameter::xi, {1.0, 10.0, 100.0}}, pi / 5.0, std::nullopt};
}

inline SweepSpec default_entanglement_sweep() {
  return {SweepKind::entanglement, {{Parameter::eps1, 10.0}, {Parameter::eps2, 10.0}},
          {Parameter::delta, 0.0, 2.0, 0.005}, {Parameter::xi, {10.0, 20.0, 100.0}}, 0.0,
          std::nullopt};
}

inline SweepSpec default_sweep(SweepKind kind) {
  switch (kind) {
    case SweepKind::probability: return default_probability_sweep();
    case SweepKind::qfi: return default_qfi_sweep();
    case SweepKind::entanglement: return default_entanglement_sweep();
  }
  throw InvalidArgument("unknown sweep kind");
}

inline std::size_t axis_point_count(const Axis& axis) {
  return static_cast<std::size_t>(std::floor((axis.hi - axis.lo) / axis.step + 1e-9)) + 1;
}

inline double axis_value(const Axis& axis, std::size_t i) {
  return axis.lo + static_cast<double>(i) * axis.step;
}

inline void validate(const SweepSpec& spec) {
  const Axis& a = spec.axis;
  detail::require(std::isfinite(a.step) && a.step > 0.0, "sweep step must be > 0");
  detail::require(std::isfinite(a.lo) && std::isfinite(a.hi) && a.lo < a.hi,
                  "sweep range must satisfy lo < hi");
  detail::require(!spec.fixed.contains(a.parameter), "axis parameter must not also be fixed");
  detail::require(!spec.series.values.empty(), "sweep needs at least one series value");
  detail::require(spec.series.parameter != a.parameter, "series and axis parameter must differ");
  detail::require(!spec.fixed.contains(spec.series.parameter),
                  "series parameter must not also be fixed");
  for (Parameter p : {Parameter::eps1, Parameter::eps2, Parameter::xi}) {
    detail::require(p == a.parameter || p == spec.series.parameter || spec.fixed.contains(p),
                    std::string("sweep leaves '") + to_string(p) + "' unset");
  }
  detail::require(spec.fixed.find(Parameter::delta) == spec.fixed.end(),
                  "set delta_p through the sweep's delta_p field");
  detail::require(std::isfinite(spec.delta_p), "sweep delta_p must be finite");
  detail::require(axis_point_count(a) <= 10'000'000, "sweep axis has too many points");
}

// Canonical one-line description; hashed into the table's config_hash.
inline std::string describe(const SweepSpec& spec) {
  std::string out = std::string("kind=") + to_string(spec.kind) + ";axis=" +
                    to_string(spec.axis.parameter) + "[" + format_double(spec.axis.lo) + ":" +
                    format_double(spec.axis.hi) + ":" + format_double(spec.axis.step) +
                    "];series=" + to_string(spec.series.parameter) + "{";
  for (std::size_t i = 0; i < spec.series.values.size(); ++i) {
    if (i) out += ",";
    out += format_double(spec.series.values[i]);
  }
  out += "};fixed={";
  bool first = true;
  for (const auto& [p, v] : spec.fixed) {
    if (!first) out += ",";
    first = false;
    out += std::string(to_string(p)) + "=" + format_double(v);
  }
  out += "};delta_p=" + format_double(spec.delta_p);
  if (spec.qfi_step) out += ";qfi_step=" + format_double(*spec.qfi_step);
  return out;
}

namespace detail {

inline unsigned resolve_threads(unsigned requested, std::size_t work) {
  unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(work, 1)));
}

// Runs body(i) for i in [0, count) on `threads` workers with a static
// interleaved schedule. The exception of the lowest failing index wins.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
  threads = resolve_threads(threads, count);
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::size_t> error_index(threads, count);
  auto worker = [&](unsigned w) {
    for (std::size_t i = w; i < count; i += threads) {
      try {
        body(i);
      } catch (...) {
        errors[w] = std::current_exception();
        error_index[w] = i;
        return;
      }
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker, w);
  }
  const auto first = std::min_element(error_index.begin(), error_index.end());
  if (*first < count) std::rethrow_exception(errors[static_cast<std::size_t>(first - error_index.begin())]);
}

struct SweepPoint {
  ClockParams params;
  double delta;
};

inline SweepPoint point_at(const SweepSpec& spec, double axis_value, double series_value) {
  double values[4] = {0.0, 0.0, 0.0, spec.delta_p};
  for (const auto& [p, v] : spec.fixed) values[static_cast<int>(p)] = v;
  values[static_cast<int>(spec.axis.parameter)] = axis_value;
  values[static_cast<int>(spec.series.parameter)] = series_value;
  return {{values[0], values[1], values[2]}, values[3]};
}

template <class RowFn>
SweepTable run_sweep(const SweepSpec& spec, SweepKind expected, std::vector<std::string> header,
                     const SweepOptions& options, RowFn&& row_fn) {
  detail::require(spec.kind == expected, std::string("sweep kind must be ") + to_string(expected));
  validate(spec);
  const std::size_t points = axis_point_count(spec.axis);
  const std::size_t series = spec.series.values.size();
  SweepTable table;
  table.header = std::move(header);
  table.rows.resize(points * series);
  parallel_for(points * series, options.threads, [&](std::size_t index) {
    const SweepPoint pt =
        point_at(spec, axis_value(spec.axis, index / series), spec.series.values[index % series]);
    validate(pt.params);
    std::vector<double> row = row_fn(pt);
    for (double v : row) {
      if (!std::isfinite(v)) {
        throw NumericalFailure("non-finite value in sweep row " + std::to_string(index));
      }
    }
    table.rows[index] = std::move(row);
  });
  const std::string config = describe(spec);
  table.meta = {{"tool_version", std::string(kToolVersion)},
                {"kind", to_string(spec.kind)},
                {"config", config},
                {"config_hash", digest(config)},
                {"seed", std::to_string(options.seed)}};
  return table;
}

}  // namespace detail

/// Columns (epsilon1, xi, epsilon2, delta_p, p_plus, p_minus).
inline SweepTable run_probability_sweep(const SweepSpec& spec, const SweepOptions& options = {}) {
  return detail::run_sweep(
      spec, SweepKind::probability, {"epsilon1", "xi", "epsilon2", "delta_p", "p_plus", "p_minus"},
      options, [](const detail::SweepPoint& pt) {
        const BobProbabilities p = bob_probabilities(pt.params, pt.delta);
        return std::vector<double>{pt.params.eps1, pt.params.xi, pt.params.eps2, pt.delta, p.plus,
                                   p.minus};
      });
}

/// Columns (epsilon2, xi, epsilon1, delta_p, qfi_numerical, qfi_closed_form,
/// classical_fisher, discrepancy_flag). The flag is 0 or 1.
inline SweepTable run_qfi_sweep(const SweepSpec& spec, const SweepOptions& options = {}) {
  return detail::run_sweep(
      spec, SweepKind::qfi,
      {"epsilon2", "xi", "epsilon1", "delta_p", "qfi_numerical", "qfi_closed_form",
       "classical_fisher", "discrepancy_flag"},
      options, [&spec](const detail::SweepPoint& pt) {
        const MetrologyReport r = metrology_report(pt.params, pt.delta, 1, spec.qfi_step);
        return std::vector<double>{pt.params.eps2,  pt.params.xi,    pt.params.eps1,
                                   pt.delta,        r.qfi_numerical, r.qfi_closed_form,
                                   r.classical_fisher, r.discrepancy_flag ? 1.0 : 0.0};
      });
}

/// Columns (t, epsilon1, epsilon2, xi, concurrence, concurrence_closed_form,
/// purity_b): entanglement of the evolved joint state.
inline SweepTable run_entanglement_sweep(const SweepSpec& spec, const SweepOptions& options = {}) {
  return detail::run_sweep(
      spec, SweepKind::entanglement,
      {"t", "epsilon1", "epsilon2", "xi", "concurrence", "concurrence_closed_form", "purity_b"},
      options, [](const detail::SweepPoint& pt) {
        const PairState state = joint_state(pt.params, pt.delta);
        return std::vector<double>{pt.delta,
                                   pt.params.eps1,
                                   pt.params.eps2,
                                   pt.params.xi,
                                   concurrence(state),
                                   concurrence_closed_form(pt.params, pt.delta),
                                   reduced_density(state, Subsystem::second).purity()};
      });
}

inline SweepTable run_sweep(const SweepSpec& spec, const SweepOptions& options = {}) {
  switch (spec.kind) {
    case SweepKind::probability: return run_probability_sweep(spec, options);
    case SweepKind::qfi: return run_qfi_sweep(spec, options);
    case SweepKind::entanglement: return run_entanglement_sweep(spec, options);
  }
  throw InvalidArgument("unknown sweep kind");
}

// CSV: '#'-prefixed "key=value" metadata, header row, shortest round-trip numbers.
inline void write_csv(std::ostream& out, const SweepTable& table) {
  for (const auto& [key, value] : table.meta) out << "# " << key << "=" << value << "\n";
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    out << (i ? "," : "") << table.header[i];
  }
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << "\n";
  }
}

// ---------------------------------------------------------------------------
// Monte Carlo estimation experiments

struct ExperimentSpec {
  ClockParams params;
  double delta_p = 0.0;
  std::uint64_t n = 1000;
  std::uint64_t replicates = 1;
  std::uint64_t base_seed = 0;
  std::optional<Window> window;  // default_window(params) when unset
  EstimatorOptions estimator;
};

struct ReplicateResult {
  std::uint64_t replicate;
  std::uint64_t seed;
  std::uint64_t k_plus;
  double delta_hat;
  double log_likelihood;
};

struct ExperimentReport {
  ExperimentSpec spec;
  Window window;
  std::string config_hash;
  std::vector<ReplicateResult> replicates;
  double mean;
  double variance;         // unbiased; 0 for a single replicate
  double standard_error;   // sqrt(variance / replicates)
  double bias;             // mean - delta_p
  double bias_in_standard_errors;
  double fisher_classical;
  double fisher_quantum;
  double cr_variance_classical;  // 1/(n F_c) at the true delta_p
  double cr_variance_quantum;    // 1/(n F_Q)
  double variance_ratio_classical;
  double variance_ratio_quantum;
  double coverage_1sigma;  // fraction with |delta_hat - delta_p| <= k sqrt(cr_variance_classical)
  double coverage_2sigma;
  double coverage_3sigma;
};

inline std::string describe(const ExperimentSpec& spec, const Window& window) {
  return "eps1=" + format_double(spec.params.eps1) + ";eps2=" + format_double(spec.params.eps2) +
         ";xi=" + format_double(spec.params.xi) + ";delta_p=" + format_double(spec.delta_p) +
         ";n=" + std::to_string(spec.n) + ";replicates=" + std::to_string(spec.replicates) +
         ";base_seed=" + std::to_string(spec.base_seed) + ";window=[" +
         format_double(window.lo) + "," + format_double(window.hi) +
         "];grid_points=" + std::to_string(spec.estimator.grid_points) +
         ";relative_tolerance=" + format_double(spec.estimator.relative_tolerance);
}

inline ExperimentReport run_estimation_experiment(const ExperimentSpec& spec,
                                                  unsigned threads = 0) {
  validate(spec.params);
  detail::require(spec.replicates >= 1, "replicates must be >= 1");
  detail::require(spec.n >= 1, "n must be >= 1");
  detail::require(std::isfinite(spec.delta_p), "delta_p must be finite");
  const Window window = spec.window.value_or(default_window(spec.params));
  detail::require(std::isfinite(window.lo) && std::isfinite(window.hi) && window.lo < window.hi,
                  "estimation window must satisfy lo < hi");

  ExperimentReport report{};
  report.spec = spec;
  report.window = window;
  report.config_hash = digest(describe(spec, window));
  report.replicates.resize(spec.replicates);
  detail::parallel_for(spec.replicates, threads, [&](std::size_t r) {
    const std::uint64_t seed = replicate_seed(spec.base_seed, r);
    const MeasurementRecord rec = sample_outcomes(spec.params, spec.delta_p, spec.n, seed);
    const EstimateReport est = estimate_delta(rec, spec.params, window, spec.estimator);
    report.replicates[r] = {r, seed, rec.k_plus, est.delta_hat, est.log_likelihood};
  });

  const double count = static_cast<double>(spec.replicates);
  double sum = 0.0;
  for (const auto& r : report.replicates) sum += r.delta_hat;
  report.mean = sum / count;
  double ss = 0.0;
  for (const auto& r : report.replicates) ss += (r.delta_hat - report.mean) * (r.delta_hat - report.mean);
  report.variance = spec.replicates > 1 ? ss / (count - 1.0) : 0.0;
  report.standard_error = std::sqrt(report.variance / count);
  report.bias = report.mean - spec.delta_p;
  if (report.standard_error > 0.0) {
    report.bias_in_standard_errors = std::abs(report.bias) / report.standard_error;
  } else {
    report.bias_in_standard_errors =
        report.bias == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }

  const double n = static_cast<double>(spec.n);
  report.fisher_classical = classical_fisher(spec.params, spec.delta_p);
  report.fisher_quantum = qfi_numerical(spec.params, spec.delta_p);
  const double inf = std::numeric_limits<double>::infinity();
  report.cr_variance_classical = report.fisher_classical > 0.0 ? 1.0 / (n * report.fisher_classical) : inf;
  report.cr_variance_quantum = report.fisher_quantum > 0.0 ? 1.0 / (n * report.fisher_quantum) : inf;
  report.variance_ratio_classical = report.variance / report.cr_variance_classical;
  report.variance_ratio_quantum = report.variance / report.cr_variance_quantum;

  const double sigma = std::sqrt(report.cr_variance_classical);
  std::uint64_t within[3] = {0, 0, 0};
  for (const auto& r : report.replicates) {
    const double err = std::abs(r.delta_hat - spec.delta_p);
    for (int k = 0; k < 3; ++k) {
      if (err <= (k + 1) * sigma) ++within[k];
    }
  }
  report.coverage_1sigma = static_cast<double>(within[0]) / count;
  report.coverage_2sigma = static_cast<double>(within[1]) / count;
  report.coverage_3sigma = static_cast<double>(within[2]) / count;
  return report;
}

}  // namespace gqclock
