// gqclock: command-line front end for the two-clock model.
//
//   gqclock prob        single-point probabilities, conditioning modes, Fisher information
//   gqclock prob-sweep  P(+/-) table over a parameter grid
//   gqclock qfi-sweep   QFI / classical FI table over a parameter grid
//   gqclock entangle    concurrence of the evolved joint state over time
//   gqclock estimate    Monte Carlo maximum-likelihood estimation experiment
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "gqclock/gqclock.hpp"

namespace {

using namespace gqclock;

constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

struct CommonOptions {
  std::string config_path;
  std::string out_path;
  std::string format;
  std::uint64_t seed = 0;
  bool seed_given = false;
  unsigned threads = 0;
};

struct PointOptions {
  std::optional<double> eps1, eps2, xi, delta_p;
  std::optional<std::uint64_t> n;
};

struct EstimateOptions {
  std::optional<double> delta_p, window_lo, window_hi;
  std::optional<std::uint64_t> n, replicates;
};

Config load(const CommonOptions& common) {
  if (common.config_path.empty()) return parse_config(Json::object());
  return load_config(common.config_path);
}

void emit(const CommonOptions& common, const std::string& text) {
  if (common.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(common.out_path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot open output file '" + common.out_path + "'");
  out << text;
  if (!out) throw InvalidArgument("failed writing '" + common.out_path + "'");
}

std::string resolve_format(const CommonOptions& common, const char* fallback) {
  return common.format.empty() ? std::string(fallback) : common.format;
}

std::string render(const SweepTable& table, const std::string& format) {
  if (format == "json") return to_json(table).dump(2) + "\n";
  std::ostringstream out;
  write_csv(out, table);
  return out.str();
}

void run_sweep_command(const CommonOptions& common, SweepKind kind) {
  const Config cfg = load(common);
  const SweepSpec spec = sweep_spec_from(cfg, kind);
  const SweepTable table = run_sweep(spec, {common.seed, common.threads});
  emit(common, render(table, resolve_format(common, "csv")));
}

void run_prob(const CommonOptions& common, const PointOptions& point) {
  const Config cfg = load(common);
  ClockParams params = cfg.params.value_or(ClockParams{10.0, 10.0, 20.0});
  if (point.eps1) params.eps1 = *point.eps1;
  if (point.eps2) params.eps2 = *point.eps2;
  if (point.xi) params.xi = *point.xi;
  validate(params);
  const double delta_p = point.delta_p.value_or(cfg.delta_p.value_or(0.0));
  std::uint64_t n = cfg.metrology.value("n", std::uint64_t{1});
  if (point.n) n = *point.n;
  std::optional<double> step;
  if (cfg.metrology.contains("step")) step = cfg.metrology["step"].get<double>();

  const BobProbabilities p = bob_probabilities(params, delta_p);
  const ModeComparison modes = compare_modes(params, delta_p);
  const MetrologyReport metrology = metrology_report(params, delta_p, n, step);
  const DerivedCouplings couplings = derived_couplings(params);
  const std::string config = "eps1=" + format_double(params.eps1) +
                             ";eps2=" + format_double(params.eps2) +
                             ";xi=" + format_double(params.xi) +
                             ";delta_p=" + format_double(delta_p) + ";n=" + std::to_string(n);
  const std::string hash = digest(config);

  if (resolve_format(common, "json") == "json") {
    Json out = {{"meta", {{"tool_version", std::string(kToolVersion)},
                          {"config_hash", hash},
                          {"seed", common.seed}}},
                {"params", to_json(params)},
                {"delta_p", delta_p},
                {"zeta_prime", couplings.zeta_prime},
                {"eps2_prime", couplings.eps2_prime},
                {"p_plus", p.plus},
                {"p_minus", p.minus},
                {"modes", to_json(modes)},
                {"metrology", to_json(metrology)}};
    emit(common, out.dump(2) + "\n");
    return;
  }
  SweepTable row;
  row.header = {"epsilon1", "xi", "epsilon2", "delta_p", "p_plus", "p_minus",
                "full_p_plus", "full_conditioning_probability", "mode_fidelity",
                "qfi_numerical", "qfi_closed_form", "classical_fisher", "delta_precision",
                "discrepancy_flag"};
  row.rows = {{params.eps1, params.xi, params.eps2, delta_p, p.plus, p.minus, modes.full_p_plus,
               modes.full_conditioning_probability, modes.state_fidelity, metrology.qfi_numerical,
               metrology.qfi_closed_form, metrology.classical_fisher, metrology.delta_precision,
               metrology.discrepancy_flag ? 1.0 : 0.0}};
  row.meta = {{"tool_version", std::string(kToolVersion)},
              {"config", config},
              {"config_hash", hash},
              {"seed", std::to_string(common.seed)}};
  std::ostringstream out;
  write_csv(out, row);
  emit(common, out.str());
}

void run_estimate(const CommonOptions& common, const EstimateOptions& opts) {
  const Config cfg = load(common);
  ExperimentSpec spec = experiment_spec_from(cfg);
  if (opts.delta_p) spec.delta_p = *opts.delta_p;
  if (opts.n) spec.n = *opts.n;
  if (opts.replicates) spec.replicates = *opts.replicates;
  if (common.seed_given) spec.base_seed = common.seed;
  if (opts.window_lo || opts.window_hi) {
    const Window base = spec.window.value_or(default_window(spec.params));
    spec.window = Window{opts.window_lo.value_or(base.lo), opts.window_hi.value_or(base.hi)};
  }
  const ExperimentReport report = run_estimation_experiment(spec, common.threads);
  if (resolve_format(common, "json") == "json") {
    emit(common, to_json(report).dump(2) + "\n");
    return;
  }
  SweepTable table;
  table.header = {"replicate", "seed", "k_plus", "delta_hat", "log_likelihood"};
  for (const auto& r : report.replicates) {
    table.rows.push_back({static_cast<double>(r.replicate), static_cast<double>(r.seed),
                          static_cast<double>(r.k_plus), r.delta_hat, r.log_likelihood});
  }
  table.meta = {{"tool_version", std::string(kToolVersion)},
                {"config", describe(spec, report.window)},
                {"config_hash", report.config_hash},
                {"seed", std::to_string(spec.base_seed)},
                {"mean", format_double(report.mean)},
                {"variance", format_double(report.variance)},
                {"cr_variance_classical", format_double(report.cr_variance_classical)},
                {"cr_variance_quantum", format_double(report.cr_variance_quantum)}};
  std::ostringstream out;
  write_csv(out, table);
  emit(common, out.str());
}

void add_common(CLI::App* cmd, CommonOptions& common) {
  cmd->add_option("--config", common.config_path, "JSON configuration file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", common.out_path, "Output file (default: stdout)");
  cmd->add_option("--format", common.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option_function<std::uint64_t>(
      "--seed",
      [&common](const std::uint64_t& s) {
        common.seed = s;
        common.seed_given = true;
      },
      "RNG seed (recorded in output metadata)");
  cmd->add_option("--threads", common.threads, "Worker threads (0 = all cores)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two gravitationally coupled quantum clocks: synchronization and estimation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  CommonOptions common;
  PointOptions point;
  EstimateOptions est;

  auto* prob = app.add_subcommand("prob", "Single-point probabilities and Fisher information");
  add_common(prob, common);
  prob->add_option("--eps1", point.eps1, "Energy gap of clock A (Planck units)");
  prob->add_option("--eps2", point.eps2, "Energy gap of clock B (Planck units)");
  prob->add_option("--xi", point.xi, "Clock separation (Planck lengths)");
  prob->add_option("--delta-p", point.delta_p, "Time difference (Planck times)");
  prob->add_option("--n", point.n, "Repetitions for the precision bound");

  auto* prob_sweep = app.add_subcommand("prob-sweep", "Measurement probability sweep");
  add_common(prob_sweep, common);
  auto* qfi_sweep = app.add_subcommand("qfi-sweep", "Fisher information sweep");
  add_common(qfi_sweep, common);
  auto* entangle = app.add_subcommand("entangle", "Entanglement of the joint clock state");
  add_common(entangle, common);

  auto* estimate = app.add_subcommand("estimate", "Maximum-likelihood estimation experiment");
  add_common(estimate, common);
  estimate->add_option("--delta-p", est.delta_p, "True time difference (Planck times)");
  estimate->add_option("--n", est.n, "Shots per replicate");
  estimate->add_option("--replicates", est.replicates, "Number of replicates");
  estimate->add_option("--window-lo", est.window_lo, "Search window lower edge");
  estimate->add_option("--window-hi", est.window_hi, "Search window upper edge");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*prob) run_prob(common, point);
    else if (*prob_sweep) run_sweep_command(common, SweepKind::probability);
    else if (*qfi_sweep) run_sweep_command(common, SweepKind::qfi);
    else if (*entangle) run_sweep_command(common, SweepKind::entanglement);
    else if (*estimate) run_estimate(common, est);
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const ImpossibleConditioning& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const Json::exception& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  }
  return 0;
}
