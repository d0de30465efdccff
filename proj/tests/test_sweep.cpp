#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "gqclock/io.hpp"
#include "gqclock/sweep.hpp"

using namespace gqclock;

namespace {

constexpr double kPi = std::numbers::pi;

SweepSpec probability_spec(double xi) {
  SweepSpec spec = default_probability_sweep();
  spec.series.values = {xi};
  return spec;
}

std::string csv(const SweepTable& table) {
  std::ostringstream out;
  write_csv(out, table);
  return out.str();
}

}  // namespace

TEST(ProbabilitySweep, ShapeAndOrder) {
  const SweepTable t = run_probability_sweep(default_probability_sweep());
  EXPECT_EQ(t.header, (std::vector<std::string>{"epsilon1", "xi", "epsilon2", "delta_p", "p_plus",
                                                "p_minus"}));
  ASSERT_EQ(t.rows.size(), 2001u * 3u);
  // Axis-major, series-minor.
  EXPECT_EQ(t.rows[0][0], 0.0);
  EXPECT_EQ(t.rows[0][1], 1.0);
  EXPECT_EQ(t.rows[1][1], 2.0);
  EXPECT_EQ(t.rows[2][1], 10.0);
  EXPECT_NEAR(t.rows[3][0], 0.01, 1e-15);
  EXPECT_NEAR(t.rows.back()[0], 20.0, 1e-12);
  for (const auto& row : t.rows) {
    EXPECT_EQ(row.size(), 6u);
    EXPECT_NEAR(row[4] + row[5], 1.0, 1e-14);
  }
}

TEST(ProbabilitySweep, ExtremaAtXiTen) {
  const SweepTable t = run_probability_sweep(probability_spec(10.0));
  for (const auto& row : t.rows) {
    const double e1 = row[0];
    for (double peak : {0.0, 10.0, 20.0}) {
      if (std::abs(e1 - peak) < 1e-9) {
        EXPECT_NEAR(row[4], 1.0, 1e-9);
      }
    }
    for (double trough : {5.0, 15.0}) {
      if (std::abs(e1 - trough) < 1e-9) {
        EXPECT_NEAR(row[4], 0.5, 1e-9);
      }
    }
  }
}

TEST(ProbabilitySweep, PeriodEqualsSeparationAtXiOne) {
  const SweepTable t = run_probability_sweep(probability_spec(1.0));
  for (std::size_t i = 0; i + 100 < t.rows.size(); ++i) {
    EXPECT_NEAR(t.rows[i][4], t.rows[i + 100][4], 1e-9);
  }
}

TEST(ProbabilitySweep, FlatLimitRows) {
  SweepSpec spec = probability_spec(1e9);
  spec.axis = {Parameter::delta, 0.0, 2.0 * kPi / 10.0, 0.002};
  spec.fixed = {{Parameter::eps1, 10.0}, {Parameter::eps2, 10.0}};
  const SweepTable t = run_probability_sweep(spec);
  for (const auto& row : t.rows) {
    EXPECT_LT(std::abs(row[4] - (0.5 + 0.5 * std::cos(10.0 * row[3]))), 1e-6);
  }
}

TEST(QfiSweep, XiHundredIsNondecreasingInEps2) {
  SweepSpec spec = default_qfi_sweep();
  spec.series.values = {100.0};
  const SweepTable t = run_qfi_sweep(spec);
  ASSERT_EQ(t.rows.size(), 1901u);
  for (std::size_t i = 1; i < t.rows.size(); ++i) EXPECT_GE(t.rows[i][4], t.rows[i - 1][4]);
}

TEST(QfiSweep, FlagIsTruthfulAndAnchorsHold) {
  SweepSpec spec = default_qfi_sweep();
  spec.axis = {Parameter::eps2, 1.0, 20.0, 0.5};
  const SweepTable t = run_qfi_sweep(spec);
  for (const auto& row : t.rows) {
    const bool disagree = std::abs(row[5] - row[4]) > 1e-6 * std::max(1.0, row[4]);
    EXPECT_EQ(row[7], disagree ? 1.0 : 0.0);
    EXPECT_LE(row[6], row[4] + 1e-9);
  }

  SweepSpec flat = default_qfi_sweep();
  flat.fixed = {{Parameter::eps1, 0.0}};
  flat.axis = {Parameter::eps2, 1.0, 20.0, 1.0};
  for (const auto& row : run_qfi_sweep(flat).rows) EXPECT_NEAR(row[4], row[0] * row[0], 1e-6);
}

TEST(QfiSweep, AgreementRows) {
  // zeta' delta = 2 pi: eps1 = 10, xi = 10, delta = pi/5 forces eps2 = 10.
  SweepSpec spec = default_qfi_sweep();
  spec.series.values = {10.0};
  spec.axis = {Parameter::eps2, 9.0, 11.0, 0.5};
  const SweepTable t = run_qfi_sweep(spec);
  bool seen = false;
  for (const auto& row : t.rows) {
    if (std::abs(row[0] - 10.0) < 1e-12) {
      EXPECT_NEAR(row[5], row[4], 1e-6 * row[4]);
      EXPECT_EQ(row[7], 0.0);
      seen = true;
    }
  }
  EXPECT_TRUE(seen);
}

TEST(QfiSweep, PropagatesNumericalFailure) {
  SweepSpec spec = default_qfi_sweep();
  spec.axis = {Parameter::eps2, 1.0, 2.0, 0.5};
  spec.qfi_step = 0.05;
  EXPECT_THROW(run_qfi_sweep(spec), NumericalFailure);
}

TEST(EntanglementSweep, MatchesClosedForm) {
  const SweepTable t = run_entanglement_sweep(default_entanglement_sweep());
  ASSERT_EQ(t.rows.size(), 401u * 3u);
  for (const auto& row : t.rows) {
    EXPECT_NEAR(row[4], row[5], 1e-12);
    // Pure joint state: purity of a marginal is 1 - C^2/2.
    EXPECT_NEAR(row[6], 1.0 - 0.5 * row[4] * row[4], 1e-12);
  }
}

TEST(SweepSpec, Validation) {
  SweepSpec spec = default_probability_sweep();
  spec.axis.step = 0.0;
  EXPECT_THROW(validate(spec), InvalidArgument);
  spec = default_probability_sweep();
  spec.axis.hi = spec.axis.lo;
  EXPECT_THROW(validate(spec), InvalidArgument);
  spec = default_probability_sweep();
  spec.fixed[Parameter::eps1] = 1.0;
  EXPECT_THROW(validate(spec), InvalidArgument);
  spec = default_probability_sweep();
  spec.series.values.clear();
  EXPECT_THROW(validate(spec), InvalidArgument);
  EXPECT_THROW(run_qfi_sweep(default_probability_sweep()), InvalidArgument);
  spec = default_probability_sweep();
  spec.series.values = {0.0};
  EXPECT_THROW(run_probability_sweep(spec), InvalidArgument);
}

TEST(SweepDeterminism, ThreadCountDoesNotChangeOutput) {
  SweepSpec spec = default_qfi_sweep();
  spec.axis.step = 0.1;
  const std::string one = csv(run_qfi_sweep(spec, {7, 1}));
  EXPECT_EQ(one, csv(run_qfi_sweep(spec, {7, 4})));
  EXPECT_EQ(one, csv(run_qfi_sweep(spec, {7, 13})));
  EXPECT_NE(one, csv(run_qfi_sweep(spec, {8, 4})));
}

TEST(WriteCsv, Format) {
  SweepSpec spec = default_probability_sweep();
  spec.axis = {Parameter::eps1, 0.0, 0.1, 0.1};
  spec.series.values = {10.0};
  const std::string text = csv(run_probability_sweep(spec, {5, 1}));
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 5u + 1u + 2u);
  EXPECT_EQ(lines[0], "# tool_version=" + std::string(kToolVersion));
  EXPECT_EQ(lines[1], "# kind=probability");
  EXPECT_EQ(lines[3].rfind("# config_hash=", 0), 0u);
  EXPECT_EQ(lines[4], "# seed=5");
  EXPECT_EQ(lines[5], "epsilon1,xi,epsilon2,delta_p,p_plus,p_minus");
  EXPECT_EQ(lines[6].rfind("0,10,10,0.6283185307179586,1,", 0), 0u);
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.0 / 3.0), "0.3333333333333333");
}

TEST(Experiment, ZeroDelayGivesZeroEstimates) {
  ExperimentSpec spec{{10.0, 10.0, 20.0}, 0.0, 1000, 10, 3, std::nullopt, {}};
  const ExperimentReport r = run_estimation_experiment(spec, 2);
  ASSERT_EQ(r.replicates.size(), 10u);
  for (const auto& rep : r.replicates) {
    EXPECT_EQ(rep.delta_hat, 0.0);
    EXPECT_EQ(rep.k_plus, 1000u);
  }
  EXPECT_EQ(r.variance, 0.0);
  EXPECT_EQ(r.bias, 0.0);
}

TEST(Experiment, EfficientAndUnbiasedNearPiOverTen) {
  ExperimentSpec spec{{10.0, 10.0, 20.0}, kPi / 10.0, 100000, 200, 11, Window{0.0, 0.35}, {}};
  const ExperimentReport r = run_estimation_experiment(spec);
  EXPECT_NEAR(r.fisher_classical, 320.0 / 9.0, 1e-9);
  EXPECT_GE(r.variance_ratio_classical, 0.8);
  EXPECT_LE(r.variance_ratio_classical, 1.5);
  EXPECT_LT(r.bias_in_standard_errors, 3.0);
  EXPECT_GE(r.coverage_3sigma, 0.97);
}

TEST(Experiment, ThreadCountDoesNotChangeReport) {
  ExperimentSpec spec{{10.0, 10.0, 20.0}, kPi / 10.0, 2000, 16, 5, Window{0.0, 0.35}, {}};
  EXPECT_EQ(to_json(run_estimation_experiment(spec, 1)).dump(),
            to_json(run_estimation_experiment(spec, 5)).dump());
}

TEST(Experiment, RejectsInvalidInputs) {
  ExperimentSpec spec{{10.0, 10.0, 20.0}, 0.1, 100, 1, 0, Window{0.3, 0.1}, {}};
  EXPECT_THROW(run_estimation_experiment(spec), InvalidArgument);
  spec.window.reset();
  spec.replicates = 0;
  EXPECT_THROW(run_estimation_experiment(spec), InvalidArgument);
}

TEST(Config, ParsesParamsAndSections) {
  const Config cfg = parse_config(Json::parse(R"({
    "params": {"eps1": 1, "eps2": 2, "xi": 3},
    "delta_p": 0.5,
    "sweep": {"axis": {"name": "eps1", "lo": 0, "hi": 1, "step": 0.5}, "series": {"name": "xi", "values": [4]}},
    "estimate": {"n": 50, "replicates": 3, "window": [0, 0.2]}
  })"));
  ASSERT_TRUE(cfg.params.has_value());
  EXPECT_EQ(cfg.params->xi, 3.0);
  EXPECT_EQ(*cfg.delta_p, 0.5);
  const SweepSpec spec = sweep_spec_from(cfg, SweepKind::probability);
  EXPECT_EQ(axis_point_count(spec.axis), 3u);
  EXPECT_EQ(spec.series.values, std::vector<double>{4.0});
  EXPECT_EQ(spec.fixed.at(Parameter::eps2), 10.0);
  const ExperimentSpec e = experiment_spec_from(cfg);
  EXPECT_EQ(e.n, 50u);
  EXPECT_EQ(e.replicates, 3u);
  EXPECT_EQ(e.delta_p, 0.5);
  EXPECT_EQ(e.window->hi, 0.2);
}

TEST(Config, SiParamsUseConstants) {
  const PlanckScales s = planck_scales(PhysicalConstants::codata2018());
  Json doc = {{"si_params", {{"delta_e1_J", 2.0 * s.e_p}, {"delta_e2_J", s.e_p}, {"x_m", 4.0 * s.l_p}}},
              {"delta_s", 3.0 * s.t_p}};
  const Config cfg = parse_config(doc);
  EXPECT_NEAR(cfg.params->eps1, 2.0, 1e-12);
  EXPECT_NEAR(cfg.params->xi, 4.0, 1e-12);
  EXPECT_NEAR(*cfg.delta_p, 3.0, 1e-12);

  const Config natural = parse_config(Json::parse(
      R"({"constants": {"G": 1, "c": 1, "hbar": 1}, "si_params": {"delta_e1_J": 5, "delta_e2_J": 6, "x_m": 7}})"));
  EXPECT_DOUBLE_EQ(natural.params->eps2, 6.0);
}

TEST(Config, RejectsBadDocuments) {
  EXPECT_THROW(parse_config(Json::parse(R"({"bogus": 1})")), InvalidArgument);
  EXPECT_THROW(parse_config(Json::parse(R"({"params": {"eps1": 1, "eps2": 2}})")), InvalidArgument);
  EXPECT_THROW(parse_config(Json::parse(R"({"params": {"eps1": 1, "eps2": 2, "xi": -1}})")),
               InvalidArgument);
  EXPECT_THROW(parse_config(Json::parse(R"({"params": {"eps1": "1", "eps2": 2, "xi": 1}})")),
               InvalidArgument);
  EXPECT_THROW(parse_config(Json::parse(R"({"sweep": {"steps": 1}})")), InvalidArgument);
  EXPECT_THROW(parse_config(Json::parse("[1, 2]")), InvalidArgument);
  EXPECT_THROW(load_config("/nonexistent/config.json"), InvalidArgument);
  const Config wrong_kind = parse_config(Json::parse(R"({"sweep": {"kind": "qfi"}})"));
  EXPECT_THROW(sweep_spec_from(wrong_kind, SweepKind::probability), InvalidArgument);
  const Config bad_axis =
      parse_config(Json::parse(R"({"sweep": {"axis": {"name": "mass", "lo": 0, "hi": 1, "step": 1}}})"));
  EXPECT_THROW(sweep_spec_from(bad_axis, SweepKind::probability), InvalidArgument);
}

TEST(MeasurementRecordJson, RoundTrip) {
  const MeasurementRecord rec = sample_outcomes({10.0, 10.0, 20.0}, 0.2, 777, 9);
  const MeasurementRecord back = measurement_record_from_json(Json::parse(to_json(rec).dump()));
  EXPECT_EQ(back.n, rec.n);
  EXPECT_EQ(back.k_plus, rec.k_plus);
  EXPECT_EQ(back.seed, rec.seed);
  EXPECT_EQ(back.config_hash, rec.config_hash);
  EXPECT_THROW(measurement_record_from_json(Json::parse(R"({"n": 3})")), InvalidArgument);
}

TEST(MetrologyReportJson, ExposesDiscrepancyFlag) {
  const Json j = to_json(metrology_report({10.0, 10.0, 20.0}, kPi / 5.0));
  EXPECT_TRUE(j.at("discrepancy_flag").get<bool>());
  EXPECT_NEAR(j.at("qfi_closed_form").get<double>(), -37.5, 1e-12);
}
