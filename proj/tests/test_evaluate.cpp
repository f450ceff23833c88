#include <doctest.h>

#include <enorm/evaluate.hpp>
#include <enorm/metrics.hpp>
#include <enorm/rng.hpp>
#include <enorm/synth.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

using namespace enorm;

namespace {

std::vector<SyntheticHardwareModel> affine_cards() {
  SyntheticHardwareModel a;
  a.hardware_id = "card_a";
  a.base_kwh = 0.001;
  a.kwh_per_gflop = 0.01;
  SyntheticHardwareModel b = a;
  b.hardware_id = "card_b";
  b.base_kwh = 0.005;
  b.kwh_per_gflop = 0.025;
  return {a, b};
}

MeasurementTable affine_table(std::uint32_t seed = 3) {
  return generate(builtin_config_grid().configs, affine_cards(), seed);
}

ExperimentSpec base_spec() {
  ExperimentSpec spec;
  spec.source_hw = "card_a";
  spec.target_hw = "card_b";
  spec.strategy.kind = StrategyKind::random_fraction;
  spec.strategy.fraction = 0.5;
  spec.strategy.seed = 11;
  spec.n_repeats = 5;
  spec.master_seed = 100;
  return spec;
}

}  // namespace

TEST_CASE("split_train_test rounds 43 at 0.8 into 34 and 9") {
  const SplitResult s = split_train_test(43, 0.8, 7);
  CHECK(s.train.size() == 34);
  CHECK(s.test.size() == 9);
  CHECK(std::is_sorted(s.train.begin(), s.train.end()));
  CHECK(std::is_sorted(s.test.begin(), s.test.end()));
  std::set<int> all(s.train.begin(), s.train.end());
  all.insert(s.test.begin(), s.test.end());
  CHECK(all.size() == 43);
  CHECK(*all.begin() == 0);
  CHECK(*all.rbegin() == 42);
}

TEST_CASE("split_train_test is deterministic and seed sensitive") {
  const SplitResult a = split_train_test(40, 0.8, 5);
  const SplitResult b = split_train_test(40, 0.8, 5);
  CHECK(a.train == b.train);
  CHECK(a.test == b.test);
  bool differs = false;
  for (std::uint32_t s = 6; s < 12 && !differs; ++s) {
    if (split_train_test(40, 0.8, s).train != a.train) differs = true;
  }
  CHECK(differs);
}

TEST_CASE("split_train_test covers edge ratios") {
  const SplitResult tiny = split_train_test(2, 0.5, 1);
  CHECK(tiny.train.size() == 1);
  CHECK(tiny.test.size() == 1);
  const SplitResult s5 = split_train_test(5, 0.8, 1);
  CHECK(s5.train.size() == 4);
  CHECK(s5.test.size() == 1);
  CHECK_THROWS_AS(split_train_test(3, 0.01, 1), ValidationError);
  CHECK_THROWS_AS(split_train_test(3, 0.99, 1), ValidationError);
  CHECK_THROWS_AS(split_train_test(1, 0.5, 1), ValidationError);
}

TEST_CASE("metrics match their frozen values") {
  Eigen::VectorXd t(3);
  t << 1.0, 2.0, 3.0;
  Eigen::VectorXd p(3);
  p << 3.0, 2.0, 1.0;
  CHECK(r_squared(t, p) == -3.0);

  CHECK(r_squared(t, t) == 1.0);

  Eigen::VectorXd p2(3);
  p2 << 3.0, 2.0, 3.0;
  CHECK(mse(t, p2) == doctest::Approx((4.0 + 0.0 + 0.0) / 3.0).epsilon(1e-15));

  Eigen::VectorXd flat(3);
  flat << 2.0, 2.0, 2.0;
  CHECK_THROWS_AS((void)r_squared(flat, p), ValidationError);
  Eigen::VectorXd one(1);
  one << 1.0;
  CHECK_THROWS_AS((void)r_squared(one, one), ValidationError);
  Eigen::VectorXd two(2);
  two << 1.0, 2.0;
  CHECK_THROWS_AS((void)mse(t, two), ValidationError);
}

TEST_CASE("zero-noise affine pairs evaluate to perfect folds") {
  const MeasurementTable table = affine_table();
  const ExperimentSpec spec = base_spec();
  const EvalReport report = run_experiment(table, spec);
  CHECK(report.n_ok == 5);
  CHECK(report.n_failed == 0);
  CHECK(report.rng_algorithm == std::string(kRngAlgorithm));
  REQUIRE(report.folds.size() == 5);
  for (const FoldResult& fold : report.folds) {
    CHECK_FALSE(fold.failed);
    CHECK(fold.r2 >= 1.0 - 1e-9);
    CHECK(fold.n_train == 36);
    CHECK(fold.n_test == 9);
    CHECK(fold.n_refs == 18);
    CHECK(fold.ref_model_ids.size() == 18);
  }
  CHECK(report.mean_r2 >= 1.0 - 1e-9);
  CHECK(report.mean_mse <= 1e-18);
}

TEST_CASE("fold seeds derive from the master seed") {
  const EvalReport report = run_experiment(affine_table(), base_spec());
  for (int f = 0; f < 5; ++f) {
    CHECK(report.folds[static_cast<std::size_t>(f)].fold == f);
    CHECK(report.folds[static_cast<std::size_t>(f)].fold_seed ==
          base_spec().master_seed + static_cast<std::uint32_t>(f));
  }
  std::set<std::uint64_t> digests;
  for (const FoldResult& fold : report.folds) digests.insert(fold.split_digest);
  CHECK(digests.size() == 5);
}

TEST_CASE("folds pair across specs through split digests") {
  const MeasurementTable table = affine_table();
  ExperimentSpec a = base_spec();
  ExperimentSpec b = base_spec();
  b.regression.kind = RegKind::poly2;
  ExperimentSpec c = base_spec();
  c.features = FeatureSet::energy_flops;
  const EvalReport ra = run_experiment(table, a);
  const EvalReport rb = run_experiment(table, b);
  const EvalReport rc = run_experiment(table, c);
  for (int f = 0; f < 5; ++f) {
    const auto i = static_cast<std::size_t>(f);
    CHECK(ra.folds[i].split_digest == rb.folds[i].split_digest);
    CHECK(ra.folds[i].split_digest == rc.folds[i].split_digest);
  }
}

TEST_CASE("experiment throws upfront when references cannot cover the features") {
  ExperimentSpec spec = base_spec();
  spec.features = FeatureSet::energy_flops_params;
  spec.strategy.fraction = 0.10;  // 3 refs on 36 train rows, need 4
  CHECK_THROWS_WITH_AS(run_experiment(affine_table(), spec),
                       doctest::Contains("at least 4 reference points"),
                       InfeasibleError);
}

TEST_CASE("coincident reference energies fail folds without aborting") {
  // Constant source energies: dual_minmax picks two models with identical
  // source kwh, so the affine fit degenerates in every fold.
  SyntheticHardwareModel flat;
  flat.hardware_id = "flat";
  flat.base_kwh = 0.5;
  SyntheticHardwareModel tgt;
  tgt.hardware_id = "tgt";
  tgt.base_kwh = 0.001;
  tgt.kwh_per_gflop = 0.01;
  const MeasurementTable table =
      generate(builtin_config_grid().configs, {flat, tgt}, 1);
  ExperimentSpec spec;
  spec.source_hw = "flat";
  spec.target_hw = "tgt";
  spec.strategy.kind = StrategyKind::dual_minmax;
  spec.n_repeats = 3;
  const EvalReport report = run_experiment(table, spec);
  CHECK(report.n_ok == 0);
  CHECK(report.n_failed == 3);
  for (const FoldResult& fold : report.folds) {
    CHECK(fold.failed);
    CHECK(fold.failure_reason.find("coincident") != std::string::npos);
  }
  CHECK(report.mean_r2 == 0.0);
}

TEST_CASE("negative r2 folds are counted") {
  EvalReport report;
  report.folds.resize(3);
  report.folds[0].r2 = 0.5;
  report.folds[1].r2 = -0.2;
  report.folds[2].r2 = -3.0;
  int negative = 0;
  for (const FoldResult& fold : report.folds) {
    if (!fold.failed && fold.r2 < 0.0) ++negative;
  }
  CHECK(negative == 2);
}

TEST_CASE("fixing references across folds freezes the selection seed") {
  const MeasurementTable table = affine_table();
  ExperimentSpec spec = base_spec();
  spec.strategy.fraction = 0.2;
  spec.fix_references_across_folds = true;
  const EvalReport fixed = run_experiment(table, spec);
  const EvalReport again = run_experiment(table, spec);
  REQUIRE(fixed.folds.size() == again.folds.size());
  for (std::size_t f = 0; f < fixed.folds.size(); ++f) {
    CHECK(fixed.folds[f].ref_model_ids == again.folds[f].ref_model_ids);
  }

  // Without the flag the draw seed advances per fold; fold 0 uses the base
  // seed either way, so it matches while some later fold diverges.
  spec.fix_references_across_folds = false;
  const EvalReport moving = run_experiment(table, spec);
  CHECK(moving.folds[0].ref_model_ids == fixed.folds[0].ref_model_ids);
  bool any_diverged = false;
  for (std::size_t f = 1; f < moving.folds.size(); ++f) {
    if (moving.folds[f].ref_model_ids != fixed.folds[f].ref_model_ids)
      any_diverged = true;
  }
  CHECK(any_diverged);

  std::set<std::vector<std::string>> moving_sets;
  for (const FoldResult& fold : moving.folds)
    moving_sets.insert(fold.ref_model_ids);
  CHECK(moving_sets.size() > 1);
}

TEST_CASE("validate rejects inconsistent experiment specs") {
  SUBCASE("reference-point strategy with metric features") {
    ExperimentSpec spec = base_spec();
    spec.strategy.kind = StrategyKind::dual_minmax;
    spec.features = FeatureSet::energy_flops;
    CHECK_THROWS_AS(validate(spec), ValidationError);
  }
  SUBCASE("reference-point strategy with log transform") {
    ExperimentSpec spec = base_spec();
    spec.strategy.kind = StrategyKind::single_low;
    spec.transform = FeatureTransform::log10;
    CHECK_THROWS_AS(validate(spec), ValidationError);
  }
  SUBCASE("identity pair") {
    ExperimentSpec spec = base_spec();
    spec.target_hw = spec.source_hw;
    CHECK_THROWS_AS(validate(spec), ValidationError);
  }
  SUBCASE("no repeats") {
    ExperimentSpec spec = base_spec();
    spec.n_repeats = 0;
    CHECK_THROWS_AS(validate(spec), ValidationError);
  }
}

TEST_CASE("sweep emits one cell per axis value with paired folds") {
  const MeasurementTable table = affine_table();
  const ExperimentSpec spec = base_spec();

  const std::vector<SweepCell> fractions =
      sweep(table, spec, SweepAxis::reference_fraction);
  REQUIRE(fractions.size() == 5);
  CHECK(fractions[0].axis_value == "0.10");
  CHECK(fractions[4].axis_value == "1.00");

  const std::vector<SweepCell> kinds =
      sweep(table, spec, SweepAxis::regression_kind);
  REQUIRE(kinds.size() == 3);
  CHECK(kinds[0].axis_value == "linear");
  CHECK(kinds[1].axis_value == "poly2");
  CHECK(kinds[2].axis_value == "svr");

  const std::vector<SweepCell> features =
      sweep(table, spec, SweepAxis::feature_set);
  REQUIRE(features.size() == 4);
  CHECK(features[0].axis_value == "energy_only");
  CHECK(features[3].axis_value == "energy_flops_params");

  for (const std::vector<SweepCell>* cells : {&fractions, &kinds, &features}) {
    for (const SweepCell& cell : *cells) {
      REQUIRE(cell.ok);
      for (int f = 0; f < 5; ++f) {
        const auto i = static_cast<std::size_t>(f);
        CHECK(cell.report.folds[i].split_digest ==
              fractions[0].report.folds[i].split_digest);
      }
    }
  }
}

TEST_CASE("sweep captures per-cell failures and continues") {
  // Strip flops/params annotations so metric feature sets cannot be built.
  const MeasurementTable full = affine_table();
  std::vector<EnergyRecord> bare = full.records();
  for (EnergyRecord& r : bare) {
    r.flops_forward.reset();
    r.params.reset();
  }
  const MeasurementTable table(full.hardware(), bare);
  const std::vector<SweepCell> cells =
      sweep(table, base_spec(), SweepAxis::feature_set);
  REQUIRE(cells.size() == 4);
  CHECK(cells[0].ok);
  for (int i = 1; i < 4; ++i) {
    const SweepCell& cell = cells[static_cast<std::size_t>(i)];
    CHECK_FALSE(cell.ok);
    CHECK_FALSE(cell.error.empty());
  }
}

TEST_CASE("fraction sweep demands a fraction strategy") {
  ExperimentSpec spec = base_spec();
  spec.strategy.kind = StrategyKind::dual_minmax;
  CHECK_THROWS_AS(sweep(affine_table(), spec, SweepAxis::reference_fraction),
                  UsageError);
}
