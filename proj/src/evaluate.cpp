#include "enorm/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>

#include "enorm/report.hpp"
#include "enorm/rng.hpp"
#include "enorm/serialize.hpp"

namespace enorm {

namespace {

bool is_fraction_kind(StrategyKind kind) {
  return kind == StrategyKind::random_fraction ||
         kind == StrategyKind::minmax_fraction;
}

std::uint64_t digest_rows(const std::vector<int>& rows) {
  std::string s;
  for (int r : rows) {
    s += std::to_string(r);
    s += ',';
  }
  return fnv1a64(s);
}

// Rows of the raw feature matrix a fitted map consumes at apply time.
Eigen::MatrixXd raw_features(const PairData& pair, const NormalizationMap& map) {
  if (map.kind != MapKind::regression) return pair.e_source;
  auto [X, y] = build_design_matrix(pair, map.features, FeatureTransform::raw);
  return X;
}

NormalizationMap fit_fold_map(const PairData& train_pair,
                              const std::vector<int>& refs,
                              const ExperimentSpec& spec) {
  NormalizationMap map;
  switch (spec.strategy.kind) {
    case StrategyKind::single_low:
    case StrategyKind::single_high: {
      const int r = refs.front();
      map = fit_single_reference(train_pair.e_source(r), train_pair.e_target(r));
      break;
    }
    case StrategyKind::dual_minmax: {
      const Eigen::VectorXd& e = spec.strategy.rank_by == RankBy::source
                                     ? train_pair.e_source
                                     : train_pair.e_target;
      int lo = refs.front(), hi = refs.front();
      for (int r : refs) {
        if (e(r) < e(lo)) lo = r;
        if (e(r) > e(hi)) hi = r;
      }
      map = fit_dual_reference({train_pair.e_source(lo), train_pair.e_target(lo)},
                               {train_pair.e_source(hi), train_pair.e_target(hi)});
      break;
    }
    case StrategyKind::random_fraction:
    case StrategyKind::minmax_fraction:
      return fit_regression_map(train_pair, refs, spec.features, spec.transform,
                                spec.regression);
  }
  map.source_hw = train_pair.source_hw;
  map.target_hw = train_pair.target_hw;
  for (int r : refs) {
    map.reference_ids.push_back(train_pair.model_ids[static_cast<std::size_t>(r)]);
  }
  return map;
}

}  // namespace

void validate(const ExperimentSpec& spec) {
  if (spec.source_hw.empty() || spec.target_hw.empty()) {
    throw ValidationError("experiment needs source and target hardware ids");
  }
  if (spec.source_hw == spec.target_hw) {
    throw ValidationError("source and target hardware must differ");
  }
  validate(spec.regression);
  if (spec.n_repeats < 1) throw ValidationError("n_repeats must be >= 1");
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw ValidationError("train_fraction must be in (0, 1)");
  }
  if (!is_fraction_kind(spec.strategy.kind)) {
    if (spec.features != FeatureSet::energy_only) {
      throw ValidationError(
          "reference-point strategies fit energy-only maps; "
          "metric features need a fraction strategy");
    }
    if (spec.transform != FeatureTransform::raw) {
      throw ValidationError("the log10 transform applies to regression maps only");
    }
  }
}

SplitResult split_train_test(int n, double train_fraction, std::uint32_t seed) {
  if (n < 2) throw ValidationError("cannot split fewer than 2 rows");
  const int n_train =
      static_cast<int>(std::lround(train_fraction * static_cast<double>(n)));
  if (n_train < 1 || n_train > n - 1) {
    throw ValidationError("degenerate split: " + std::to_string(n_train) + "/" +
                          std::to_string(n - n_train) + " of " +
                          std::to_string(n));
  }
  Rng rng(seed);
  const std::vector<int> perm = rng.permutation(n);
  SplitResult split;
  split.train.assign(perm.begin(), perm.begin() + n_train);
  split.test.assign(perm.begin() + n_train, perm.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

EvalReport run_experiment(const MeasurementTable& table,
                          const ExperimentSpec& spec) {
  validate(spec);
  const PairData pair = pivot_pair(table, spec.source_hw, spec.target_hw);
  const int n = pair.n();
  if (n < 2) throw ValidationError("pair has fewer than 2 aligned models");
  if (uses_flops(spec.features) && !pair.has_flops()) {
    throw ValidationError("pair " + spec.source_hw + ":" + spec.target_hw +
                          " lacks the flops_forward annotations needed by " +
                          to_string(spec.features) + " features");
  }
  if (uses_params(spec.features) && !pair.has_params()) {
    throw ValidationError("pair " + spec.source_hw + ":" + spec.target_hw +
                          " lacks the params annotations needed by " +
                          to_string(spec.features) + " features");
  }

  const int n_train = static_cast<int>(
      std::lround(spec.train_fraction * static_cast<double>(n)));
  if (is_fraction_kind(spec.strategy.kind)) {
    const int k = reference_count(spec.strategy, n_train);
    const int required =
        required_reference_count(spec.regression.kind, spec.features);
    if (k < required) {
      throw InfeasibleError(
          "strategy '" + to_string(spec.strategy.kind) + "' yields " +
          std::to_string(k) + " reference points on " + std::to_string(n_train) +
          " train rows but " + to_string(spec.regression.kind) +
          " regression on " + to_string(spec.features) +
          " features needs at least " + std::to_string(required) +
          " reference points");
    }
    if (k > n_train) {
      throw InfeasibleError("strategy needs " + std::to_string(k) +
                            " reference points but the train split has only " +
                            std::to_string(n_train) + " rows");
    }
  }

  EvalReport report;
  report.spec = spec;
  report.rng_algorithm = kRngAlgorithm;

  for (int f = 0; f < spec.n_repeats; ++f) {
    FoldResult fold;
    fold.fold = f;
    fold.fold_seed = spec.master_seed + static_cast<std::uint32_t>(f);
    try {
      const SplitResult split =
          split_train_test(n, spec.train_fraction, fold.fold_seed);
      fold.split_digest = digest_rows(split.train);
      fold.n_train = static_cast<int>(split.train.size());
      fold.n_test = static_cast<int>(split.test.size());

      const PairData train_pair = subset(pair, split.train);
      ReferenceStrategy strategy = spec.strategy;
      if (strategy.kind == StrategyKind::random_fraction &&
          !spec.fix_references_across_folds) {
        strategy.seed = spec.strategy.seed + static_cast<std::uint32_t>(f);
      }
      const std::vector<int> refs = select_references(train_pair, strategy);
      fold.n_refs = static_cast<int>(refs.size());
      for (int r : refs) {
        fold.ref_model_ids.push_back(
            train_pair.model_ids[static_cast<std::size_t>(r)]);
      }

      const NormalizationMap map = fit_fold_map(train_pair, refs, spec);
      const PairData test_pair = subset(pair, split.test);
      const Eigen::VectorXd pred =
          apply_map_features(map, raw_features(test_pair, map));
      fold.r2 = r_squared(test_pair.e_target, pred);
      fold.mse = mse(test_pair.e_target, pred);
      if (map.model) fold.svr_converged = map.model->solver.converged;
    } catch (const InfeasibleError&) {
      throw;
    } catch (const std::exception& e) {
      fold.failed = true;
      fold.failure_reason = e.what();
    }
    report.folds.push_back(std::move(fold));
  }

  double sum_r2 = 0.0, sum_mse = 0.0;
  for (const auto& fold : report.folds) {
    if (fold.failed) {
      report.n_failed++;
      continue;
    }
    report.n_ok++;
    if (fold.r2 < 0.0) report.n_negative_r2++;
    if (!fold.svr_converged) report.n_svr_nonconverged++;
    sum_r2 += fold.r2;
    sum_mse += fold.mse;
  }
  if (report.n_ok > 0) {
    report.mean_r2 = sum_r2 / report.n_ok;
    report.mean_mse = sum_mse / report.n_ok;
  }
  if (report.n_ok > 1) {
    double ss_r2 = 0.0, ss_mse = 0.0;
    for (const auto& fold : report.folds) {
      if (fold.failed) continue;
      ss_r2 += (fold.r2 - report.mean_r2) * (fold.r2 - report.mean_r2);
      ss_mse += (fold.mse - report.mean_mse) * (fold.mse - report.mean_mse);
    }
    report.std_r2 = std::sqrt(ss_r2 / (report.n_ok - 1));
    report.std_mse = std::sqrt(ss_mse / (report.n_ok - 1));
  }
  return report;
}

std::vector<SweepCell> sweep(const MeasurementTable& table,
                             const ExperimentSpec& base, SweepAxis axis) {
  std::vector<std::pair<std::string, ExperimentSpec>> cells;
  switch (axis) {
    case SweepAxis::reference_fraction: {
      if (!is_fraction_kind(base.strategy.kind)) {
        throw UsageError("a reference_fraction sweep needs a fraction strategy");
      }
      for (double fr : kReferenceFractions) {
        ExperimentSpec spec = base;
        spec.strategy.fraction = fr;
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%.2f", fr);
        cells.emplace_back(buf, spec);
      }
      break;
    }
    case SweepAxis::regression_kind:
      for (RegKind kind : {RegKind::linear, RegKind::poly2, RegKind::svr}) {
        ExperimentSpec spec = base;
        spec.regression.kind = kind;
        cells.emplace_back(to_string(kind), spec);
      }
      break;
    case SweepAxis::feature_set:
      for (FeatureSet fs :
           {FeatureSet::energy_only, FeatureSet::energy_flops,
            FeatureSet::energy_params, FeatureSet::energy_flops_params}) {
        ExperimentSpec spec = base;
        spec.features = fs;
        cells.emplace_back(to_string(fs), spec);
      }
      break;
  }

  std::vector<SweepCell> out;
  for (auto& [value, spec] : cells) {
    SweepCell cell;
    cell.axis_value = value;
    try {
      cell.report = run_experiment(table, spec);
      cell.ok = true;
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
    out.push_back(std::move(cell));
  }
  return out;
}

}  // namespace enorm
