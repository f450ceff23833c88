#include "enorm/normalize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "enorm/rng.hpp"

namespace enorm {

namespace {

void validate(const ReferenceStrategy& strategy) {
  if (strategy.kind == StrategyKind::random_fraction ||
      strategy.kind == StrategyKind::minmax_fraction) {
    if (!(strategy.fraction > 0.0 && strategy.fraction <= 1.0)) {
      throw ValidationError("reference fraction must be in (0, 1]");
    }
  }
}

// Row indices sorted by the ranking energy, ties broken by model_id.
std::vector<int> rank_rows(const PairData& pair, RankBy rank_by) {
  const Eigen::VectorXd& e =
      rank_by == RankBy::source ? pair.e_source : pair.e_target;
  std::vector<int> order(static_cast<std::size_t>(pair.n()));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (e(a) != e(b)) return e(a) < e(b);
    return pair.model_ids[static_cast<std::size_t>(a)] <
           pair.model_ids[static_cast<std::size_t>(b)];
  });
  return order;
}

const char* feature_name(FeatureSet features) {
  switch (features) {
    case FeatureSet::energy_only: return "energy_only";
    case FeatureSet::energy_flops: return "energy_flops";
    case FeatureSet::energy_params: return "energy_params";
    case FeatureSet::energy_flops_params: return "energy_flops_params";
  }
  return "?";
}

const char* reg_name(RegKind kind) {
  switch (kind) {
    case RegKind::linear: return "linear";
    case RegKind::poly2: return "poly2";
    case RegKind::svr: return "svr";
  }
  return "?";
}

}  // namespace

int reference_count(const ReferenceStrategy& strategy, int n_available) {
  validate(strategy);
  switch (strategy.kind) {
    case StrategyKind::single_low:
    case StrategyKind::single_high:
      return 1;
    case StrategyKind::dual_minmax:
      return 2;
    case StrategyKind::random_fraction:
    case StrategyKind::minmax_fraction: {
      const int k = static_cast<int>(
          std::floor(strategy.fraction * n_available + 1e-9));
      return std::max(2, k);
    }
  }
  throw ValidationError("bad StrategyKind");
}

std::vector<int> select_references(const PairData& pair,
                                   const ReferenceStrategy& strategy) {
  validate(strategy);
  const int n = pair.n();
  const int k = reference_count(strategy, n);
  if (k > n) {
    throw ValidationError("strategy needs " + std::to_string(k) +
                          " reference rows but only " + std::to_string(n) +
                          " are available");
  }

  std::vector<int> rows;
  switch (strategy.kind) {
    case StrategyKind::single_low:
      rows.push_back(rank_rows(pair, strategy.rank_by).front());
      break;
    case StrategyKind::single_high:
      rows.push_back(rank_rows(pair, strategy.rank_by).back());
      break;
    case StrategyKind::dual_minmax: {
      const auto order = rank_rows(pair, strategy.rank_by);
      rows.push_back(order.front());
      rows.push_back(order.back());
      break;
    }
    case StrategyKind::random_fraction: {
      Rng rng(strategy.seed);
      rows = rng.sample_without_replacement(n, k);
      break;
    }
    case StrategyKind::minmax_fraction: {
      const auto order = rank_rows(pair, strategy.rank_by);
      const int n_low = (k + 1) / 2;
      const int n_high = k / 2;
      for (int i = 0; i < n_low; ++i) rows.push_back(order[static_cast<std::size_t>(i)]);
      for (int i = 0; i < n_high; ++i) {
        rows.push_back(order[static_cast<std::size_t>(n - 1 - i)]);
      }
      break;
    }
  }
  std::sort(rows.begin(), rows.end());
  return rows;
}

int feature_dim(FeatureSet features) {
  switch (features) {
    case FeatureSet::energy_only: return 1;
    case FeatureSet::energy_flops: return 2;
    case FeatureSet::energy_params: return 2;
    case FeatureSet::energy_flops_params: return 3;
  }
  throw ValidationError("bad FeatureSet");
}

bool uses_flops(FeatureSet features) {
  return features == FeatureSet::energy_flops ||
         features == FeatureSet::energy_flops_params;
}

bool uses_params(FeatureSet features) {
  return features == FeatureSet::energy_params ||
         features == FeatureSet::energy_flops_params;
}

int required_reference_count(RegKind kind, FeatureSet features) {
  if (kind == RegKind::svr) return 2;
  const int d = feature_dim(features);
  const Expansion expansion =
      kind == RegKind::poly2 ? Expansion::poly2 : Expansion::identity;
  return expanded_dim(expansion, d) + 1;
}

NormalizationMap fit_single_reference(double ref_source_kwh,
                                      double ref_target_kwh) {
  if (!(ref_source_kwh > 0.0)) {
    throw ValidationError("reference source energy must be > 0");
  }
  if (!(ref_target_kwh > 0.0)) {
    throw ValidationError("reference target energy must be > 0");
  }
  NormalizationMap map;
  map.kind = MapKind::ratio;
  map.factor = ref_target_kwh / ref_source_kwh;
  return map;
}

NormalizationMap fit_dual_reference(std::pair<double, double> ref_lo,
                                    std::pair<double, double> ref_hi) {
  if (ref_lo.first == ref_hi.first) {
    throw ValidationError("coincident reference source energies");
  }
  NormalizationMap map;
  map.kind = MapKind::two_point;
  map.slope = (ref_hi.second - ref_lo.second) / (ref_hi.first - ref_lo.first);
  map.intercept = ref_lo.second - map.slope * ref_lo.first;
  return map;
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> build_design_matrix(
    const PairData& pair, FeatureSet features, FeatureTransform transform,
    const std::vector<int>* rows) {
  std::vector<int> all;
  if (!rows) {
    all.resize(static_cast<std::size_t>(pair.n()));
    std::iota(all.begin(), all.end(), 0);
    rows = &all;
  }
  const int m = static_cast<int>(rows->size());
  const int d = feature_dim(features);
  Eigen::MatrixXd X(m, d);
  Eigen::VectorXd y(m);
  for (int i = 0; i < m; ++i) {
    const int r = (*rows)[static_cast<std::size_t>(i)];
    if (r < 0 || r >= pair.n()) {
      throw ValidationError("build_design_matrix: row out of range");
    }
    X(i, 0) = pair.e_source(r);
    int col = 1;
    if (uses_flops(features)) {
      const double f = pair.flops(r);
      if (!std::isfinite(f)) {
        throw ValidationError("model '" + pair.model_ids[static_cast<std::size_t>(r)] +
                              "' has no flops_forward but the feature set needs it");
      }
      X(i, col++) = f;
    }
    if (uses_params(features)) {
      const double p = pair.params(r);
      if (!std::isfinite(p)) {
        throw ValidationError("model '" + pair.model_ids[static_cast<std::size_t>(r)] +
                              "' has no params but the feature set needs it");
      }
      X(i, col++) = p;
    }
    y(i) = pair.e_target(r);
  }
  if (transform == FeatureTransform::log10) {
    if ((X.array() <= 0.0).any() || (y.array() <= 0.0).any()) {
      throw ValidationError("log10 transform needs strictly positive features");
    }
    X = X.array().log10();
    y = y.array().log10();
  }
  return {X, y};
}

NormalizationMap fit_regression_map(const PairData& pair,
                                    const std::vector<int>& ref_rows,
                                    FeatureSet features,
                                    FeatureTransform transform,
                                    const RegressionSpec& spec) {
  const int required = required_reference_count(spec.kind, features);
  if (static_cast<int>(ref_rows.size()) < required) {
    throw InfeasibleError(std::string(reg_name(spec.kind)) + " regression on " +
                          feature_name(features) + " features needs at least " +
                          std::to_string(required) + " reference points, got " +
                          std::to_string(ref_rows.size()));
  }
  auto [X, y] = build_design_matrix(pair, features, transform, &ref_rows);
  NormalizationMap map;
  map.kind = MapKind::regression;
  map.model = fit(X, y, spec);
  map.features = features;
  map.transform = transform;
  map.source_hw = pair.source_hw;
  map.target_hw = pair.target_hw;
  for (int r : ref_rows) {
    map.reference_ids.push_back(pair.model_ids[static_cast<std::size_t>(r)]);
  }
  return map;
}

Eigen::VectorXd apply_map_features(const NormalizationMap& map,
                                   const Eigen::Ref<const Eigen::MatrixXd>& X) {
  const int d = map.kind == MapKind::regression ? feature_dim(map.features) : 1;
  if (static_cast<int>(X.cols()) != d) {
    throw ValidationError("map expects " + std::to_string(d) +
                          " feature columns, got " + std::to_string(X.cols()));
  }
  switch (map.kind) {
    case MapKind::ratio:
      return map.factor * X.col(0);
    case MapKind::two_point:
      return map.slope * X.col(0) +
             Eigen::VectorXd::Constant(X.rows(), map.intercept);
    case MapKind::regression: {
      if (!map.model) throw ValidationError("regression map has no model");
      if (map.transform == FeatureTransform::log10) {
        if ((X.array() <= 0.0).any()) {
          throw ValidationError("log10 map needs strictly positive features");
        }
        const Eigen::MatrixXd Xl = X.array().log10();
        const Eigen::VectorXd pl = predict(*map.model, Xl);
        return Eigen::pow(10.0, pl.array());
      }
      return predict(*map.model, X);
    }
  }
  throw ValidationError("bad MapKind");
}

Eigen::VectorXd apply_map(const NormalizationMap& map,
                          const Eigen::Ref<const Eigen::VectorXd>& source_kwh) {
  if (map.kind == MapKind::regression && map.features != FeatureSet::energy_only) {
    throw ValidationError(
        "map was fitted with computational-metric features; "
        "energy-only application is not defined for it");
  }
  return apply_map_features(map, source_kwh);
}

}  // namespace enorm
