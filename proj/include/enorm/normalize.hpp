#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "enorm/dataset.hpp"
#include "enorm/regress.hpp"

namespace enorm {

enum class StrategyKind {
  single_low,       // one reference, lowest energy
  single_high,      // one reference, highest energy
  dual_minmax,      // the two extremes
  random_fraction,  // k models uniformly without replacement
  minmax_fraction   // k models split between the two extremes
};
enum class RankBy { source, target };

struct ReferenceStrategy {
  StrategyKind kind = StrategyKind::dual_minmax;
  double fraction = 0.10;     // fraction kinds only, in (0, 1]
  std::uint32_t seed = 0;     // random_fraction only
  RankBy rank_by = RankBy::source;

  bool operator==(const ReferenceStrategy&) const = default;
};

// k-formula: 1 for single kinds, 2 for dual_minmax, max(2, floor(fraction*n))
// for fraction kinds. The small epsilon tolerates the binary rounding of
// decimal fractions (0.15*40 must floor to 6, not 5).
int reference_count(const ReferenceStrategy& strategy, int n_available);

// Indices into the pair's rows, ascending. Ranking uses the rank_by energy
// column with ties broken by model_id; min-max selection takes ceil(k/2) from
// the low end and floor(k/2) from the high end.
std::vector<int> select_references(const PairData& pair,
                                   const ReferenceStrategy& strategy);

enum class MapKind { ratio, two_point, regression };
enum class FeatureSet {
  energy_only,
  energy_flops,
  energy_params,
  energy_flops_params
};
enum class FeatureTransform { raw, log10 };

int feature_dim(FeatureSet features);
bool uses_flops(FeatureSet features);
bool uses_params(FeatureSet features);

// Minimum reference points a regression map needs: one more than the expanded
// feature dimension for the least-squares kinds, two for svr.
int required_reference_count(RegKind kind, FeatureSet features);

// A fitted normalization from source-hardware energy (plus optional
// computational metrics) to target-hardware energy.
struct NormalizationMap {
  MapKind kind = MapKind::ratio;
  double factor = 1.0;                  // ratio
  double slope = 1.0;                   // two_point
  double intercept = 0.0;               // two_point
  std::optional<FittedModel> model;     // regression
  FeatureSet features = FeatureSet::energy_only;
  FeatureTransform transform = FeatureTransform::raw;
  std::string source_hw;
  std::string target_hw;
  std::vector<std::string> reference_ids;
};

// normalize(e) = e * ref_target/ref_source; exact at the reference.
NormalizationMap fit_single_reference(double ref_source_kwh,
                                      double ref_target_kwh);

// Affine map through two (source, target) reference points; exact at both.
// Coincident source energies are an error.
NormalizationMap fit_dual_reference(std::pair<double, double> ref_lo,
                                    std::pair<double, double> ref_hi);

// Design matrix for the selected features: column 0 is source energy,
// then flops_forward, then params, in that order; y is target energy.
// log10 applies to every predictor column and to y symmetrically.
// `rows` restricts to a row subset (all rows when null).
std::pair<Eigen::MatrixXd, Eigen::VectorXd> build_design_matrix(
    const PairData& pair, FeatureSet features, FeatureTransform transform,
    const std::vector<int>* rows = nullptr);

// Regression-backed map fitted on the given reference rows.
NormalizationMap fit_regression_map(const PairData& pair,
                                    const std::vector<int>& ref_rows,
                                    FeatureSet features,
                                    FeatureTransform transform,
                                    const RegressionSpec& spec);

// Predicted target energies for raw (untransformed) feature rows; the map
// applies its own transform and inverts it on the way out.
Eigen::VectorXd apply_map_features(const NormalizationMap& map,
                                   const Eigen::Ref<const Eigen::MatrixXd>& X);

// Energy-only convenience; requires a map of arity 1.
Eigen::VectorXd apply_map(const NormalizationMap& map,
                          const Eigen::Ref<const Eigen::VectorXd>& source_kwh);

}  // namespace enorm
