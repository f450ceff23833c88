#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "enorm/dataset.hpp"
#include "enorm/metrics.hpp"
#include "enorm/normalize.hpp"

namespace enorm {

// Repeated-split evaluation of one normalization setup on one hardware pair.
// References are selected inside the train split; scoring happens on the
// held-out test split, always on the raw kWh scale.
struct ExperimentSpec {
  std::string source_hw;
  std::string target_hw;
  RegressionSpec regression;
  FeatureSet features = FeatureSet::energy_only;
  FeatureTransform transform = FeatureTransform::raw;
  ReferenceStrategy strategy;
  int n_repeats = 5;
  double train_fraction = 0.8;
  std::uint32_t master_seed = 0;
  // Default re-selects random references per fold; set to reuse one draw.
  bool fix_references_across_folds = false;
};
void validate(const ExperimentSpec& spec);

struct SplitResult {
  std::vector<int> train;  // ascending
  std::vector<int> test;   // ascending
};

// Uniform random partition with |train| = round(train_fraction * n),
// deterministic under seed. Throws on a degenerate (empty-side) split.
SplitResult split_train_test(int n, double train_fraction, std::uint32_t seed);

struct FoldResult {
  int fold = 0;
  std::uint32_t fold_seed = 0;
  std::uint64_t split_digest = 0;  // hash of the train partition, for pairing
  int n_train = 0;
  int n_test = 0;
  int n_refs = 0;
  std::vector<std::string> ref_model_ids;
  double r2 = 0.0;
  double mse = 0.0;
  bool failed = false;
  std::string failure_reason;
  bool svr_converged = true;
};

struct EvalReport {
  ExperimentSpec spec;
  std::string rng_algorithm;  // kRngAlgorithm
  std::vector<FoldResult> folds;
  int n_ok = 0;
  int n_failed = 0;
  int n_negative_r2 = 0;
  int n_svr_nonconverged = 0;
  // Aggregates over successful folds; sample standard deviation (n-1),
  // zero when fewer than two folds succeeded.
  double mean_r2 = 0.0;
  double std_r2 = 0.0;
  double mean_mse = 0.0;
  double std_mse = 0.0;
};

// Fold seeds are master_seed + fold index. Folds where fitting is impossible
// (e.g. coincident reference energies) are recorded as failed and excluded
// from aggregates, never silently dropped. A spec that cannot produce enough
// reference points for the regression dimension throws InfeasibleError.
EvalReport run_experiment(const MeasurementTable& table,
                          const ExperimentSpec& spec);

enum class SweepAxis { reference_fraction, regression_kind, feature_set };

inline constexpr std::array<double, 5> kReferenceFractions = {0.10, 0.15, 0.20,
                                                              0.50, 1.00};

struct SweepCell {
  std::string axis_value;
  bool ok = false;
  std::string error;
  EvalReport report;  // meaningful when ok
};

// One report per axis value, all sharing the base spec's master_seed so folds
// are paired across cells. Per-cell failures are captured in the cell and the
// sweep continues.
std::vector<SweepCell> sweep(const MeasurementTable& table,
                             const ExperimentSpec& base, SweepAxis axis);

}  // namespace enorm
