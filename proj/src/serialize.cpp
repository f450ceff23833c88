#include "enorm/serialize.hpp"

#include <fstream>

#include "enorm/report.hpp"

namespace enorm {

namespace {

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  Eigen::VectorXd v(j.size());
  long i = 0;
  for (const auto& x : j) v(i++) = x.get<double>();
  return v;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json j = nlohmann::json::array();
  for (long i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

[[noreturn]] void bad_name(const char* what, const std::string& s) {
  throw ValidationError("unknown " + std::string(what) + " '" + s + "'");
}

}  // namespace

std::string to_string(ArchKind v) {
  switch (v) {
    case ArchKind::mlp: return "mlp";
    case ArchKind::cnn: return "cnn";
    case ArchKind::rnn: return "rnn";
    case ArchKind::crnn: return "crnn";
  }
  bad_name("architecture kind", "?");
}

std::string to_string(RegKind v) {
  switch (v) {
    case RegKind::linear: return "linear";
    case RegKind::poly2: return "poly2";
    case RegKind::svr: return "svr";
  }
  bad_name("regression kind", "?");
}

std::string to_string(Expansion v) {
  return v == Expansion::poly2 ? "poly2" : "identity";
}

std::string to_string(StrategyKind v) {
  switch (v) {
    case StrategyKind::single_low: return "single_low";
    case StrategyKind::single_high: return "single_high";
    case StrategyKind::dual_minmax: return "dual_minmax";
    case StrategyKind::random_fraction: return "random_fraction";
    case StrategyKind::minmax_fraction: return "minmax_fraction";
  }
  bad_name("strategy kind", "?");
}

std::string to_string(RankBy v) {
  return v == RankBy::target ? "target" : "source";
}

std::string to_string(MapKind v) {
  switch (v) {
    case MapKind::ratio: return "ratio";
    case MapKind::two_point: return "two_point";
    case MapKind::regression: return "regression";
  }
  bad_name("map kind", "?");
}

std::string to_string(FeatureSet v) {
  switch (v) {
    case FeatureSet::energy_only: return "energy_only";
    case FeatureSet::energy_flops: return "energy_flops";
    case FeatureSet::energy_params: return "energy_params";
    case FeatureSet::energy_flops_params: return "energy_flops_params";
  }
  bad_name("feature set", "?");
}

std::string to_string(FeatureTransform v) {
  return v == FeatureTransform::log10 ? "log10" : "raw";
}

std::string to_string(SweepAxis v) {
  switch (v) {
    case SweepAxis::reference_fraction: return "reference_fraction";
    case SweepAxis::regression_kind: return "regression_kind";
    case SweepAxis::feature_set: return "feature_set";
  }
  bad_name("sweep axis", "?");
}

ArchKind arch_kind_from_string(const std::string& s) {
  if (s == "mlp") return ArchKind::mlp;
  if (s == "cnn") return ArchKind::cnn;
  if (s == "rnn") return ArchKind::rnn;
  if (s == "crnn") return ArchKind::crnn;
  bad_name("architecture kind", s);
}

RegKind reg_kind_from_string(const std::string& s) {
  if (s == "linear") return RegKind::linear;
  if (s == "poly2") return RegKind::poly2;
  if (s == "svr") return RegKind::svr;
  bad_name("regression kind", s);
}

StrategyKind strategy_kind_from_string(const std::string& s) {
  if (s == "single_low") return StrategyKind::single_low;
  if (s == "single_high") return StrategyKind::single_high;
  if (s == "dual_minmax") return StrategyKind::dual_minmax;
  if (s == "random_fraction") return StrategyKind::random_fraction;
  if (s == "minmax_fraction") return StrategyKind::minmax_fraction;
  bad_name("strategy kind", s);
}

RankBy rank_by_from_string(const std::string& s) {
  if (s == "source") return RankBy::source;
  if (s == "target") return RankBy::target;
  bad_name("rank_by", s);
}

MapKind map_kind_from_string(const std::string& s) {
  if (s == "ratio") return MapKind::ratio;
  if (s == "two_point") return MapKind::two_point;
  if (s == "regression") return MapKind::regression;
  bad_name("map kind", s);
}

FeatureSet feature_set_from_string(const std::string& s) {
  if (s == "energy_only") return FeatureSet::energy_only;
  if (s == "energy_flops") return FeatureSet::energy_flops;
  if (s == "energy_params") return FeatureSet::energy_params;
  if (s == "energy_flops_params") return FeatureSet::energy_flops_params;
  bad_name("feature set", s);
}

FeatureTransform feature_transform_from_string(const std::string& s) {
  if (s == "raw") return FeatureTransform::raw;
  if (s == "log10") return FeatureTransform::log10;
  bad_name("feature transform", s);
}

SweepAxis sweep_axis_from_string(const std::string& s) {
  if (s == "reference_fraction") return SweepAxis::reference_fraction;
  if (s == "regression_kind") return SweepAxis::regression_kind;
  if (s == "feature_set") return SweepAxis::feature_set;
  bad_name("sweep axis", s);
}

nlohmann::json to_json(const HardwareSpec& v) {
  return {{"id", v.id},
          {"name", v.name},
          {"tdp_watts", v.tdp_watts},
          {"memory_gib", v.memory_gib}};
}

nlohmann::json to_json(const EnergyRecord& v) {
  nlohmann::json j = {{"model_id", v.model_id},
                      {"hardware_id", v.hardware_id},
                      {"gpu_energy_kwh", v.gpu_energy_kwh},
                      {"epochs", v.epochs},
                      {"batch_size", v.batch_size}};
  if (v.flops_forward) j["flops_forward"] = *v.flops_forward;
  if (v.params) j["params"] = *v.params;
  return j;
}

nlohmann::json to_json(const MeasurementTable& v) {
  nlohmann::json j;
  j["hardware"] = nlohmann::json::array();
  for (const auto& h : v.hardware()) j["hardware"].push_back(to_json(h));
  j["records"] = nlohmann::json::array();
  for (const auto& r : v.records()) j["records"].push_back(to_json(r));
  return j;
}

nlohmann::json to_json(const ArchitectureConfig& v) {
  nlohmann::json j;
  j["kind"] = to_string(v.kind);
  if (v.linear_layers) j["linear_layers"] = v.linear_layers;
  if (v.hidden_size) j["hidden_size"] = v.hidden_size;
  if (v.conv_layers) j["conv_layers"] = v.conv_layers;
  if (v.conv_channels) j["conv_channels"] = v.conv_channels;
  if (v.recurrent_layers) j["recurrent_layers"] = v.recurrent_layers;
  if (v.recurrent_hidden) j["recurrent_hidden"] = v.recurrent_hidden;
  j["mel_bands"] = v.mel_bands;
  j["frames"] = v.frames;
  j["num_classes"] = v.num_classes;
  return j;
}

ArchitectureConfig config_from_json(const nlohmann::json& j) {
  ArchitectureConfig cfg;
  cfg.kind = arch_kind_from_string(j.at("kind").get<std::string>());
  cfg.linear_layers = j.value("linear_layers", 0);
  cfg.hidden_size = j.value("hidden_size", 0);
  cfg.conv_layers = j.value("conv_layers", 0);
  cfg.conv_channels = j.value("conv_channels", 0);
  cfg.recurrent_layers = j.value("recurrent_layers", 0);
  cfg.recurrent_hidden = j.value("recurrent_hidden", 0);
  cfg.mel_bands = j.value("mel_bands", 128);
  cfg.frames = j.value("frames", 64);
  cfg.num_classes = j.value("num_classes", 10);
  validate(cfg);
  return cfg;
}

nlohmann::json to_json(const CostReport& v) {
  nlohmann::json j;
  j["params"] = v.params;
  j["flops_forward"] = v.flops_forward;
  j["per_layer"] = nlohmann::json::array();
  for (const auto& c : v.per_layer) {
    j["per_layer"].push_back(
        {{"layer", c.layer}, {"params", c.params}, {"flops", c.flops}});
  }
  return j;
}

std::vector<std::pair<std::string, ArchitectureConfig>> load_configs_json(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  std::vector<std::pair<std::string, ArchitectureConfig>> out;
  try {
    if (!j.is_array()) throw ParseError(path + ": expected a JSON array");
    for (const auto& cj : j) {
      ArchitectureConfig cfg = config_from_json(cj);
      std::string id = cj.value("model_id", std::string());
      if (id.empty()) id = config_id(cfg);
      out.emplace_back(std::move(id), cfg);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return out;
}

void write_configs_json(
    const std::vector<std::pair<std::string, ArchitectureConfig>>& configs,
    const std::string& path) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& [id, cfg] : configs) {
    nlohmann::json cj = to_json(cfg);
    cj["model_id"] = id;
    j.push_back(std::move(cj));
  }
  std::ofstream out(path);
  if (!out) throw ValidationError(path + ": cannot open for writing");
  out << j.dump(2) << "\n";
}

nlohmann::json to_json(const RegressionSpec& v) {
  return {{"kind", to_string(v.kind)},
          {"svr_c", v.svr_c},
          {"svr_epsilon", v.svr_epsilon},
          {"svr_tol", v.svr_tol},
          {"svr_max_iter", v.svr_max_iter},
          {"standardize", v.standardize}};
}

RegressionSpec regression_spec_from_json(const nlohmann::json& j) {
  RegressionSpec spec;
  spec.kind = reg_kind_from_string(j.at("kind").get<std::string>());
  spec.svr_c = j.value("svr_c", spec.svr_c);
  spec.svr_epsilon = j.value("svr_epsilon", spec.svr_epsilon);
  spec.svr_tol = j.value("svr_tol", spec.svr_tol);
  spec.svr_max_iter = j.value("svr_max_iter", spec.svr_max_iter);
  spec.standardize = j.value("standardize", spec.standardize);
  validate(spec);
  return spec;
}

nlohmann::json to_json(const FittedModel& v) {
  nlohmann::json j;
  j["kind"] = to_string(v.kind);
  j["expansion"] = to_string(v.expansion);
  j["input_dim"] = v.input_dim;
  j["weights"] = vector_to_json(v.weights);
  j["intercept"] = v.intercept;
  if (v.scaler) {
    j["scaler"] = {{"mean", vector_to_json(v.scaler->mean)},
                   {"stddev", vector_to_json(v.scaler->stddev)}};
  }
  j["solver"] = {{"iterations", v.solver.iterations},
                 {"objective", v.solver.objective},
                 {"converged", v.solver.converged},
                 {"stop_reason", v.solver.stop_reason}};
  return j;
}

FittedModel fitted_model_from_json(const nlohmann::json& j) {
  FittedModel m;
  m.kind = reg_kind_from_string(j.at("kind").get<std::string>());
  const std::string exp = j.at("expansion").get<std::string>();
  if (exp == "identity") m.expansion = Expansion::identity;
  else if (exp == "poly2") m.expansion = Expansion::poly2;
  else bad_name("expansion", exp);
  m.input_dim = j.at("input_dim").get<int>();
  m.weights = vector_from_json(j.at("weights"));
  m.intercept = j.at("intercept").get<double>();
  if (j.contains("scaler")) {
    Scaler sc;
    sc.mean = vector_from_json(j.at("scaler").at("mean"));
    sc.stddev = vector_from_json(j.at("scaler").at("stddev"));
    m.scaler = std::move(sc);
  }
  if (j.contains("solver")) {
    const auto& sj = j.at("solver");
    m.solver.iterations = sj.value("iterations", 0);
    m.solver.objective = sj.value("objective", 0.0);
    m.solver.converged = sj.value("converged", true);
    m.solver.stop_reason = sj.value("stop_reason", std::string());
  }
  if (m.weights.size() != expanded_dim(m.expansion, m.input_dim)) {
    throw ValidationError("fitted model weight count does not match its dims");
  }
  return m;
}

nlohmann::json to_json(const ReferenceStrategy& v) {
  return {{"kind", to_string(v.kind)},
          {"fraction", v.fraction},
          {"seed", v.seed},
          {"rank_by", to_string(v.rank_by)}};
}

ReferenceStrategy reference_strategy_from_json(const nlohmann::json& j) {
  ReferenceStrategy s;
  s.kind = strategy_kind_from_string(j.at("kind").get<std::string>());
  s.fraction = j.value("fraction", s.fraction);
  s.seed = j.value("seed", s.seed);
  s.rank_by = rank_by_from_string(j.value("rank_by", std::string("source")));
  return s;
}

nlohmann::json to_json(const NormalizationMap& v) {
  nlohmann::json j;
  j["kind"] = to_string(v.kind);
  switch (v.kind) {
    case MapKind::ratio:
      j["factor"] = v.factor;
      break;
    case MapKind::two_point:
      j["slope"] = v.slope;
      j["intercept"] = v.intercept;
      break;
    case MapKind::regression:
      if (!v.model) throw ValidationError("regression map has no model");
      j["model"] = to_json(*v.model);
      break;
  }
  j["features"] = to_string(v.features);
  j["transform"] = to_string(v.transform);
  j["source_hw"] = v.source_hw;
  j["target_hw"] = v.target_hw;
  j["reference_ids"] = v.reference_ids;
  return j;
}

NormalizationMap normalization_map_from_json(const nlohmann::json& j) {
  NormalizationMap m;
  m.kind = map_kind_from_string(j.at("kind").get<std::string>());
  switch (m.kind) {
    case MapKind::ratio:
      m.factor = j.at("factor").get<double>();
      break;
    case MapKind::two_point:
      m.slope = j.at("slope").get<double>();
      m.intercept = j.at("intercept").get<double>();
      break;
    case MapKind::regression:
      m.model = fitted_model_from_json(j.at("model"));
      break;
  }
  m.features = feature_set_from_string(j.value("features", std::string("energy_only")));
  m.transform =
      feature_transform_from_string(j.value("transform", std::string("raw")));
  m.source_hw = j.value("source_hw", std::string());
  m.target_hw = j.value("target_hw", std::string());
  if (j.contains("reference_ids")) {
    m.reference_ids = j.at("reference_ids").get<std::vector<std::string>>();
  }
  return m;
}

void write_map_json(const NormalizationMap& map, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError(path + ": cannot open for writing");
  out << to_json(map).dump(2) << "\n";
}

NormalizationMap load_map_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  try {
    return normalization_map_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

nlohmann::json to_json(const ExperimentSpec& v) {
  return {{"source_hw", v.source_hw},
          {"target_hw", v.target_hw},
          {"regression", to_json(v.regression)},
          {"features", to_string(v.features)},
          {"transform", to_string(v.transform)},
          {"strategy", to_json(v.strategy)},
          {"n_repeats", v.n_repeats},
          {"train_fraction", v.train_fraction},
          {"master_seed", v.master_seed},
          {"fix_references_across_folds", v.fix_references_across_folds}};
}

nlohmann::json to_json(const FoldResult& v) {
  nlohmann::json j = {{"fold", v.fold},
                      {"fold_seed", v.fold_seed},
                      {"split_digest", hex64(v.split_digest)},
                      {"n_train", v.n_train},
                      {"n_test", v.n_test},
                      {"n_refs", v.n_refs},
                      {"ref_model_ids", v.ref_model_ids},
                      {"failed", v.failed}};
  if (v.failed) {
    j["failure_reason"] = v.failure_reason;
  } else {
    j["r2"] = v.r2;
    j["mse"] = v.mse;
    j["svr_converged"] = v.svr_converged;
  }
  return j;
}

nlohmann::json to_json(const EvalReport& v) {
  nlohmann::json j;
  j["spec"] = to_json(v.spec);
  j["rng_algorithm"] = v.rng_algorithm;
  j["folds"] = nlohmann::json::array();
  for (const auto& f : v.folds) j["folds"].push_back(to_json(f));
  j["n_ok"] = v.n_ok;
  j["n_failed"] = v.n_failed;
  j["n_negative_r2"] = v.n_negative_r2;
  j["n_svr_nonconverged"] = v.n_svr_nonconverged;
  j["mean_r2"] = v.mean_r2;
  j["std_r2"] = v.std_r2;
  j["mean_mse"] = v.mean_mse;
  j["std_mse"] = v.std_mse;
  return j;
}

nlohmann::json to_json(const SweepCell& v) {
  nlohmann::json j;
  j["axis_value"] = v.axis_value;
  j["ok"] = v.ok;
  if (v.ok) {
    j["report"] = to_json(v.report);
  } else {
    j["error"] = v.error;
  }
  return j;
}

std::string folds_csv(const std::vector<SweepCell>& cells) {
  std::string out = "axis_value,fold,fold_seed,n_train,n_test,n_refs,failed,r2,mse\n";
  char buf[64];
  for (const auto& cell : cells) {
    if (!cell.ok) continue;
    for (const auto& f : cell.report.folds) {
      out += cell.axis_value;
      out += ',' + std::to_string(f.fold);
      out += ',' + std::to_string(f.fold_seed);
      out += ',' + std::to_string(f.n_train);
      out += ',' + std::to_string(f.n_test);
      out += ',' + std::to_string(f.n_refs);
      out += ',' + std::to_string(f.failed ? 1 : 0);
      if (f.failed) {
        out += ",,";
      } else {
        std::snprintf(buf, sizeof(buf), ",%.17g,%.17g", f.r2, f.mse);
        out += buf;
      }
      out += '\n';
    }
  }
  return out;
}

nlohmann::json to_json(const SyntheticHardwareModel& v) {
  return {{"hardware_id", v.hardware_id},
          {"name", v.name},
          {"tdp_watts", v.tdp_watts},
          {"memory_gib", v.memory_gib},
          {"base_kwh", v.base_kwh},
          {"kwh_per_gflop", v.kwh_per_gflop},
          {"kwh_per_mparam", v.kwh_per_mparam},
          {"quad_coeff", v.quad_coeff},
          {"noise_sigma", v.noise_sigma}};
}

SyntheticHardwareModel synthetic_hardware_from_json(const nlohmann::json& j) {
  SyntheticHardwareModel m;
  m.hardware_id = j.at("hardware_id").get<std::string>();
  m.name = j.value("name", std::string());
  m.tdp_watts = j.value("tdp_watts", m.tdp_watts);
  m.memory_gib = j.value("memory_gib", m.memory_gib);
  m.base_kwh = j.value("base_kwh", m.base_kwh);
  m.kwh_per_gflop = j.value("kwh_per_gflop", m.kwh_per_gflop);
  m.kwh_per_mparam = j.value("kwh_per_mparam", m.kwh_per_mparam);
  m.quad_coeff = j.value("quad_coeff", m.quad_coeff);
  m.noise_sigma = j.value("noise_sigma", m.noise_sigma);
  return m;
}

}  // namespace enorm
