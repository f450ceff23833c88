#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "enorm/archcost.hpp"
#include "enorm/dataset.hpp"
#include "enorm/evaluate.hpp"
#include "enorm/normalize.hpp"
#include "enorm/report.hpp"
#include "enorm/rng.hpp"
#include "enorm/serialize.hpp"
#include "enorm/svg.hpp"
#include "enorm/synth.hpp"

namespace {

using namespace enorm;

namespace fs = std::filesystem;

std::string g_command_line;

// Relative outputs land in ENORM_OUT_DIR when it is set.
std::string out_path(const std::string& p) {
  if (p.empty() || fs::path(p).is_absolute()) return p;
  const char* dir = std::getenv("ENORM_OUT_DIR");
  if (!dir || !*dir) return p;
  return (fs::path(dir) / p).string();
}

void write_text(const std::string& path, const std::string& content) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError(path + ": cannot open for writing");
  out << content;
}

ReportBundle make_bundle(std::uint32_t seed) {
  ReportBundle bundle;
  bundle.command_line = g_command_line;
  bundle.timestamp = iso8601_utc_now();
  bundle.master_seed = seed;
  bundle.rng_algorithm = kRngAlgorithm;
  return bundle;
}

void add_digest(ReportBundle& bundle, const std::string& path) {
  bundle.input_digests.emplace_back(path, hex64(fnv1a64_file(path)));
}

void emit_bundle(const ReportBundle& bundle, bool json,
                 const std::string& human) {
  if (json) {
    std::cout << bundle_json(bundle).dump(2) << "\n";
  } else {
    std::cout << human;
    for (const auto& a : bundle.artifacts) {
      std::cout << "wrote " << a << "\n";
    }
  }
}

struct DataArgs {
  std::vector<std::string> paths;
  std::string format = "csv";

  MeasurementTable load(ReportBundle& bundle) const {
    const FileFormat fmt =
        format == "json" ? FileFormat::json : FileFormat::csv;
    MeasurementTable table = ingest(paths, fmt);
    for (const auto& p : paths) add_digest(bundle, p);
    return table;
  }
};

void add_data_options(CLI::App* cmd, DataArgs& args) {
  cmd->add_option("--data", args.paths,
                  "records CSV + hardware CSV, or one JSON file")
      ->required()
      ->expected(1, 2);
  cmd->add_option("--format", args.format, "input format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
}

std::pair<std::string, std::string> parse_pair(const std::string& pair) {
  const auto colon = pair.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == pair.size()) {
    throw UsageError("--pair expects SOURCE:TARGET hardware ids");
  }
  return {pair.substr(0, colon), pair.substr(colon + 1)};
}

// ---------------------------------------------------------------- ingest ----

struct IngestArgs {
  DataArgs data;
  std::string out;
  bool json = false;
};

void run_ingest(const IngestArgs& args) {
  ReportBundle bundle = make_bundle(0);
  const MeasurementTable table = args.data.load(bundle);

  const auto per_hw = table.records_per_hardware();
  const auto per_kind = table.models_per_kind();
  const std::string summary =
      std::to_string(table.hardware().size()) + " hardware, " +
      std::to_string(table.model_ids().size()) + " models, " +
      std::to_string(table.records().size()) + " records";

  nlohmann::json payload;
  payload["summary"] = summary;
  payload["n_hardware"] = table.hardware().size();
  payload["n_models"] = table.model_ids().size();
  payload["n_records"] = table.records().size();
  payload["records_per_hardware"] = per_hw;
  payload["models_per_kind"] = per_kind;
  bundle.payload = payload;

  if (!args.out.empty()) {
    const std::string path = out_path(args.out);
    const fs::path parent = fs::path(path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
    write_json(table, path);
    bundle.artifacts.push_back(path);
  }

  std::string human = summary + "\n";
  for (const auto& [id, count] : per_hw) {
    human += "  " + id + ": " + std::to_string(count) + " records\n";
  }
  for (const auto& [kind, count] : per_kind) {
    human += "  " + kind + ": " + std::to_string(count) + " models\n";
  }
  emit_bundle(bundle, args.json, human);
}

// ----------------------------------------------------------------- flops ----

struct FlopsArgs {
  std::string config;
  bool paper_set = false;
  bool per_layer = false;
  std::string out;
  bool json = false;
};

void run_flops(const FlopsArgs& args) {
  if (args.paper_set == !args.config.empty()) {
    throw UsageError("pass exactly one of --config or --paper-set");
  }
  ReportBundle bundle = make_bundle(0);

  std::vector<std::pair<std::string, ArchitectureConfig>> configs;
  nlohmann::json payload;
  if (args.paper_set) {
    const ConfigGrid grid = builtin_config_grid();
    configs = grid.configs;
    payload["expanded_count"] = grid.expanded_count;
    payload["reported_count"] = grid.reported_count;
    payload["note"] = grid.note;
  } else {
    add_digest(bundle, args.config);
    configs = load_configs_json(args.config);
  }

  std::string csv = "model_id,kind,params,flops_forward\n";
  payload["rows"] = nlohmann::json::array();
  std::string human;
  for (const auto& [id, cfg] : configs) {
    const CostReport rep = count_cost(cfg);
    nlohmann::json row = {{"model_id", id},
                          {"kind", to_string(cfg.kind)},
                          {"params", rep.params},
                          {"flops_forward", rep.flops_forward}};
    if (args.per_layer) row["per_layer"] = to_json(rep)["per_layer"];
    payload["rows"].push_back(std::move(row));
    csv += id + "," + to_string(cfg.kind) + "," + std::to_string(rep.params) +
           "," + std::to_string(rep.flops_forward) + "\n";
    char line[160];
    std::snprintf(line, sizeof(line), "%-28s %-5s %14lld %16lld\n", id.c_str(),
                  to_string(cfg.kind).c_str(),
                  static_cast<long long>(rep.params),
                  static_cast<long long>(rep.flops_forward));
    human += line;
  }
  if (payload.contains("note")) {
    csv += "# " + payload["note"].get<std::string>() + "\n";
    human += payload["note"].get<std::string>() + "\n";
  }
  bundle.payload = payload;

  if (!args.out.empty()) {
    const std::string path = out_path(args.out);
    write_text(path, csv);
    bundle.artifacts.push_back(path);
  }
  emit_bundle(bundle, args.json, human);
}

// -------------------------------------------------------------- simulate ----

struct SimulateArgs {
  std::string scenario = "builtin";
  std::uint32_t seed = 0;
  double noise_sigma = -1.0;  // <0 keeps scenario values
  std::string out = "synth";
  bool json = false;
};

void run_simulate(const SimulateArgs& args) {
  ReportBundle bundle = make_bundle(args.seed);
  Scenario scenario;
  if (args.scenario == "builtin") {
    scenario = default_scenario();
  } else {
    add_digest(bundle, args.scenario);
    scenario = load_scenario(args.scenario);
  }
  if (args.noise_sigma >= 0.0) {
    for (auto& hw : scenario.hardware) hw.noise_sigma = args.noise_sigma;
  }

  const MeasurementTable table =
      generate(scenario.configs, scenario.hardware, args.seed);

  const std::string records_path = out_path(args.out + "_records.csv");
  const std::string hardware_path = out_path(args.out + "_hardware.csv");
  for (const auto& p : {records_path, hardware_path}) {
    const fs::path parent = fs::path(p).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
  }
  write_csv(table, records_path, hardware_path);
  bundle.artifacts.push_back(records_path);
  bundle.artifacts.push_back(hardware_path);

  nlohmann::json payload;
  payload["note"] = scenario.note;
  payload["config_source"] = scenario.config_source;
  payload["n_configs"] = scenario.configs.size();
  payload["n_hardware"] = scenario.hardware.size();
  payload["n_records"] = table.records().size();
  bundle.payload = payload;

  emit_bundle(bundle, args.json,
              "generated " + std::to_string(table.records().size()) +
                  " records for " + std::to_string(scenario.hardware.size()) +
                  " hardware\n");
}

// ------------------------------------------------------------ fit common ----

struct FitFlags {
  std::string pair;
  std::string regression = "linear";
  std::string features = "energy_only";
  std::string transform = "raw";
  std::string strategy = "random_fraction";
  std::string rank_by = "source";
  double fraction = 0.10;
  std::uint32_t seed = 0;
  double svr_c = 0.1;
  double svr_epsilon = 1e-4;
  bool standardize = false;
};

void add_fit_options(CLI::App* cmd, FitFlags& flags) {
  cmd->add_option("--pair", flags.pair, "SOURCE:TARGET hardware ids")->required();
  cmd->add_option("--regression", flags.regression, "regression kind")
      ->check(CLI::IsMember({"linear", "poly2", "svr"}))
      ->capture_default_str();
  cmd->add_option("--features", flags.features, "regression feature set")
      ->check(CLI::IsMember({"energy_only", "energy_flops", "energy_params",
                             "energy_flops_params"}))
      ->capture_default_str();
  cmd->add_option("--transform", flags.transform, "feature/target transform")
      ->check(CLI::IsMember({"raw", "log10"}))
      ->capture_default_str();
  cmd->add_option("--strategy", flags.strategy, "reference selection strategy")
      ->check(CLI::IsMember({"single_low", "single_high", "dual_minmax",
                             "random_fraction", "minmax_fraction"}))
      ->capture_default_str();
  cmd->add_option("--rank-by", flags.rank_by,
                  "energy column used to rank models for min-max selection")
      ->check(CLI::IsMember({"source", "target"}))
      ->capture_default_str();
  cmd->add_option("--fraction", flags.fraction,
                  "reference fraction for fraction strategies")
      ->capture_default_str();
  cmd->add_option("--seed", flags.seed, "master seed")->capture_default_str();
  cmd->add_option("--svr-c", flags.svr_c, "SVR regularization C")
      ->capture_default_str();
  cmd->add_option("--svr-epsilon", flags.svr_epsilon, "SVR tube half-width")
      ->capture_default_str();
  cmd->add_flag("--standardize", flags.standardize,
                "z-score features before regression");
}

RegressionSpec regression_from(const FitFlags& flags) {
  RegressionSpec spec;
  spec.kind = reg_kind_from_string(flags.regression);
  spec.svr_c = flags.svr_c;
  spec.svr_epsilon = flags.svr_epsilon;
  spec.standardize = flags.standardize;
  return spec;
}

ReferenceStrategy strategy_from(const FitFlags& flags) {
  ReferenceStrategy strategy;
  strategy.kind = strategy_kind_from_string(flags.strategy);
  strategy.fraction = flags.fraction;
  strategy.seed = flags.seed;
  strategy.rank_by = rank_by_from_string(flags.rank_by);
  return strategy;
}

// ------------------------------------------------------------------- fit ----

struct FitArgs {
  DataArgs data;
  FitFlags flags;
  std::string out = "map.json";
  bool json = false;
};

void run_fit(const FitArgs& args) {
  ReportBundle bundle = make_bundle(args.flags.seed);
  const MeasurementTable table = args.data.load(bundle);
  const auto [source, target] = parse_pair(args.flags.pair);
  const PairData pair = pivot_pair(table, source, target);

  ReferenceStrategy strategy = strategy_from(args.flags);
  const std::vector<int> refs = select_references(pair, strategy);
  const FeatureSet features = feature_set_from_string(args.flags.features);
  const FeatureTransform transform =
      feature_transform_from_string(args.flags.transform);

  NormalizationMap map;
  switch (strategy.kind) {
    case StrategyKind::single_low:
    case StrategyKind::single_high: {
      const int r = refs.front();
      map = fit_single_reference(pair.e_source(r), pair.e_target(r));
      map.source_hw = source;
      map.target_hw = target;
      for (int i : refs) map.reference_ids.push_back(pair.model_ids[i]);
      break;
    }
    case StrategyKind::dual_minmax: {
      const Eigen::VectorXd& e =
          strategy.rank_by == RankBy::source ? pair.e_source : pair.e_target;
      int lo = refs.front(), hi = refs.front();
      for (int r : refs) {
        if (e(r) < e(lo)) lo = r;
        if (e(r) > e(hi)) hi = r;
      }
      map = fit_dual_reference({pair.e_source(lo), pair.e_target(lo)},
                               {pair.e_source(hi), pair.e_target(hi)});
      map.source_hw = source;
      map.target_hw = target;
      for (int i : refs) map.reference_ids.push_back(pair.model_ids[i]);
      break;
    }
    default:
      map = fit_regression_map(pair, refs, features, transform,
                               regression_from(args.flags));
      break;
  }

  const std::string path = out_path(args.out);
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  write_map_json(map, path);
  bundle.artifacts.push_back(path);
  bundle.payload = {{"map", to_json(map)},
                    {"n_references", refs.size()},
                    {"n_pair_models", pair.n()},
                    {"omitted_models", pair.omitted}};

  emit_bundle(bundle, args.json,
              "fitted " + to_string(map.kind) + " map " + source + " -> " +
                  target + " on " + std::to_string(refs.size()) +
                  " reference models\n");
}

// ------------------------------------------------------------- normalize ----

struct NormalizeArgs {
  DataArgs data;
  std::string map_path;
  std::string out = "normalized.csv";
  bool json = false;
};

void run_normalize(const NormalizeArgs& args) {
  ReportBundle bundle = make_bundle(0);
  add_digest(bundle, args.map_path);
  const NormalizationMap map = load_map_json(args.map_path);
  const MeasurementTable table = args.data.load(bundle);
  if (map.source_hw.empty()) {
    throw ValidationError("map file does not name its source hardware");
  }
  if (!table.has_hardware(map.source_hw)) {
    throw ValidationError("dataset lacks the map's source hardware '" +
                          map.source_hw + "'");
  }

  const bool need_flops = map.kind == MapKind::regression && uses_flops(map.features);
  const bool need_params = map.kind == MapKind::regression && uses_params(map.features);
  const int d = map.kind == MapKind::regression ? feature_dim(map.features) : 1;

  std::vector<const EnergyRecord*> rows;
  for (const auto& r : table.records()) {
    if (r.hardware_id != map.source_hw) continue;
    if (need_flops && !r.flops_forward) {
      throw ValidationError("record (" + r.model_id + ", " + r.hardware_id +
                            ") lacks flops_forward required by the map");
    }
    if (need_params && !r.params) {
      throw ValidationError("record (" + r.model_id + ", " + r.hardware_id +
                            ") lacks params required by the map");
    }
    rows.push_back(&r);
  }
  if (rows.empty()) {
    throw ValidationError("no records on source hardware '" + map.source_hw + "'");
  }

  Eigen::MatrixXd X(static_cast<long>(rows.size()), d);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = *rows[i];
    X(static_cast<long>(i), 0) = r.gpu_energy_kwh;
    int col = 1;
    if (need_flops) X(static_cast<long>(i), col++) = *r.flops_forward;
    if (need_params) X(static_cast<long>(i), col++) = *r.params;
  }
  const Eigen::VectorXd pred = apply_map_features(map, X);

  std::string csv = "model_id,source_kwh,predicted_target_kwh,actual_target_kwh\n";
  nlohmann::json jrows = nlohmann::json::array();
  char buf[128];
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = *rows[i];
    const EnergyRecord* actual =
        map.target_hw.empty() ? nullptr : table.find(r.model_id, map.target_hw);
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g", r.gpu_energy_kwh,
                  pred(static_cast<long>(i)));
    csv += r.model_id + "," + buf;
    nlohmann::json row = {{"model_id", r.model_id},
                          {"source_kwh", r.gpu_energy_kwh},
                          {"predicted_target_kwh", pred(static_cast<long>(i))}};
    if (actual) {
      std::snprintf(buf, sizeof(buf), ",%.17g", actual->gpu_energy_kwh);
      csv += buf;
      row["actual_target_kwh"] = actual->gpu_energy_kwh;
    } else {
      csv += ",";
    }
    csv += "\n";
    jrows.push_back(std::move(row));
  }

  const std::string path = out_path(args.out);
  write_text(path, csv);
  bundle.artifacts.push_back(path);
  bundle.payload = {{"map_kind", to_string(map.kind)},
                    {"source_hw", map.source_hw},
                    {"target_hw", map.target_hw},
                    {"rows", jrows}};

  emit_bundle(bundle, args.json,
              "normalized " + std::to_string(rows.size()) + " records from " +
                  map.source_hw + "\n");
}

// -------------------------------------------------------------- evaluate ----

struct EvaluateArgs {
  DataArgs data;
  FitFlags flags;
  int repeats = 5;
  double train_fraction = 0.8;
  bool fix_references = false;
  std::string axis;
  std::string out;
  bool json = false;
};

SweepAxis axis_from(const std::string& s) {
  if (s == "fraction" || s == "reference_fraction") {
    return SweepAxis::reference_fraction;
  }
  if (s == "regression" || s == "regression_kind") {
    return SweepAxis::regression_kind;
  }
  if (s == "features" || s == "feature_set") return SweepAxis::feature_set;
  throw UsageError("unknown sweep axis '" + s +
                   "' (expected fraction, regression or features)");
}

void run_evaluate(const EvaluateArgs& args) {
  ReportBundle bundle = make_bundle(args.flags.seed);
  const MeasurementTable table = args.data.load(bundle);
  const auto [source, target] = parse_pair(args.flags.pair);

  ExperimentSpec spec;
  spec.source_hw = source;
  spec.target_hw = target;
  spec.regression = regression_from(args.flags);
  spec.features = feature_set_from_string(args.flags.features);
  spec.transform = feature_transform_from_string(args.flags.transform);
  spec.strategy = strategy_from(args.flags);
  spec.n_repeats = args.repeats;
  spec.train_fraction = args.train_fraction;
  spec.master_seed = args.flags.seed;
  spec.fix_references_across_folds = args.fix_references;

  std::vector<SweepCell> cells;
  std::string human;
  char buf[160];
  if (args.axis.empty()) {
    SweepCell cell;
    cell.axis_value = "-";
    cell.report = run_experiment(table, spec);
    cell.ok = true;
    cells.push_back(std::move(cell));
    bundle.payload = {{"report", to_json(cells.front().report)}};
    const EvalReport& rep = cells.front().report;
    std::snprintf(buf, sizeof(buf),
                  "%s -> %s: mean R2 %.6f (sd %.6f), mean MSE %.6g, %d/%d folds ok\n",
                  source.c_str(), target.c_str(), rep.mean_r2, rep.std_r2,
                  rep.mean_mse, rep.n_ok, static_cast<int>(rep.folds.size()));
    human += buf;
  } else {
    const SweepAxis axis = axis_from(args.axis);
    cells = sweep(table, spec, axis);
    nlohmann::json jcells = nlohmann::json::array();
    for (const auto& cell : cells) jcells.push_back(to_json(cell));
    bundle.payload = {{"sweep_axis", to_string(axis)}, {"cells", jcells}};
    for (const auto& cell : cells) {
      if (cell.ok) {
        std::snprintf(buf, sizeof(buf),
                      "%-22s mean R2 %9.6f (sd %.6f)  mean MSE %.6g  %d/%d ok\n",
                      cell.axis_value.c_str(), cell.report.mean_r2,
                      cell.report.std_r2, cell.report.mean_mse, cell.report.n_ok,
                      static_cast<int>(cell.report.folds.size()));
      } else {
        std::snprintf(buf, sizeof(buf), "%-22s infeasible: %s\n",
                      cell.axis_value.c_str(), cell.error.c_str());
      }
      human += buf;
    }
  }

  if (!args.out.empty()) {
    const std::string path = out_path(args.out);
    const std::string folds_path =
        (fs::path(path).parent_path() / fs::path(path).stem()).string() +
        "_folds.csv";
    bundle.artifacts.push_back(path);
    bundle.artifacts.push_back(folds_path);
    write_text(path, bundle_json(bundle).dump(2) + "\n");
    write_text(folds_path, folds_csv(cells));
  }
  emit_bundle(bundle, args.json, human);
}

// ------------------------------------------------------------------ plot ----

struct PlotArgs {
  std::string report;
  DataArgs data;
  std::string pair;
  std::string map_path;
  std::string title;
  std::string out = "plot.svg";
  bool json = false;
};

void run_plot_report(const PlotArgs& args, ReportBundle& bundle) {
  add_digest(bundle, args.report);
  std::ifstream in(args.report);
  if (!in) throw ParseError(args.report + ": cannot open file");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(args.report + ": " + e.what());
  }

  const nlohmann::json& payload = j.contains("payload") ? j["payload"] : j;
  std::vector<BarGroup> r2_groups, mse_groups;
  std::string axis = "cell";
  try {
    if (payload.contains("cells")) {
      axis = payload.value("sweep_axis", axis);
      for (const auto& cj : payload["cells"]) {
        if (!cj.value("ok", false)) continue;
        const auto& rep = cj.at("report");
        r2_groups.push_back({cj.at("axis_value").get<std::string>(),
                             {rep.at("mean_r2").get<double>()}});
        mse_groups.push_back({cj.at("axis_value").get<std::string>(),
                              {rep.at("mean_mse").get<double>()}});
      }
    } else if (payload.contains("report")) {
      const auto& rep = payload.at("report");
      r2_groups.push_back({"run", {rep.at("mean_r2").get<double>()}});
      mse_groups.push_back({"run", {rep.at("mean_mse").get<double>()}});
    } else {
      throw ParseError(args.report + ": no report or sweep cells in payload");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(args.report + ": " + e.what());
  }
  if (r2_groups.empty()) {
    throw ValidationError(args.report + ": no successful cells to plot");
  }

  const std::string title =
      args.title.empty() ? "normalization quality by " + axis : args.title;
  const std::string svg =
      svg_metric_panels(title, {"mean"}, r2_groups, mse_groups);

  std::string csv = "axis_value,mean_r2,mean_mse\n";
  char buf[96];
  nlohmann::json points = nlohmann::json::array();
  for (std::size_t i = 0; i < r2_groups.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g", r2_groups[i].values[0],
                  mse_groups[i].values[0]);
    csv += r2_groups[i].label + "," + buf + "\n";
    points.push_back({{"axis_value", r2_groups[i].label},
                      {"mean_r2", r2_groups[i].values[0]},
                      {"mean_mse", mse_groups[i].values[0]}});
  }

  const std::string svg_path = out_path(args.out);
  const std::string csv_path =
      (fs::path(svg_path).parent_path() / fs::path(svg_path).stem()).string() +
      ".csv";
  write_text(svg_path, svg);
  write_text(csv_path, csv);
  bundle.artifacts.push_back(svg_path);
  bundle.artifacts.push_back(csv_path);
  bundle.payload = {{"mode", "bars"}, {"cells", points}};
}

void run_plot_scatter(const PlotArgs& args, ReportBundle& bundle) {
  const MeasurementTable table = args.data.load(bundle);
  const auto [source, target] = parse_pair(args.pair);
  const PairData pair = pivot_pair(table, source, target);

  Eigen::VectorXd x = pair.e_source;
  std::string x_label = "energy on " + source + " [kWh]";
  std::string series_label = "raw source energy";
  if (!args.map_path.empty()) {
    add_digest(bundle, args.map_path);
    const NormalizationMap map = load_map_json(args.map_path);
    auto [X, y] = build_design_matrix(
        pair, map.kind == MapKind::regression ? map.features : FeatureSet::energy_only,
        FeatureTransform::raw);
    x = apply_map_features(map, X);
    x_label = "normalized energy [kWh]";
    series_label = "normalized " + to_string(map.kind);
  }

  double mean_abs_log10 = 0.0;
  int n_pos = 0;
  ScatterSeries series;
  series.label = series_label;
  std::string csv = "model_id,x,y\n";
  char buf[96];
  for (int i = 0; i < pair.n(); ++i) {
    if (!(x(i) > 0.0) || !(pair.e_target(i) > 0.0)) {
      throw ValidationError("non-positive energy cannot be drawn on log axes");
    }
    series.x.push_back(x(i));
    series.y.push_back(pair.e_target(i));
    mean_abs_log10 += std::abs(std::log10(x(i) / pair.e_target(i)));
    n_pos++;
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g", x(i), pair.e_target(i));
    csv += pair.model_ids[static_cast<std::size_t>(i)] + "," + buf + "\n";
  }
  mean_abs_log10 /= n_pos;

  const std::string title = args.title.empty()
                                ? source + " vs " + target + " energy"
                                : args.title;
  const std::string svg = svg_scatter_loglog(
      title, x_label, "energy on " + target + " [kWh]", {series}, true);

  const std::string svg_path = out_path(args.out);
  const std::string csv_path =
      (fs::path(svg_path).parent_path() / fs::path(svg_path).stem()).string() +
      ".csv";
  write_text(svg_path, svg);
  write_text(csv_path, csv);
  bundle.artifacts.push_back(svg_path);
  bundle.artifacts.push_back(csv_path);
  bundle.payload = {{"mode", "scatter"},
                    {"n_points", pair.n()},
                    {"mean_abs_log10_ratio", mean_abs_log10}};
}

void run_plot(const PlotArgs& args) {
  ReportBundle bundle = make_bundle(0);
  std::string human;
  if (!args.report.empty()) {
    run_plot_report(args, bundle);
    human = "plotted " + std::to_string(bundle.payload["cells"].size()) +
            " cells\n";
  } else if (!args.data.paths.empty()) {
    if (args.pair.empty()) throw UsageError("scatter plots need --pair");
    run_plot_scatter(args, bundle);
    char buf[96];
    std::snprintf(buf, sizeof(buf),
                  "plotted %d points, mean |log10(x/y)| = %.6f\n",
                  bundle.payload["n_points"].get<int>(),
                  bundle.payload["mean_abs_log10_ratio"].get<double>());
    human = buf;
  } else {
    throw UsageError("plot needs either --report or --data with --pair");
  }
  emit_bundle(bundle, args.json, human);
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 0; i < argc; ++i) {
    if (i) g_command_line += ' ';
    g_command_line += argv[i];
  }

  CLI::App app{"energy normalization toolkit for cross-hardware training "
               "measurements"};
  app.require_subcommand(1);

  IngestArgs ingest_args;
  auto* c_ingest = app.add_subcommand("ingest", "validate and summarize a dataset");
  add_data_options(c_ingest, ingest_args.data);
  c_ingest->add_option("--out", ingest_args.out,
                       "write the validated dataset as canonical JSON");
  c_ingest->add_flag("--json", ingest_args.json, "machine-readable output");

  FlopsArgs flops_args;
  auto* c_flops = app.add_subcommand("flops", "analytic FLOPs/parameter counts");
  c_flops->add_option("--config", flops_args.config, "config list JSON");
  c_flops->add_flag("--paper-set", flops_args.paper_set,
                    "use the built-in configuration grid");
  c_flops->add_flag("--per-layer", flops_args.per_layer,
                    "include per-layer rows in JSON output");
  c_flops->add_option("--out", flops_args.out, "write a CSV table");
  c_flops->add_flag("--json", flops_args.json, "machine-readable output");

  SimulateArgs sim_args;
  auto* c_sim = app.add_subcommand("simulate", "generate a synthetic dataset");
  c_sim->add_option("--scenario", sim_args.scenario,
                    "scenario JSON, or 'builtin'")
      ->capture_default_str();
  c_sim->add_option("--seed", sim_args.seed, "generator seed")
      ->capture_default_str();
  c_sim->add_option("--noise-sigma", sim_args.noise_sigma,
                    "override every hardware's noise sigma");
  c_sim->add_option("--out", sim_args.out, "output prefix for the CSV pair")
      ->capture_default_str();
  c_sim->add_flag("--json", sim_args.json, "machine-readable output");

  FitArgs fit_args;
  auto* c_fit = app.add_subcommand("fit", "fit a normalization map");
  add_data_options(c_fit, fit_args.data);
  add_fit_options(c_fit, fit_args.flags);
  c_fit->add_option("--out", fit_args.out, "map output path")
      ->capture_default_str();
  c_fit->add_flag("--json", fit_args.json, "machine-readable output");

  NormalizeArgs norm_args;
  auto* c_norm = app.add_subcommand("normalize", "apply a fitted map to a dataset");
  add_data_options(c_norm, norm_args.data);
  c_norm->add_option("--map", norm_args.map_path, "map JSON from 'fit'")
      ->required();
  c_norm->add_option("--out", norm_args.out, "output CSV path")
      ->capture_default_str();
  c_norm->add_flag("--json", norm_args.json, "machine-readable output");

  EvaluateArgs eval_args;
  auto* c_eval = app.add_subcommand("evaluate",
                                    "repeated-split evaluation of a setup");
  add_data_options(c_eval, eval_args.data);
  add_fit_options(c_eval, eval_args.flags);
  c_eval->add_option("--repeats", eval_args.repeats, "number of folds")
      ->capture_default_str();
  c_eval->add_option("--train-fraction", eval_args.train_fraction,
                     "train split fraction")
      ->capture_default_str();
  c_eval->add_flag("--fix-references", eval_args.fix_references,
                   "reuse one random reference draw across folds");
  c_eval->add_option("--axis", eval_args.axis,
                     "sweep axis: fraction, regression or features");
  c_eval->add_option("--out", eval_args.out, "report bundle output path");
  c_eval->add_flag("--json", eval_args.json, "machine-readable output");

  PlotArgs plot_args;
  auto* c_plot = app.add_subcommand("plot", "render report bars or pair scatter");
  c_plot->add_option("--report", plot_args.report, "bundle JSON from 'evaluate'");
  c_plot->add_option("--data", plot_args.data.paths,
                     "records CSV + hardware CSV, or one JSON file")
      ->expected(1, 2);
  c_plot->add_option("--format", plot_args.data.format, "input format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  c_plot->add_option("--pair", plot_args.pair, "SOURCE:TARGET hardware ids");
  c_plot->add_option("--map", plot_args.map_path,
                     "normalize scatter x values with this map");
  c_plot->add_option("--title", plot_args.title, "plot title");
  c_plot->add_option("--out", plot_args.out, "SVG output path")
      ->capture_default_str();
  c_plot->add_flag("--json", plot_args.json, "machine-readable output");

  c_ingest->callback([&] { run_ingest(ingest_args); });
  c_flops->callback([&] { run_flops(flops_args); });
  c_sim->callback([&] { run_simulate(sim_args); });
  c_fit->callback([&] { run_fit(fit_args); });
  c_norm->callback([&] { run_normalize(norm_args); });
  c_eval->callback([&] { run_evaluate(eval_args); });
  c_plot->callback([&] { run_plot(plot_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const InfeasibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
