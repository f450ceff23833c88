#include <doctest.h>

#include <enorm/report.hpp>
#include <enorm/rng.hpp>
#include <enorm/serialize.hpp>
#include <enorm/svg.hpp>

#include <unistd.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

using namespace enorm;
namespace fs = std::filesystem;

TEST_CASE("fnv1a64 matches the published test vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
  CHECK(fnv1a64("a") != fnv1a64("b"));
}

TEST_CASE("hex64 prints fixed-width lowercase hex") {
  CHECK(hex64(0) == "0000000000000000");
  CHECK(hex64(0xcbf29ce484222325ull) == "cbf29ce484222325");
  CHECK(hex64(0xdeadbeefull) == "00000000deadbeef");
}

TEST_CASE("file digests agree with in-memory digests") {
  const fs::path dir =
      fs::temp_directory_path() / ("enorm_report_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string path = (dir / "blob.bin").string();
  const std::string payload = "digest me\nplease\n";
  std::ofstream(path, std::ios::binary) << payload;
  CHECK(fnv1a64_file(path) == fnv1a64(payload));
  CHECK_THROWS_AS((void)fnv1a64_file((dir / "absent").string()), ParseError);
  std::error_code ec;
  fs::remove_all(dir, ec);
}

TEST_CASE("bundle digest ignores the timestamp and tracks the payload") {
  ReportBundle a;
  a.command_line = "enorm evaluate --pair x:y";
  a.timestamp = "2026-01-01T00:00:00Z";
  a.master_seed = 7;
  a.rng_algorithm = kRngAlgorithm;
  a.payload = {{"answer", 42}};
  a.input_digests.emplace_back("data.csv", "cbf29ce484222325");

  ReportBundle b = a;
  b.timestamp = "2031-12-31T23:59:59Z";

  const nlohmann::json ja = bundle_json(a);
  const nlohmann::json jb = bundle_json(b);
  CHECK(ja["content_digest"] == jb["content_digest"]);
  CHECK(ja["timestamp"] != jb["timestamp"]);
  CHECK(ja["tool"]["name"] == "enorm");

  ReportBundle c = a;
  c.payload = {{"answer", 43}};
  CHECK(bundle_json(c)["content_digest"] != ja["content_digest"]);

  nlohmann::json ja2 = ja;
  ja2["timestamp"] = "";
  nlohmann::json jb2 = jb;
  jb2["timestamp"] = "";
  CHECK(ja2.dump() == jb2.dump());
}

TEST_CASE("timestamps are iso8601 utc") {
  const std::string ts = iso8601_utc_now();
  REQUIRE(ts.size() == 20);
  CHECK(ts[4] == '-');
  CHECK(ts[10] == 'T');
  CHECK(ts.back() == 'Z');
}

TEST_CASE("enum names round trip") {
  for (RegKind v : {RegKind::linear, RegKind::poly2, RegKind::svr}) {
    CHECK(reg_kind_from_string(to_string(v)) == v);
  }
  for (StrategyKind v :
       {StrategyKind::single_low, StrategyKind::single_high,
        StrategyKind::dual_minmax, StrategyKind::random_fraction,
        StrategyKind::minmax_fraction}) {
    CHECK(strategy_kind_from_string(to_string(v)) == v);
  }
  for (FeatureSet v :
       {FeatureSet::energy_only, FeatureSet::energy_flops,
        FeatureSet::energy_params, FeatureSet::energy_flops_params}) {
    CHECK(feature_set_from_string(to_string(v)) == v);
  }
  for (ArchKind v : {ArchKind::mlp, ArchKind::cnn, ArchKind::rnn, ArchKind::crnn}) {
    CHECK(arch_kind_from_string(to_string(v)) == v);
  }
  for (MapKind v : {MapKind::ratio, MapKind::two_point, MapKind::regression}) {
    CHECK(map_kind_from_string(to_string(v)) == v);
  }
  for (FeatureTransform v : {FeatureTransform::raw, FeatureTransform::log10}) {
    CHECK(feature_transform_from_string(to_string(v)) == v);
  }
  for (SweepAxis v : {SweepAxis::reference_fraction, SweepAxis::regression_kind,
                      SweepAxis::feature_set}) {
    CHECK(sweep_axis_from_string(to_string(v)) == v);
  }
  CHECK_THROWS_AS((void)reg_kind_from_string("cubic"), ValidationError);
  CHECK_THROWS_AS((void)feature_set_from_string(""), ValidationError);
}

TEST_CASE("normalization maps of every kind survive json") {
  const fs::path dir =
      fs::temp_directory_path() / ("enorm_ser_" + std::to_string(::getpid()));
  fs::create_directories(dir);

  SUBCASE("ratio") {
    NormalizationMap map = fit_single_reference(0.5, 1.25);
    map.source_hw = "a";
    map.target_hw = "b";
    map.reference_ids = {"m1"};
    const std::string path = (dir / "ratio.json").string();
    write_map_json(map, path);
    const NormalizationMap back = load_map_json(path);
    CHECK(back.kind == MapKind::ratio);
    CHECK(back.factor == map.factor);
    CHECK(back.source_hw == "a");
    CHECK(back.reference_ids == map.reference_ids);
  }
  SUBCASE("two point") {
    NormalizationMap map = fit_dual_reference({0.2, 0.5}, {0.8, 2.3});
    map.source_hw = "a";
    map.target_hw = "b";
    const std::string path = (dir / "two.json").string();
    write_map_json(map, path);
    const NormalizationMap back = load_map_json(path);
    CHECK(back.kind == MapKind::two_point);
    CHECK(back.slope == map.slope);
    CHECK(back.intercept == map.intercept);
  }
  SUBCASE("regression with scaler") {
    PairData pair;
    pair.source_hw = "a";
    pair.target_hw = "b";
    pair.model_ids = {"m1", "m2", "m3", "m4"};
    pair.e_source = Eigen::VectorXd(4);
    pair.e_source << 0.1, 0.4, 0.7, 1.1;
    pair.e_target = Eigen::VectorXd(4);
    pair.e_target << 0.3, 0.9, 1.6, 2.4;
    pair.flops = Eigen::VectorXd(4);
    pair.flops << 1.0e9, 3.7e9, 7.1e9, 1.2e10;
    pair.params = Eigen::VectorXd(4);
    pair.params << 1e6, 2e6, 3e6, 4e6;
    RegressionSpec spec;
    spec.standardize = true;
    const NormalizationMap map = fit_regression_map(
        pair, {0, 1, 2, 3}, FeatureSet::energy_flops, FeatureTransform::log10,
        spec);
    const std::string path = (dir / "reg.json").string();
    write_map_json(map, path);
    const NormalizationMap back = load_map_json(path);
    CHECK(back.kind == MapKind::regression);
    CHECK(back.features == FeatureSet::energy_flops);
    CHECK(back.transform == FeatureTransform::log10);
    REQUIRE(back.model.has_value());
    REQUIRE(back.model->scaler.has_value());
    CHECK((back.model->weights.array() == map.model->weights.array()).all());
    CHECK(back.model->intercept == map.model->intercept);
    CHECK((back.model->scaler->mean.array() == map.model->scaler->mean.array())
              .all());

    Eigen::MatrixXd probe(2, 2);
    probe << 0.25, 2.5e9, 0.9, 9.0e9;
    const Eigen::VectorXd before = apply_map_features(map, probe);
    const Eigen::VectorXd after = apply_map_features(back, probe);
    CHECK(before(0) == after(0));
    CHECK(before(1) == after(1));
  }
  SUBCASE("corrupt map file") {
    const std::string path = (dir / "bad.json").string();
    std::ofstream(path) << "{ not json";
    CHECK_THROWS_AS((void)load_map_json(path), ParseError);
  }

  std::error_code ec;
  fs::remove_all(dir, ec);
}

TEST_CASE("architecture configs and cost reports serialize") {
  ArchitectureConfig cfg;
  cfg.kind = ArchKind::crnn;
  cfg.conv_layers = 2;
  cfg.conv_channels = 64;
  cfg.recurrent_layers = 2;
  cfg.recurrent_hidden = 128;
  const nlohmann::json j = to_json(cfg);
  CHECK(j["kind"] == "crnn");
  CHECK(j["conv_layers"] == 2);
  CHECK_FALSE(j.contains("linear_layers"));
  const ArchitectureConfig back = config_from_json(j);
  CHECK(back == cfg);

  const nlohmann::json cost = to_json(count_cost(cfg));
  CHECK(cost["params"].get<std::int64_t>() > 0);
  CHECK(cost["per_layer"].size() == 5);
}

TEST_CASE("config list files round trip with default model ids") {
  const fs::path dir =
      fs::temp_directory_path() / ("enorm_cfg_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string path = (dir / "configs.json").string();
  write_configs_json(builtin_config_grid().configs, path);
  const auto back = load_configs_json(path);
  REQUIRE(back.size() == 45);
  CHECK(back[0].first == builtin_config_grid().configs[0].first);
  CHECK(back[0].second == builtin_config_grid().configs[0].second);

  std::ofstream(path) << R"([{"kind": "mlp", "linear_layers": 2,
                              "hidden_size": 1024}])";
  const auto defaulted = load_configs_json(path);
  REQUIRE(defaulted.size() == 1);
  CHECK(defaulted[0].first == "mlp_l2_h1024");

  std::ofstream(path) << R"([{"kind": "transformer"}])";
  CHECK_THROWS_AS((void)load_configs_json(path), ValidationError);
  std::error_code ec;
  fs::remove_all(dir, ec);
}

TEST_CASE("synthetic hardware models serialize") {
  SyntheticHardwareModel hw;
  hw.hardware_id = "card_x";
  hw.name = "Card X";
  hw.tdp_watts = 199.0;
  hw.memory_gib = 40.0;
  hw.base_kwh = 0.011;
  hw.kwh_per_gflop = 0.0021;
  hw.kwh_per_mparam = 0.0003;
  hw.quad_coeff = 2e-6;
  hw.noise_sigma = 0.07;
  const SyntheticHardwareModel back =
      synthetic_hardware_from_json(to_json(hw));
  CHECK(back.hardware_id == hw.hardware_id);
  CHECK(back.kwh_per_gflop == hw.kwh_per_gflop);
  CHECK(back.quad_coeff == hw.quad_coeff);
  CHECK(back.noise_sigma == hw.noise_sigma);
}

TEST_CASE("fold csv lists one row per fold per cell") {
  SweepCell cell;
  cell.axis_value = "0.10";
  cell.ok = true;
  cell.report.folds.resize(2);
  cell.report.folds[0].fold = 0;
  cell.report.folds[0].r2 = 0.5;
  cell.report.folds[1].fold = 1;
  cell.report.folds[1].failed = true;
  cell.report.folds[1].failure_reason = "broke";
  const std::string csv = folds_csv({cell});
  CHECK(csv.find("axis_value,fold") == 0);
  CHECK(csv.find("0.10,0,") != std::string::npos);
  CHECK(csv.find("0.10,1,") != std::string::npos);
  int lines = 0;
  for (char ch : csv) {
    if (ch == '\n') ++lines;
  }
  CHECK(lines == 3);
}

TEST_CASE("scatter svg draws points and the identity line") {
  ScatterSeries series;
  series.label = "pair";
  series.x = {0.1, 0.5, 2.0};
  series.y = {0.2, 0.4, 2.5};
  const std::string svg =
      svg_scatter_loglog("energy", "source kwh", "target kwh", {series});
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("y = x") != std::string::npos);
  CHECK(svg.find("circle") != std::string::npos);
  CHECK(svg.find("energy") != std::string::npos);
  const std::string again =
      svg_scatter_loglog("energy", "source kwh", "target kwh", {series});
  CHECK(svg == again);

  ScatterSeries bad = series;
  bad.x[1] = 0.0;
  CHECK_THROWS_AS((void)svg_scatter_loglog("t", "x", "y", {bad}),
                  ValidationError);
  ScatterSeries ragged = series;
  ragged.y.pop_back();
  CHECK_THROWS_AS((void)svg_scatter_loglog("t", "x", "y", {ragged}),
                  ValidationError);
}

TEST_CASE("grouped bars and metric panels render") {
  const std::vector<std::string> labels = {"linear", "poly2"};
  const std::vector<BarGroup> r2 = {{"0.10", {0.8, 0.7}}, {"0.20", {0.9, 0.85}}};
  const std::vector<BarGroup> mse = {{"0.10", {1e-4, 2e-4}},
                                     {"0.20", {5e-5, 1e-4}}};
  const std::string bars = svg_grouped_bars("r2 by cell", labels, r2);
  CHECK(bars.find("<svg") == 0);
  CHECK(bars.find("rect") != std::string::npos);
  CHECK(bars.find("linear") != std::string::npos);

  const std::string panels = svg_metric_panels("sweep", labels, r2, mse);
  CHECK(panels.find("R2") != std::string::npos);
  CHECK(panels.find("MSE") != std::string::npos);
  CHECK(panels.find("log scale") != std::string::npos);

  const std::vector<BarGroup> ragged = {{"0.10", {0.8}}};
  CHECK_THROWS_AS((void)svg_grouped_bars("t", labels, ragged), ValidationError);

  const std::vector<BarGroup> negative = {{"a", {-0.5, 0.5}}};
  const std::string with_negative = svg_grouped_bars("neg", labels, negative);
  CHECK(with_negative.find("<svg") == 0);
}
