#include "enorm/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"

#include "enorm/rng.hpp"
#include "enorm/serialize.hpp"

namespace enorm {

MeasurementTable generate(
    const std::vector<std::pair<std::string, ArchitectureConfig>>& configs,
    const std::vector<SyntheticHardwareModel>& hardware, std::uint32_t seed) {
  if (configs.empty()) throw ValidationError("generate: no configs");
  if (hardware.empty()) throw ValidationError("generate: no hardware");
  for (const SyntheticHardwareModel& hw : hardware) {
    if (hw.noise_sigma < 0.0) {
      throw ValidationError("generate: noise_sigma for " + hw.hardware_id +
                            " must be >= 0");
    }
  }

  auto sorted_configs = configs;
  std::sort(sorted_configs.begin(), sorted_configs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  auto sorted_hw = hardware;
  std::sort(sorted_hw.begin(), sorted_hw.end(),
            [](const SyntheticHardwareModel& a, const SyntheticHardwareModel& b) {
              return a.hardware_id < b.hardware_id;
            });

  struct CellCost {
    std::string id;
    double flops = 0.0;
    double params = 0.0;
    double gflops = 0.0;
    double mparams = 0.0;
  };
  std::vector<CellCost> costs;
  for (const auto& [id, cfg] : sorted_configs) {
    const CostReport rep = count_cost(cfg);
    CellCost c;
    c.id = id;
    c.flops = static_cast<double>(rep.flops_forward);
    c.params = static_cast<double>(rep.params);
    c.gflops = c.flops / 1e9;
    c.mparams = c.params / 1e6;
    costs.push_back(std::move(c));
  }

  Rng rng(seed);
  std::vector<HardwareSpec> hw_specs;
  std::vector<EnergyRecord> records;
  for (const auto& hw : sorted_hw) {
    HardwareSpec spec;
    spec.id = hw.hardware_id;
    spec.name = hw.name.empty() ? hw.hardware_id : hw.name;
    spec.tdp_watts = hw.tdp_watts;
    spec.memory_gib = hw.memory_gib;
    hw_specs.push_back(std::move(spec));

    for (const auto& c : costs) {
      const double mean = hw.base_kwh + hw.kwh_per_gflop * c.gflops +
                          hw.kwh_per_mparam * c.mparams +
                          hw.quad_coeff * c.gflops * c.gflops;
      const double g = rng.gauss();  // drawn unconditionally to pair draws
      const double energy = mean * std::exp(hw.noise_sigma * g);
      if (!(energy > 0.0) || !std::isfinite(energy)) {
        throw ValidationError("synthetic energy for (" + c.id + ", " +
                              hw.hardware_id + ") is not positive");
      }
      EnergyRecord rec;
      rec.model_id = c.id;
      rec.hardware_id = hw.hardware_id;
      rec.gpu_energy_kwh = energy;
      rec.epochs = 10;
      rec.batch_size = 8;
      rec.flops_forward = c.flops;
      rec.params = c.params;
      records.push_back(std::move(rec));
    }
  }
  return MeasurementTable(std::move(hw_specs), std::move(records));
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  Scenario scenario;
  try {
    scenario.note = j.value("note", std::string());
    scenario.config_source = j.value("configs", std::string("builtin"));
    for (const auto& hj : j.at("hardware")) {
      scenario.hardware.push_back(synthetic_hardware_from_json(hj));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  if (scenario.config_source == "builtin") {
    scenario.configs = builtin_config_grid().configs;
  } else {
    std::string cfg_path = scenario.config_source;
    if (!cfg_path.empty() && cfg_path.front() != '/') {
      const auto slash = path.find_last_of('/');
      if (slash != std::string::npos) {
        cfg_path = path.substr(0, slash + 1) + cfg_path;
      }
    }
    scenario.configs = load_configs_json(cfg_path);
  }
  return scenario;
}

Scenario default_scenario() {
  Scenario scenario;
  scenario.note =
      "illustrative synthetic fleet, four efficiency classes; "
      "coefficients are invented, not measurements";
  scenario.config_source = "builtin";
  scenario.configs = builtin_config_grid().configs;

  auto card = [](std::string id, std::string name, double tdp, double mem,
                 double base, double per_gflop, double per_mparam, double quad,
                 double sigma) {
    SyntheticHardwareModel hw;
    hw.hardware_id = std::move(id);
    hw.name = std::move(name);
    hw.tdp_watts = tdp;
    hw.memory_gib = mem;
    hw.base_kwh = base;
    hw.kwh_per_gflop = per_gflop;
    hw.kwh_per_mparam = per_mparam;
    hw.quad_coeff = quad;
    hw.noise_sigma = sigma;
    return hw;
  };
  // Smaller cards pay more energy per unit of work; the big ones carry more
  // idle overhead and a mild superlinear term for the largest models.
  scenario.hardware.push_back(card("card_a", "Synth Card A (70 W class)", 70,
                                   16, 0.020, 0.0040, 0.00080, 0.0, 0.05));
  scenario.hardware.push_back(card("card_b", "Synth Card B (150 W class)", 150,
                                   24, 0.030, 0.0024, 0.00050, 0.0, 0.05));
  scenario.hardware.push_back(card("card_c", "Synth Card C (250 W class)", 250,
                                   32, 0.035, 0.0016, 0.00030, 1e-5, 0.05));
  scenario.hardware.push_back(card("card_d", "Synth Card D (350 W class)", 350,
                                   80, 0.040, 0.0010, 0.00020, 5e-6, 0.05));
  return scenario;
}

}  // namespace enorm
