#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "enorm/archcost.hpp"
#include "enorm/dataset.hpp"

namespace enorm {

// Ground-truth generator for one synthetic GPU: energy per training run is
//   base_kwh + kwh_per_gflop*G + kwh_per_mparam*M + quad_coeff*G^2
// with G = forward GFLOPs and M = millions of parameters, multiplied by
// log-normal noise exp(noise_sigma * g), g ~ N(0,1). Multiplicative noise
// keeps energies positive across the orders of magnitude a config grid spans.
struct SyntheticHardwareModel {
  std::string hardware_id;
  std::string name;            // defaults to hardware_id when empty
  double tdp_watts = 100.0;    // table metadata only
  double memory_gib = 16.0;
  double base_kwh = 0.0;
  double kwh_per_gflop = 0.0;
  double kwh_per_mparam = 0.0;
  double quad_coeff = 0.0;
  double noise_sigma = 0.0;
};

// Deterministic under seed: configs and hardware are processed in sorted-id
// order and one gaussian is drawn per (model, hardware) cell even at zero
// sigma, so tables generated with different sigmas share their draws.
// Records carry epochs=10, batch_size=8 and the analytic flops/params counts.
MeasurementTable generate(
    const std::vector<std::pair<std::string, ArchitectureConfig>>& configs,
    const std::vector<SyntheticHardwareModel>& hardware, std::uint32_t seed);

struct Scenario {
  std::string note;
  std::string config_source;  // "builtin" or a file path
  std::vector<std::pair<std::string, ArchitectureConfig>> configs;
  std::vector<SyntheticHardwareModel> hardware;
};

// Scenario file: { "note": ..., "configs": "builtin" | "file.json",
//                  "hardware": [SyntheticHardwareModel...] }.
// A relative config path resolves against the scenario file's directory.
Scenario load_scenario(const std::string& path);

// Four illustrative GPU profiles over the built-in config grid. Coefficients
// are order-of-magnitude guesses ordered consistently with the cards' TDPs;
// this is synthetic data, not measurements.
Scenario default_scenario();

}  // namespace enorm
