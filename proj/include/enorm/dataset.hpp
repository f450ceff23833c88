#pragma once

#include <Eigen/Core>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "enorm/errors.hpp"

namespace enorm {

enum class FileFormat { csv, json };
enum class EnergyUnit { kwh, wh, joule };

struct HardwareSpec {
  std::string id;
  std::string name;
  double tdp_watts = 0.0;   // metadata only, never a regression feature
  double memory_gib = 0.0;

  bool operator==(const HardwareSpec&) const = default;
};

// One GPU-energy observation for a (model, hardware) pair. Energy is always
// stored in kWh; ingestion converts from Wh or J when a unit header says so.
struct EnergyRecord {
  std::string model_id;
  std::string hardware_id;
  double gpu_energy_kwh = 0.0;
  int epochs = 1;
  int batch_size = 1;
  std::optional<double> flops_forward;  // per-sample forward pass
  std::optional<double> params;

  bool operator==(const EnergyRecord&) const = default;
};

// Validated, immutable collection of hardware specs and energy records.
// Hardware is sorted by id and records by (model_id, hardware_id) on
// construction, so ordering is deterministic everywhere downstream.
// Safe to share read-only across parallel experiment workers.
class MeasurementTable {
 public:
  MeasurementTable(std::vector<HardwareSpec> hardware,
                   std::vector<EnergyRecord> records);

  const std::vector<HardwareSpec>& hardware() const { return hardware_; }
  const std::vector<EnergyRecord>& records() const { return records_; }

  bool has_hardware(const std::string& id) const;
  const HardwareSpec& hardware_by_id(const std::string& id) const;

  // Sorted unique model ids across all hardware.
  std::vector<std::string> model_ids() const;
  // Model ids measured on one hardware, sorted.
  std::vector<std::string> model_ids_on(const std::string& hardware_id) const;
  const EnergyRecord* find(const std::string& model_id,
                           const std::string& hardware_id) const;

  std::map<std::string, int> records_per_hardware() const;
  // Model counts keyed by the id prefix before the first '_' (mlp, cnn, ...).
  std::map<std::string, int> models_per_kind() const;

  bool operator==(const MeasurementTable& other) const {
    return hardware_ == other.hardware_ && records_ == other.records_;
  }

 private:
  std::vector<HardwareSpec> hardware_;
  std::vector<EnergyRecord> records_;
};

// Models present on both hardware of a pair, aligned row by row in
// lexicographic model_id order. flops/params hold NaN where a record did not
// carry them.
struct PairData {
  std::string source_hw;
  std::string target_hw;
  std::vector<std::string> model_ids;
  Eigen::VectorXd e_source;  // kWh on source hardware
  Eigen::VectorXd e_target;  // kWh on target hardware
  Eigen::VectorXd flops;
  Eigen::VectorXd params;
  std::vector<std::string> omitted;  // models seen on exactly one side

  int n() const { return static_cast<int>(model_ids.size()); }
  bool has_flops() const { return flops.size() > 0 && flops.allFinite(); }
  bool has_params() const { return params.size() > 0 && params.allFinite(); }
};

// Row subset of a pair, preserving order of `rows`. The omission report does
// not carry over.
PairData subset(const PairData& pair, const std::vector<int>& rows);

// CSV ingestion takes the records file plus a hardware file; JSON bundles
// both in one document. A records CSV may start with `# unit: kwh|wh|j`.
MeasurementTable ingest_csv(const std::string& records_path,
                            const std::string& hardware_path);
MeasurementTable ingest_json(const std::string& path);
MeasurementTable ingest(const std::vector<std::string>& paths, FileFormat format);

void write_csv(const MeasurementTable& table, const std::string& records_path,
               const std::string& hardware_path);
void write_json(const MeasurementTable& table, const std::string& path);

PairData pivot_pair(const MeasurementTable& table, const std::string& source,
                    const std::string& target, bool allow_identity = false);

}  // namespace enorm
