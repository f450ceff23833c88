#include "enorm/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

namespace enorm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Units per kWh; conversion divides by this so round values stay exact.
double units_per_kwh(const std::string& unit, const std::string& where) {
  const std::string u = lower(trim(unit));
  if (u == "kwh") return 1.0;
  if (u == "wh") return 1e3;
  if (u == "j" || u == "joule" || u == "joules") return 3.6e6;
  throw ParseError(where + ": unknown energy unit '" + unit +
                   "' (expected kwh, wh or j)");
}

// Minimal RFC-4180-ish splitter: double-quoted fields with "" escapes.
std::vector<std::string> split_csv_line(const std::string& line,
                                        const std::string& where) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(field);
      field.clear();
    } else {
      field += c;
    }
  }
  if (quoted) throw ParseError(where + ": unterminated quote");
  out.push_back(field);
  return out;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

double parse_double(const std::string& raw, const std::string& where,
                    const std::string& field) {
  const std::string s = trim(raw);
  if (s.empty()) throw ParseError(where + ": empty " + field);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v)) {
    throw ParseError(where + ": cannot parse " + field + " '" + raw + "'");
  }
  return v;
}

int parse_int(const std::string& raw, const std::string& where,
              const std::string& field) {
  const std::string s = trim(raw);
  if (s.empty()) throw ParseError(where + ": empty " + field);
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size()) {
    throw ParseError(where + ": cannot parse " + field + " '" + raw + "'");
  }
  return static_cast<int>(v);
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

const std::string kRecordHeader =
    "model_id,hardware_id,gpu_energy_kwh,epochs,batch_size,flops_forward,params";
const std::string kHardwareHeader = "id,name,tdp_watts,memory_gib";

void check_record_fields(const EnergyRecord& r, const std::string& where) {
  if (r.model_id.empty()) throw ValidationError(where + ": empty model_id");
  if (r.hardware_id.empty()) throw ValidationError(where + ": empty hardware_id");
  if (!(r.gpu_energy_kwh > 0.0)) {
    throw ValidationError(where + ": gpu_energy_kwh must be > 0 (got " +
                          fmt_double(r.gpu_energy_kwh) + ")");
  }
  if (r.epochs < 1) throw ValidationError(where + ": epochs must be >= 1");
  if (r.batch_size < 1) throw ValidationError(where + ": batch_size must be >= 1");
}

void check_hardware_fields(const HardwareSpec& h, const std::string& where) {
  if (h.id.empty()) throw ValidationError(where + ": empty hardware id");
  if (!(h.tdp_watts > 0.0)) {
    throw ValidationError(where + ": tdp_watts must be > 0 for '" + h.id + "'");
  }
  if (!(h.memory_gib > 0.0)) {
    throw ValidationError(where + ": memory_gib must be > 0 for '" + h.id + "'");
  }
}

}  // namespace

MeasurementTable::MeasurementTable(std::vector<HardwareSpec> hardware,
                                   std::vector<EnergyRecord> records)
    : hardware_(std::move(hardware)), records_(std::move(records)) {
  std::sort(hardware_.begin(), hardware_.end(),
            [](const HardwareSpec& a, const HardwareSpec& b) { return a.id < b.id; });
  std::sort(records_.begin(), records_.end(),
            [](const EnergyRecord& a, const EnergyRecord& b) {
              return std::tie(a.model_id, a.hardware_id) <
                     std::tie(b.model_id, b.hardware_id);
            });

  std::set<std::string> hw_ids;
  for (const auto& h : hardware_) {
    check_hardware_fields(h, "hardware");
    if (!hw_ids.insert(h.id).second) {
      throw ValidationError("duplicate hardware id '" + h.id + "'");
    }
  }
  const EnergyRecord* prev = nullptr;
  for (const auto& r : records_) {
    const std::string where = "record (" + r.model_id + ", " + r.hardware_id + ")";
    check_record_fields(r, where);
    if (!hw_ids.count(r.hardware_id)) {
      throw ValidationError(where + ": unknown hardware_id '" + r.hardware_id + "'");
    }
    if (r.flops_forward && !(*r.flops_forward > 0.0)) {
      throw ValidationError(where + ": flops_forward must be > 0 when present");
    }
    if (r.params && !(*r.params > 0.0)) {
      throw ValidationError(where + ": params must be > 0 when present");
    }
    if (prev && prev->model_id == r.model_id && prev->hardware_id == r.hardware_id) {
      throw ValidationError("duplicate key (" + r.model_id + ", " +
                            r.hardware_id + ")");
    }
    prev = &r;
  }
}

bool MeasurementTable::has_hardware(const std::string& id) const {
  for (const auto& h : hardware_) {
    if (h.id == id) return true;
  }
  return false;
}

const HardwareSpec& MeasurementTable::hardware_by_id(const std::string& id) const {
  for (const auto& h : hardware_) {
    if (h.id == id) return h;
  }
  throw ValidationError("unknown hardware_id '" + id + "'");
}

std::vector<std::string> MeasurementTable::model_ids() const {
  std::set<std::string> ids;
  for (const auto& r : records_) ids.insert(r.model_id);
  return {ids.begin(), ids.end()};
}

std::vector<std::string> MeasurementTable::model_ids_on(
    const std::string& hardware_id) const {
  std::vector<std::string> ids;
  for (const auto& r : records_) {
    if (r.hardware_id == hardware_id) ids.push_back(r.model_id);
  }
  return ids;  // records_ sorted by (model, hardware) => ids sorted
}

const EnergyRecord* MeasurementTable::find(const std::string& model_id,
                                           const std::string& hardware_id) const {
  for (const auto& r : records_) {
    if (r.model_id == model_id && r.hardware_id == hardware_id) return &r;
  }
  return nullptr;
}

std::map<std::string, int> MeasurementTable::records_per_hardware() const {
  std::map<std::string, int> counts;
  for (const auto& h : hardware_) counts[h.id] = 0;
  for (const auto& r : records_) counts[r.hardware_id]++;
  return counts;
}

std::map<std::string, int> MeasurementTable::models_per_kind() const {
  std::map<std::string, int> counts;
  for (const auto& id : model_ids()) {
    const auto pos = id.find('_');
    std::string kind = pos == std::string::npos ? id : id.substr(0, pos);
    if (kind != "mlp" && kind != "cnn" && kind != "rnn" && kind != "crnn") {
      kind = "other";
    }
    counts[kind]++;
  }
  return counts;
}

PairData subset(const PairData& pair, const std::vector<int>& rows) {
  PairData out;
  out.source_hw = pair.source_hw;
  out.target_hw = pair.target_hw;
  const int m = static_cast<int>(rows.size());
  out.e_source.resize(m);
  out.e_target.resize(m);
  out.flops.resize(m);
  out.params.resize(m);
  out.model_ids.reserve(rows.size());
  for (int i = 0; i < m; ++i) {
    const int r = rows[static_cast<std::size_t>(i)];
    if (r < 0 || r >= pair.n()) throw ValidationError("subset: row out of range");
    out.model_ids.push_back(pair.model_ids[static_cast<std::size_t>(r)]);
    out.e_source(i) = pair.e_source(r);
    out.e_target(i) = pair.e_target(r);
    out.flops(i) = pair.flops(r);
    out.params(i) = pair.params(r);
  }
  return out;
}

MeasurementTable ingest_csv(const std::string& records_path,
                            const std::string& hardware_path) {
  // Hardware file first: id,name,tdp_watts,memory_gib.
  std::vector<HardwareSpec> hardware;
  {
    const auto lines = read_lines(hardware_path);
    std::size_t i = 0;
    while (i < lines.size() && (trim(lines[i]).empty() || lines[i][0] == '#')) ++i;
    if (i == lines.size() || trim(lines[i]) != kHardwareHeader) {
      throw ParseError(hardware_path + ": expected header '" + kHardwareHeader + "'");
    }
    for (++i; i < lines.size(); ++i) {
      if (trim(lines[i]).empty()) continue;
      const std::string where = hardware_path + ":" + std::to_string(i + 1);
      const auto f = split_csv_line(lines[i], where);
      if (f.size() != 4) {
        throw ParseError(where + ": expected 4 columns, got " +
                         std::to_string(f.size()));
      }
      HardwareSpec h;
      h.id = trim(f[0]);
      h.name = f[1];
      h.tdp_watts = parse_double(f[2], where, "tdp_watts");
      h.memory_gib = parse_double(f[3], where, "memory_gib");
      check_hardware_fields(h, where);
      hardware.push_back(std::move(h));
    }
  }

  std::vector<EnergyRecord> records;
  {
    const auto lines = read_lines(records_path);
    double unit_divisor = 1.0;
    std::size_t i = 0;
    // Optional leading directives, e.g. "# unit: wh".
    for (; i < lines.size(); ++i) {
      const std::string t = trim(lines[i]);
      if (t.empty()) continue;
      if (t[0] != '#') break;
      const std::string body = lower(trim(t.substr(1)));
      if (body.rfind("unit:", 0) == 0) {
        unit_divisor = units_per_kwh(body.substr(5),
                                     records_path + ":" + std::to_string(i + 1));
      }
    }
    if (i == lines.size() || trim(lines[i]) != kRecordHeader) {
      throw ParseError(records_path + ":" + std::to_string(i + 1) +
                       ": expected header '" + kRecordHeader + "'");
    }
    for (++i; i < lines.size(); ++i) {
      if (trim(lines[i]).empty()) continue;
      const std::string where = records_path + ":" + std::to_string(i + 1);
      const auto f = split_csv_line(lines[i], where);
      if (f.size() != 7) {
        throw ParseError(where + ": expected 7 columns, got " +
                         std::to_string(f.size()));
      }
      EnergyRecord r;
      r.model_id = trim(f[0]);
      r.hardware_id = trim(f[1]);
      r.gpu_energy_kwh = parse_double(f[2], where, "gpu_energy_kwh") / unit_divisor;
      r.epochs = parse_int(f[3], where, "epochs");
      r.batch_size = parse_int(f[4], where, "batch_size");
      if (!trim(f[5]).empty()) r.flops_forward = parse_double(f[5], where, "flops_forward");
      if (!trim(f[6]).empty()) r.params = parse_double(f[6], where, "params");
      check_record_fields(r, where);
      records.push_back(std::move(r));
    }
  }

  try {
    return MeasurementTable(std::move(hardware), std::move(records));
  } catch (const ValidationError& e) {
    throw ValidationError(records_path + ": " + e.what());
  }
}

MeasurementTable ingest_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  try {
    if (!j.is_object()) throw ParseError("top level must be an object");
    double unit_divisor = 1.0;
    if (j.contains("unit")) {
      unit_divisor = units_per_kwh(j.at("unit").get<std::string>(), path);
    }
    std::vector<HardwareSpec> hardware;
    for (const auto& hj : j.at("hardware")) {
      HardwareSpec h;
      h.id = hj.at("id").get<std::string>();
      h.name = hj.value("name", h.id);
      h.tdp_watts = hj.at("tdp_watts").get<double>();
      h.memory_gib = hj.at("memory_gib").get<double>();
      hardware.push_back(std::move(h));
    }
    std::vector<EnergyRecord> records;
    for (const auto& rj : j.at("records")) {
      EnergyRecord r;
      r.model_id = rj.at("model_id").get<std::string>();
      r.hardware_id = rj.at("hardware_id").get<std::string>();
      r.gpu_energy_kwh = rj.at("gpu_energy_kwh").get<double>() / unit_divisor;
      r.epochs = rj.value("epochs", 1);
      r.batch_size = rj.value("batch_size", 1);
      if (rj.contains("flops_forward") && !rj.at("flops_forward").is_null()) {
        r.flops_forward = rj.at("flops_forward").get<double>();
      }
      if (rj.contains("params") && !rj.at("params").is_null()) {
        r.params = rj.at("params").get<double>();
      }
      records.push_back(std::move(r));
    }
    return MeasurementTable(std::move(hardware), std::move(records));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

MeasurementTable ingest(const std::vector<std::string>& paths, FileFormat format) {
  if (format == FileFormat::json) {
    if (paths.size() != 1) {
      throw UsageError("json ingestion takes exactly one path");
    }
    return ingest_json(paths[0]);
  }
  if (paths.size() != 2) {
    throw UsageError("csv ingestion takes a records path and a hardware path");
  }
  return ingest_csv(paths[0], paths[1]);
}

void write_csv(const MeasurementTable& table, const std::string& records_path,
               const std::string& hardware_path) {
  {
    std::ofstream out(hardware_path);
    if (!out) throw ValidationError(hardware_path + ": cannot open for writing");
    out << kHardwareHeader << "\n";
    for (const auto& h : table.hardware()) {
      out << csv_escape(h.id) << ',' << csv_escape(h.name) << ','
          << fmt_double(h.tdp_watts) << ',' << fmt_double(h.memory_gib) << "\n";
    }
  }
  std::ofstream out(records_path);
  if (!out) throw ValidationError(records_path + ": cannot open for writing");
  out << kRecordHeader << "\n";
  for (const auto& r : table.records()) {
    out << csv_escape(r.model_id) << ',' << csv_escape(r.hardware_id) << ','
        << fmt_double(r.gpu_energy_kwh) << ',' << r.epochs << ',' << r.batch_size
        << ',' << (r.flops_forward ? fmt_double(*r.flops_forward) : std::string())
        << ',' << (r.params ? fmt_double(*r.params) : std::string()) << "\n";
  }
}

void write_json(const MeasurementTable& table, const std::string& path) {
  nlohmann::json j;
  j["hardware"] = nlohmann::json::array();
  for (const auto& h : table.hardware()) {
    j["hardware"].push_back({{"id", h.id},
                             {"name", h.name},
                             {"tdp_watts", h.tdp_watts},
                             {"memory_gib", h.memory_gib}});
  }
  j["records"] = nlohmann::json::array();
  for (const auto& r : table.records()) {
    nlohmann::json rj = {{"model_id", r.model_id},
                         {"hardware_id", r.hardware_id},
                         {"gpu_energy_kwh", r.gpu_energy_kwh},
                         {"epochs", r.epochs},
                         {"batch_size", r.batch_size}};
    if (r.flops_forward) rj["flops_forward"] = *r.flops_forward;
    if (r.params) rj["params"] = *r.params;
    j["records"].push_back(std::move(rj));
  }
  std::ofstream out(path);
  if (!out) throw ValidationError(path + ": cannot open for writing");
  out << j.dump(2) << "\n";
}

PairData pivot_pair(const MeasurementTable& table, const std::string& source,
                    const std::string& target, bool allow_identity) {
  if (!table.has_hardware(source)) {
    throw ValidationError("unknown hardware_id '" + source + "'");
  }
  if (!table.has_hardware(target)) {
    throw ValidationError("unknown hardware_id '" + target + "'");
  }
  if (source == target && !allow_identity) {
    throw ValidationError("source and target hardware are both '" + source + "'");
  }

  std::unordered_map<std::string, const EnergyRecord*> on_source, on_target;
  for (const auto& r : table.records()) {
    if (r.hardware_id == source) on_source[r.model_id] = &r;
    if (r.hardware_id == target) on_target[r.model_id] = &r;
  }

  PairData pair;
  pair.source_hw = source;
  pair.target_hw = target;

  std::set<std::string> all_models;
  for (const auto& [id, _] : on_source) all_models.insert(id);
  for (const auto& [id, _] : on_target) all_models.insert(id);

  std::vector<double> es, et, fl, pa;
  for (const auto& id : all_models) {  // std::set iterates lexicographically
    const auto s = on_source.find(id);
    const auto t = on_target.find(id);
    if (s == on_source.end() || t == on_target.end()) {
      pair.omitted.push_back(id);
      continue;
    }
    const EnergyRecord& rs = *s->second;
    const EnergyRecord& rt = *t->second;
    auto merged = [&](const std::optional<double>& a, const std::optional<double>& b,
                      const char* what) {
      if (a && b && std::abs(*a - *b) > 1e-9 * std::max(std::abs(*a), 1.0)) {
        throw ValidationError("inconsistent " + std::string(what) +
                              " for model '" + id + "' across hardware");
      }
      return a ? *a : (b ? *b : kNaN);
    };
    pair.model_ids.push_back(id);
    es.push_back(rs.gpu_energy_kwh);
    et.push_back(rt.gpu_energy_kwh);
    fl.push_back(merged(rs.flops_forward, rt.flops_forward, "flops_forward"));
    pa.push_back(merged(rs.params, rt.params, "params"));
  }
  if (pair.model_ids.empty()) {
    throw ValidationError("no models measured on both '" + source + "' and '" +
                          target + "'");
  }
  pair.e_source = Eigen::Map<Eigen::VectorXd>(es.data(), static_cast<long>(es.size()));
  pair.e_target = Eigen::Map<Eigen::VectorXd>(et.data(), static_cast<long>(et.size()));
  pair.flops = Eigen::Map<Eigen::VectorXd>(fl.data(), static_cast<long>(fl.size()));
  pair.params = Eigen::Map<Eigen::VectorXd>(pa.data(), static_cast<long>(pa.size()));
  return pair;
}

}  // namespace enorm
