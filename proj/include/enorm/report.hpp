#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace enorm {

inline constexpr const char* kToolName = "enorm";
inline constexpr const char* kToolVersion = "0.1.0";

// FNV-1a 64-bit; used for input-file digests and fold-partition digests.
std::uint64_t fnv1a64(std::string_view data);
std::uint64_t fnv1a64_file(const std::string& path);
std::string hex64(std::uint64_t v);

// Everything a run leaves behind: what was executed, digests of what was
// read, the reports, and where artifacts were written. The content digest
// covers the whole bundle with the timestamp blanked, so two identical runs
// agree on it byte for byte.
struct ReportBundle {
  std::string command_line;
  std::string timestamp;       // ISO-8601 UTC; excluded from content_digest
  std::uint32_t master_seed = 0;
  std::string rng_algorithm;
  std::vector<std::pair<std::string, std::string>> input_digests;
  nlohmann::json payload;      // reports, sweep cells, or command output
  std::vector<std::string> artifacts;
};

nlohmann::json bundle_json(const ReportBundle& bundle);
std::string iso8601_utc_now();

}  // namespace enorm
