#include "enorm/report.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "enorm/errors.hpp"

namespace enorm {

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return fnv1a64(ss.str());
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

nlohmann::json bundle_json(const ReportBundle& bundle) {
  nlohmann::json j;
  j["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  j["command_line"] = bundle.command_line;
  j["timestamp"] = "";
  j["master_seed"] = bundle.master_seed;
  j["rng_algorithm"] = bundle.rng_algorithm;
  nlohmann::json digests = nlohmann::json::object();
  for (const auto& [path, digest] : bundle.input_digests) digests[path] = digest;
  j["input_digests"] = std::move(digests);
  j["payload"] = bundle.payload;
  j["artifacts"] = bundle.artifacts;
  // Digest over the dump with a blank timestamp, so identical runs agree on
  // it no matter when they happened.
  j["content_digest"] = hex64(fnv1a64(j.dump()));
  j["timestamp"] = bundle.timestamp;
  return j;
}

std::string iso8601_utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace enorm
