#include "localgraph/manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>

#include "json.hpp"
#include "localgraph/error.hpp"

#ifndef LOCALGRAPH_VERSION
#define LOCALGRAPH_VERSION "0.0.0"
#endif

namespace localgraph {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string fingerprint(std::string_view bytes) { return hex64(fnv1a64(bytes)); }

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["format_version"] = 1;
  j["command"] = command;
  j["options"] = nlohmann::ordered_json::parse(options_json);
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  j["software_version"] = version;
  j["started"] = started;
  j["finished"] = finished;
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  return j.dump(2) + "\n";
}

RunManifest RunManifest::from_json(const std::string& text) {
  try {
    const auto j = nlohmann::ordered_json::parse(text);
    if (j.at("format_version") != 1) throw ArgumentError("manifest: unsupported format_version");
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.options_json = j.at("options").dump();
    m.config_hash = j.at("config_hash").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.version = j.at("software_version").get<std::string>();
    m.started = j.at("started").get<std::string>();
    m.finished = j.at("finished").get<std::string>();
    m.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
    m.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("manifest: malformed document (") + e.what() + ")");
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

const char* software_version() { return LOCALGRAPH_VERSION; }

}  // namespace localgraph
