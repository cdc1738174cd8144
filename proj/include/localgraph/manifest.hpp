#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

namespace localgraph {

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);
// hex64(fnv1a64(bytes))
std::string fingerprint(std::string_view bytes);

// Everything needed to rerun a CLI command. `options` is the command's
// normalized option set as a JSON object (including any config text), so a
// replay does not depend on files other than the recorded inputs.
struct RunManifest {
  std::string command;
  std::string options_json;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string version;
  std::string started;
  std::string finished;
  std::map<std::string, std::string> inputs;   // path -> fingerprint
  std::map<std::string, std::string> outputs;  // file name -> fingerprint

  std::string to_json() const;
  static RunManifest from_json(const std::string& text);
};

std::string utc_timestamp();
const char* software_version();

}  // namespace localgraph
