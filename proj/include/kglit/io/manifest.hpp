#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace kglit {

/// Every artifact-producing command writes exactly one manifest next to its
/// outputs: command line, full config, seeds, input fingerprints, toolkit
/// version, timestamp. Only the timestamp differs between identical runs.
nlohmann::ordered_json make_manifest(const std::string& command,
                                     const nlohmann::ordered_json& config,
                                     const std::vector<std::string>& input_files);

void write_json_file(const std::string& path, const nlohmann::ordered_json& j);
nlohmann::ordered_json read_json_file(const std::string& path);

extern const char* kToolkitVersion;

}  // namespace kglit
