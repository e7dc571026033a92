#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace signglm::cli {

// Every run writes <output>.manifest.json beside its outputs: tool version,
// argv, seeds/config hash, kernel table in use, and the (only) timestamp.
void write_manifest(const std::string& output_path, const std::string& subcommand,
                    const std::vector<std::string>& args, const nlohmann::json& extra);

// fnv1a-64 of a file's bytes, as hex; empty string when unreadable.
std::string file_hash(const std::string& path);

}  // namespace signglm::cli
