#include "manifest.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "signglm/kernels.hpp"
#include "signglm/simulate.hpp"

namespace signglm::cli {

std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "";
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string bytes = buf.str();
  return fnv1a_hex(bytes.data(), bytes.size());
}

void write_manifest(const std::string& output_path, const std::string& subcommand,
                    const std::vector<std::string>& args, const nlohmann::json& extra) {
  nlohmann::json m;
  m["tool"] = "signglm";
  m["version"] = kVersion;
  m["subcommand"] = subcommand;
  m["args"] = args;
  m["kernels"] = kernels::active().name;
  const auto now = std::chrono::system_clock::now();
  m["created_unix_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count();
  for (const auto& [k, v] : extra.items()) m[k] = v;
  std::ofstream out(output_path + ".manifest.json");
  out << m.dump(2) << "\n";
}

}  // namespace signglm::cli
