#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace signglm::cli {

namespace {

using nlohmann::json;

const std::vector<std::string> kKnownKeys = {
    "model", "rho_grid", "p_grid",       "s_grid",       "n",      "reps",
    "seed",  "cv_folds", "cv_grid_size", "standardize",  "t_param"};

void apply_json(ExperimentConfig& cfg, const json& j) {
  for (const auto& [key, value] : j.items()) {
    if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end())
      throw std::invalid_argument("config: unknown key '" + key + "'");
    if (key == "model")
      cfg.model = parse_model(value.get<std::string>());
    else if (key == "rho_grid")
      cfg.rho_grid = value.get<std::vector<double>>();
    else if (key == "p_grid")
      cfg.p_grid = value.get<std::vector<std::size_t>>();
    else if (key == "s_grid")
      cfg.s_grid = value.get<std::vector<std::size_t>>();
    else if (key == "n")
      cfg.n = value.get<std::size_t>();
    else if (key == "reps")
      cfg.reps = value.get<std::size_t>();
    else if (key == "seed")
      cfg.seed = value.get<std::uint64_t>();
    else if (key == "cv_folds")
      cfg.cv_folds = value.get<int>();
    else if (key == "cv_grid_size")
      cfg.cv_grid_size = value.get<int>();
    else if (key == "standardize")
      cfg.standardize = value.get<bool>();
    else if (key == "t_param")
      cfg.t_param = value.get<double>();
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// flat "key = value" lines; arrays as comma-separated scalars
json keyvalue_to_json(std::istream& in) {
  json j = json::object();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(lineno) + " has no '='");
    const std::string key = trim(t.substr(0, eq));
    const std::string raw = trim(t.substr(eq + 1));
    const auto scalar = [](const std::string& s) -> json {
      if (!s.empty() && s.find_first_not_of("0123456789") == std::string::npos)
        return std::stoull(s);
      return std::stod(s);
    };
    const bool is_grid =
        key.size() > 5 && key.compare(key.size() - 5, 5, "_grid") == 0;
    if (key == "model") {
      j[key] = raw;
    } else if (key == "standardize") {
      if (raw != "true" && raw != "false")
        throw std::invalid_argument("config: standardize must be true/false");
      j[key] = raw == "true";
    } else if (raw.find(',') != std::string::npos || is_grid) {
      json arr = json::array();
      std::stringstream ss(raw);
      std::string tok;
      while (std::getline(ss, tok, ',')) arr.push_back(scalar(trim(tok)));
      j[key] = arr;
    } else {
      j[key] = scalar(raw);
    }
  }
  return j;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw std::invalid_argument("config: empty file " + path);

  ExperimentConfig cfg;
  cfg.rho_grid.clear();
  if (text[first] == '{') {
    apply_json(cfg, json::parse(text));
  } else {
    std::stringstream ss(text);
    apply_json(cfg, keyvalue_to_json(ss));
  }
  cfg.validate();
  return cfg;
}

}  // namespace signglm::cli
