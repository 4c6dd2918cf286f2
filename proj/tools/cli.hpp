#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace kerrkit::cli {

using json = nlohmann::json;

const std::vector<std::string>& commands();

// Command-line values that replace parts of the config file.
struct Overrides {
  std::optional<double> M, a, T, kappa;
  std::optional<long> n;
  std::optional<std::uint64_t> seed;
};

// Defaults for every section; this is the config schema.
const json& default_config();

// The defaults merged with the user config and the overrides, cut down to
// params, seed and the command's own section. SchemaError on unknown keys,
// wrong types and invalid values.
json resolve_config(const std::string& command, const json& user, const Overrides& o);

// FNV-1a of the canonical dump, as 16 hex digits.
std::string config_hash(const json& resolved);

struct RunResult {
  int exit_code = 0;
  json summary;
};

// Runs a resolved config and writes <command>.csv (plus any extra tables) and
// <command>_summary.json into out_dir. Exit 0 if every assertion holds, 1
// otherwise.
RunResult run(const std::string& command, const json& resolved, const std::string& out_dir, int jobs);

// resolve_config then run. Schema errors give exit 2 and a summary that says so.
RunResult run_with_config(const std::string& command, const json& user, const Overrides& o,
                          const std::string& out_dir, int jobs);

}  // namespace kerrkit::cli
