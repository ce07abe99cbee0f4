// Declarative scenarios: a JSON config selects a solution family, its
// representation, analysis toggles, evolution / reduction settings and exports.
//
// Precedence when resolving a config (later wins):
//   built-in defaults  <  config file  <  --set key.path=value (in command-line order)
#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace w4d {

using json = nlohmann::json;

const char* version();

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Command { generate, analyze, evolve, reduce, export_mesh, verify };
Command command_from_string(const std::string& s);
std::string to_string(Command c);

json default_config();
// defaults merged with the file
json load_config(const std::string& path);
// "a.b.c=value"; value parsed as JSON when possible, otherwise kept as a string
void apply_override(json& cfg, const std::string& assignment);
// rejects unknown families, bad family/representation/command combinations, bad grids
void validate_config(const json& cfg, Command cmd);

struct CheckResult {
    std::string name;
    double value = 0, threshold = 0;
    bool pass = false;
};

struct RunResult {
    json report;
    std::vector<CheckResult> checks;
    std::vector<std::string> files;  // final paths
    bool pass = true;
};

// Runs one scenario and writes its artifacts under out_dir/<name>/.
// Files are staged in out_dir/<name>.partial and moved into place only when the
// run completes; on an exception the staging directory is removed.
RunResult run_scenario(const json& cfg, Command cmd, const std::string& out_dir);

// Built-in invariant suite (small grids); artifacts under out_dir/verify/.
RunResult run_verify(const std::string& out_dir);

// Resolution order for the output directory: explicit flag, $W4D_OUT, "w4d_out".
std::string resolve_out_dir(const std::string& flag);

}  // namespace w4d
