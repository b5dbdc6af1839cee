#ifndef METAGRAV_CLI_IO_HPP
#define METAGRAV_CLI_IO_HPP

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "metagrav/experiments.hpp"

namespace metagrav {

// Config/usage problem; maps to exit code 1. The message lists every
// validation failure found, not just the first.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key=value configuration with strict validation. Reads collect type
// errors instead of throwing; finish() reports them all at once together with
// any unconsumed (unknown) keys, each with its source line number.
class ConfigMap {
 public:
  // Parses the documented flat format: one key=value per line, '#' comments.
  void load_file(const std::string& path);
  // Command-line override "key=value"; wins over file values (line number 0).
  void set_override(const std::string& spec);

  double get_double(const std::string& key, double fallback);
  std::int64_t get_int(const std::string& key, std::int64_t fallback);
  std::string get_string(const std::string& key, const std::string& fallback);
  // comma-separated list, e.g. "1,2,4"
  std::vector<double> get_double_list(const std::string& key,
                                      std::vector<double> fallback);

  // Throws ConfigError when any read failed or an unknown key remains.
  void finish() const;

  bool empty() const { return values_.empty(); }

 private:
  struct Entry {
    std::string value;
    int line;  // 0 for command-line overrides
  };
  const Entry* consume(const std::string& key);
  std::map<std::string, Entry> values_;
  std::set<std::string> consumed_;
  std::vector<std::string> errors_;
};

// Scenario names accepted by the CLI, in documentation order.
const std::vector<std::string>& scenario_names();

// Builds the typed scenario config from the flat map (strict: unknown keys
// rejected, all failures reported) and runs it.
ExperimentReport dispatch_scenario(const std::string& scenario, ConfigMap& cfg);

// Writes one CSV per time series (header "t,<name>"), the scan table when
// present, and summary.json. Every file goes through write-to-temp plus
// atomic rename, and the bytes depend only on the report contents.
void emit_report(const ExperimentReport& report, const std::string& out_dir);

// METAGRAV_THREADS cap (>= 1); defaults to 1 when unset or malformed.
int worker_thread_cap();

// Shortest round-trip decimal representation used by every emitter.
std::string format_double(double v);

}  // namespace metagrav

#endif
