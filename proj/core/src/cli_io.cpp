#include "metagrav/cli_io.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace metagrav {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
  const char* b = s.data();
  const char* e = b + s.size();
  auto res = std::from_chars(b, e, out);
  return res.ec == std::errc{} && res.ptr == e;
}

bool parse_int(const std::string& s, std::int64_t& out) {
  const char* b = s.data();
  const char* e = b + s.size();
  auto res = std::from_chars(b, e, out);
  return res.ec == std::errc{} && res.ptr == e;
}

std::string where(int line) {
  return line > 0 ? "line " + std::to_string(line) : "command line";
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void ConfigMap::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::string raw;
  int lineno = 0;
  std::vector<std::string> syntax_errors;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      syntax_errors.push_back("line " + std::to_string(lineno) +
                              ": expected key=value, got '" + line + "'");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      syntax_errors.push_back("line " + std::to_string(lineno) + ": empty key");
      continue;
    }
    if (values_.count(key) && values_[key].line > 0) {
      syntax_errors.push_back("line " + std::to_string(lineno) +
                              ": duplicate key '" + key + "' (first at line " +
                              std::to_string(values_[key].line) + ")");
      continue;
    }
    values_[key] = {value, lineno};
  }
  if (!syntax_errors.empty()) {
    std::string msg = "config errors in " + path + ":";
    for (const auto& e : syntax_errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
}

void ConfigMap::set_override(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("--set expects key=value, got '" + spec + "'");
  values_[trim(spec.substr(0, eq))] = {trim(spec.substr(eq + 1)), 0};
}

const ConfigMap::Entry* ConfigMap::consume(const std::string& key) {
  consumed_.insert(key);
  const auto it = values_.find(key);
  return it == values_.end() ? nullptr : &it->second;
}

double ConfigMap::get_double(const std::string& key, double fallback) {
  const Entry* e = consume(key);
  if (!e) return fallback;
  double v;
  if (!parse_double(e->value, v)) {
    errors_.push_back(where(e->line) + ": key '" + key +
                      "' expects a number, got '" + e->value + "'");
    return fallback;
  }
  return v;
}

std::int64_t ConfigMap::get_int(const std::string& key, std::int64_t fallback) {
  const Entry* e = consume(key);
  if (!e) return fallback;
  std::int64_t v;
  if (!parse_int(e->value, v)) {
    errors_.push_back(where(e->line) + ": key '" + key +
                      "' expects an integer, got '" + e->value + "'");
    return fallback;
  }
  return v;
}

std::string ConfigMap::get_string(const std::string& key,
                                  const std::string& fallback) {
  const Entry* e = consume(key);
  return e ? e->value : fallback;
}

std::vector<double> ConfigMap::get_double_list(const std::string& key,
                                               std::vector<double> fallback) {
  const Entry* e = consume(key);
  if (!e) return fallback;
  std::vector<double> out;
  std::stringstream ss(e->value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v;
    if (!parse_double(trim(item), v)) {
      errors_.push_back(where(e->line) + ": key '" + key +
                        "' expects comma-separated numbers, got '" + e->value +
                        "'");
      return fallback;
    }
    out.push_back(v);
  }
  if (out.empty()) {
    errors_.push_back(where(e->line) + ": key '" + key + "' is empty");
    return fallback;
  }
  return out;
}

void ConfigMap::finish() const {
  std::vector<std::string> all = errors_;
  for (const auto& [key, entry] : values_)
    if (!consumed_.count(key))
      all.push_back(where(entry.line) + ": unknown key '" + key + "'");
  if (all.empty()) return;
  std::string msg = "invalid configuration:";
  for (const auto& e : all) msg += "\n  " + e;
  throw ConfigError(msg);
}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {
      "analytic", "thresholds",  "localization",      "decohere",
      "spread",   "ehrenfest",   "groundstate-radial"};
  return names;
}

ExperimentReport dispatch_scenario(const std::string& scenario, ConfigMap& cfg) {
  if (scenario == "analytic") {
    AnalyticConfig c;
    c.mass_mp = cfg.get_double("mass_mp", c.mass_mp);
    c.density_g_cm3 = cfg.get_double("density_g_cm3", c.density_g_cm3);
    c.radius_cm = cfg.get_double("radius_cm", c.radius_cm);
    c.alpha = cfg.get_double("alpha", c.alpha);
    cfg.finish();
    return run_analytic(c);
  }
  if (scenario == "thresholds") {
    ThresholdScanConfig c;
    c.density_g_cm3 = cfg.get_double("density_g_cm3", c.density_g_cm3);
    c.mass_min_mp = cfg.get_double("mass_min_mp", c.mass_min_mp);
    c.mass_max_mp = cfg.get_double("mass_max_mp", c.mass_max_mp);
    c.points_per_decade = static_cast<int>(
        cfg.get_int("points_per_decade", c.points_per_decade));
    c.alpha = cfg.get_double("alpha", c.alpha);
    c.observation_time_s =
        cfg.get_double("observation_time_s", c.observation_time_s);
    cfg.finish();
    return run_threshold_scan(c);
  }
  if (scenario == "localization") {
    LocalizationConfig c;
    c.points = static_cast<int>(cfg.get_int("points", c.points));
    c.extent = cfg.get_double("extent", c.extent);
    c.mass = cfg.get_double("mass", c.mass);
    c.radius = cfg.get_double("radius", c.radius);
    c.g_const = cfg.get_double("g_const", c.g_const);
    c.alpha = cfg.get_double("alpha", c.alpha);
    c.potential = cfg.get_string("potential", c.potential);
    c.seed_rel_width = cfg.get_double("seed_rel_width", c.seed_rel_width);
    c.dt = cfg.get_double("dt", c.dt);
    c.max_steps = cfg.get_int("max_steps", c.max_steps);
    c.renormalize_every = cfg.get_int("renormalize_every", c.renormalize_every);
    c.tolerance = cfg.get_double("tolerance", c.tolerance);
    cfg.finish();
    return run_localization(c);
  }
  if (scenario == "decohere") {
    DecoherenceConfig c;
    c.points = static_cast<int>(cfg.get_int("points", c.points));
    c.extent = cfg.get_double("extent", c.extent);
    c.mass = cfg.get_double("mass", c.mass);
    c.radius = cfg.get_double("radius", c.radius);
    c.g_const = cfg.get_double("g_const", c.g_const);
    c.branch_separation =
        cfg.get_double("branch_separation", c.branch_separation);
    c.packet_width = cfg.get_double("packet_width", c.packet_width);
    c.dt = cfg.get_double("dt", c.dt);
    c.periods = cfg.get_double("periods", c.periods);
    c.samples_per_period =
        cfg.get_int("samples_per_period", c.samples_per_period);
    cfg.finish();
    return run_decoherence_oscillation(c);
  }
  if (scenario == "spread") {
    SpreadingConfig c;
    c.points = static_cast<int>(cfg.get_int("points", c.points));
    c.extent = cfg.get_double("extent", c.extent);
    c.masses = cfg.get_double_list("masses", c.masses);
    c.radius = cfg.get_double("radius", c.radius);
    c.g_base = cfg.get_double("g_base", c.g_base);
    c.branch_separation =
        cfg.get_double("branch_separation", c.branch_separation);
    c.run_time_factor = cfg.get_double("run_time_factor", c.run_time_factor);
    c.samples = cfg.get_int("samples", c.samples);
    cfg.finish();
    return run_spreading_decoherence(c);
  }
  if (scenario == "ehrenfest") {
    EhrenfestConfig c;
    c.points = static_cast<int>(cfg.get_int("points", c.points));
    c.extent = cfg.get_double("extent", c.extent);
    c.mass = cfg.get_double("mass", c.mass);
    c.radius = cfg.get_double("radius", c.radius);
    c.g_const = cfg.get_double("g_const", c.g_const);
    c.separation = cfg.get_double("separation", c.separation);
    c.packet_width = cfg.get_double("packet_width", c.packet_width);
    c.smoothing = cfg.get_double("smoothing", c.smoothing);
    c.dt = cfg.get_double("dt", c.dt);
    c.t_final = cfg.get_double("t_final", c.t_final);
    c.sample_every = cfg.get_int("sample_every", c.sample_every);
    cfg.finish();
    return run_ehrenfest(c);
  }
  if (scenario == "groundstate-radial") {
    RadialRunConfig c;
    c.reduced_mass = cfg.get_double("reduced_mass", c.reduced_mass);
    c.coulomb_z = cfg.get_double("coulomb_z", c.coulomb_z);
    c.r_max = cfg.get_double("r_max", c.r_max);
    c.mesh_points = static_cast<int>(cfg.get_int("mesh_points", c.mesh_points));
    c.mass_mp = cfg.get_double("mass_mp", c.mass_mp);
    cfg.finish();
    return run_groundstate_radial(c);
  }
  std::string msg = "unknown scenario '" + scenario + "'; expected one of:";
  for (const auto& s : scenario_names()) msg += " " + s;
  throw ConfigError(msg);
}

namespace {

void atomic_write(const std::filesystem::path& path, const std::string& bytes) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
    throw std::runtime_error("rename " + tmp.string() + " -> " + path.string() +
                             " failed: " + ec.message());
}

}  // namespace

void emit_report(const ExperimentReport& report, const std::string& out_dir) {
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);

  for (const auto& [name, series] : report.series) {
    std::string csv = "t," + name + "\n";
    for (const auto& [t, v] : series)
      csv += format_double(t) + "," + format_double(v) + "\n";
    atomic_write(dir / (name + ".csv"), csv);
  }

  if (!report.table_rows.empty()) {
    std::string csv;
    for (std::size_t i = 0; i < report.table_header.size(); ++i)
      csv += (i ? "," : "") + report.table_header[i];
    csv += "\n";
    for (const auto& row : report.table_rows) {
      for (std::size_t i = 0; i < row.size(); ++i) csv += (i ? "," : "") + row[i];
      csv += "\n";
    }
    atomic_write(dir / (report.scenario + ".csv"), csv);
  }

  nlohmann::ordered_json j;
  j["scenario"] = report.scenario;
  nlohmann::ordered_json cfg;
  for (const auto& [k, v] : report.config_echo) cfg[k] = v;
  j["config"] = cfg;
  nlohmann::ordered_json fits;
  for (const auto& [name, f] : report.fits) {
    nlohmann::ordered_json jf;
    jf["value"] = f.value;
    jf["residual"] = f.residual;
    jf["window"] = {f.window_lo, f.window_hi};
    jf["degenerate"] = f.degenerate;
    fits[name] = jf;
  }
  j["fits"] = fits;
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const auto& c : report.checks) {
    nlohmann::ordered_json jc;
    jc["name"] = c.name;
    jc["value"] = c.value;
    jc["lo"] = c.lo;
    jc["hi"] = c.hi;
    jc["pass"] = c.pass;
    checks.push_back(jc);
  }
  j["checks"] = checks;
  j["all_passed"] = report.all_passed();
  j["total_steps"] = report.total_steps;
  j["versions"] = {{"metagrav", "0.1.0"}, {"summary_schema", 1}};
  atomic_write(dir / "summary.json", j.dump(2) + "\n");
}

int worker_thread_cap() {
  const char* env = std::getenv("METAGRAV_THREADS");
  if (!env) return 1;
  std::int64_t v;
  if (!parse_int(env, v) || v < 1) return 1;
  return static_cast<int>(v);
}

}  // namespace metagrav
