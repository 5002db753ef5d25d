#include "scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "efl/numio.hpp"
#include "json.hpp"

namespace efl::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void ScenarioConfig::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file: " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      std::ostringstream msg;
      msg << path.string() << ":" << line_no
          << ": expected 'key = value', got '" << stripped << "'";
      throw UsageError(msg.str());
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty())
      throw UsageError(path.string() + ": empty key in config line " +
                       std::to_string(line_no));
    values_[key] = value;
  }
}

void ScenarioConfig::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw UsageError("--set expects key=value, got '" + assignment + "'");
  values_[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
}

bool ScenarioConfig::has(const std::string& key) const {
  return values_.count(key) > 0;
}

std::string ScenarioConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double ScenarioConfig::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size())
      throw UsageError("config key '" + key + "': trailing characters in '" +
                       it->second + "'");
    return v;
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception&) {
    throw UsageError("config key '" + key + "': cannot parse '" + it->second +
                     "' as a number");
  }
}

int ScenarioConfig::get_int(const std::string& key, int fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t used = 0;
    const int v = std::stoi(it->second, &used);
    if (used != it->second.size())
      throw UsageError("config key '" + key + "': trailing characters in '" +
                       it->second + "'");
    return v;
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception&) {
    throw UsageError("config key '" + key + "': cannot parse '" + it->second +
                     "' as an integer");
  }
}

void ScenarioConfig::require_known(std::span<const char* const> allowed) const {
  for (const auto& [key, value] : values_) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) {
          return key == a;
        }) == allowed.end()) {
      std::ostringstream msg;
      msg << "unknown config key '" << key << "'; accepted keys:";
      for (const char* a : allowed) msg << ' ' << a;
      throw UsageError(msg.str());
    }
  }
}

bool RunReport::pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.pass; });
}

void RunReport::add(std::string name, std::string anchor, double measured,
                    double tolerance, bool check_pass) {
  checks.push_back(CheckResult{std::move(name), std::move(anchor), measured,
                               tolerance, check_pass});
}

void RunReport::add_bounded(std::string name, std::string anchor,
                            double measured, double tolerance) {
  const bool ok = measured <= tolerance;
  add(std::move(name), std::move(anchor), measured, tolerance, ok);
}

std::string report_json(const RunReport& report) {
  nlohmann::ordered_json j;
  j["scenario"] = report.scenario;
  j["params"] = report.params;  // std::map: sorted, stable
  j["checks"] = nlohmann::ordered_json::array();
  for (const CheckResult& c : report.checks) {
    nlohmann::ordered_json jc;
    jc["name"] = c.name;
    jc["anchor"] = c.anchor;
    jc["measured"] = c.measured;
    jc["tolerance"] = c.tolerance;
    jc["pass"] = c.pass;
    j["checks"].push_back(std::move(jc));
  }
  j["duration_ms"] = report.duration_ms;
  j["artifacts"] = report.artifacts;
  j["pass"] = report.pass();
  return j.dump(2) + "\n";
}

std::string report_text(const RunReport& report) {
  std::ostringstream os;
  os << "scenario: " << report.scenario << "\n";
  for (const CheckResult& c : report.checks) {
    os << "  [" << (c.pass ? "PASS" : "FAIL") << "] " << c.name
       << "  measured=" << format_full(c.measured)
       << "  tolerance=" << format_full(c.tolerance) << "\n";
  }
  for (const std::string& a : report.artifacts) os << "  wrote " << a << "\n";
  os << (report.pass() ? "PASS" : "FAIL") << " (" << report.checks.size()
     << " checks, " << report.duration_ms << " ms)\n";
  return os.str();
}

std::string write_artifact(const std::filesystem::path& out_dir,
                           const std::string& name, const std::string& body) {
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path path = out_dir / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write artifact: " + path.string());
  out << body;
  return path.generic_string();
}

}  // namespace efl::cli
