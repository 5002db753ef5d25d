#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace efl::cli {

/// Bad flags, unreadable config, unknown keys, out-of-range parameters —
/// anything that should exit with the usage code (2) rather than the
/// check-failure code (1).
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

/// Flat key = value scenario file plus repeatable --set overrides. Lines
/// starting with '#' (or blank) are skipped; later assignments win.
class ScenarioConfig {
 public:
  ScenarioConfig() = default;

  void load_file(const std::filesystem::path& path);
  /// "key=value" as passed to --set.
  void apply_override(const std::string& assignment);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;

  /// Rejects any stored key outside `allowed` (typo guard; exit code 2).
  void require_known(std::span<const char* const> allowed) const;

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

struct CheckResult {
  std::string name;
  std::string anchor;  // the identity under test, written as a formula
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct RunReport {
  std::string scenario;
  std::map<std::string, std::string> params;
  std::vector<CheckResult> checks;
  double duration_ms = 0.0;
  std::vector<std::string> artifacts;

  bool pass() const;
  void add(std::string name, std::string anchor, double measured,
           double tolerance, bool pass);
  /// measured <= tolerance convenience.
  void add_bounded(std::string name, std::string anchor, double measured,
                   double tolerance);
};

/// Full report as JSON (stable key order; duration is the only field that
/// varies between identical runs).
std::string report_json(const RunReport& report);
/// One line per check plus a summary, for terminals.
std::string report_text(const RunReport& report);

/// Creates parent directories as needed; returns the path as a generic string
/// for the artifact list.
std::string write_artifact(const std::filesystem::path& out_dir,
                           const std::string& name, const std::string& body);

}  // namespace efl::cli
