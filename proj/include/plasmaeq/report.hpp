#ifndef PLASMAEQ_REPORT_HPP
#define PLASMAEQ_REPORT_HPP

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "plasmaeq/io.hpp"

namespace plasmaeq {

inline constexpr const char* kToolVersion = "0.3.0";

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Hash of the canonical (sorted-key, compact) dump of a config.
inline std::string config_hash(const nlohmann::json& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(cfg.dump())));
  return buf;
}

struct CheckResult {
  std::string name;
  double value = 0.0;      // the norm that was compared
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

class Stopwatch {
 public:
  Stopwatch() : t0_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_;
};

struct RunReport {
  std::string command;
  std::string config_hash;
  std::string tool_version = kToolVersion;
  std::vector<CheckResult> checks;
  std::vector<std::pair<std::string, double>> timings;  // seconds
  std::vector<std::string> outputs;                     // files written

  /// Conjunction of the check verdicts; an empty report passes.
  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }

  CheckResult& add(std::string name, double value, double tol, bool ok, std::string detail = {}) {
    checks.push_back({std::move(name), value, tol, ok, std::move(detail)});
    return checks.back();
  }

  /// Pass when value <= tol (NaN fails).
  CheckResult& add_bound(std::string name, double value, double tol, std::string detail = {}) {
    return add(std::move(name), value, tol, value <= tol, std::move(detail));
  }

  nlohmann::json to_json(bool with_timings = true) const {
    nlohmann::json j;
    j["command"] = command;
    j["tool_version"] = tool_version;
    j["config_hash"] = config_hash;
    j["passed"] = passed();
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks)
      j["checks"].push_back({{"name", c.name},
                             {"value", fmt_double(c.value)},
                             {"tolerance", fmt_double(c.tolerance)},
                             {"passed", c.passed},
                             {"detail", c.detail}});
    if (with_timings) {
      j["timings"] = nlohmann::json::object();
      for (const auto& [k, v] : timings) j["timings"][k] = v;
    }
    j["outputs"] = outputs;
    return j;
  }

  void write_text(std::ostream& os) const {
    os << command << "  (plasmaeq " << tool_version << ", config " << config_hash << ")\n";
    for (const auto& c : checks) {
      char line[512];
      std::snprintf(line, sizeof line, "  %-4s %-48s %12.4e <= %-10.3e", c.passed ? "ok" : "FAIL", c.name.c_str(),
                    c.value, c.tolerance);
      os << line;
      if (!c.detail.empty()) os << "  " << c.detail;
      os << '\n';
    }
    for (const auto& [k, v] : timings) {
      char line[128];
      std::snprintf(line, sizeof line, "  time %-30s %.3f s\n", k.c_str(), v);
      os << line;
    }
    for (const auto& f : outputs) os << "  wrote " << f << '\n';
    os << (passed() ? "PASSED" : "FAILED") << " (" << checks.size() << " checks)\n";
  }

  void write_csv(std::ostream& os) const {
    os << "name,value,tolerance,passed,detail\n";
    for (const auto& c : checks) {
      std::string d = c.detail;
      for (auto& ch : d)
        if (ch == ',' || ch == '\n') ch = ';';
      os << c.name << ',' << fmt_double(c.value) << ',' << fmt_double(c.tolerance) << ',' << (c.passed ? 1 : 0)
         << ',' << d << '\n';
    }
  }
};

}  // namespace plasmaeq

#endif  // PLASMAEQ_REPORT_HPP
