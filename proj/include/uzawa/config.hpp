#pragma once

// Scenario files: line-oriented `key = value` under `[section]` headers,
// `#` starts a comment. Every problem in a file is reported, each with its
// line number.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "uzawa/bgp.hpp"
#include "uzawa/dynamics.hpp"
#include "uzawa/errors.hpp"
#include "uzawa/format.hpp"
#include "uzawa/production.hpp"

namespace uzawa {

struct ConfigIssue {
  std::size_t line;  // 0 when the problem is not tied to one line
  std::string message;
};

class ConfigParseError : public ConfigError {
 public:
  explicit ConfigParseError(std::vector<ConfigIssue> issues)
      : ConfigError(join(issues)), issues_(std::move(issues)) {}

  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  static std::string join(const std::vector<ConfigIssue>& issues) {
    std::string s;
    for (const auto& i : issues) {
      if (!s.empty()) s += '\n';
      s += i.line ? "line " + std::to_string(i.line) + ": " + i.message : i.message;
    }
    return s;
  }

  std::vector<ConfigIssue> issues_;
};

struct PdeSettings {
  double c = 0.02;
  /// linear: F(x) = x; log: F(x) = ln x; sqrt: F(x) = x^0.5;
  /// kernel: F(x) = f(K0, x) for the configured technology.
  std::string profile = "linear";
  double L_min = 1.0;
  double L_max = 2.718281828459045;
  double t_horizon = 10.0;
  std::size_t nL = 256;
  std::size_t nt = 512;
};

struct ScenarioConfig {
  std::string family = "cobb_douglas";
  double alpha = 1.0 / 3.0;
  double share = 0.4;
  double sigma = 0.5;
  BiasKind bias = BiasKind::None;
  double rate = 0.0;

  ModelParams model;
  UzawaSettings run;
  ClassificationSettings classify;
  PdeSettings pde;
  /// Start the timescale run at start_ratio * k* (capital per effective worker).
  std::optional<double> start_ratio;

  std::string trajectory_csv = "trajectory.csv";
  std::optional<std::string> report;

  /// Programmatic technology that replaces the family/bias fields (custom
  /// kernels have no file syntax).
  std::optional<ProductionFunction> technology_override;

  ProductionFunction technology() const {
    if (technology_override) return *technology_override;
    const TechBias b{bias, rate};
    if (family == "ces") return ProductionFunction::ces(share, sigma, b);
    return ProductionFunction::cobb_douglas(alpha, b);
  }
};

namespace detail {

struct Entry {
  std::string value;
  std::size_t line;
};

using SectionMap = std::map<std::string, std::map<std::string, Entry>>;

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"production", {"family", "alpha", "share", "sigma"}},
      {"bias", {"kind", "rate"}},
      {"model", {"s", "delta", "n", "K0", "L0"}},
      {"run", {"t_end", "dt", "tail_fraction", "tol"}},
      {"classify", {"alpha", "share", "sigma_low", "sigma_high", "rate"}},
      {"pde", {"c", "profile", "L_min", "L_max", "t_horizon", "nL", "nt"}},
      {"timescale", {"start_ratio"}},
      {"output", {"trajectory_csv", "report"}},
  };
  return s;
}

class Reader {
 public:
  Reader(const SectionMap& sections, std::vector<ConfigIssue>& issues) : sections_(sections), issues_(issues) {}

  const Entry* find(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }

  /// Reads a number into `out` when present; `required` reports its absence.
  std::size_t number(const std::string& section, const std::string& key, double& out, bool required = false) {
    const Entry* e = find(section, key);
    if (!e) {
      if (required) issues_.push_back({0, "missing required key '" + key + "' in [" + section + "]"});
      return 0;
    }
    double v = 0.0;
    const auto* first = e->value.data();
    const auto* last = first + e->value.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
      issues_.push_back({e->line, "value of '" + key + "' is not a finite number: '" + e->value + "'"});
      return 0;
    }
    out = v;
    return e->line;
  }

  std::size_t count(const std::string& section, const std::string& key, std::size_t& out) {
    const Entry* e = find(section, key);
    if (!e) return 0;
    std::size_t v = 0;
    const auto* first = e->value.data();
    const auto* last = first + e->value.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
      issues_.push_back({e->line, "value of '" + key + "' is not a non-negative integer: '" + e->value + "'"});
      return 0;
    }
    out = v;
    return e->line;
  }

  std::size_t text(const std::string& section, const std::string& key, std::string& out, bool required = false) {
    const Entry* e = find(section, key);
    if (!e) {
      if (required) issues_.push_back({0, "missing required key '" + key + "' in [" + section + "]"});
      return 0;
    }
    out = e->value;
    return e->line;
  }

  void check(bool ok, std::size_t line, const std::string& message) {
    if (!ok && line) issues_.push_back({line, message});
  }

 private:
  const SectionMap& sections_;
  std::vector<ConfigIssue>& issues_;
};

}  // namespace detail

inline ScenarioConfig parse_config_string(std::string_view text) {
  std::vector<ConfigIssue> issues;
  detail::SectionMap sections;
  const auto& schema = detail::schema();

  std::string current;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        issues.push_back({line_no, "malformed section header"});
        continue;
      }
      current = std::string(detail::trim(line.substr(1, line.size() - 2)));
      if (!schema.count(current)) issues.push_back({line_no, "unknown section [" + current + "]"});
      sections[current];
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      issues.push_back({line_no, "malformed line, expected 'key = value'"});
      continue;
    }
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string value(detail::trim(line.substr(eq + 1)));
    if (key.empty() || value.empty()) {
      issues.push_back({line_no, "malformed line, empty key or value"});
      continue;
    }
    if (current.empty()) {
      issues.push_back({line_no, "key '" + key + "' appears before any [section]"});
      continue;
    }
    const auto known = schema.find(current);
    if (known != schema.end() && !known->second.count(key)) {
      issues.push_back({line_no, "unknown key '" + key + "' in [" + current + "]"});
      continue;
    }
    auto [it, inserted] = sections[current].emplace(key, detail::Entry{value, line_no});
    if (!inserted) {
      issues.push_back({line_no, "duplicate key '" + key + "' (first set on line " +
                                     std::to_string(it->second.line) + ")"});
    }
  }

  ScenarioConfig cfg;
  detail::Reader r(sections, issues);

  // [production]
  const std::size_t family_line = r.text("production", "family", cfg.family, true);
  if (family_line) {
    std::set<std::string> allowed;
    if (cfg.family == "cobb_douglas") {
      allowed = {"family", "alpha"};
    } else if (cfg.family == "ces") {
      allowed = {"family", "share", "sigma"};
    } else {
      issues.push_back({family_line, "unknown family '" + cfg.family + "' (expected cobb_douglas or ces)"});
    }
    if (!allowed.empty()) {
      for (const auto& [key, entry] : sections["production"]) {
        if (!allowed.count(key)) {
          issues.push_back({entry.line, "unknown key '" + key + "' for family " + cfg.family});
        }
      }
    }
    if (cfg.family == "cobb_douglas") {
      const auto l = r.number("production", "alpha", cfg.alpha, true);
      r.check(cfg.alpha > 0.0 && cfg.alpha < 1.0, l, "alpha out of range (0,1)");
    } else if (cfg.family == "ces") {
      const auto ls = r.number("production", "share", cfg.share, true);
      r.check(cfg.share > 0.0 && cfg.share < 1.0, ls, "share out of range (0,1)");
      const auto lg = r.number("production", "sigma", cfg.sigma, true);
      r.check(cfg.sigma > 0.0, lg, "sigma must be positive");
    }
  }

  // [bias]
  std::string kind = "none";
  const std::size_t kind_line = r.text("bias", "kind", kind);
  if (kind == "none") {
    cfg.bias = BiasKind::None;
  } else if (kind == "harrod") {
    cfg.bias = BiasKind::Harrod;
  } else if (kind == "hicks") {
    cfg.bias = BiasKind::Hicks;
  } else if (kind == "solow") {
    cfg.bias = BiasKind::Solow;
  } else {
    issues.push_back({kind_line, "unknown bias kind '" + kind + "' (expected none, harrod, hicks or solow)"});
  }
  r.number("bias", "rate", cfg.rate, cfg.bias != BiasKind::None);
  if (cfg.bias == BiasKind::None) cfg.rate = 0.0;

  // [model]
  const auto ls = r.number("model", "s", cfg.model.s, true);
  r.check(cfg.model.s > 0.0 && cfg.model.s < 1.0, ls, "s out of range (0,1)");
  const auto ld = r.number("model", "delta", cfg.model.delta, true);
  r.check(cfg.model.delta >= 0.0, ld, "delta must be >= 0");
  const auto ln = r.number("model", "n", cfg.model.n, true);
  r.check(cfg.model.n + cfg.model.delta + cfg.rate > 0.0, ln, "n + delta + bias rate must be positive");
  r.check(cfg.model.K0 > 0.0, r.number("model", "K0", cfg.model.K0), "K0 must be positive");
  r.check(cfg.model.L0 > 0.0, r.number("model", "L0", cfg.model.L0), "L0 must be positive");

  // [run]
  r.check(cfg.run.t_end > 0.0, r.number("run", "t_end", cfg.run.t_end), "t_end must be positive");
  const auto ldt = r.number("run", "dt", cfg.run.dt);
  r.check(cfg.run.dt > 0.0 && cfg.run.dt <= cfg.run.t_end, ldt, "dt out of range (0, t_end]");
  const auto ltf = r.number("run", "tail_fraction", cfg.run.tail_fraction);
  r.check(cfg.run.tail_fraction > 0.0 && cfg.run.tail_fraction < 1.0, ltf, "tail_fraction out of range (0,1)");
  r.check(cfg.run.tol > 0.0, r.number("run", "tol", cfg.run.tol), "tol must be positive");

  // [classify]
  auto& cs = cfg.classify;
  r.check(cs.alpha > 0.0 && cs.alpha < 1.0, r.number("classify", "alpha", cs.alpha), "alpha out of range (0,1)");
  r.check(cs.share > 0.0 && cs.share < 1.0, r.number("classify", "share", cs.share), "share out of range (0,1)");
  r.check(cs.sigma_low > 0.0 && cs.sigma_low != 1.0, r.number("classify", "sigma_low", cs.sigma_low),
          "sigma_low must be positive and differ from 1");
  r.check(cs.sigma_high > 0.0 && cs.sigma_high != 1.0, r.number("classify", "sigma_high", cs.sigma_high),
          "sigma_high must be positive and differ from 1");
  r.number("classify", "rate", cs.rate);

  // [pde]
  auto& pde = cfg.pde;
  r.number("pde", "c", pde.c);
  const auto lp = r.text("pde", "profile", pde.profile);
  r.check(pde.profile == "linear" || pde.profile == "log" || pde.profile == "sqrt" || pde.profile == "kernel", lp,
          "unknown profile '" + pde.profile + "' (expected linear, log, sqrt or kernel)");
  r.check(pde.L_min > 0.0, r.number("pde", "L_min", pde.L_min), "L_min must be positive");
  r.check(pde.L_max > pde.L_min, r.number("pde", "L_max", pde.L_max), "L_max must exceed L_min");
  r.check(pde.t_horizon >= 0.0, r.number("pde", "t_horizon", pde.t_horizon), "t_horizon must be >= 0");
  r.check(pde.nL >= 16, r.count("pde", "nL", pde.nL), "nL must be >= 16");
  r.check(pde.nt >= 16, r.count("pde", "nt", pde.nt), "nt must be >= 16");

  // [timescale]
  double start_ratio = 0.0;
  if (const auto l = r.number("timescale", "start_ratio", start_ratio)) {
    r.check(start_ratio > 0.0, l, "start_ratio must be positive");
    cfg.start_ratio = start_ratio;
  }

  // [output]
  r.text("output", "trajectory_csv", cfg.trajectory_csv);
  std::string report;
  if (r.text("output", "report", report)) cfg.report = report;

  if (!issues.empty()) throw ConfigParseError(std::move(issues));
  return cfg;
}

inline ScenarioConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigParseError({{0, "cannot open config file '" + path + "'"}});
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_string(buf.str());
}

/// Resolved configuration in the input syntax; parsing it back yields the
/// same scenario.
inline void write_config(const ScenarioConfig& cfg, std::ostream& out) {
  out << "[production]\n";
  if (cfg.technology_override) {
    out << "# technology = " << cfg.technology_override->describe() << '\n';
  }
  out << "family = " << cfg.family << '\n';
  if (cfg.family == "ces") {
    out << "share = " << format_double(cfg.share) << '\n' << "sigma = " << format_double(cfg.sigma) << '\n';
  } else {
    out << "alpha = " << format_double(cfg.alpha) << '\n';
  }
  out << "\n[bias]\nkind = " << to_string(cfg.bias) << '\n';
  if (cfg.bias != BiasKind::None) out << "rate = " << format_double(cfg.rate) << '\n';
  out << "\n[model]\n"
      << "s = " << format_double(cfg.model.s) << '\n'
      << "delta = " << format_double(cfg.model.delta) << '\n'
      << "n = " << format_double(cfg.model.n) << '\n'
      << "K0 = " << format_double(cfg.model.K0) << '\n'
      << "L0 = " << format_double(cfg.model.L0) << '\n'
      << "\n[run]\n"
      << "t_end = " << format_double(cfg.run.t_end) << '\n'
      << "dt = " << format_double(cfg.run.dt) << '\n'
      << "tail_fraction = " << format_double(cfg.run.tail_fraction) << '\n'
      << "tol = " << format_double(cfg.run.tol) << '\n'
      << "\n[classify]\n"
      << "alpha = " << format_double(cfg.classify.alpha) << '\n'
      << "share = " << format_double(cfg.classify.share) << '\n'
      << "sigma_low = " << format_double(cfg.classify.sigma_low) << '\n'
      << "sigma_high = " << format_double(cfg.classify.sigma_high) << '\n'
      << "rate = " << format_double(cfg.classify.rate) << '\n'
      << "\n[pde]\n"
      << "c = " << format_double(cfg.pde.c) << '\n'
      << "profile = " << cfg.pde.profile << '\n'
      << "L_min = " << format_double(cfg.pde.L_min) << '\n'
      << "L_max = " << format_double(cfg.pde.L_max) << '\n'
      << "t_horizon = " << format_double(cfg.pde.t_horizon) << '\n'
      << "nL = " << cfg.pde.nL << '\n'
      << "nt = " << cfg.pde.nt << '\n';
  if (cfg.start_ratio) out << "\n[timescale]\nstart_ratio = " << format_double(*cfg.start_ratio) << '\n';
  out << "\n[output]\ntrajectory_csv = " << cfg.trajectory_csv << '\n';
  if (cfg.report) out << "report = " << *cfg.report << '\n';
}

}  // namespace uzawa
