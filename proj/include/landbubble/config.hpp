#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "landbubble/economy.hpp"
#include "landbubble/errors.hpp"

namespace landbubble::config {

// Flat key-value run configuration: one `key = value` pair per line, `#`
// comments, dotted section names (tech.kind, dist.gamma, grid.lambda, ...).
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig parse_string(const std::string& text) {
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      auto trim = [](std::string s) {
        auto begin = s.find_first_not_of(" \t\r");
        auto end = s.find_last_not_of(" \t\r");
        return begin == std::string::npos ? std::string{} : s.substr(begin, end - begin + 1);
      };
      std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      auto eq = trimmed.find('=');
      if (eq == std::string::npos) {
        std::ostringstream msg;
        msg << "config line " << line_no << ": expected `key = value`, got `" << trimmed << "`";
        throw ConfigError(msg.str());
      }
      std::string key = trim(trimmed.substr(0, eq));
      std::string value = trim(trimmed.substr(eq + 1));
      if (key.empty() || value.empty()) {
        std::ostringstream msg;
        msg << "config line " << line_no << ": empty key or value";
        throw ConfigError(msg.str());
      }
      cfg.values_[key] = value;
    }
    return cfg;
  }

  static KeyValueConfig parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_string(buffer.str());
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::optional<std::string> raw(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    auto v = raw(key);
    return v ? *v : fallback;
  }

  double number(const std::string& key, double fallback) const {
    auto v = raw(key);
    return v ? parse_number(key, *v) : fallback;
  }

  double required_number(const std::string& key) const {
    auto v = raw(key);
    if (!v) throw ConfigError("missing required config key: " + key);
    return parse_number(key, *v);
  }

  long long integer(const std::string& key, long long fallback) const {
    double v = number(key, static_cast<double>(fallback));
    if (v != std::floor(v)) throw ConfigError("config key " + key + " must be an integer");
    return static_cast<long long>(v);
  }

  // Grids accept either a comma list `1.0,1.2,1.5` or a range `1.0:0.1:2.0`
  // (start:step:end, inclusive). Grids must be nonempty and sorted.
  std::vector<double> grid(const std::string& key, const std::string& fallback) const {
    std::string spec = text(key, fallback);
    std::vector<double> out;
    if (spec.find(':') != std::string::npos) {
      auto parts = split(spec, ':');
      if (parts.size() != 3) throw ConfigError("config key " + key + ": range needs start:step:end");
      double start = parse_number(key, parts[0]);
      double step = parse_number(key, parts[1]);
      double end = parse_number(key, parts[2]);
      if (!(step > 0.0)) throw ConfigError("config key " + key + ": step must be positive");
      for (double v = start; v <= end + 1e-12 * std::max(1.0, std::abs(end)); v += step)
        out.push_back(v);
    } else {
      for (const auto& token : split(spec, ','))
        out.push_back(parse_number(key, token));
    }
    if (out.empty()) throw ConfigError("config key " + key + ": empty grid");
    if (!std::is_sorted(out.begin(), out.end()))
      throw ConfigError("config key " + key + ": grid must be sorted ascending");
    return out;
  }

 private:
  static std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string token;
    std::istringstream in(s);
    while (std::getline(in, token, sep)) {
      auto begin = token.find_first_not_of(" \t");
      auto end = token.find_last_not_of(" \t");
      out.push_back(begin == std::string::npos ? std::string{} : token.substr(begin, end - begin + 1));
    }
    return out;
  }

  static double parse_number(const std::string& key, const std::string& value) {
    try {
      std::size_t pos = 0;
      double v = std::stod(value, &pos);
      if (pos != value.size()) throw std::invalid_argument(value);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("config key " + key + ": not a number: `" + value + "`");
    }
  }

  std::map<std::string, std::string> values_;
};

// Builds the economy parameter bundle from config keys: beta, lambda,
// upsilon, tech.kind (CES | TwoSectorLinear), tech.A, tech.alpha, tech.rho,
// tech.delta, tech.m, tech.D, dist.gamma. Defaults are the baseline of the
// phase-diagram experiments.
inline economy::EconomyParams economy_from_config(const KeyValueConfig& cfg) {
  economy::EconomyParams econ;
  econ.beta = cfg.number("beta", 0.95);
  econ.lambda = cfg.number("lambda", 1.0);
  if (cfg.has("upsilon")) econ.upsilon = cfg.number("upsilon", 0.975);

  std::string kind = cfg.text("tech.kind", "CES");
  if (kind == "CES") {
    economy::CesTechnology tech;
    tech.A = cfg.number("tech.A", 1.0);
    tech.alpha = cfg.number("tech.alpha", 0.5);
    tech.rho = cfg.number("tech.rho", 1.0);
    tech.delta = cfg.number("tech.delta", 0.08);
    econ.tech = tech;
  } else if (kind == "TwoSectorLinear") {
    economy::TwoSectorLinearTechnology tech;
    tech.m = cfg.number("tech.m", 0.92);
    tech.D = cfg.number("tech.D", 1.0);
    econ.tech = tech;
  } else {
    throw ConfigError("tech.kind must be CES or TwoSectorLinear, got `" + kind + "`");
  }

  econ.dist = economy::exponential_dist(cfg.number("dist.gamma", -std::log(0.1)));
  try {
    econ.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid economy parameters: ") + e.what());
  }
  return econ;
}

}  // namespace landbubble::config
