#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cbswri {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Plain-text run configuration: one `key = value` pair per line, '#'
/// comments. Unknown keys are rejected so typos cannot silently change a
/// run.
class RunConfig {
 public:
  static const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "grid.nx", "grid.nz", "grid.dx", "grid.pad",
        "model.file", "model.lo", "model.hi", "model.true_file",
        "model.init_file",
        "geometry.file",
        "freq.paths", "freq.df", "freq.batch_size", "freq.overlap",
        "freq.iters_per_batch",
        "forward.freqs", "forward.eta",
        "cbs.eta", "cbs.max_iters", "cbs.eps_safety", "cbs.divergence_window",
        "cbs.k0_sq", "cbs.eps",
        "wri.lam0_fraction", "wri.tikhonov_weight",
        "sketch.receivers", "sketch.sources",
        "validate.nx", "validate.nz", "validate.dx", "validate.instances",
        "validate.eta", "validate.division_threshold",
        "data.dir",
        "seed", "threads", "out.dir",
    };
    return keys;
  }

  RunConfig() = default;

  static RunConfig from_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return from_string(ss.str(), path);
  }

  static RunConfig from_string(const std::string& text,
                               const std::string& origin = "<config>") {
    RunConfig cfg;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos)
        throw ConfigError(origin + ":" + std::to_string(lineno) +
                          ": expected key = value");
      const std::string key = trim(trimmed.substr(0, eq));
      const std::string value = trim(trimmed.substr(eq + 1));
      if (!known_keys().count(key))
        throw ConfigError(origin + ":" + std::to_string(lineno) +
                          ": unknown key '" + key + "'");
      if (cfg.kv_.count(key))
        throw ConfigError(origin + ":" + std::to_string(lineno) +
                          ": duplicate key '" + key + "'");
      cfg.kv_[key] = value;
    }
    return cfg;
  }

  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  std::string get_string(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end())
      throw ConfigError("missing required config key '" + key + "'");
    return it->second;
  }
  std::string get_string(const std::string& key, const std::string& dflt) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? dflt : it->second;
  }

  double get_double(const std::string& key) const {
    return parse_double(key, get_string(key));
  }
  double get_double(const std::string& key, double dflt) const {
    return has(key) ? get_double(key) : dflt;
  }

  long get_int(const std::string& key) const {
    return parse_int(key, get_string(key));
  }
  long get_int(const std::string& key, long dflt) const {
    return has(key) ? get_int(key) : dflt;
  }

  std::uint64_t get_seed(const std::string& key, std::uint64_t dflt) const {
    if (!has(key)) return dflt;
    try {
      return std::stoull(get_string(key));
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "' is not a valid seed");
    }
  }

  /// "a:b;c:d" -> list of (a, b) pairs.
  std::vector<std::pair<double, double>> get_pairs(const std::string& key) const {
    std::vector<std::pair<double, double>> out;
    for (const std::string& item : split(get_string(key), ';')) {
      const auto parts = split(item, ':');
      if (parts.size() != 2)
        throw ConfigError("config key '" + key + "': expected a:b pairs");
      out.emplace_back(parse_double(key, parts[0]), parse_double(key, parts[1]));
    }
    if (out.empty()) throw ConfigError("config key '" + key + "' is empty");
    return out;
  }

  /// Comma-separated doubles.
  std::vector<double> get_list(const std::string& key) const {
    std::vector<double> out;
    for (const std::string& item : split(get_string(key), ','))
      out.push_back(parse_double(key, item));
    if (out.empty()) throw ConfigError("config key '" + key + "' is empty");
    return out;
  }

  const std::map<std::string, std::string>& entries() const { return kv_; }
  void set(const std::string& key, const std::string& value) {
    if (!known_keys().count(key))
      throw ConfigError("unknown config key '" + key + "'");
    kv_[key] = value;
  }

  static std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  }

  static std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) {
      cur = trim(cur);
      if (!cur.empty()) out.push_back(cur);
    }
    return out;
  }

 private:
  static double parse_double(const std::string& key, const std::string& v) {
    try {
      std::size_t pos = 0;
      const double d = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return d;
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': '" + v + "' is not a number");
    }
  }
  static long parse_int(const std::string& key, const std::string& v) {
    try {
      std::size_t pos = 0;
      const long d = std::stol(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return d;
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': '" + v +
                        "' is not an integer");
    }
  }

  std::map<std::string, std::string> kv_;
};

}  // namespace cbswri
