// Copyright 2026 The agfem Authors
// SPDX-License-Identifier: Apache-2.0

#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace agfem::tools {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw ConfigError("invalid value '" + text + "' for key '" + key + "'");
  }
  return out;
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<T>(key, item));
  if (out.empty()) throw ConfigError("empty list for key '" + key + "'");
  return out;
}

std::vector<std::string> parse_words(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "geometry", "dim",      "level",    "levels",  "order",   "space",
      "beta",     "rtol",     "maxit",    "procs",   "procs_list", "weight",
      "weights",  "offsets",  "solution", "out",     "seed",    "threads",
      "dump"};
  return keys;
}

void set_value(ExperimentConfig& cfg, const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  if (key == "geometry") {
    cfg.geometry = value;
  } else if (key == "dim") {
    cfg.dim = parse_number<int>(key, value);
  } else if (key == "level") {
    cfg.level = parse_number<int>(key, value);
  } else if (key == "levels") {
    cfg.levels = parse_list<int>(key, value);
  } else if (key == "order") {
    cfg.order = parse_number<int>(key, value);
  } else if (key == "space") {
    if (value == "agg") {
      cfg.space = SpaceKind::agg;
    } else if (value == "std") {
      cfg.space = SpaceKind::std_space;
    } else {
      throw ConfigError("space must be 'agg' or 'std', got '" + value + "'");
    }
  } else if (key == "beta") {
    cfg.beta = parse_number<double>(key, value);
  } else if (key == "rtol") {
    cfg.rtol = parse_number<double>(key, value);
  } else if (key == "maxit") {
    cfg.maxit = parse_number<int>(key, value);
  } else if (key == "procs") {
    cfg.procs = parse_number<int>(key, value);
  } else if (key == "procs_list") {
    cfg.procs_list = parse_list<int>(key, value);
  } else if (key == "weight") {
    cfg.weight = parse_number<double>(key, value);
  } else if (key == "weights") {
    cfg.weights = parse_list<double>(key, value);
  } else if (key == "offsets") {
    cfg.offsets = parse_list<double>(key, value);
  } else if (key == "solution") {
    cfg.solution = value;
  } else if (key == "out") {
    if (value.empty()) throw ConfigError("out must not be empty");
    cfg.out = value;
  } else if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "threads") {
    cfg.threads = parse_number<int>(key, value);
  } else if (key == "dump") {
    cfg.dump = parse_words(value);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

void load_config_file(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    set_value(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

void validate(const ExperimentConfig& cfg) {
  const auto& names = geometry_names();
  if (std::find(names.begin(), names.end(), cfg.geometry) == names.end()) {
    throw ConfigError("unknown geometry '" + cfg.geometry + "'");
  }
  if (cfg.dim != 2 && cfg.dim != 3) throw ConfigError("dim must be 2 or 3");
  if (cfg.geometry == "popcorn" && cfg.dim != 3) {
    throw ConfigError("the popcorn geometry needs dim = 3");
  }
  const int max_level = cfg.dim == 2 ? 12 : 8;
  auto check_level = [&](int l) {
    if (l < 1 || l > max_level) {
      throw ConfigError("level " + std::to_string(l) + " outside 1.." +
                        std::to_string(max_level));
    }
  };
  check_level(cfg.level);
  for (int l : cfg.levels) check_level(l);
  if (cfg.order < 1 || cfg.order > 4) throw ConfigError("order must be in 1..4");
  if (!(cfg.beta > 0.0) || !std::isfinite(cfg.beta)) throw ConfigError("beta must be positive");
  if (!(cfg.rtol > 0.0) || cfg.rtol >= 1.0) throw ConfigError("rtol must be in (0, 1)");
  if (cfg.maxit < 1) throw ConfigError("maxit must be positive");
  if (cfg.procs < 1 || cfg.procs > 4096) throw ConfigError("procs must be in 1..4096");
  for (int p : cfg.procs_list) {
    if (p < 1 || p > 4096) throw ConfigError("procs_list entries must be in 1..4096");
  }
  if (!(cfg.weight >= 1.0) || !std::isfinite(cfg.weight)) {
    throw ConfigError("weight must be at least 1");
  }
  for (double w : cfg.weights) {
    if (!(w >= 1.0) || !std::isfinite(w)) throw ConfigError("weights must be at least 1");
  }
  for (double o : cfg.offsets) {
    if (!(o > 0.0) || o >= 1.0) throw ConfigError("offsets must be in (0, 1)");
  }
  if (cfg.solution != "linear" && cfg.solution != "sine") {
    throw ConfigError("solution must be 'linear' or 'sine'");
  }
  if (cfg.threads < 1 || cfg.threads > 256) throw ConfigError("threads must be in 1..256");
  for (const std::string& d : cfg.dump) {
    if (d != "aggregates" && d != "constraints" && d != "matrix") {
      throw ConfigError("unknown dump '" + d + "'");
    }
  }
}

ProblemConfig problem_config(const ExperimentConfig& cfg, int level) {
  ProblemConfig p;
  p.geometry = cfg.geometry;
  p.dim = cfg.dim;
  p.level = level;
  p.order = cfg.order;
  p.space = cfg.space;
  p.beta = cfg.beta;
  p.solution = cfg.solution;
  return p;
}

std::string space_name(SpaceKind s) { return s == SpaceKind::agg ? "agg" : "std"; }

}  // namespace agfem::tools
