// Copyright 2026 The agfem Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef AGFEM_TOOLS_CONFIG_HPP_
#define AGFEM_TOOLS_CONFIG_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "agfem/problem.hpp"

namespace agfem::tools {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string geometry = "circle";
  int dim = 2;
  int level = 4;
  std::vector<int> levels{3, 4, 5, 6};
  int order = 1;
  SpaceKind space = SpaceKind::agg;
  double beta = 10.0;
  double rtol = 1e-6;
  int maxit = 500;
  int procs = 1;
  std::vector<int> procs_list{1, 2, 4, 8, 16};
  double weight = 10.0;
  std::vector<double> weights{1.0, 2.0, 5.0, 10.0, 100.0, 1000.0};
  // Cut offsets as fractions of the cell size.
  std::vector<double> offsets{0.5, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
  std::string solution = "linear";
  std::string out = "out";
  std::uint64_t seed = 1;
  int threads = 1;
  std::vector<std::string> dump;
};

// Keys accepted by set_value and in config files.
const std::vector<std::string>& config_keys();

// Parses `value` into the field named `key`. Unknown keys and malformed
// values raise ConfigError.
void set_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);

// Applies a flat "key = value" file; '#' starts a comment.
void load_config_file(ExperimentConfig& cfg, const std::string& path);

// Range checks shared by every command.
void validate(const ExperimentConfig& cfg);

ProblemConfig problem_config(const ExperimentConfig& cfg, int level);

std::string space_name(SpaceKind s);

}  // namespace agfem::tools

#endif  // AGFEM_TOOLS_CONFIG_HPP_
