// Copyright 2026 The agfem Authors
// SPDX-License-Identifier: Apache-2.0

// agfem: experiment driver for the aggregated unfitted finite element
// pipeline.

#include <fmt/format.h>

#include <CLI11.hpp>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "config.hpp"
#include "experiments.hpp"

namespace {

using agfem::tools::ExperimentConfig;

struct Overrides {
  std::optional<std::string> config;
  std::map<std::string, std::string> values;
};

// Every option is collected as text and applied after the config file, so
// flags and file entries share one parser and one validation path.
void add_value_options(CLI::App& cmd, Overrides& o) {
  cmd.add_option_function<std::string>(
      "--config", [&o](const std::string& v) { o.config = v; }, "flat key = value file");
  const std::pair<const char*, const char*> flags[] = {
      {"geometry", "half-plane, axis-half-plane, circle, offset-circle, popcorn"},
      {"dim", "2 or 3"},
      {"level", "refinement level"},
      {"levels", "comma-separated levels (convergence)"},
      {"order", "polynomial order"},
      {"space", "agg or std"},
      {"beta", "Nitsche coefficient"},
      {"rtol", "relative residual tolerance"},
      {"maxit", "iteration limit"},
      {"procs", "virtual process count"},
      {"procs-list", "comma-separated process counts (parallel-check)"},
      {"weight", "active-cell weight of the partition"},
      {"weights", "comma-separated weights (weight-study)"},
      {"offsets", "comma-separated cut offsets in cell sizes (cut-sweep)"},
      {"solution", "linear or sine"},
      {"out", "output directory"},
      {"seed", "seed of the execution order and the Lanczos start vector"},
      {"threads", "worker threads of the runtime"},
      {"dump", "comma-separated: aggregates, constraints, matrix"},
  };
  for (const auto& [name, help] : flags) {
    std::string key = name;
    for (char& c : key) {
      if (c == '-') c = '_';
    }
    cmd.add_option_function<std::string>(
        std::string("--") + name, [&o, key](const std::string& v) { o.values[key] = v; },
        help);
  }
}

ExperimentConfig resolve(const Overrides& o) {
  ExperimentConfig cfg;
  if (o.config) agfem::tools::load_config_file(cfg, *o.config);
  for (const auto& [k, v] : o.values) agfem::tools::set_value(cfg, k, v);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Aggregated unfitted finite elements: experiment driver"};
  app.require_subcommand(1);
  Overrides overrides;
  using Command = std::function<int(const ExperimentConfig&, std::ostream&)>;
  const std::pair<const char*, std::pair<const char*, Command>> commands[] = {
      {"solve", {"run the full pipeline once and append a record", agfem::tools::cmd_solve}},
      {"cut-sweep", {"condition numbers of both spaces over cut offsets",
                     agfem::tools::cmd_cut_sweep}},
      {"parallel-check", {"compare distributed runs against the serial pipeline",
                          agfem::tools::cmd_parallel_check}},
      {"convergence", {"errors and fitted orders over levels", agfem::tools::cmd_convergence}},
      {"weight-study", {"partition balance over active-cell weights",
                        agfem::tools::cmd_weight_study}},
  };
  Command selected;
  for (const auto& [name, entry] : commands) {
    CLI::App* sub = app.add_subcommand(name, entry.first);
    add_value_options(*sub, overrides);
    const Command fn = entry.second;
    sub->callback([&selected, fn] { selected = fn; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return agfem::tools::kExitConfig;
  }
  try {
    return selected(resolve(overrides), std::cout);
  } catch (const agfem::tools::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return agfem::tools::kExitConfig;
  } catch (const agfem::tools::PhaseError& e) {
    fmt::print(stderr, "error in phase {}\n", e.what());
    return e.code();
  } catch (const agfem::ContractViolation& e) {
    fmt::print(stderr, "invalid input: {}\n", e.what());
    return agfem::tools::kExitConfig;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return agfem::tools::kExitNumerical;
  }
}
