// Copyright 2026 The agfem Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef AGFEM_TOOLS_EXPERIMENTS_HPP_
#define AGFEM_TOOLS_EXPERIMENTS_HPP_

#include <chrono>
#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "agfem/errors.hpp"
#include "agfem/problem.hpp"
#include "config.hpp"

namespace agfem::tools {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitNumerical = 3,
  kExitEquivalence = 4,
};

// A library error tagged with the pipeline phase that raised it.
class PhaseError : public std::runtime_error {
 public:
  PhaseError(const std::string& phase, const std::string& what, int code)
      : std::runtime_error(phase + ": " + what), phase_(phase), code_(code) {}
  const std::string& phase() const { return phase_; }
  int code() const { return code_; }

 private:
  std::string phase_;
  int code_;
};

// Wall time per phase; errors leave tagged with the phase name.
class PhaseTimer {
 public:
  template <typename F>
  auto run(const std::string& phase, F&& fn) {
    const auto start = std::chrono::steady_clock::now();
    try {
      if constexpr (std::is_void_v<decltype(fn())>) {
        fn();
        record(phase, start);
      } else {
        auto result = fn();
        record(phase, start);
        return result;
      }
    } catch (const ContractViolation& e) {
      throw PhaseError(phase, e.what(), kExitConfig);
    } catch (const Error& e) {
      throw PhaseError(phase, e.what(), kExitNumerical);
    }
  }
  const std::vector<std::pair<std::string, double>>& phases() const { return phases_; }

 private:
  void record(const std::string& phase, std::chrono::steady_clock::time_point start) {
    const std::chrono::duration<double> d = std::chrono::steady_clock::now() - start;
    phases_.emplace_back(phase, d.count());
  }
  std::vector<std::pair<std::string, double>> phases_;
};

// One row of solve.csv.
struct RunRecord {
  ExperimentConfig config;
  int level = 0;
  std::int64_t active_cells = 0;
  std::int64_t cut_cells = 0;
  std::int64_t unknowns = 0;
  int aggregation_rounds = 0;
  std::int64_t max_aggregate_size = 0;
  double checksum = 0.0;
  int iterations = 0;
  bool converged = false;
  double kappa = 0.0;
  double rel_l2 = 0.0;
  double rel_h1 = 0.0;
};

inline constexpr int kSchemaVersion = 1;
const std::string& run_record_header();
std::string run_record_row(const RunRecord& r);

// Appends a row, writing the header first for a new file. An existing file
// with a different header is a schema mismatch.
void append_csv(const std::string& path, const std::string& header,
                const std::string& row);
void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::string>& rows);

struct SolveResult {
  RunRecord record;
  std::vector<double> solution;  // serial unknown numbering
  SolveReport report;
  SerialSystem system;           // serial numbering (P = 1) or gathered
};

// Aggregates (serially or on `procs` virtual processes), assembles, solves
// and evaluates the errors of a discretization.
SolveResult solve_problem(const ExperimentConfig& cfg, const Discretization& d,
                          PhaseTimer& timer);

struct ParallelCheckResult {
  int procs = 1;
  bool roots_equal = false;
  bool constraints_equal = false;
  bool system_equal = false;
  bool history_equal = false;
  double system_diff = 0.0;
  double history_diff = 0.0;
  int iterations_serial = 0;
  int iterations_parallel = 0;
  std::string first_mismatch;
  std::vector<std::int64_t> mismatched_cells;  // global active ids, ascending

  bool passed() const {
    return roots_equal && constraints_equal && system_equal && history_equal;
  }
};

// Compares a distributed run against the serial discretization stage by
// stage, stopping at the first stage that differs.
ParallelCheckResult parallel_check(const Discretization& d, const SerialSystem& serial,
                                   const SolveReport& serial_report, int procs,
                                   double weight, const ExecutionPolicy& policy,
                                   const SolverOptions& options,
                                   const ParallelAggregationOptions& hooks = {});

struct BalanceRow {
  double weight = 1.0;
  int procs = 1;
  std::int64_t max_active = 0;
  std::int64_t min_active = 0;
  std::int64_t max_total = 0;
  std::int64_t min_total = 0;
};

BalanceRow weight_balance(const CellClassification& cls, double weight, int procs);

// Least-squares slope of log(error) against log(h).
double fitted_order(std::span<const double> h, std::span<const double> error);

int cmd_solve(const ExperimentConfig& cfg, std::ostream& log);
int cmd_cut_sweep(const ExperimentConfig& cfg, std::ostream& log);
int cmd_parallel_check(const ExperimentConfig& cfg, std::ostream& log);
int cmd_convergence(const ExperimentConfig& cfg, std::ostream& log);
int cmd_weight_study(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace agfem::tools

#endif  // AGFEM_TOOLS_EXPERIMENTS_HPP_
