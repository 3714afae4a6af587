// Copyright 2026 The agfem Authors
// SPDX-License-Identifier: Apache-2.0

#include "agfem/runtime.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <numeric>
#include <random>
#include <thread>

namespace agfem {

int ProcessContext::size() const { return rt_->size_; }

std::span<const Message> ProcessContext::inbox() const {
  return rt_->inbox_[rank_];
}

void ProcessContext::post(int dest, Bytes payload) {
  if (dest < 0 || dest >= rt_->size_) {
    throw ContractViolation("post: destination out of range");
  }
  if (!rt_->are_neighbors(rank_, dest)) {
    throw ContractViolation("post: process " + std::to_string(rank_) +
                            " is not a neighbor of " + std::to_string(dest));
  }
  rt_->slots_[rank_].out.push_back({dest, false, std::move(payload)});
}

void ProcessContext::post_routed(int dest, Bytes payload) {
  if (dest < 0 || dest >= rt_->size_) {
    throw ContractViolation("post_routed: destination out of range");
  }
  rt_->slots_[rank_].out.push_back({dest, true, std::move(payload)});
}

void ProcessContext::contribute_and(bool flag) {
  auto& s = rt_->slots_[rank_];
  s.has_and = true;
  s.and_value = flag;
}

void ProcessContext::contribute_sum(std::int64_t value) {
  auto& s = rt_->slots_[rank_];
  s.has_sum = true;
  s.sum_value = value;
}

void ProcessContext::contribute_real(double value) {
  auto& s = rt_->slots_[rank_];
  s.has_real = true;
  s.real_value = value;
}

bool ProcessContext::and_result() const { return rt_->and_result_; }
std::int64_t ProcessContext::scan_result() const { return rt_->scan_[rank_]; }
std::int64_t ProcessContext::sum_result() const { return rt_->sum_result_; }
double ProcessContext::real_sum_result() const { return rt_->real_sum_; }

Runtime::Runtime(int num_processes, ExecutionPolicy policy)
    : size_(num_processes), policy_(policy) {
  if (num_processes < 1) {
    throw ContractViolation("runtime needs at least one process");
  }
  if (policy_.threads < 1) policy_.threads = 1;
  inbox_.resize(size_);
  slots_.resize(size_);
  scan_.assign(size_, 0);
}

void Runtime::set_neighbors(std::vector<std::vector<int>> neighbors) {
  if (static_cast<int>(neighbors.size()) != size_) {
    throw ContractViolation("set_neighbors: one list per process expected");
  }
  for (auto& n : neighbors) std::sort(n.begin(), n.end());
  neighbors_ = std::move(neighbors);
  all_neighbors_ = false;
}

bool Runtime::are_neighbors(int a, int b) const {
  if (all_neighbors_) return true;
  return std::binary_search(neighbors_[a].begin(), neighbors_[a].end(), b);
}

void Runtime::run_bodies(const std::function<void(ProcessContext&)>& body) {
  std::vector<int> order(size_);
  std::iota(order.begin(), order.end(), 0);
  if (policy_.order_seed != 0) {
    std::mt19937_64 rng(policy_.order_seed + static_cast<std::uint64_t>(step_));
    std::shuffle(order.begin(), order.end(), rng);
  }
  std::vector<std::exception_ptr> errors(size_);
  auto run = [&](int rank) {
    try {
      ProcessContext ctx(*this, rank);
      body(ctx);
    } catch (...) {
      errors[rank] = std::current_exception();
    }
  };
  const int workers = std::min(policy_.threads, size_);
  if (workers <= 1) {
    for (int r : order) run(r);
  } else {
    std::atomic<int> cursor{0};
    {
      std::vector<std::jthread> pool;
      pool.reserve(workers);
      for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          for (int i = cursor.fetch_add(1); i < size_; i = cursor.fetch_add(1)) {
            run(order[i]);
          }
        });
      }
    }
  }
  for (auto& e : errors) {
    if (e) {
      // Drop the half-finished superstep before reporting.
      for (auto& s : slots_) s = Slot{};
      std::rethrow_exception(e);
    }
  }
}

void Runtime::complete(std::string_view phase) {
  // Collectives.
  int n_and = 0;
  int n_sum = 0;
  int n_real = 0;
  for (const Slot& s : slots_) {
    n_and += s.has_and;
    n_sum += s.has_sum;
    n_real += s.has_real;
  }
  auto check = [&](int count, bool Slot::*flag, const char* what) {
    if (count == 0 || count == size_) return;
    std::string missing;
    for (int r = 0; r < size_; ++r) {
      if (!(slots_[r].*flag)) {
        missing += (missing.empty() ? "" : ",") + std::to_string(r);
      }
    }
    for (auto& s : slots_) s = Slot{};
    throw DeadlockError(std::string("collective ") + what + " in phase '" +
                        std::string(phase) + "' never completes; processes " +
                        missing + " did not participate");
  };
  check(n_and, &Slot::has_and, "and");
  check(n_sum, &Slot::has_sum, "sum");
  check(n_real, &Slot::has_real, "real-sum");

  and_result_ = true;
  sum_result_ = 0;
  real_sum_ = 0.0;
  for (int r = 0; r < size_; ++r) {
    const Slot& s = slots_[r];
    if (n_and) and_result_ = and_result_ && s.and_value;
    scan_[r] = sum_result_;
    if (n_sum) sum_result_ += s.sum_value;
    if (n_real) real_sum_ += s.real_value;
  }

  // Delivery: iterate senders in rank order so every inbox is sorted by
  // sender and then by posting order.
  std::vector<std::vector<Message>> next(size_);
  for (int src = 0; src < size_; ++src) {
    for (Outgoing& o : slots_[src].out) {
      trace_.push_back({step_, std::string(phase), src, o.dest, o.payload.size(),
                        o.routed});
      next[o.dest].push_back({src, std::move(o.payload)});
    }
  }
  inbox_ = std::move(next);
  for (auto& s : slots_) s = Slot{};
}

void Runtime::superstep(std::string_view phase,
                        const std::function<void(ProcessContext&)>& body) {
  run_bodies(body);
  complete(phase);
  ++step_;
}

namespace {

std::vector<std::vector<Message>> exchange(Runtime& rt, std::string_view phase,
                                           std::vector<Outbox> out, bool routed) {
  if (static_cast<int>(out.size()) != rt.size()) {
    throw ContractViolation("exchange: one outbox per process expected");
  }
  rt.superstep(phase, [&](ProcessContext& ctx) {
    for (auto& [dest, bytes] : out[ctx.rank()]) {
      if (routed) {
        ctx.post_routed(dest, std::move(bytes));
      } else {
        ctx.post(dest, std::move(bytes));
      }
    }
  });
  std::vector<std::vector<Message>> received(rt.size());
  for (int r = 0; r < rt.size(); ++r) {
    const auto in = rt.inbox(r);
    received[r].assign(in.begin(), in.end());
  }
  return received;
}

}  // namespace

std::vector<std::vector<Message>> neighbor_exchange(Runtime& rt,
                                                    std::string_view phase,
                                                    std::vector<Outbox> out) {
  return exchange(rt, phase, std::move(out), false);
}

std::vector<std::vector<Message>> routed_exchange(Runtime& rt,
                                                  std::string_view phase,
                                                  std::vector<Outbox> out) {
  return exchange(rt, phase, std::move(out), true);
}

bool reduce_logical_and(Runtime& rt, const std::vector<bool>& flags) {
  if (static_cast<int>(flags.size()) != rt.size()) {
    throw ContractViolation("reduce_logical_and: one flag per process expected");
  }
  rt.superstep("reduce-and", [&](ProcessContext& ctx) {
    ctx.contribute_and(flags[ctx.rank()]);
  });
  return rt.and_result();
}

std::vector<std::int64_t> exclusive_scan_sum(Runtime& rt,
                                             std::span<const std::int64_t> values) {
  if (static_cast<int>(values.size()) != rt.size()) {
    throw ContractViolation("exclusive_scan_sum: one value per process expected");
  }
  rt.superstep("scan-sum", [&](ProcessContext& ctx) {
    ctx.contribute_sum(values[ctx.rank()]);
  });
  return rt.scan_result();
}

}  // namespace agfem
