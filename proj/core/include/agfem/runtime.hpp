// Copyright 2026 The agfem Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef AGFEM_RUNTIME_HPP_
#define AGFEM_RUNTIME_HPP_

#include <cstddef>
#include <cstdint>
#include <cstring>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "agfem/errors.hpp"

namespace agfem {

using Bytes = std::vector<std::byte>;

// Appends trivially copyable values to a byte buffer.
class ByteWriter {
 public:
  template <typename T>
  void put(const T& v) {
    static_assert(std::is_trivially_copyable_v<T>);
    const auto* p = reinterpret_cast<const std::byte*>(&v);
    buf_.insert(buf_.end(), p, p + sizeof(T));
  }
  template <typename T>
  void put_span(std::span<const T> v) {
    put<std::uint64_t>(v.size());
    for (const T& x : v) put(x);
  }
  std::size_t size() const { return buf_.size(); }
  Bytes take() { return std::move(buf_); }

 private:
  Bytes buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::byte> data) : data_(data) {}
  template <typename T>
  T get() {
    static_assert(std::is_trivially_copyable_v<T>);
    if (pos_ + sizeof(T) > data_.size()) {
      throw ProtocolError("message truncated", -1, -1, -1);
    }
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  template <typename T>
  std::vector<T> get_vector() {
    const auto n = get<std::uint64_t>();
    std::vector<T> out;
    out.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) out.push_back(get<T>());
    return out;
  }
  std::size_t remaining() const { return data_.size() - pos_; }
  bool done() const { return pos_ == data_.size(); }

 private:
  std::span<const std::byte> data_;
  std::size_t pos_ = 0;
};

struct Message {
  int source = 0;
  Bytes payload;
};

struct TraceEntry {
  std::int64_t superstep = 0;
  std::string phase;
  int source = 0;
  int dest = 0;
  std::size_t bytes = 0;
  bool routed = false;
};

struct ExecutionPolicy {
  int threads = 1;
  // Nonzero seeds shuffle the order in which processes run each superstep.
  std::uint64_t order_seed = 0;
};

class Runtime;

// Handle a virtual process sees during one superstep.
class ProcessContext {
 public:
  int rank() const { return rank_; }
  int size() const;
  // Messages posted to this process in the previous superstep, ordered by
  // sender and then by posting order.
  std::span<const Message> inbox() const;
  // Nearest-neighbor send; `dest` must be a declared neighbor.
  void post(int dest, Bytes payload);
  // Send to any process.
  void post_routed(int dest, Bytes payload);
  // Collective contributions; results are available after the superstep.
  void contribute_and(bool flag);
  void contribute_sum(std::int64_t value);
  void contribute_real(double value);
  // Results of the collectives completed in the previous superstep.
  bool and_result() const;
  std::int64_t scan_result() const;  // exclusive prefix in rank order
  std::int64_t sum_result() const;
  double real_sum_result() const;

 private:
  friend class Runtime;
  ProcessContext(Runtime& rt, int rank) : rt_(&rt), rank_(rank) {}
  Runtime* rt_;
  int rank_;
};

// Bulk-synchronous executor for P virtual processes.
//
// Each superstep runs the body once per process, then delivers all posted
// messages and completes the collectives. Observable results do not depend
// on the execution order or on the number of worker threads.
class Runtime {
 public:
  explicit Runtime(int num_processes, ExecutionPolicy policy = {});

  int size() const { return size_; }
  const ExecutionPolicy& policy() const { return policy_; }

  // Declares the nearest-neighbor graph; without it every pair is a
  // neighbor.
  void set_neighbors(std::vector<std::vector<int>> neighbors);
  bool are_neighbors(int a, int b) const;

  void superstep(std::string_view phase,
                 const std::function<void(ProcessContext&)>& body);

  // Messages delivered by the last superstep, per destination.
  std::span<const Message> inbox(int rank) const { return inbox_[rank]; }
  bool and_result() const { return and_result_; }
  std::int64_t sum_result() const { return sum_result_; }
  double real_sum_result() const { return real_sum_; }
  const std::vector<std::int64_t>& scan_result() const { return scan_; }

  std::int64_t supersteps() const { return step_; }
  const std::vector<TraceEntry>& trace() const { return trace_; }
  void clear_trace() { trace_.clear(); }

 private:
  friend class ProcessContext;

  struct Outgoing {
    int dest;
    bool routed;
    Bytes payload;
  };
  struct Slot {
    std::vector<Outgoing> out;
    bool has_and = false;
    bool and_value = true;
    bool has_sum = false;
    std::int64_t sum_value = 0;
    bool has_real = false;
    double real_value = 0.0;
  };

  void run_bodies(const std::function<void(ProcessContext&)>& body);
  void complete(std::string_view phase);

  int size_;
  ExecutionPolicy policy_;
  std::vector<std::vector<int>> neighbors_;
  bool all_neighbors_ = true;
  std::vector<std::vector<Message>> inbox_;
  std::vector<Slot> slots_;
  bool and_result_ = true;
  std::int64_t sum_result_ = 0;
  double real_sum_ = 0.0;
  std::vector<std::int64_t> scan_;
  std::int64_t step_ = 0;
  std::vector<TraceEntry> trace_;
};

// Convenience wrappers, each one superstep. Outgoing payloads are given per
// process as (destination, bytes) pairs; received messages are returned per
// process.
using Outbox = std::vector<std::pair<int, Bytes>>;
std::vector<std::vector<Message>> neighbor_exchange(Runtime& rt,
                                                    std::string_view phase,
                                                    std::vector<Outbox> out);
std::vector<std::vector<Message>> routed_exchange(Runtime& rt,
                                                  std::string_view phase,
                                                  std::vector<Outbox> out);
bool reduce_logical_and(Runtime& rt, const std::vector<bool>& flags);
std::vector<std::int64_t> exclusive_scan_sum(Runtime& rt,
                                             std::span<const std::int64_t> values);

}  // namespace agfem

#endif  // AGFEM_RUNTIME_HPP_
