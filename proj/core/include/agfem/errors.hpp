// Copyright 2026 The agfem Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef AGFEM_ERRORS_HPP_
#define AGFEM_ERRORS_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace agfem {

// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Cell-count arithmetic would overflow the Morton key.
class GridOverflowError : public Error {
 public:
  using Error::Error;
};

class ClassificationError : public Error {
 public:
  ClassificationError(const std::string& what, std::uint64_t cell)
      : Error(what), cell_(cell) {}
  std::uint64_t cell() const { return cell_; }

 private:
  std::uint64_t cell_;
};

// Aggregation sweep made no progress; lists the cells left without a root.
class AggregationStalledError : public Error {
 public:
  AggregationStalledError(const std::string& what,
                          std::vector<std::int64_t> orphans)
      : Error(what), orphans_(std::move(orphans)) {}
  const std::vector<std::int64_t>& orphans() const { return orphans_; }

 private:
  std::vector<std::int64_t> orphans_;
};

class AggregateValidationError : public Error {
 public:
  AggregateValidationError(const std::string& what, std::int64_t root)
      : Error(what), root_(root) {}
  std::int64_t aggregate_root() const { return root_; }

 private:
  std::int64_t root_;
};

// Processes disagreed on participation in a collective.
class DeadlockError : public Error {
 public:
  using Error::Error;
};

// A message did not have the shape its receiver expected, or a distributed
// algorithm ended in an inconsistent state.
class ProtocolError : public Error {
 public:
  ProtocolError(const std::string& what, int subdomain, int peer,
                std::int64_t cell)
      : Error(what), subdomain_(subdomain), peer_(peer), cell_(cell) {}
  int subdomain() const { return subdomain_; }
  int peer() const { return peer_; }
  std::int64_t cell() const { return cell_; }

 private:
  int subdomain_;
  int peer_;
  std::int64_t cell_;
};

class CycleError : public Error {
 public:
  using Error::Error;
};

class MissingImportError : public Error {
 public:
  MissingImportError(const std::string& what, int subdomain,
                     std::int64_t local_dof, std::int64_t root)
      : Error(what), subdomain_(subdomain), dof_(local_dof), root_(root) {}
  int subdomain() const { return subdomain_; }
  std::int64_t local_dof() const { return dof_; }
  std::int64_t root() const { return root_; }

 private:
  int subdomain_;
  std::int64_t dof_;
  std::int64_t root_;
};

class AssemblyError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace agfem

#endif  // AGFEM_ERRORS_HPP_
