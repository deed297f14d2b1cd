// Copyright 2026 The fgattn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace fgattn {

// Dimensions disagree between tensors, masks and configurations.
class ShapeError : public std::invalid_argument {
 public:
  explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

// A non-finite value appeared where the math requires a finite one.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

class OutOfRangeError : public std::out_of_range {
 public:
  explicit OutOfRangeError(const std::string& what) : std::out_of_range(what) {}
};

// Caller broke a documented precondition (e.g. an empty key list).
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

// Malformed file: wrong magic, unsupported version or dtype.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// Well-formed header whose payload does not match it (truncation, overflow).
class CorruptionError : public FormatError {
 public:
  explicit CorruptionError(const std::string& what) : FormatError(what) {}
};

}  // namespace fgattn
