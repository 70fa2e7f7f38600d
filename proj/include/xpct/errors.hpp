//
// xpct - Copyright 2026 The xpct Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <stdexcept>
#include <string>

namespace xpct {

// Caller passed a value outside an operation's domain.
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Input data violates a physical or format invariant (b <= d, x <= 0, ...).
class InvalidData : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Input is well-formed but carries too little information (e.g. a constant ROI).
class DegenerateInput : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Dataset could not be read or written; the message names the offending path.
class DatasetError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Writing output failed (filesystem full, permissions, ...).
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace xpct
