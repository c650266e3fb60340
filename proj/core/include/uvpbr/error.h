// Copyright 2026 The uvpbr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace uvpbr {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A caller violated a documented precondition (bad dimensions, non-unit vectors, ...).
class PreconditionError : public Error {
  public:
    using Error::Error;
};

/// Malformed or missing user input: config fields, files, unknown names.
class InputError : public Error {
  public:
    using Error::Error;
};

}  // namespace uvpbr
