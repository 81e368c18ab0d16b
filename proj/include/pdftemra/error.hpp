// Copyright 2026 The pdftemra Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace pdftemra {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand extents are incompatible.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Value outside an operation's mathematical domain (e.g. log of a non-positive).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A caller-side precondition was violated.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Invalid hyperparameter or run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Id outside a table or vocabulary.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// Sequence longer than the model or batch allows.
class LengthError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// Non-finite value during training or evaluation.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace pdftemra
