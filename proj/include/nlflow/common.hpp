// Copyright 2026 The nlflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nlflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (JSONL lines, JavaScript, embedding files).
/// `line` and `column` are 1-based; 0 means unknown.
class ParseError : public Error {
public:
  ParseError(const std::string &what, std::size_t line, std::size_t column = 0);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

/// Well-formed input that violates a data-model invariant.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// Bad configuration: flags, pattern files, catalogs, preconditions.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Model files that cannot be restored.
class ModelError : public Error {
public:
  using Error::Error;
};

class VersionError : public ModelError {
public:
  using ModelError::ModelError;
};

/// Numerical failure during training or solving.
class NumericError : public Error {
public:
  using Error::Error;
};

/// Deterministic PRNG. The mapping from engine output to doubles and
/// bounded integers is fixed here so results do not depend on the
/// standard library's distribution implementations.
class Rng {
public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  /// Uniform in [0, 1).
  double uniform();
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi);
  /// Uniform integer in [0, n). n must be > 0.
  std::size_t below(std::size_t n);

  template <typename T> void shuffle(std::vector<T> &items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = below(i);
      std::swap(items[i - 1], items[j]);
    }
  }

private:
  std::uint64_t state_[4];
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);

std::string hex64(std::uint64_t value);

/// Number of Unicode scalar values in a UTF-8 string. Invalid bytes count
/// as one scalar each.
std::size_t utf8_length(std::string_view text);

std::string to_lower(std::string_view text);

std::string read_file(const std::string &path);
void write_file(const std::string &path, std::string_view contents);

} // namespace nlflow
