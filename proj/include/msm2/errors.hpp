#pragma once

#include <stdexcept>
#include <string>

namespace msm2 {

/// Input data fails a structural or semantic check (bad state index, day gap,
/// illegal transition, malformed table, ...).  CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem-level failure: missing file, unreadable path, failed write.
/// CLI maps this to exit code 2.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Inconsistent run configuration (bad flag combination, invalid grid,
/// simulation config that cannot be run).  CLI maps this to exit code 3.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace msm2
