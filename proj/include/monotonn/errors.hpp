#pragma once

#include <stdexcept>
#include <string>

namespace monotonn {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid configuration: bad dimensions, negative weights, empty specs.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

/// Non-finite value produced during tape evaluation or an unsupported
/// primitive encountered while differentiating. Carries the offending
/// node when known.
class EvalError : public Error {
 public:
  explicit EvalError(const std::string& what, long node = -1) : Error(what), node_(node) {}
  long node() const { return node_; }

 private:
  long node_;
};

/// Unreadable, malformed, or truncated files.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

/// Numeric failure in a higher-level routine (divergent training,
/// non-finite gradients, undefined statistics).
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(what) {}
};

}  // namespace monotonn
