#pragma once

#include <stdexcept>
#include <string>

namespace passive {

/// Invalid user-supplied configuration; the message names the offending field.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Two fields live on truncations that cannot be reconciled.
class LatticeMismatch : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite values or an otherwise failed numerical computation.
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A request whose estimated cost exceeds the configured budget.
class BudgetError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file.
class FormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace passive
