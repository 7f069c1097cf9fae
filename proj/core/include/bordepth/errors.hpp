#pragma once

#include <stdexcept>
#include <string>

namespace bordepth {

/// Arguments outside the mathematical domain of an operation (R > N, K = 0, ...).
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Invalid or infeasible configuration (CLI exit code 1).
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (CLI exit code 2).
class DataError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Numeric failure during training, e.g. a NaN action value (CLI exit code 3).
class TrainingError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// API misuse such as stepping a finished episode.
class UsageError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

}  // namespace bordepth
