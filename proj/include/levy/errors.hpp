#pragma once

#include <stdexcept>
#include <string>

namespace levy {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Experiment or threshold configuration that cannot be honoured.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace levy
