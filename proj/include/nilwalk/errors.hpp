#pragma once

#include <stdexcept>
#include <string>

namespace nilwalk {

// Malformed input: dimension mismatches, bad indices, unreadable documents.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A mathematical precondition of an operation does not hold.
class MathError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A configured budget (monomial count, sample cap) was exceeded.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid experiment configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace nilwalk
