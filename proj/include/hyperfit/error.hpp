#pragma once

#include <stdexcept>
#include <string>

namespace hyperfit {

/// Malformed input: bad CSV rows, invalid series, unusable files.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model or fit was asked for something outside its domain, e.g. t >= t_c.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace hyperfit
