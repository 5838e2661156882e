// error.hpp
#pragma once

#include <stdexcept>
#include <string>

namespace kstab {

/// Malformed or unsupported input (bad spec file, invalid Cartan matrix, ...).
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// A mathematical precondition of an operation does not hold for its arguments.
class PreconditionError : public std::domain_error {
 public:
  explicit PreconditionError(const std::string& what) : std::domain_error(what) {}
};

/// A numerical or consistency check failed while computing a result.
class CheckFailure : public std::runtime_error {
 public:
  explicit CheckFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace kstab
