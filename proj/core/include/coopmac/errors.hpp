#pragma once

#include <stdexcept>
#include <string>

namespace coopmac {

/// Requested computation is outside what this build supports
/// (e.g. exact geometry for p > 3, quadrature on non-Rayleigh fading).
class capability_error : public std::runtime_error {
 public:
  explicit capability_error(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical contract violated: infeasible policy, non-finite integrand,
/// tolerance check failed, undefined correlation, ...
class validation_error : public std::runtime_error {
 public:
  explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed run configuration. `pointer()` is the JSON pointer of the
/// offending key.
class config_error : public std::runtime_error {
 public:
  config_error(const std::string& json_pointer, const std::string& what)
      : std::runtime_error(json_pointer + ": " + what), pointer_(json_pointer) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

}  // namespace coopmac
