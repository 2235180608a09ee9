#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pshlab {

/// Bad input: unknown fixture, malformed set definition, out-of-range parameter.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A Jensen polytope with no feasible measure.
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, std::size_t node)
      : std::runtime_error(what), node_(node) {}
  std::size_t node() const noexcept { return node_; }

 private:
  std::size_t node_;
};

/// The grid or cone is too coarse to represent an object that must exist
/// (boundary polytope, peak set, peak envelope).
class DiscretizationError : public std::runtime_error {
 public:
  DiscretizationError(const std::string& what, std::size_t node)
      : std::runtime_error(what), node_(node) {}
  std::size_t node() const noexcept { return node_; }

 private:
  std::size_t node_;
};

}  // namespace pshlab
