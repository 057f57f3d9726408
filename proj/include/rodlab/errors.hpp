#ifndef RODLAB_ERRORS_HPP
#define RODLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rodlab {

/// Input violates an operation's stated preconditions (bad domain, malformed
/// data, tolerance out of range).  CLI maps this to exit code 1.
class precondition_error : public std::runtime_error {
public:
  explicit precondition_error(const std::string& what_arg)
      : std::runtime_error(what_arg) {}
};

/// A constructive routine exhausted its repair/refine budget or an internal
/// verification failed.  CLI maps this to exit code 2.
class construction_error : public std::runtime_error {
public:
  explicit construction_error(const std::string& what_arg)
      : std::runtime_error(what_arg) {}
};

}  // namespace rodlab

#endif  // RODLAB_ERRORS_HPP
