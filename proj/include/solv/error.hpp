#pragma once

#include <stdexcept>
#include <string>

namespace solv {

// Base class for all library errors.
struct error : std::runtime_error {
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

// An enumeration or closure would exceed the configured element budget.
struct budget_error : error {
  explicit budget_error(const std::string& what) : error(what) {}
};

// A lamplighter operation would move support outside the window [-W, W].
struct window_error : error {
  explicit window_error(const std::string& what) : error(what) {}
};

// Malformed grammar input (group spec, progression spec, config).
struct parse_error : error {
  std::size_t position;
  parse_error(const std::string& what, std::size_t pos)
      : error(what + " (at position " + std::to_string(pos) + ")"), position(pos) {}
};

// A hard postcondition check failed after a construction succeeded.
struct verification_error : error {
  explicit verification_error(const std::string& what) : error(what) {}
};

}  // namespace solv
