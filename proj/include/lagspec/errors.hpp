#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace lagspec {

/// Raised when a numerical procedure fails (non-convergence, non-finite
/// intermediate, singular system). Carries the offending index when known.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
  numeric_error(const std::string& what, std::size_t index)
      : std::runtime_error(what + " (index " + std::to_string(index) + ")"), index_(index) {}

  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  std::optional<std::size_t> index_;
};

}  // namespace lagspec
