#ifndef PERCOVOR_ERROR_HPP
#define PERCOVOR_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace percovor {

enum class ErrorKind {
  invalid_argument,
  degenerate_configuration,
  insufficient_sites,
  unbounded_cell,
  incomplete_configuration,
  invalid_polygon,
  resolution_too_fine,
  empty_target,
  disconnected,
  window_too_small,
  alpha_too_large,
  invalid_union,
  out_of_core,
  out_of_margin,
  parse_error,
};

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::degenerate_configuration: return "degenerate-configuration";
    case ErrorKind::insufficient_sites: return "insufficient-sites";
    case ErrorKind::unbounded_cell: return "unbounded-cell";
    case ErrorKind::incomplete_configuration: return "incomplete-configuration";
    case ErrorKind::invalid_polygon: return "invalid-polygon";
    case ErrorKind::resolution_too_fine: return "resolution-too-fine";
    case ErrorKind::empty_target: return "empty-target";
    case ErrorKind::disconnected: return "disconnected";
    case ErrorKind::window_too_small: return "window-too-small";
    case ErrorKind::alpha_too_large: return "alpha-too-large";
    case ErrorKind::invalid_union: return "invalid-element-of-pi";
    case ErrorKind::out_of_core: return "out-of-core";
    case ErrorKind::out_of_margin: return "out-of-margin";
    case ErrorKind::parse_error: return "parse-error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised when two graph vertices lie in different components.
class DisconnectedError : public Error {
 public:
  DisconnectedError(std::size_t source_component, std::size_t target_component)
      : Error(ErrorKind::disconnected,
              "components of sizes " + std::to_string(source_component) + " and " +
                  std::to_string(target_component)),
        source_component_(source_component),
        target_component_(target_component) {}

  [[nodiscard]] std::size_t source_component_size() const noexcept { return source_component_; }
  [[nodiscard]] std::size_t target_component_size() const noexcept { return target_component_; }

 private:
  std::size_t source_component_;
  std::size_t target_component_;
};

}  // namespace percovor

#endif  // PERCOVOR_ERROR_HPP
