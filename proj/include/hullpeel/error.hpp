#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hullpeel {

enum class ErrorKind {
  InvalidArgument,
  InvalidCoordinate,
  NotAtomic,
  NotASubset,
  NonPositiveScale,
  OriginNotInterior,
  OverflowRisk,
  BufferExplosion,
  DegenerateRegression,
  InsufficientLayers,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidCoordinate: return "InvalidCoordinate";
    case ErrorKind::NotAtomic: return "NotAtomic";
    case ErrorKind::NotASubset: return "NotASubset";
    case ErrorKind::NonPositiveScale: return "NonPositiveScale";
    case ErrorKind::OriginNotInterior: return "OriginNotInterior";
    case ErrorKind::OverflowRisk: return "OverflowRisk";
    case ErrorKind::BufferExplosion: return "BufferExplosion";
    case ErrorKind::DegenerateRegression: return "DegenerateRegression";
    case ErrorKind::InsufficientLayers: return "InsufficientLayers";
  }
  return "Unknown";
}

/// Single exception type for the library; `kind()` distinguishes failure modes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

  /// Config problems versus numerical trouble during a run.
  [[nodiscard]] bool is_numerical() const noexcept {
    return kind_ == ErrorKind::OverflowRisk || kind_ == ErrorKind::BufferExplosion ||
           kind_ == ErrorKind::InsufficientLayers;
  }

 private:
  ErrorKind kind_;
};

}  // namespace hullpeel
