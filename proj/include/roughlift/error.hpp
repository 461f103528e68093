#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace roughlift {

enum class ErrorCode {
  AlphaOutOfRange,
  IntegrabilityTooLow,
  InfiniteP,
  DegenerateGrid,
  CascadeDiverged,
  DimensionMismatch,
  NotInGroup,
  GroupMembershipViolated,
  GridMismatch,
  ResourceLimit,
  ParseError,
  ConfigMismatch,
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::AlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorCode::IntegrabilityTooLow: return "IntegrabilityTooLow";
    case ErrorCode::InfiniteP: return "InfiniteP";
    case ErrorCode::DegenerateGrid: return "DegenerateGrid";
    case ErrorCode::CascadeDiverged: return "CascadeDiverged";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotInGroup: return "NotInGroup";
    case ErrorCode::GroupMembershipViolated: return "GroupMembershipViolated";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::ResourceLimit: return "ResourceLimit";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ConfigMismatch: return "ConfigMismatch";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Single exception type for the library; the code identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace roughlift
