#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mfpkit {

enum class Errc {
  DomainError,
  InvalidData,
  RankDeficient,
  NotNested,
  DegenerateVariable,
  TooFewDistinct,
  NoSpike,
  AllZero,
  ExposureMissing,
  CycleDetected,
  FoldFitFailure,
  CollinearComponents,
  ReplicationFailure,
  RangeEmpty,
  InvalidCorrelation,
  ConfigError,
  DataError,
};

std::string_view to_string(Errc code);

/// Coarse grouping used by the command-line front end to pick exit codes.
enum class ErrorCategory { Config, Data, Numerical };

ErrorCategory category_of(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace mfpkit
