#include "mfpkit/error.hpp"

namespace mfpkit {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::DomainError: return "DomainError";
    case Errc::InvalidData: return "InvalidData";
    case Errc::RankDeficient: return "RankDeficient";
    case Errc::NotNested: return "NotNested";
    case Errc::DegenerateVariable: return "DegenerateVariable";
    case Errc::TooFewDistinct: return "TooFewDistinct";
    case Errc::NoSpike: return "NoSpike";
    case Errc::AllZero: return "AllZero";
    case Errc::ExposureMissing: return "ExposureMissing";
    case Errc::CycleDetected: return "CycleDetected";
    case Errc::FoldFitFailure: return "FoldFitFailure";
    case Errc::CollinearComponents: return "CollinearComponents";
    case Errc::ReplicationFailure: return "ReplicationFailure";
    case Errc::RangeEmpty: return "RangeEmpty";
    case Errc::InvalidCorrelation: return "InvalidCorrelation";
    case Errc::ConfigError: return "ConfigError";
    case Errc::DataError: return "DataError";
  }
  return "Error";
}

ErrorCategory category_of(Errc code) {
  switch (code) {
    case Errc::ConfigError:
    case Errc::DomainError:
    case Errc::ExposureMissing:
    case Errc::InvalidCorrelation:
      return ErrorCategory::Config;
    case Errc::DataError:
    case Errc::InvalidData:
    case Errc::DegenerateVariable:
    case Errc::TooFewDistinct:
    case Errc::NoSpike:
    case Errc::AllZero:
    case Errc::RangeEmpty:
      return ErrorCategory::Data;
    case Errc::RankDeficient:
    case Errc::NotNested:
    case Errc::CycleDetected:
    case Errc::FoldFitFailure:
    case Errc::CollinearComponents:
    case Errc::ReplicationFailure:
      return ErrorCategory::Numerical;
  }
  return ErrorCategory::Numerical;
}

}  // namespace mfpkit
