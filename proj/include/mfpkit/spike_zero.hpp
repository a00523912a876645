#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mfpkit/dataset.hpp"
#include "mfpkit/fsp.hpp"
#include "mfpkit/glm.hpp"
#include "mfpkit/model.hpp"

namespace mfpkit {

/// A semi-continuous variable split into an exposure indicator Z = 1[x > 0]
/// and its positive part.
struct SpikeDecomposition {
  std::vector<double> indicator;
  std::vector<double> positive_part;  // x where x > 0, 0 elsewhere
  double zero_fraction = 0.0;
  std::size_t positive_distinct = 0;
  /// Pre-transformation of the full variable; zero maps to pre.apply(0) > 0,
  /// the origin of the positive-part FP columns.
  PreTransform pre;
};

/// Throws DomainError for negative values, NoSpike when no value is 0 and
/// AllZero when every value is 0.
SpikeDecomposition spike_decompose(std::span<const double> x);

/// Inverse of spike_decompose.
std::vector<double> spike_merge(const SpikeDecomposition& parts);

enum class SpikeVerdict { None, IndicatorOnly, FpOnly, IndicatorAndFp };

std::string_view to_string(SpikeVerdict verdict);

struct SpikeDecision {
  std::string variable;
  SpikeVerdict verdict = SpikeVerdict::None;
  double zero_fraction = 0.0;
  PreTransform pre;
  /// Joint test of {Z, best FP} against the adjustment model.
  std::optional<StepTest> joint_test;
  /// Removal of Z from Z + FP, and of the FP from Z + FP.
  std::optional<StepTest> remove_indicator;
  std::optional<StepTest> remove_fp;
  /// Functional form chosen for the FP component when it is retained.
  std::optional<FunctionDecision> fp_function;
  std::vector<Term> terms;
};

Term spike_indicator_term(const std::string& variable);
Term spike_fp_term(const std::string& variable, const FpPowers& powers, const PreTransform& pre);

/// Selects among none, Z only, FP only and Z + FP. Step 1 tests {Z, best FP}
/// against the adjustment model on 1 + 2 m d.f. (m = max degree). Step 2 tests
/// the removal of each component from Z + FP and keeps those whose removal is
/// rejected; if neither is rejected the component with the smaller removal
/// p-value is kept. The FP component then gets its form from the closed test
/// (steps 2 and 3) with Z in the adjustment when Z is retained.
///
/// Exclusion decisions use options.alpha_exclusion, the FP form uses the
/// nonlinearity levels. With fewer than 5 distinct positive values only Z is
/// considered.
SpikeDecision spike_fsp(const Dataset& data, std::string_view variable, const FspOptions& options,
                        const ModelSpec& adjustment);
SpikeDecision spike_fsp(const Dataset& data, std::string_view variable, double alpha, int max_degree,
                        const ModelSpec& adjustment);

}  // namespace mfpkit
