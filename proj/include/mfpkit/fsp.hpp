#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mfpkit/dataset.hpp"
#include "mfpkit/fp.hpp"
#include "mfpkit/glm.hpp"
#include "mfpkit/model.hpp"

namespace mfpkit {

/// Ordered by complexity.
enum class Verdict { Excluded = 0, Linear = 1, Fp1 = 2, Fp2 = 3 };

std::string_view to_string(Verdict verdict);

struct StepTest {
  std::string label;  // e.g. "FP2 vs null"
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
  double alpha = 0.05;
  bool significant() const noexcept { return p_value <= alpha; }
};

struct FspOptions {
  double alpha_exclusion = 0.05;   // step 1
  double alpha_nonlinear = 0.05;   // step 2
  double alpha_complexity = 0.05;  // step 3
  int max_degree = 2;
  bool force_in = false;  // step 1 is reported but cannot exclude
  TestKind test = TestKind::ChiSquare;

  static FspOptions uniform(double alpha, int max_degree = 2) {
    return FspOptions{alpha, alpha, alpha, max_degree, false, TestKind::ChiSquare};
  }
};

/// Outcome of the closed test for one variable. `steps` holds the tests that
/// were actually performed, in order, so the verdict can be replayed.
struct FunctionDecision {
  std::string variable;
  Verdict verdict = Verdict::Excluded;
  std::optional<FpPowers> powers;  // for Fp1 / Fp2
  std::vector<StepTest> steps;
  FspOptions options;
  PreTransform pre;
  std::size_t distinct_values = 0;
  bool linear_only = false;  // too few distinct values for FP
  std::optional<FpPowers> best_fp1;
  std::optional<FpPowers> best_fp2;
  double deviance_null = 0.0;
  double deviance_linear = 0.0;
  double deviance_fp1 = 0.0;
  double deviance_fp2 = 0.0;
};

/// Per-step degrees of freedom: (4, 3, 2) for max degree 2, (2, 1) for 1.
std::vector<int> fsp_degrees_of_freedom(int max_degree);

/// Minimum distinct values needed before FP terms are considered.
inline constexpr std::size_t kFspMinDistinct = 5;

/// Closed test among exclusion, linear, FP1 and FP2 with all other model terms
/// held in `adjustment`.
FunctionDecision fsp_select(const Dataset& data, std::string_view variable, double alpha, int max_degree,
                            const ModelSpec& adjustment);
FunctionDecision fsp_select(const Dataset& data, std::string_view variable, const FspOptions& options,
                            const ModelSpec& adjustment);

/// How the FSP turns powers into terms; lets other modules reuse the closed
/// test with a different basis (e.g. the positive part of a spike variable).
struct FspFamily {
  std::string variable;
  PreTransform pre;
  std::size_t distinct_values = 0;
  Term linear;
  FpTermFactory make_fp;
};

FunctionDecision fsp_select_with(const Dataset& data, const FspFamily& family, const FspOptions& options,
                                 const ModelSpec& adjustment);

/// Term realizing a decision (none when excluded). Linear verdicts use the raw
/// variable, which spans the same space as power 1 on the pre-transformed one.
std::optional<Term> decision_term(const FunctionDecision& decision);

/// Re-derives the verdict from the recorded step tests.
Verdict replay_verdict(const FunctionDecision& decision);

}  // namespace mfpkit
