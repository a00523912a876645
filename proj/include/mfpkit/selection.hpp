#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mfpkit/dataset.hpp"
#include "mfpkit/glm.hpp"
#include "mfpkit/model.hpp"

namespace mfpkit {

enum class CriterionKind { PValue, Aic, Bic };

struct Criterion {
  CriterionKind kind = CriterionKind::PValue;
  double alpha = 0.05;  // used by PValue only

  static Criterion p_value(double alpha) { return {CriterionKind::PValue, alpha}; }
  static Criterion aic() { return {CriterionKind::Aic, 0.0}; }
  static Criterion bic() { return {CriterionKind::Bic, 0.0}; }

  /// Per-parameter penalty of the information criterion (2 or log n).
  double penalty(std::size_t n) const;
  std::string to_string() const;
};

Criterion parse_criterion(std::string_view text, double alpha);

/// Significance level equivalent to the criterion for a step of `df`
/// parameters: alpha itself, chi2_sf(2 df, df) for AIC, chi2_sf(df log n, df)
/// for BIC.
double criterion_threshold(const Criterion& criterion, std::size_t n, int df = 1);

enum class StepAction { Add, Drop, KeepConfounder };

std::string_view to_string(StepAction action);

struct SelectionStep {
  StepAction action = StepAction::Drop;
  std::string term;  // term label
  double p_value = 1.0;
  int df = 1;
  double threshold = 0.0;
  /// Change in AIC/BIC caused by the action; NaN for PValue criteria.
  double criterion_delta = 0.0;
  double deviance_after = 0.0;
  /// Change-in-estimate of the exposure (augmented BE only).
  std::optional<double> change_in_estimate;
};

struct SelectionTrace {
  ModelSpec start_spec;
  std::vector<SelectionStep> steps;
  ModelSpec final_spec;
  FitResult final_fit;
  std::vector<std::string> warnings;
};

struct SelectionOptions {
  TestKind test = TestKind::ChiSquare;
  /// Term labels or variable names that are never dropped (and, in forward
  /// selection, start in the model).
  std::vector<std::string> force_in;
};

struct RemovalTest {
  std::size_t term = 0;
  double statistic = 0.0;
  int df = 1;
  double p_value = 1.0;
  double deviance_reduced = 0.0;
};

/// LR test for dropping each term of `spec` (whole term, so dummy blocks are
/// tested jointly).
std::vector<RemovalTest> removal_tests(const Dataset& data, const ModelSpec& spec, const FitResult& full,
                                       TestKind test = TestKind::ChiSquare);

SelectionTrace backward_eliminate(const Dataset& data, const ModelSpec& start, const Criterion& criterion,
                                  const SelectionOptions& options = {});

/// Starts from the intercept (plus forced terms) and adds the most significant
/// candidate while it passes the criterion.
SelectionTrace forward_select(const Dataset& data, const std::vector<Term>& candidates,
                              const Criterion& criterion, const SelectionOptions& options = {});

/// Forward steps with backward re-checks. Requires the entry level not to
/// exceed the removal level; throws CycleDetected after 100 iterations or when
/// a model repeats.
SelectionTrace stepwise(const Dataset& data, const std::vector<Term>& candidates, const Criterion& entry,
                        const Criterion& removal, const SelectionOptions& options = {});
SelectionTrace stepwise(const Dataset& data, const std::vector<Term>& candidates, const Criterion& criterion,
                        const SelectionOptions& options = {});

enum class ChangeMode { Standardized, Relative };

/// Backward elimination at `alpha` that keeps a non-significant term when
/// dropping it moves the exposure coefficient by more than `cie_threshold`,
/// measured as |delta beta| / SE(beta) (Standardized) or |delta beta| / |beta|
/// (Relative). The exposure term is never a candidate for removal.
SelectionTrace augmented_backward_eliminate(const Dataset& data, const ModelSpec& start, double alpha,
                                            std::string_view exposure, double cie_threshold,
                                            ChangeMode mode = ChangeMode::Standardized,
                                            const SelectionOptions& options = {});

struct ScreenResult {
  std::vector<std::string> selected;
  std::vector<std::pair<std::string, double>> p_values;
  std::string warning;
};

/// Univariable significance screening. Discouraged; results carry a warning.
ScreenResult univariable_screen(const Dataset& data, const std::vector<Term>& candidates, double alpha);

/// One single-dummy term per non-reference group of a dummy-coded categorical
/// term. Selecting individual dummies is discouraged.
std::vector<Term> split_dummies(const Term& categorical);

/// Applies the add/drop steps of a trace to its start spec.
ModelSpec replay_steps(const ModelSpec& start, const std::vector<SelectionStep>& steps,
                       const std::vector<Term>& candidates = {});

}  // namespace mfpkit
