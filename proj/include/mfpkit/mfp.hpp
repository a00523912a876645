#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mfpkit/dataset.hpp"
#include "mfpkit/fsp.hpp"
#include "mfpkit/glm.hpp"
#include "mfpkit/model.hpp"
#include "mfpkit/spike_zero.hpp"

namespace mfpkit {

enum class VariableKind { Continuous, Binary, Categorical, Spike };

std::string_view to_string(VariableKind kind);

struct MfpConfig {
  double alpha_select = 0.05;  // exclusion (backward-elimination) level
  double alpha_fp = 0.05;      // nonlinearity levels
  int default_max_degree = 2;
  std::map<std::string, int> max_degree;  // 0 keeps a continuous variable linear
  std::set<std::string> force_in;
  std::set<std::string> categorical;
  std::set<std::string> spike;
  int max_cycles = 5;
  TestKind test = TestKind::ChiSquare;

  int degree_of(const std::string& variable) const;
};

/// Decision for one candidate in one cycle.
struct VariableDecision {
  std::string variable;
  VariableKind kind = VariableKind::Continuous;
  /// Closed-test record (continuous variables, and the single inclusion test
  /// of binary / categorical variables).
  FunctionDecision function;
  std::optional<SpikeDecision> spike;
  std::vector<Term> terms;  // empty when excluded

  bool included() const noexcept { return !terms.empty(); }
};

struct MfpCycle {
  std::vector<VariableDecision> decisions;  // in visiting order
};

struct MfpResult {
  std::vector<std::string> order;  // visiting order
  std::map<std::string, VariableDecision> decisions;
  std::vector<MfpCycle> cycle_trace;
  ModelSpec final_spec;
  FitResult fit;
  bool converged = false;
};

/// Ascending p-value of the test that removes each candidate from the model
/// with all candidates entered linearly (dummy blocks for categorical ones);
/// ties keep the given order.
std::vector<std::string> removal_order(const Dataset& data, const std::vector<std::string>& candidates,
                                       const MfpConfig& config = {});

/// Variable and function selection: visits the candidates in removal order,
/// running the closed test for each with all other current choices fixed,
/// until a cycle changes nothing or max_cycles is reached.
MfpResult mfp(const Dataset& data, const std::vector<std::string>& candidates, const MfpConfig& config = {});

/// Categorical term with one group per distinct value and the first group as
/// reference.
Term categorical_levels_term(const std::string& variable, std::span<const double> x);

}  // namespace mfpkit
