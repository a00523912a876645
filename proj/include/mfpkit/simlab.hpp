#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "mfpkit/dataset.hpp"
#include "mfpkit/glm.hpp"
#include "mfpkit/mfp.hpp"
#include "mfpkit/model.hpp"
#include "mfpkit/selection.hpp"

namespace mfpkit::simlab {

struct Marginal {
  enum class Kind { Normal, Uniform, LogNormal, Exponential };
  Kind kind = Kind::Normal;
  /// Normal: mean, sd. Uniform: lower, upper. LogNormal: meanlog, sdlog.
  /// Exponential: rate (b unused).
  double a = 0.0;
  double b = 1.0;

  static Marginal normal(double mean = 0.0, double sd = 1.0) { return {Kind::Normal, mean, sd}; }
  static Marginal uniform(double lower, double upper) { return {Kind::Uniform, lower, upper}; }
  static Marginal lognormal(double meanlog, double sdlog) { return {Kind::LogNormal, meanlog, sdlog}; }
  static Marginal exponential(double rate) { return {Kind::Exponential, rate, 0.0}; }

  bool strictly_positive() const noexcept;
  /// Value at the standard-normal score z (copula quantile map).
  double from_normal_score(double z) const;
};

std::string_view to_string(Marginal::Kind kind);
Marginal::Kind parse_marginal(std::string_view text);

struct TrueForm {
  enum class Kind { Null, Linear, Log, Power, Step };
  Kind kind = Kind::Null;
  double coefficient = 0.0;
  double power = 1.0;      // Power
  double threshold = 0.0;  // Step: coefficient * 1[x > threshold]

  static TrueForm null() { return {}; }
  static TrueForm linear(double b) { return {Kind::Linear, b}; }
  static TrueForm log(double b) { return {Kind::Log, b}; }
  static TrueForm power_of(double b, double p) { return {Kind::Power, b, p}; }
  static TrueForm step(double b, double at) { return {Kind::Step, b, 1.0, at}; }

  bool is_null() const noexcept { return kind == Kind::Null || coefficient == 0.0; }
  /// Needs x > 0 (log, negative powers).
  bool needs_positive() const noexcept;
  double operator()(double x) const;
};

std::string_view to_string(TrueForm::Kind kind);
TrueForm::Kind parse_true_form(std::string_view text);

struct Covariate {
  std::string name;
  Marginal marginal;
  TrueForm form;
  /// Probability of an exact zero (spike); 0 for ordinary covariates.
  double spike_probability = 0.0;
  /// Contribution to the linear predictor at a spike zero.
  double zero_effect = 0.0;

  double effect(double x) const;
};

struct Scenario {
  std::size_t n = 100;
  std::vector<Covariate> covariates;
  /// Copula correlation of the normal scores; empty means identity.
  Eigen::MatrixXd correlation;
  double intercept = 0.0;
  Family family = Family::Gaussian;
  double sigma = 1.0;  // Gaussian residual sd
  std::string outcome = "y";
  std::uint64_t seed = 0;

  /// Throws DomainError for malformed settings and InvalidCorrelation when
  /// the correlation matrix is not symmetric positive definite.
  void validate() const;
  std::vector<std::string> names() const;
  std::vector<std::string> true_variables() const;
  /// Same scenario with the seed of replication r.
  Scenario replication(std::size_t r) const;
};

/// Draws the dataset of a scenario. Deterministic in the scenario.
Dataset generate(const Scenario& scenario);

/// What a procedure hands back for scoring.
struct ProcedureOutput {
  ModelSpec spec;
  FitResult fit;
};

struct Procedure {
  std::string name;
  std::function<ProcedureOutput(const Dataset&, const Scenario&)> run;
};

/// Backward elimination from all covariates entered linearly.
Procedure be_procedure(Criterion criterion, SelectionOptions options = {});
/// MFP over all covariates (spike covariates per config.spike).
Procedure mfp_procedure(MfpConfig config);
/// Fits the true model. Requires log, FP-set powers, steps or linear truths.
Procedure oracle_procedure();
/// Exhaustive best subset of linear terms by AIC or BIC.
Procedure best_subset_procedure(Criterion criterion);

/// Term representing a true form, if it is expressible.
std::vector<Term> true_terms(const Covariate& covariate);

struct VariableScore {
  std::string variable;
  bool truly_active = false;
  double inclusion_rate = 0.0;
  double inclusion_se = 0.0;
  /// Included when active, excluded when null.
  double correct_rate = 0.0;
  double correct_se = 0.0;
  /// Mean squared difference between fitted and true curve on the quantile
  /// grid, both centred at the covariate mean.
  double shape_distance = 0.0;
  double shape_distance_se = 0.0;
  /// Over replications where the truth is linear or null and the fit is linear
  /// or excluded (excluded counts as 0).
  double coefficient_rmse = 0.0;
  std::size_t coefficient_count = 0;
};

struct SelectionScore {
  std::string procedure;
  std::vector<VariableScore> variables;
  std::size_t replications = 0;
  std::size_t failures = 0;
  std::vector<std::string> failure_messages;
  /// Fraction of replications selecting exactly the true variable set.
  double exact_rate = 0.0;
  double exact_se = 0.0;
};

inline constexpr std::size_t kShapeGridPoints = 50;

/// Per-replication indicators and distances, before aggregation.
struct ReplicationScore {
  std::vector<bool> included;
  std::vector<double> shape_distance;
  std::vector<std::optional<double>> coefficient_error;
  std::vector<std::string> selected;
};

ReplicationScore score_replication(const Scenario& scenario, const Dataset& data, const ProcedureOutput& output);

/// Runs generate + procedure for replications 0..R-1 and aggregates. Failing
/// replications are counted and excluded from the aggregates.
SelectionScore evaluate(const Procedure& procedure, const Scenario& scenario, std::size_t replications,
                        unsigned workers = 0);

struct Agreement {
  std::size_t replications = 0;
  std::size_t agreements = 0;
  double rate = 0.0;
  double se = 0.0;
};

/// Fraction of replications in which two procedures select the same set.
Agreement agreement_rate(const Procedure& first, const Procedure& second, const Scenario& scenario,
                         std::size_t replications, unsigned workers = 0);

namespace oracle {

struct BestSubset {
  std::vector<std::string> selected;
  double criterion_value = 0.0;  // -2 loglik + penalty * estimated parameters
  ModelSpec spec;
  FitResult fit;
};

inline constexpr std::size_t kMaxBestSubsetCandidates = 12;

/// Exhaustive search over all 2^p linear-term subsets (p <= 12); the first
/// subset in binary-counting order wins ties.
BestSubset best_subset(const Dataset& data, const std::vector<std::string>& candidates, const Criterion& criterion);

}  // namespace oracle

}  // namespace mfpkit::simlab
