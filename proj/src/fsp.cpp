#include "mfpkit/fsp.hpp"

#include <string>

#include "mfpkit/error.hpp"

namespace mfpkit {

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Excluded: return "excluded";
    case Verdict::Linear: return "linear";
    case Verdict::Fp1: return "FP1";
    case Verdict::Fp2: return "FP2";
  }
  return "?";
}

std::vector<int> fsp_degrees_of_freedom(int max_degree) {
  if (max_degree == 2) return {4, 3, 2};
  if (max_degree == 1) return {2, 1};
  throw Error(Errc::DomainError, "FSP max degree must be 1 or 2, got " + std::to_string(max_degree));
}

namespace {

StepTest make_step(std::string label, const FitResult& reduced, const FitResult& full, int df, double alpha,
                   TestKind kind) {
  StepTest step;
  step.label = std::move(label);
  step.statistic = lr_statistic(reduced, full);
  step.df = df;
  step.p_value = deviance_test(reduced, full, df, kind);
  step.alpha = alpha;
  return step;
}

}  // namespace

FunctionDecision fsp_select_with(const Dataset& data, const FspFamily& family, const FspOptions& options,
                                 const ModelSpec& adjustment) {
  const auto dfs = fsp_degrees_of_freedom(options.max_degree);
  if (family.distinct_values < 2)
    throw Error(Errc::TooFewDistinct, "'" + family.variable + "' is constant");
  for (const auto a : {options.alpha_exclusion, options.alpha_nonlinear, options.alpha_complexity})
    if (!(a > 0.0 && a <= 1.0)) throw Error(Errc::DomainError, "FSP significance levels must lie in (0, 1]");

  FunctionDecision d;
  d.variable = family.variable;
  d.options = options;
  d.pre = family.pre;
  d.distinct_values = family.distinct_values;

  const FitResult null_fit = fit(data, adjustment);
  const FitResult linear_fit = fit(data, adjustment.with(family.linear));
  d.deviance_null = null_fit.deviance;
  d.deviance_linear = linear_fit.deviance;

  if (family.distinct_values < kFspMinDistinct) {
    d.linear_only = true;
    d.steps.push_back(make_step("linear vs null", null_fit, linear_fit, 1, options.alpha_exclusion, options.test));
    d.verdict = (options.force_in || d.steps.back().significant()) ? Verdict::Linear : Verdict::Excluded;
    return d;
  }

  const auto fp1 = best_fp_with(data, 1, adjustment, family.make_fp, family.pre);
  d.best_fp1 = fp1.best_powers;
  d.deviance_fp1 = fp1.fit.deviance;

  if (options.max_degree == 1) {
    d.steps.push_back(make_step("FP1 vs null", null_fit, fp1.fit, dfs[0], options.alpha_exclusion, options.test));
    if (!options.force_in && !d.steps.back().significant()) return d;
    d.steps.push_back(make_step("FP1 vs linear", linear_fit, fp1.fit, dfs[1], options.alpha_nonlinear, options.test));
    if (!d.steps.back().significant()) {
      d.verdict = Verdict::Linear;
      return d;
    }
    d.verdict = Verdict::Fp1;
    d.powers = fp1.best_powers;
    return d;
  }

  const auto fp2 = best_fp_with(data, 2, adjustment, family.make_fp, family.pre);
  d.best_fp2 = fp2.best_powers;
  d.deviance_fp2 = fp2.fit.deviance;

  d.steps.push_back(make_step("FP2 vs null", null_fit, fp2.fit, dfs[0], options.alpha_exclusion, options.test));
  if (!options.force_in && !d.steps.back().significant()) return d;
  d.steps.push_back(make_step("FP2 vs linear", linear_fit, fp2.fit, dfs[1], options.alpha_nonlinear, options.test));
  if (!d.steps.back().significant()) {
    d.verdict = Verdict::Linear;
    return d;
  }
  d.steps.push_back(make_step("FP2 vs FP1", fp1.fit, fp2.fit, dfs[2], options.alpha_complexity, options.test));
  if (!d.steps.back().significant()) {
    d.verdict = Verdict::Fp1;
    d.powers = fp1.best_powers;
  } else {
    d.verdict = Verdict::Fp2;
    d.powers = fp2.best_powers;
  }
  return d;
}

FunctionDecision fsp_select(const Dataset& data, std::string_view variable, const FspOptions& options,
                            const ModelSpec& adjustment) {
  if (adjustment.find_variable(variable))
    throw Error(Errc::DomainError, "adjustment model already contains '" + std::string(variable) + "'");
  const auto x = data.column(variable);
  FspFamily family;
  family.variable = std::string(variable);
  family.distinct_values = distinct_count(x);
  if (family.distinct_values < 2)
    throw Error(Errc::TooFewDistinct, "'" + family.variable + "' is constant");
  family.pre = pretransform(x);
  family.linear = linear_term(family.variable);
  const auto pre = family.pre;
  const auto name = family.variable;
  family.make_fp = [name, pre](const FpPowers& p) { return fp_term(name, p, pre); };
  return fsp_select_with(data, family, options, adjustment);
}

FunctionDecision fsp_select(const Dataset& data, std::string_view variable, double alpha, int max_degree,
                            const ModelSpec& adjustment) {
  return fsp_select(data, variable, FspOptions::uniform(alpha, max_degree), adjustment);
}

std::optional<Term> decision_term(const FunctionDecision& decision) {
  switch (decision.verdict) {
    case Verdict::Excluded: return std::nullopt;
    case Verdict::Linear: return linear_term(decision.variable);
    case Verdict::Fp1:
    case Verdict::Fp2: return fp_term(decision.variable, *decision.powers, decision.pre);
  }
  return std::nullopt;
}

Verdict replay_verdict(const FunctionDecision& decision) {
  const auto& s = decision.steps;
  if (s.empty()) return Verdict::Excluded;
  if (!decision.options.force_in && !s[0].significant()) return Verdict::Excluded;
  if (decision.linear_only || s.size() < 2) return Verdict::Linear;
  if (!s[1].significant()) return Verdict::Linear;
  if (decision.options.max_degree == 1) return Verdict::Fp1;
  if (s.size() < 3) return Verdict::Linear;
  return s[2].significant() ? Verdict::Fp2 : Verdict::Fp1;
}

}  // namespace mfpkit
