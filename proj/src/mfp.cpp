#include "mfpkit/mfp.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "mfpkit/error.hpp"
#include "mfpkit/fp.hpp"
#include "mfpkit/selection.hpp"

namespace mfpkit {

std::string_view to_string(VariableKind kind) {
  switch (kind) {
    case VariableKind::Continuous: return "continuous";
    case VariableKind::Binary: return "binary";
    case VariableKind::Categorical: return "categorical";
    case VariableKind::Spike: return "spike-at-zero";
  }
  return "?";
}

int MfpConfig::degree_of(const std::string& variable) const {
  const auto it = max_degree.find(variable);
  return it == max_degree.end() ? default_max_degree : it->second;
}

Term categorical_levels_term(const std::string& variable, std::span<const double> x) {
  std::vector<double> v(x.begin(), x.end());
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  if (v.size() < 2) throw Error(Errc::TooFewDistinct, "categorical '" + variable + "' has a single level");
  CategoricalTransform t;
  for (std::size_t i = 1; i < v.size(); ++i) t.cutpoints.push_back(0.5 * (v[i - 1] + v[i]));
  t.coding = DummyCoding{0};
  return Term{variable, std::move(t)};
}

namespace {

VariableKind kind_of(const Dataset& data, const std::string& variable, const MfpConfig& config) {
  if (config.categorical.contains(variable)) return VariableKind::Categorical;
  if (config.spike.contains(variable)) return VariableKind::Spike;
  if (distinct_count(data.column(variable)) == 2) return VariableKind::Binary;
  return VariableKind::Continuous;
}

Term entry_term(const Dataset& data, const std::string& variable, VariableKind kind) {
  if (kind == VariableKind::Categorical) return categorical_levels_term(variable, data.column(variable));
  return linear_term(variable);
}

ModelSpec adjustment_for(const std::vector<std::string>& order, const std::map<std::string, VariableDecision>& current,
                         const std::string& skip) {
  ModelSpec spec;
  for (const auto& v : order) {
    if (v == skip) continue;
    for (const auto& t : current.at(v).terms) spec.terms.push_back(t);
  }
  return spec;
}

// Inclusion test of a term that has no functional-form choice.
VariableDecision block_decision(const Dataset& data, const std::string& variable, VariableKind kind,
                                const ModelSpec& adjustment, const MfpConfig& config) {
  VariableDecision d;
  d.variable = variable;
  d.kind = kind;
  d.function.variable = variable;
  d.function.linear_only = true;
  d.function.distinct_values = distinct_count(data.column(variable));
  d.function.options = FspOptions{config.alpha_select, config.alpha_fp, config.alpha_fp, 1,
                                  config.force_in.contains(variable), config.test};
  const Term term = entry_term(data, variable, kind);
  const FitResult null_fit = fit(data, adjustment);
  const FitResult full_fit = fit(data, adjustment.with(term));
  StepTest step;
  step.label = kind == VariableKind::Categorical ? "block vs null" : "linear vs null";
  step.statistic = lr_statistic(null_fit, full_fit);
  step.df = std::max(1, static_cast<int>(full_fit.model_df) - static_cast<int>(null_fit.model_df));
  step.p_value = deviance_test(null_fit, full_fit, step.df, config.test);
  step.alpha = config.alpha_select;
  d.function.steps.push_back(step);
  d.function.deviance_null = null_fit.deviance;
  d.function.deviance_linear = full_fit.deviance;
  const bool keep = d.function.options.force_in || step.significant();
  d.function.verdict = keep ? Verdict::Linear : Verdict::Excluded;
  if (keep) d.terms.push_back(term);
  return d;
}

VariableDecision decide(const Dataset& data, const std::string& variable, VariableKind kind,
                        const ModelSpec& adjustment, const MfpConfig& config) {
  if (kind == VariableKind::Binary || kind == VariableKind::Categorical ||
      (kind == VariableKind::Continuous && config.degree_of(variable) == 0))
    return block_decision(data, variable, kind, adjustment, config);

  FspOptions options{config.alpha_select, config.alpha_fp, config.alpha_fp, config.degree_of(variable),
                     config.force_in.contains(variable), config.test};
  VariableDecision d;
  d.variable = variable;
  d.kind = kind;
  if (kind == VariableKind::Spike) {
    d.spike = spike_fsp(data, variable, options, adjustment);
    d.terms = d.spike->terms;
    if (d.spike->fp_function) d.function = *d.spike->fp_function;
    d.function.variable = variable;
    return d;
  }
  d.function = fsp_select(data, variable, options, adjustment);
  if (auto t = decision_term(d.function)) d.terms.push_back(std::move(*t));
  return d;
}

}  // namespace

std::vector<std::string> removal_order(const Dataset& data, const std::vector<std::string>& candidates,
                                       const MfpConfig& config) {
  if (candidates.empty()) return {};
  ModelSpec full;
  for (const auto& v : candidates) full.terms.push_back(entry_term(data, v, kind_of(data, v, config)));
  const FitResult full_fit = fit(data, full);
  const auto tests = removal_tests(data, full, full_fit, config.test);
  std::vector<std::size_t> idx(candidates.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return tests[a].p_value < tests[b].p_value; });
  std::vector<std::string> out;
  for (const auto i : idx) out.push_back(candidates[i]);
  return out;
}

MfpResult mfp(const Dataset& data, const std::vector<std::string>& candidates, const MfpConfig& config) {
  if (candidates.empty()) throw Error(Errc::DomainError, "mfp needs at least one candidate");
  for (const double a : {config.alpha_select, config.alpha_fp})
    if (!(a > 0.0 && a <= 1.0)) throw Error(Errc::DomainError, "MFP significance levels must lie in (0, 1]");
  if (config.max_cycles < 1) throw Error(Errc::DomainError, "max_cycles must be >= 1");
  for (const auto& [v, deg] : config.max_degree)
    if (deg < 0 || deg > 2) throw Error(Errc::DomainError, "max degree of '" + v + "' must be 0, 1 or 2");
  for (const auto& v : candidates) {
    if (!data.has_column(v)) throw Error(Errc::DomainError, "unknown candidate '" + v + "'");
    if (v == data.outcome_name()) throw Error(Errc::DomainError, "outcome cannot be a candidate");
  }

  MfpResult result;
  result.order = removal_order(data, candidates, config);

  std::map<std::string, VariableKind> kinds;
  for (const auto& v : candidates) {
    kinds[v] = kind_of(data, v, config);
    VariableDecision start;
    start.variable = v;
    start.kind = kinds[v];
    start.function.variable = v;
    start.function.verdict = Verdict::Linear;
    start.terms.push_back(entry_term(data, v, kinds[v]));
    result.decisions[v] = std::move(start);
  }

  for (int cycle = 0; cycle < config.max_cycles; ++cycle) {
    MfpCycle snapshot;
    bool changed = false;
    for (const auto& v : result.order) {
      const ModelSpec adjustment = adjustment_for(result.order, result.decisions, v);
      VariableDecision d = decide(data, v, kinds[v], adjustment, config);
      if (d.terms != result.decisions[v].terms) changed = true;
      snapshot.decisions.push_back(d);
      result.decisions[v] = std::move(d);
    }
    result.cycle_trace.push_back(std::move(snapshot));
    // Convergence needs two successive cycles with identical decisions, so
    // agreement of the first cycle with the all-linear start does not count.
    if (!changed && cycle > 0) {
      result.converged = true;
      break;
    }
  }

  for (const auto& v : result.order)
    for (const auto& t : result.decisions[v].terms) result.final_spec.terms.push_back(t);
  result.fit = fit(data, result.final_spec);
  return result;
}

}  // namespace mfpkit
