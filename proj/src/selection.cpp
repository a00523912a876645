#include "mfpkit/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <cstdio>
#include <string>
#include <variant>

#include "mfpkit/distributions.hpp"
#include "mfpkit/error.hpp"

namespace mfpkit {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_forced(const Term& term, const SelectionOptions& options) {
  for (const auto& f : options.force_in)
    if (f == term.label() || f == term.variable) return true;
  return false;
}

// Whether a step of `df` parameters with LR statistic `stat` and p-value `p`
// passes the criterion: 1-d.f. steps compare p with the equivalent threshold,
// multi-d.f. information-criterion steps compare the criterion directly.
bool significant(const Criterion& c, std::size_t n, int df, double stat, double p) {
  if (c.kind != CriterionKind::PValue && df > 1) return stat > c.penalty(n) * df;
  return p <= criterion_threshold(c, n, df);
}

double ic_delta_for_drop(const Criterion& c, std::size_t n, int df, double stat) {
  if (c.kind == CriterionKind::PValue) return kNaN;
  return stat - c.penalty(n) * df;
}

struct AddTest {
  std::size_t candidate;
  double statistic;
  int df;
  double p_value;
  FitResult fit;
};

std::vector<AddTest> addition_tests(const Dataset& data, const ModelSpec& spec, const FitResult& current,
                                    const std::vector<Term>& candidates, const std::vector<bool>& in_model,
                                    TestKind test) {
  std::vector<AddTest> out;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    if (in_model[c]) continue;
    FitResult bigger = fit(data, spec.with(candidates[c]));
    const int df = static_cast<int>(bigger.model_df) - static_cast<int>(current.model_df);
    if (df < 1) continue;  // fully aliased with the current model
    const double stat = lr_statistic(current, bigger);
    out.push_back({c, stat, df, deviance_test(current, bigger, df, test), std::move(bigger)});
  }
  return out;
}

void note_fit(SelectionTrace& trace, const FitResult& f) {
  for (const auto& w : f.warnings)
    if (std::find(trace.warnings.begin(), trace.warnings.end(), w) == trace.warnings.end())
      trace.warnings.push_back(w);
}


// Several indicator terms on one variable are the dummies of a split
// categorical term; selecting them one by one is discouraged.
void note_split_dummies(SelectionTrace& trace, const std::vector<Term>& terms) {
  std::map<std::string, int> count;
  for (const auto& t : terms)
    if (std::holds_alternative<IndicatorTransform>(t.transform)) ++count[t.variable];
  for (const auto& [variable, k] : count)
    if (k > 1)
      trace.warnings.push_back("dummies of '" + variable +
                               "' are selected individually; the categories are not tested jointly");
}
}  // namespace

double Criterion::penalty(std::size_t n) const {
  switch (kind) {
    case CriterionKind::Aic: return 2.0;
    case CriterionKind::Bic: return std::log(static_cast<double>(n));
    case CriterionKind::PValue: break;
  }
  throw Error(Errc::DomainError, "p-value criterion has no penalty");
}

std::string Criterion::to_string() const {
  switch (kind) {
    case CriterionKind::Aic: return "AIC";
    case CriterionKind::Bic: return "BIC";
    case CriterionKind::PValue: break;
  }
  char buf[48];
  std::snprintf(buf, sizeof buf, "p-value(%g)", alpha);
  return buf;
}

Criterion parse_criterion(std::string_view text, double alpha) {
  if (text == "aic" || text == "AIC") return Criterion::aic();
  if (text == "bic" || text == "BIC") return Criterion::bic();
  if (text == "pvalue" || text == "p") return Criterion::p_value(alpha);
  throw Error(Errc::DomainError, "unknown criterion '" + std::string(text) + "'");
}

double criterion_threshold(const Criterion& criterion, std::size_t n, int df) {
  if (df < 1) throw Error(Errc::DomainError, "criterion_threshold: df must be >= 1");
  switch (criterion.kind) {
    case CriterionKind::PValue:
      if (!(criterion.alpha > 0.0 && criterion.alpha <= 1.0))
        throw Error(Errc::DomainError, "significance level must lie in (0, 1]");
      return criterion.alpha;
    case CriterionKind::Aic: return chi2_sf(2.0 * df, df);
    case CriterionKind::Bic:
      if (n < 2) throw Error(Errc::DomainError, "BIC threshold requires n >= 2");
      return chi2_sf(df * std::log(static_cast<double>(n)), df);
  }
  return criterion.alpha;
}

std::string_view to_string(StepAction action) {
  switch (action) {
    case StepAction::Add: return "add";
    case StepAction::Drop: return "drop";
    case StepAction::KeepConfounder: return "kept-as-confounder";
  }
  return "?";
}

std::vector<RemovalTest> removal_tests(const Dataset& data, const ModelSpec& spec, const FitResult& full,
                                       TestKind test) {
  std::vector<RemovalTest> out;
  for (std::size_t t = 0; t < spec.terms.size(); ++t) {
    const FitResult reduced = fit(data, spec.without(t));
    const int df = std::max(1, static_cast<int>(full.model_df) - static_cast<int>(reduced.model_df));
    RemovalTest r;
    r.term = t;
    r.statistic = lr_statistic(reduced, full);
    r.df = df;
    r.p_value = deviance_test(reduced, full, df, test);
    r.deviance_reduced = reduced.deviance;
    out.push_back(r);
  }
  return out;
}

SelectionTrace backward_eliminate(const Dataset& data, const ModelSpec& start, const Criterion& criterion,
                                  const SelectionOptions& options) {
  SelectionTrace trace;
  trace.start_spec = start;
  note_split_dummies(trace, start.terms);
  ModelSpec spec = start;
  FitResult current = fit(data, spec);
  note_fit(trace, current);
  while (!spec.terms.empty()) {
    const auto tests = removal_tests(data, spec, current, options.test);
    const RemovalTest* worst = nullptr;
    for (const auto& r : tests) {
      if (is_forced(spec.terms[r.term], options)) continue;
      if (significant(criterion, data.n(), r.df, r.statistic, r.p_value)) continue;
      if (!worst || r.p_value > worst->p_value) worst = &r;
    }
    if (!worst) break;
    SelectionStep step;
    step.action = StepAction::Drop;
    step.term = spec.terms[worst->term].label();
    step.p_value = worst->p_value;
    step.df = worst->df;
    step.threshold = criterion_threshold(criterion, data.n(), worst->df);
    step.criterion_delta = ic_delta_for_drop(criterion, data.n(), worst->df, worst->statistic);
    spec = spec.without(worst->term);
    current = fit(data, spec);
    note_fit(trace, current);
    step.deviance_after = current.deviance;
    trace.steps.push_back(step);
  }
  trace.final_spec = spec;
  trace.final_fit = std::move(current);
  return trace;
}

SelectionTrace forward_select(const Dataset& data, const std::vector<Term>& candidates, const Criterion& criterion,
                              const SelectionOptions& options) {
  SelectionTrace trace;
  ModelSpec spec;
  std::vector<bool> in_model(candidates.size(), false);
  for (std::size_t c = 0; c < candidates.size(); ++c)
    if (is_forced(candidates[c], options)) {
      spec.terms.push_back(candidates[c]);
      in_model[c] = true;
    }
  trace.start_spec = spec;
  note_split_dummies(trace, candidates);
  FitResult current = fit(data, spec);
  while (true) {
    auto tests = addition_tests(data, spec, current, candidates, in_model, options.test);
    AddTest* best = nullptr;
    for (auto& a : tests) {
      if (!significant(criterion, data.n(), a.df, a.statistic, a.p_value)) continue;
      if (!best || a.p_value < best->p_value) best = &a;
    }
    if (!best) break;
    SelectionStep step;
    step.action = StepAction::Add;
    step.term = candidates[best->candidate].label();
    step.p_value = best->p_value;
    step.df = best->df;
    step.threshold = criterion_threshold(criterion, data.n(), best->df);
    step.criterion_delta = criterion.kind == CriterionKind::PValue
                               ? kNaN
                               : -(best->statistic - criterion.penalty(data.n()) * best->df);
    spec = spec.with(candidates[best->candidate]);
    in_model[best->candidate] = true;
    current = std::move(best->fit);
    note_fit(trace, current);
    step.deviance_after = current.deviance;
    trace.steps.push_back(step);
  }
  trace.final_spec = spec;
  trace.final_fit = std::move(current);
  return trace;
}

SelectionTrace stepwise(const Dataset& data, const std::vector<Term>& candidates, const Criterion& entry,
                        const Criterion& removal, const SelectionOptions& options) {
  const double alpha_in = criterion_threshold(entry, data.n(), 1);
  const double alpha_out = criterion_threshold(removal, data.n(), 1);
  if (alpha_in > alpha_out)
    throw Error(Errc::DomainError, "stepwise requires the entry level not to exceed the removal level");

  SelectionTrace trace;
  ModelSpec spec;
  std::vector<bool> in_model(candidates.size(), false);
  for (std::size_t c = 0; c < candidates.size(); ++c)
    if (is_forced(candidates[c], options)) {
      spec.terms.push_back(candidates[c]);
      in_model[c] = true;
    }
  trace.start_spec = spec;
  note_split_dummies(trace, candidates);
  FitResult current = fit(data, spec);
  std::set<std::vector<bool>> seen{in_model};

  for (int iteration = 0;; ++iteration) {
    if (iteration >= 100) throw Error(Errc::CycleDetected, "stepwise did not settle within 100 iterations");
    bool changed = false;

    auto tests = addition_tests(data, spec, current, candidates, in_model, options.test);
    AddTest* best = nullptr;
    for (auto& a : tests) {
      if (!significant(entry, data.n(), a.df, a.statistic, a.p_value)) continue;
      if (!best || a.p_value < best->p_value) best = &a;
    }
    if (best) {
      SelectionStep step;
      step.action = StepAction::Add;
      step.term = candidates[best->candidate].label();
      step.p_value = best->p_value;
      step.df = best->df;
      step.threshold = criterion_threshold(entry, data.n(), best->df);
      step.criterion_delta =
          entry.kind == CriterionKind::PValue ? kNaN : -(best->statistic - entry.penalty(data.n()) * best->df);
      spec = spec.with(candidates[best->candidate]);
      in_model[best->candidate] = true;
      current = std::move(best->fit);
      step.deviance_after = current.deviance;
      trace.steps.push_back(step);
      changed = true;
    }

    // Backward re-checks.
    while (!spec.terms.empty()) {
      const auto rtests = removal_tests(data, spec, current, options.test);
      const RemovalTest* worst = nullptr;
      for (const auto& r : rtests) {
        if (is_forced(spec.terms[r.term], options)) continue;
        if (significant(removal, data.n(), r.df, r.statistic, r.p_value)) continue;
        if (!worst || r.p_value > worst->p_value) worst = &r;
      }
      if (!worst) break;
      SelectionStep step;
      step.action = StepAction::Drop;
      step.term = spec.terms[worst->term].label();
      step.p_value = worst->p_value;
      step.df = worst->df;
      step.threshold = criterion_threshold(removal, data.n(), worst->df);
      step.criterion_delta = ic_delta_for_drop(removal, data.n(), worst->df, worst->statistic);
      for (std::size_t c = 0; c < candidates.size(); ++c)
        if (in_model[c] && candidates[c] == spec.terms[worst->term]) in_model[c] = false;
      spec = spec.without(worst->term);
      current = fit(data, spec);
      step.deviance_after = current.deviance;
      trace.steps.push_back(step);
      changed = true;
    }
    note_fit(trace, current);
    if (!changed) break;
    if (!seen.insert(in_model).second)
      throw Error(Errc::CycleDetected, "stepwise revisited a previously selected model");
  }
  trace.final_spec = spec;
  trace.final_fit = std::move(current);
  return trace;
}

SelectionTrace stepwise(const Dataset& data, const std::vector<Term>& candidates, const Criterion& criterion,
                        const SelectionOptions& options) {
  return stepwise(data, candidates, criterion, criterion, options);
}

SelectionTrace augmented_backward_eliminate(const Dataset& data, const ModelSpec& start, double alpha,
                                            std::string_view exposure, double cie_threshold, ChangeMode mode,
                                            const SelectionOptions& options) {
  const Criterion criterion = Criterion::p_value(alpha);
  criterion_threshold(criterion, data.n(), 1);
  std::optional<std::size_t> exposure_index = start.find_label(exposure);
  if (!exposure_index) exposure_index = start.find_variable(exposure);
  if (!exposure_index)
    throw Error(Errc::ExposureMissing, "exposure '" + std::string(exposure) + "' is not in the start model");
  const Term exposure_term = start.terms[*exposure_index];
  if (exposure_term.width() != 1)
    throw Error(Errc::DomainError, "exposure term must have a single coefficient");

  auto exposure_column = [&](const ModelSpec& spec, const FitResult& f) {
    const auto idx = std::find(spec.terms.begin(), spec.terms.end(), exposure_term) - spec.terms.begin();
    return f.term_columns[static_cast<std::size_t>(idx)].first;
  };

  SelectionTrace trace;
  trace.start_spec = start;
  note_split_dummies(trace, start.terms);
  ModelSpec spec = start;
  FitResult current = fit(data, spec);
  note_fit(trace, current);
  while (true) {
    const auto col = exposure_column(spec, current);
    const double beta = current.coefficients(static_cast<Eigen::Index>(col));
    const double se = current.standard_error(col);
    auto tests = removal_tests(data, spec, current, options.test);
    std::vector<const RemovalTest*> order;
    for (const auto& r : tests) {
      if (spec.terms[r.term] == exposure_term || is_forced(spec.terms[r.term], options)) continue;
      if (r.p_value > alpha) order.push_back(&r);
    }
    std::stable_sort(order.begin(), order.end(),
                     [](const RemovalTest* a, const RemovalTest* b) { return a->p_value > b->p_value; });
    bool dropped = false;
    for (const RemovalTest* r : order) {
      const ModelSpec reduced_spec = spec.without(r->term);
      FitResult reduced = fit(data, reduced_spec);
      const double beta_reduced =
          reduced.coefficients(static_cast<Eigen::Index>(exposure_column(reduced_spec, reduced)));
      const double delta = std::abs(beta_reduced - beta);
      const double change = mode == ChangeMode::Standardized ? delta / se : delta / std::abs(beta);
      SelectionStep step;
      step.term = spec.terms[r->term].label();
      step.p_value = r->p_value;
      step.df = r->df;
      step.threshold = alpha;
      step.criterion_delta = kNaN;
      if (change > cie_threshold) {
        step.action = StepAction::KeepConfounder;
        step.change_in_estimate = change;
        step.deviance_after = current.deviance;
        trace.steps.push_back(step);
        continue;
      }
      step.action = StepAction::Drop;
      if (std::isfinite(cie_threshold)) step.change_in_estimate = change;
      spec = reduced_spec;
      current = std::move(reduced);
      note_fit(trace, current);
      step.deviance_after = current.deviance;
      trace.steps.push_back(step);
      dropped = true;
      break;
    }
    if (!dropped) break;
  }
  trace.final_spec = spec;
  trace.final_fit = std::move(current);
  return trace;
}

ScreenResult univariable_screen(const Dataset& data, const std::vector<Term>& candidates, double alpha) {
  ScreenResult out;
  out.warning = "univariable screening is discouraged: marginal significance may be misleading";
  if (candidates.empty()) return out;
  const FitResult null_fit = fit(data, ModelSpec{});
  for (const auto& term : candidates) {
    const FitResult f = fit(data, ModelSpec{}.with(term));
    const int df = std::max(1, static_cast<int>(f.model_df) - static_cast<int>(null_fit.model_df));
    const double p = deviance_test(null_fit, f, df);
    out.p_values.emplace_back(term.label(), p);
    if (p < alpha) out.selected.push_back(term.label());
  }
  return out;
}

std::vector<Term> split_dummies(const Term& categorical) {
  const auto* cat = std::get_if<CategoricalTransform>(&categorical.transform);
  if (!cat || !std::holds_alternative<DummyCoding>(cat->coding))
    throw Error(Errc::DomainError, "split_dummies needs a dummy-coded categorical term");
  const auto ref = std::get<DummyCoding>(cat->coding).reference;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<Term> out;
  for (std::size_t g = 0; g < cat->group_count(); ++g) {
    if (g == ref) continue;
    const double lower = g == 0 ? -inf : cat->cutpoints[g - 1];
    const double upper = g == cat->cutpoints.size() ? inf : cat->cutpoints[g];
    out.push_back(Term{categorical.variable, IndicatorTransform{lower, upper}});
  }
  return out;
}

ModelSpec replay_steps(const ModelSpec& start, const std::vector<SelectionStep>& steps,
                       const std::vector<Term>& candidates) {
  ModelSpec spec = start;
  for (const auto& s : steps) {
    if (s.action == StepAction::Drop) {
      const auto idx = spec.find_label(s.term);
      if (!idx) throw Error(Errc::DomainError, "replay: term " + s.term + " not in model");
      spec = spec.without(*idx);
    } else if (s.action == StepAction::Add) {
      const auto it = std::find_if(candidates.begin(), candidates.end(),
                                   [&](const Term& t) { return t.label() == s.term; });
      if (it == candidates.end()) throw Error(Errc::DomainError, "replay: unknown candidate " + s.term);
      spec = spec.with(*it);
    }
  }
  return spec;
}

}  // namespace mfpkit
