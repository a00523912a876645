#include "mfpkit/simlab.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "mfpkit/categorize.hpp"
#include "mfpkit/distributions.hpp"
#include "mfpkit/error.hpp"
#include "mfpkit/parallel.hpp"
#include "mfpkit/rng.hpp"
#include "mfpkit/spike_zero.hpp"

namespace mfpkit::simlab {

std::string_view to_string(Marginal::Kind kind) {
  switch (kind) {
    case Marginal::Kind::Normal: return "normal";
    case Marginal::Kind::Uniform: return "uniform";
    case Marginal::Kind::LogNormal: return "lognormal";
    case Marginal::Kind::Exponential: return "exponential";
  }
  return "?";
}

Marginal::Kind parse_marginal(std::string_view text) {
  for (const auto k : {Marginal::Kind::Normal, Marginal::Kind::Uniform, Marginal::Kind::LogNormal,
                       Marginal::Kind::Exponential})
    if (to_string(k) == text) return k;
  throw Error(Errc::ConfigError, "unknown marginal '" + std::string(text) + "'");
}

std::string_view to_string(TrueForm::Kind kind) {
  switch (kind) {
    case TrueForm::Kind::Null: return "null";
    case TrueForm::Kind::Linear: return "linear";
    case TrueForm::Kind::Log: return "log";
    case TrueForm::Kind::Power: return "power";
    case TrueForm::Kind::Step: return "step";
  }
  return "?";
}

TrueForm::Kind parse_true_form(std::string_view text) {
  for (const auto k : {TrueForm::Kind::Null, TrueForm::Kind::Linear, TrueForm::Kind::Log, TrueForm::Kind::Power,
                       TrueForm::Kind::Step})
    if (to_string(k) == text) return k;
  throw Error(Errc::ConfigError, "unknown true form '" + std::string(text) + "'");
}

bool Marginal::strictly_positive() const noexcept {
  switch (kind) {
    case Kind::Normal: return false;
    case Kind::Uniform: return a > 0.0;
    case Kind::LogNormal:
    case Kind::Exponential: return true;
  }
  return false;
}

double Marginal::from_normal_score(double z) const {
  switch (kind) {
    case Kind::Normal: return a + b * z;
    case Kind::Uniform: return a + (b - a) * normal_cdf(z);
    case Kind::LogNormal: return std::exp(a + b * z);
    case Kind::Exponential: return -std::log(std::max(normal_cdf(-z), 1e-300)) / a;
  }
  return 0.0;
}

bool TrueForm::needs_positive() const noexcept {
  if (kind == Kind::Log) return true;
  if (kind == Kind::Power) return power <= 0.0 || power != std::floor(power);
  return false;
}

double TrueForm::operator()(double x) const {
  switch (kind) {
    case Kind::Null: return 0.0;
    case Kind::Linear: return coefficient * x;
    case Kind::Log: return coefficient * std::log(x);
    case Kind::Power: return coefficient * (power == 0.0 ? std::log(x) : std::pow(x, power));
    case Kind::Step: return x > threshold ? coefficient : 0.0;
  }
  return 0.0;
}

double Covariate::effect(double x) const {
  if (spike_probability > 0.0 && x == 0.0) return zero_effect;
  return form(x);
}

void Scenario::validate() const {
  if (n < 2) throw Error(Errc::DomainError, "scenario needs n >= 2");
  if (family == Family::Gaussian && !(sigma > 0.0)) throw Error(Errc::DomainError, "sigma must be positive");
  std::set<std::string> seen;
  for (const auto& c : covariates) {
    if (c.name.empty() || c.name == outcome || !seen.insert(c.name).second)
      throw Error(Errc::DomainError, "covariate name '" + c.name + "' is empty, duplicated or the outcome");
    const auto& m = c.marginal;
    const bool ok = m.kind == Marginal::Kind::Uniform       ? m.b > m.a
                    : m.kind == Marginal::Kind::Exponential ? m.a > 0.0
                                                            : m.b > 0.0;
    if (!ok || !std::isfinite(m.a) || !std::isfinite(m.b))
      throw Error(Errc::DomainError, "invalid " + std::string(to_string(m.kind)) + " marginal for '" + c.name + "'");
    if (!(c.spike_probability >= 0.0 && c.spike_probability < 1.0))
      throw Error(Errc::DomainError, "spike probability of '" + c.name + "' must lie in [0, 1)");
    if (c.spike_probability > 0.0 && !m.strictly_positive())
      throw Error(Errc::DomainError, "spike covariate '" + c.name + "' needs a positive marginal");
    if (c.form.needs_positive() && !m.strictly_positive())
      throw Error(Errc::DomainError, "true form of '" + c.name + "' is not defined on its support");
  }
  if (correlation.size() == 0) return;
  const auto p = static_cast<Eigen::Index>(covariates.size());
  if (correlation.rows() != p || correlation.cols() != p)
    throw Error(Errc::InvalidCorrelation, "correlation matrix must be " + std::to_string(p) + " x " + std::to_string(p));
  for (Eigen::Index i = 0; i < p; ++i) {
    if (std::abs(correlation(i, i) - 1.0) > 1e-12)
      throw Error(Errc::InvalidCorrelation, "correlation diagonal must be 1");
    for (Eigen::Index j = 0; j < i; ++j)
      if (!std::isfinite(correlation(i, j)) || std::abs(correlation(i, j) - correlation(j, i)) > 1e-12 ||
          std::abs(correlation(i, j)) > 1.0)
        throw Error(Errc::InvalidCorrelation, "correlation matrix must be symmetric with entries in [-1, 1]");
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(correlation, Eigen::EigenvaluesOnly);
  if (!(eig.eigenvalues().minCoeff() > 1e-12))
    throw Error(Errc::InvalidCorrelation, "correlation matrix is not positive definite");
}

std::vector<std::string> Scenario::names() const {
  std::vector<std::string> out;
  for (const auto& c : covariates) out.push_back(c.name);
  return out;
}

std::vector<std::string> Scenario::true_variables() const {
  std::vector<std::string> out;
  for (const auto& c : covariates)
    if (!c.form.is_null() || (c.spike_probability > 0.0 && c.zero_effect != 0.0)) out.push_back(c.name);
  return out;
}

Scenario Scenario::replication(std::size_t r) const {
  Scenario s = *this;
  s.seed = stream_seed(seed, r);
  return s;
}

Dataset generate(const Scenario& scenario) {
  scenario.validate();
  const std::size_t p = scenario.covariates.size();
  const auto pp = static_cast<Eigen::Index>(p);
  Eigen::MatrixXd lower = Eigen::MatrixXd::Identity(pp, pp);
  if (scenario.correlation.size() != 0) lower = scenario.correlation.llt().matrixL();

  Rng rng = make_stream(scenario.seed, 0);
  std::vector<std::vector<double>> columns(p + 1, std::vector<double>(scenario.n));
  Eigen::VectorXd z(pp);
  for (std::size_t i = 0; i < scenario.n; ++i) {
    for (Eigen::Index j = 0; j < pp; ++j) z[j] = standard_normal(rng);
    const Eigen::VectorXd scores = lower * z;
    double eta = scenario.intercept;
    for (std::size_t j = 0; j < p; ++j) {
      const auto& c = scenario.covariates[j];
      double x = c.marginal.from_normal_score(scores[static_cast<Eigen::Index>(j)]);
      if (uniform01(rng) < c.spike_probability) x = 0.0;
      columns[j][i] = x;
      eta += c.effect(x);
    }
    if (scenario.family == Family::Gaussian) {
      columns[p][i] = eta + scenario.sigma * standard_normal(rng);
    } else {
      columns[p][i] = uniform01(rng) < 1.0 / (1.0 + std::exp(-eta)) ? 1.0 : 0.0;
    }
  }
  auto names = scenario.names();
  names.push_back(scenario.outcome);
  return Dataset(std::move(names), std::move(columns), scenario.outcome, scenario.family);
}

std::vector<Term> true_terms(const Covariate& c) {
  std::vector<Term> out;
  const bool spike = c.spike_probability > 0.0;
  if (spike && c.form.needs_positive())
    throw Error(Errc::DomainError, "true form of spike covariate '" + c.name + "' has no exact term");
  const auto& f = c.form;
  if (!f.is_null()) {
    switch (f.kind) {
      case TrueForm::Kind::Null: break;
      case TrueForm::Kind::Linear: out.push_back(linear_term(c.name)); break;
      case TrueForm::Kind::Log: out.push_back(fp_term(c.name, FpPowers(0.0), PreTransform{})); break;
      case TrueForm::Kind::Power:
        if (f.power == 1.0) {
          out.push_back(linear_term(c.name));
        } else if (in_fp_power_set(f.power) && !spike) {
          out.push_back(fp_term(c.name, FpPowers(f.power), PreTransform{}));
        } else {
          throw Error(Errc::DomainError, "power of '" + c.name + "' has no exact term");
        }
        break;
      case TrueForm::Kind::Step: out.push_back(Term{c.name, IndicatorTransform{f.threshold}}); break;
    }
  }
  if (spike && c.zero_effect != 0.0) out.push_back(spike_indicator_term(c.name));
  return out;
}

Procedure be_procedure(Criterion criterion, SelectionOptions options) {
  return {"be(" + criterion.to_string() + ")", [criterion, options](const Dataset& data, const Scenario& s) {
            ModelSpec start;
            for (const auto& c : s.covariates) start.terms.push_back(linear_term(c.name));
            auto trace = backward_eliminate(data, start, criterion, options);
            return ProcedureOutput{std::move(trace.final_spec), std::move(trace.final_fit)};
          }};
}

Procedure mfp_procedure(MfpConfig config) {
  return {"mfp", [config](const Dataset& data, const Scenario& s) {
            auto result = mfp(data, s.names(), config);
            return ProcedureOutput{std::move(result.final_spec), std::move(result.fit)};
          }};
}

Procedure oracle_procedure() {
  return {"oracle", [](const Dataset& data, const Scenario& s) {
            ModelSpec spec;
            for (const auto& c : s.covariates)
              for (auto& t : true_terms(c)) spec.terms.push_back(std::move(t));
            FitResult f = fit(data, spec);
            return ProcedureOutput{std::move(spec), std::move(f)};
          }};
}

Procedure best_subset_procedure(Criterion criterion) {
  return {"best_subset(" + criterion.to_string() + ")", [criterion](const Dataset& data, const Scenario& s) {
            auto best = oracle::best_subset(data, s.names(), criterion);
            return ProcedureOutput{std::move(best.spec), std::move(best.fit)};
          }};
}

namespace {

/// Fitted contribution of every term on `variable` at the points `x`.
Eigen::VectorXd fitted_curve(const ProcedureOutput& out, const std::string& variable, std::span<const double> x) {
  Eigen::VectorXd curve = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(x.size()));
  for (std::size_t t = 0; t < out.spec.terms.size(); ++t) {
    const auto& term = out.spec.terms[t];
    if (term.variable != variable) continue;
    const auto [first, width] = out.fit.term_columns.at(t);
    curve += term_basis(term, x) *
             out.fit.coefficients.segment(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(width));
  }
  return curve;
}

}  // namespace

ReplicationScore score_replication(const Scenario& scenario, const Dataset& data, const ProcedureOutput& output) {
  const std::size_t p = scenario.covariates.size();
  ReplicationScore score;
  score.selected = output.spec.variables();
  score.included.resize(p);
  score.shape_distance.resize(p);
  score.coefficient_error.resize(p);
  for (std::size_t j = 0; j < p; ++j) {
    const auto& c = scenario.covariates[j];
    score.included[j] = output.spec.find_variable(c.name).has_value();

    const auto x = data.column(c.name);
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    double mean = 0.0;
    for (const double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    std::vector<double> grid(kShapeGridPoints + 1);
    for (std::size_t k = 0; k < kShapeGridPoints; ++k)
      grid[k] = empirical_quantile(sorted, 0.01 + 0.98 * static_cast<double>(k) / (kShapeGridPoints - 1));
    grid[kShapeGridPoints] = mean;
    const Eigen::VectorXd fitted = fitted_curve(output, c.name, grid);
    double sum = 0.0;
    for (std::size_t k = 0; k < kShapeGridPoints; ++k) {
      const double d = (fitted[static_cast<Eigen::Index>(k)] - fitted[kShapeGridPoints]) -
                       (c.effect(grid[k]) - c.effect(mean));
      sum += d * d;
    }
    score.shape_distance[j] = sum / static_cast<double>(kShapeGridPoints);

    const bool linear_truth = c.form.is_null() || c.form.kind == TrueForm::Kind::Linear;
    if (linear_truth && c.spike_probability == 0.0) {
      const double truth = c.form.is_null() ? 0.0 : c.form.coefficient;
      std::vector<std::size_t> terms;
      for (std::size_t t = 0; t < output.spec.terms.size(); ++t)
        if (output.spec.terms[t].variable == c.name) terms.push_back(t);
      if (terms.empty()) {
        score.coefficient_error[j] = -truth;
      } else if (terms.size() == 1 && std::holds_alternative<LinearTransform>(output.spec.terms[terms[0]].transform)) {
        const auto col = output.fit.term_columns.at(terms[0]).first;
        score.coefficient_error[j] = output.fit.coefficients[static_cast<Eigen::Index>(col)] - truth;
      }
    }
  }
  return score;
}

namespace {

struct Run {
  bool ok = false;
  std::string message;
  ReplicationScore score;
};

std::vector<Run> run_replications(const Procedure& procedure, const Scenario& scenario, std::size_t replications,
                                  unsigned workers) {
  scenario.validate();
  std::vector<Run> runs(replications);
  parallel_for(replications, workers, [&](std::size_t r) {
    const Scenario s = scenario.replication(r);
    try {
      const Dataset data = generate(s);
      runs[r].score = score_replication(s, data, procedure.run(data, s));
      runs[r].ok = true;
    } catch (const std::exception& e) {
      runs[r].message = "replication " + std::to_string(r) + ": " + e.what();
    }
  });
  return runs;
}

double binomial_se(double rate, std::size_t count) {
  return count == 0 ? 0.0 : std::sqrt(rate * (1.0 - rate) / static_cast<double>(count));
}

}  // namespace

SelectionScore evaluate(const Procedure& procedure, const Scenario& scenario, std::size_t replications,
                        unsigned workers) {
  if (replications < 1) throw Error(Errc::DomainError, "evaluate needs at least one replication");
  const auto runs = run_replications(procedure, scenario, replications, workers);
  const auto truth = scenario.true_variables();
  const std::set<std::string> true_set(truth.begin(), truth.end());

  SelectionScore out;
  out.procedure = procedure.name;
  const std::size_t p = scenario.covariates.size();
  out.variables.resize(p);
  std::vector<double> shape_sq(p, 0.0);
  std::vector<double> coef_sq(p, 0.0);
  std::size_t exact = 0;
  for (const auto& run : runs) {
    if (!run.ok) {
      ++out.failures;
      out.failure_messages.push_back(run.message);
      continue;
    }
    ++out.replications;
    const std::set<std::string> chosen(run.score.selected.begin(), run.score.selected.end());
    if (chosen == true_set) ++exact;
    for (std::size_t j = 0; j < p; ++j) {
      auto& v = out.variables[j];
      const bool active = true_set.contains(scenario.covariates[j].name);
      if (run.score.included[j]) v.inclusion_rate += 1.0;
      if (run.score.included[j] == active) v.correct_rate += 1.0;
      v.shape_distance += run.score.shape_distance[j];
      shape_sq[j] += run.score.shape_distance[j] * run.score.shape_distance[j];
      if (run.score.coefficient_error[j]) {
        coef_sq[j] += *run.score.coefficient_error[j] * *run.score.coefficient_error[j];
        ++v.coefficient_count;
      }
    }
  }
  const auto r = static_cast<double>(out.replications);
  for (std::size_t j = 0; j < p; ++j) {
    auto& v = out.variables[j];
    v.variable = scenario.covariates[j].name;
    v.truly_active = true_set.contains(v.variable);
    if (out.replications == 0) continue;
    v.inclusion_rate /= r;
    v.correct_rate /= r;
    v.inclusion_se = binomial_se(v.inclusion_rate, out.replications);
    v.correct_se = binomial_se(v.correct_rate, out.replications);
    v.shape_distance /= r;
    if (out.replications > 1) {
      const double var = (shape_sq[j] - r * v.shape_distance * v.shape_distance) / (r - 1.0);
      v.shape_distance_se = std::sqrt(std::max(var, 0.0) / r);
    }
    if (v.coefficient_count > 0) v.coefficient_rmse = std::sqrt(coef_sq[j] / static_cast<double>(v.coefficient_count));
  }
  if (out.replications > 0) {
    out.exact_rate = static_cast<double>(exact) / r;
    out.exact_se = binomial_se(out.exact_rate, out.replications);
  }
  return out;
}

Agreement agreement_rate(const Procedure& first, const Procedure& second, const Scenario& scenario,
                         std::size_t replications, unsigned workers) {
  if (replications < 1) throw Error(Errc::DomainError, "agreement needs at least one replication");
  scenario.validate();
  std::vector<int> same(replications, -1);
  parallel_for(replications, workers, [&](std::size_t r) {
    const Scenario s = scenario.replication(r);
    try {
      const Dataset data = generate(s);
      auto a = first.run(data, s).spec.variables();
      auto b = second.run(data, s).spec.variables();
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      same[r] = a == b ? 1 : 0;
    } catch (const std::exception&) {
    }
  });
  Agreement out;
  for (const int v : same) {
    if (v < 0) continue;
    ++out.replications;
    out.agreements += static_cast<std::size_t>(v);
  }
  if (out.replications > 0) {
    out.rate = static_cast<double>(out.agreements) / static_cast<double>(out.replications);
    out.se = binomial_se(out.rate, out.replications);
  }
  return out;
}

namespace oracle {

BestSubset best_subset(const Dataset& data, const std::vector<std::string>& candidates, const Criterion& criterion) {
  if (candidates.size() > kMaxBestSubsetCandidates)
    throw Error(Errc::DomainError, "best subset is limited to " + std::to_string(kMaxBestSubsetCandidates) +
                                       " candidates");
  if (criterion.kind == CriterionKind::PValue)
    throw Error(Errc::DomainError, "best subset needs an information criterion");
  const double penalty = criterion.penalty(data.n());
  BestSubset best;
  bool have = false;
  const std::size_t models = std::size_t{1} << candidates.size();
  for (std::size_t mask = 0; mask < models; ++mask) {
    ModelSpec spec;
    for (std::size_t j = 0; j < candidates.size(); ++j)
      if (mask & (std::size_t{1} << j)) spec.terms.push_back(linear_term(candidates[j]));
    FitResult f = fit(data, spec);
    const double value = -2.0 * f.log_likelihood + penalty * static_cast<double>(f.model_df);
    if (!have || value < best.criterion_value) {
      have = true;
      best.criterion_value = value;
      best.selected = spec.variables();
      best.spec = std::move(spec);
      best.fit = std::move(f);
    }
  }
  return best;
}

}  // namespace oracle

}  // namespace mfpkit::simlab
