#include "mfpkit/shrinkage.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <string>

#include "mfpkit/error.hpp"
#include "mfpkit/parallel.hpp"
#include "mfpkit/rng.hpp"

namespace mfpkit {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Variable behind each non-intercept design column.
std::vector<std::string> column_variables(const ModelSpec& spec, const Design& design) {
  std::vector<std::string> out(static_cast<std::size_t>(design.matrix.cols()));
  for (std::size_t t = 0; t < spec.terms.size(); ++t) {
    const auto [first, width] = design.term_columns[t];
    for (std::size_t k = 0; k < width; ++k) out[first + k] = spec.terms[t].variable;
  }
  return out;
}

ShrinkageFactors calibrate(const Dataset& data, const ModelSpec& spec, const ColumnGroups& groups,
                           ShrinkageMode mode, const CvScheme& cv, const ShrinkageOptions& options) {
  const Design design = build_design(data, spec);
  const std::size_t first = spec.intercept ? 1 : 0;
  if (design.matrix.cols() <= static_cast<Index>(first))
    throw Error(Errc::DomainError, "model has no coefficients to shrink");
  const auto variables = column_variables(spec, design);

  std::map<std::string, std::size_t> group_of_label;
  std::map<std::string, std::size_t> group_of_variable;
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (const auto& label : groups[g]) {
      if (!group_of_label.emplace(label, g).second)
        throw Error(Errc::DomainError, "column '" + label + "' appears in more than one group");
    }
  for (std::size_t j = first; j < design.column_labels.size(); ++j) {
    const auto it = group_of_label.find(design.column_labels[j]);
    if (it == group_of_label.end())
      throw Error(Errc::DomainError, "column '" + design.column_labels[j] + "' is not in any group");
    group_of_variable.emplace(variables[j], it->second);
  }
  if (group_of_label.size() != design.column_labels.size() - first)
    throw Error(Errc::DomainError, "groups name columns that are not in the model");

  const std::size_t n = data.n();
  const auto folds = cv_folds(n, cv);
  const auto group_count = static_cast<Index>(groups.size());
  MatrixXd components = MatrixXd::Zero(static_cast<Index>(n), group_count);
  // Components are centred at the full-data column means. Centring at the
  // training-fold means would scale leave-one-out components by n / (n - 1).
  std::map<std::string, double> centre_of;
  for (Index j = static_cast<Index>(first); j < design.matrix.cols(); ++j)
    centre_of.emplace(design.column_labels[static_cast<std::size_t>(j)], design.matrix.col(j).mean());

  parallel_for(folds.size(), options.workers, [&](std::size_t f) {
    try {
      std::vector<bool> held_out(n, false);
      for (const auto r : folds[f]) held_out[r] = true;
      std::vector<std::size_t> train_rows;
      train_rows.reserve(n);
      for (std::size_t i = 0; i < n; ++i)
        if (!held_out[i]) train_rows.push_back(i);
      const Dataset train = data.select_rows(train_rows);
      const Dataset held = data.select_rows(folds[f]);
      const ModelSpec fold_spec = options.reselect ? options.reselect(train) : spec;
      const FitResult fold_fit = fit(train, fold_spec);
      const Design full_design = options.reselect ? build_design(data, fold_spec) : Design{};
      const Design held_design = build_design(held, fold_spec);
      const auto fold_variables = column_variables(fold_spec, held_design);
      const std::size_t fold_first = fold_spec.intercept ? 1 : 0;
      for (std::size_t j = fold_first; j < held_design.column_labels.size(); ++j) {
        std::size_t g = 0;
        if (mode != ShrinkageMode::Global) {
          if (auto it = group_of_label.find(held_design.column_labels[j]); it != group_of_label.end()) {
            g = it->second;
          } else if (auto iv = group_of_variable.find(fold_variables[j]); iv != group_of_variable.end()) {
            g = iv->second;
          } else {
            continue;  // re-selected column with no counterpart in the model
          }
        }
        const auto jj = static_cast<Index>(j);
        const double beta = fold_fit.coefficients(jj);
        const auto known = centre_of.find(held_design.column_labels[j]);
        const double centre = known != centre_of.end() ? known->second : full_design.matrix.col(jj).mean();
        for (std::size_t r = 0; r < folds[f].size(); ++r)
          components(static_cast<Index>(folds[f][r]), static_cast<Index>(g)) +=
              beta * (held_design.matrix(static_cast<Index>(r), jj) - centre);
      }
    } catch (const Error& e) {
      throw Error(Errc::FoldFitFailure, "fold " + std::to_string(f + 1) + ": " + e.what());
    }
  });

  MatrixXd x(static_cast<Index>(n), group_count + 1);
  x.col(0).setOnes();
  x.rightCols(group_count) = components;
  const FitResult cal = fit_design(x, data.outcome(), data.family());
  for (std::size_t g = 0; g < groups.size(); ++g)
    if (cal.aliased[g + 1])
      throw Error(Errc::CollinearComponents, "shrinkage factor for group '" + std::to_string(g + 1) +
                                                 "' is not identifiable");

  ShrinkageFactors out;
  out.mode = mode;
  out.group_columns = groups;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    out.factors.push_back(cal.coefficients(static_cast<Index>(g + 1)));
    std::string label;
    for (const auto& c : groups[g]) label += (label.empty() ? "" : "+") + c;
    out.group_labels.push_back(mode == ShrinkageMode::Global ? std::string("global") : label);
  }
  out.cv = cv;
  out.folds = folds.size();
  out.calibration_intercept = cal.coefficients(0);
  return out;
}

std::vector<std::string> coefficient_labels(const Dataset& data, const ModelSpec& spec) {
  const Design design = build_design(data, spec);
  return {design.column_labels.begin() + (spec.intercept ? 1 : 0), design.column_labels.end()};
}

}  // namespace

std::string CvScheme::to_string() const {
  if (kind == Kind::LeaveOneOut) return "leave-one-out";
  return std::to_string(k) + "-fold (seed " + std::to_string(seed) + ")";
}

CvScheme default_cv_scheme(std::size_t n, std::uint64_t seed) {
  return n <= 200 ? CvScheme::leave_one_out() : CvScheme::kfold(10, seed);
}

std::vector<std::vector<std::size_t>> cv_folds(std::size_t n, const CvScheme& scheme) {
  std::vector<std::vector<std::size_t>> folds;
  if (scheme.kind == CvScheme::Kind::LeaveOneOut) {
    if (n < 3) throw Error(Errc::DomainError, "leave-one-out needs at least 3 rows");
    for (std::size_t i = 0; i < n; ++i) folds.push_back({i});
    return folds;
  }
  if (scheme.k < 2 || scheme.k > n) throw Error(Errc::DomainError, "k-fold needs 2 <= k <= n");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(scheme.seed);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[uniform_index(rng, i + 1)]);
  folds.resize(scheme.k);
  for (std::size_t p = 0; p < n; ++p) folds[p % scheme.k].push_back(perm[p]);
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

std::string_view to_string(ShrinkageMode mode) {
  switch (mode) {
    case ShrinkageMode::Global: return "global";
    case ShrinkageMode::Parameterwise: return "parameterwise";
    case ShrinkageMode::Joint: return "joint";
  }
  return "?";
}

ColumnGroups groups_by_term(const Dataset& data, const ModelSpec& spec) {
  const Design design = build_design(data, spec);
  ColumnGroups groups;
  for (const auto& [first, width] : design.term_columns)
    groups.emplace_back(design.column_labels.begin() + static_cast<std::ptrdiff_t>(first),
                        design.column_labels.begin() + static_cast<std::ptrdiff_t>(first + width));
  return groups;
}

ShrinkageFactors global_shrinkage(const Dataset& data, const ModelSpec& spec, const CvScheme& cv,
                                  const ShrinkageOptions& options) {
  return calibrate(data, spec, ColumnGroups{coefficient_labels(data, spec)}, ShrinkageMode::Global, cv, options);
}

ShrinkageFactors parameterwise_shrinkage(const Dataset& data, const ModelSpec& spec, const CvScheme& cv,
                                         const ShrinkageOptions& options) {
  ColumnGroups groups;
  for (auto& label : coefficient_labels(data, spec)) groups.push_back({std::move(label)});
  return calibrate(data, spec, groups, ShrinkageMode::Parameterwise, cv, options);
}

ShrinkageFactors joint_shrinkage(const Dataset& data, const ModelSpec& spec, const ColumnGroups& groups,
                                 const CvScheme& cv, const ShrinkageOptions& options) {
  return calibrate(data, spec, groups, ShrinkageMode::Joint, cv, options);
}

ShrunkenFit apply_shrinkage(const Dataset& data, const ModelSpec& spec, const FitResult& fit,
                            const ShrinkageFactors& factors) {
  const Design design = build_design(data, spec);
  if (fit.coefficients.size() != design.matrix.cols())
    throw Error(Errc::DomainError, "fit does not match model specification");
  std::map<std::string, double> factor_of;
  for (std::size_t g = 0; g < factors.group_columns.size(); ++g)
    for (const auto& label : factors.group_columns[g]) factor_of[label] = factors.factors[g];

  ShrunkenFit out;
  out.coefficients = fit.coefficients;
  const std::size_t first = spec.intercept ? 1 : 0;
  for (std::size_t j = first; j < design.column_labels.size(); ++j) {
    const auto it = factor_of.find(design.column_labels[j]);
    if (it == factor_of.end()) throw Error(Errc::DomainError, "no factor for '" + design.column_labels[j] + "'");
    out.coefficients(static_cast<Index>(j)) *= it->second;
  }

  const auto y = data.outcome();
  const Eigen::Map<const VectorXd> yv(y.data(), static_cast<Index>(y.size()));
  VectorXd offset = design.matrix.rightCols(design.matrix.cols() - static_cast<Index>(first)) *
                    out.coefficients.tail(design.matrix.cols() - static_cast<Index>(first));
  const double nn = static_cast<double>(data.n());
  if (data.family() == Family::Gaussian) {
    if (spec.intercept) out.coefficients(0) = (yv - offset).mean();
    const VectorXd resid = yv - offset - VectorXd::Constant(yv.size(), spec.intercept ? out.coefficients(0) : 0.0);
    out.deviance = resid.squaredNorm();
    out.log_likelihood = -0.5 * nn * (std::log(2.0 * std::numbers::pi * std::max(out.deviance, nn * 1e-300) / nn) + 1.0);
    return out;
  }
  double alpha = spec.intercept ? out.coefficients(0) : 0.0;
  auto loglik = [&](double a) {
    double ll = 0.0;
    for (Index i = 0; i < yv.size(); ++i) {
      const double eta = a + offset(i);
      ll += yv(i) * eta - (eta > 0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta)));
    }
    return ll;
  };
  if (spec.intercept) {
    for (int iter = 0; iter < 100; ++iter) {
      double score = 0.0;
      double info = 0.0;
      for (Index i = 0; i < yv.size(); ++i) {
        const double mu = 1.0 / (1.0 + std::exp(-(alpha + offset(i))));
        score += yv(i) - mu;
        info += mu * (1.0 - mu);
      }
      const double step = score / std::max(info, 1e-12);
      alpha += step;
      if (std::abs(step) < 1e-12) break;
    }
    out.coefficients(0) = alpha;
  }
  out.log_likelihood = loglik(alpha);
  out.deviance = -2.0 * out.log_likelihood;
  return out;
}

double calibration_slope(std::span<const double> y, const VectorXd& linear_predictor, Family family) {
  MatrixXd x(linear_predictor.size(), 2);
  x.col(0).setOnes();
  x.col(1) = linear_predictor;
  const FitResult f = fit_design(x, y, family);
  if (f.aliased[1]) throw Error(Errc::CollinearComponents, "linear predictor is constant");
  return f.coefficients(1);
}

}  // namespace mfpkit
