#include "mfpkit/fp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mfpkit/error.hpp"

namespace mfpkit {

std::vector<FpPowers> enumerate_fp(int degree) {
  std::vector<FpPowers> out;
  if (degree == 1) {
    for (const double p : kFpPowerSet) out.emplace_back(p);
  } else if (degree == 2) {
    for (std::size_t i = 0; i < kFpPowerSet.size(); ++i)
      for (std::size_t j = i; j < kFpPowerSet.size(); ++j) out.emplace_back(kFpPowerSet[i], kFpPowerSet[j]);
  } else {
    throw Error(Errc::DomainError, "FP degree must be 1 or 2, got " + std::to_string(degree));
  }
  return out;
}

Eigen::MatrixXd fp_basis(std::span<const double> x, const FpPowers& powers) {
  for (const double v : x)
    if (!(v > 0.0)) throw Error(Errc::DomainError, "fp_basis requires strictly positive values");
  return term_basis(Term{"x", FpTransform{powers, PreTransform{}}}, x);
}

std::size_t distinct_count(std::span<const double> x) {
  std::vector<double> v(x.begin(), x.end());
  std::sort(v.begin(), v.end());
  return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
}

PreTransform pretransform(std::span<const double> x) {
  std::vector<double> v(x.begin(), x.end());
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  if (v.size() < 2) throw Error(Errc::DegenerateVariable, "variable has fewer than two distinct values");

  PreTransform pre;
  if (v.front() <= 0.0) {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < v.size(); ++i) gap = std::min(gap, v[i] - v[i - 1]);
    pre.shift = -v.front() + gap;
  }
  const double top = v.back() + pre.shift;
  if (top < 0.01 || top > 100.0) pre.scale = std::pow(10.0, std::floor(std::log10(top)));
  return pre;
}

FpSearchResult best_fp_with(const Dataset& data, int degree, const ModelSpec& adjustment,
                            const FpTermFactory& make_term, const PreTransform& pre) {
  const auto candidates = enumerate_fp(degree);
  const Design base = build_design(data, adjustment);
  const auto p0 = base.matrix.cols();
  Eigen::MatrixXd x(base.matrix.rows(), p0 + degree);
  x.leftCols(p0) = base.matrix;

  std::vector<FpCandidate> table;
  table.reserve(candidates.size());
  std::size_t best = candidates.size();
  double best_dev = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    FpCandidate entry{candidates[c], std::numeric_limits<double>::infinity(),
                      -std::numeric_limits<double>::infinity()};
    try {
      const Term term = make_term(candidates[c]);
      x.rightCols(degree) = term_basis(term, data.column(term.variable));
      const FitResult f = fit_design(x, data.outcome(), data.family());
      if (std::isfinite(f.deviance)) {
        entry.deviance = f.deviance;
        entry.log_likelihood = f.log_likelihood;
      }
    } catch (const Error&) {
      // Scored +inf; one ill-conditioned candidate does not end the search.
    }
    if (entry.deviance < best_dev) {
      best_dev = entry.deviance;
      best = c;
    }
    table.push_back(entry);
  }
  if (best == candidates.size()) throw Error(Errc::RankDeficient, "no FP candidate could be fitted");

  FpSearchResult result{candidates[best], fit(data, adjustment.with(make_term(candidates[best]))),
                        std::move(table), pre};
  return result;
}

FpSearchResult best_fp(const Dataset& data, std::string_view variable, int degree, const ModelSpec& adjustment,
                       std::optional<PreTransform> pre) {
  if (adjustment.find_variable(variable))
    throw Error(Errc::DomainError, "adjustment model already contains '" + std::string(variable) + "'");
  const PreTransform used = pre ? *pre : pretransform(data.column(variable));
  const std::string name(variable);
  return best_fp_with(
      data, degree, adjustment, [&](const FpPowers& p) { return fp_term(name, p, used); }, used);
}

}  // namespace mfpkit
