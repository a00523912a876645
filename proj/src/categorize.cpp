#include "mfpkit/categorize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mfpkit/error.hpp"
#include "mfpkit/fp.hpp"
#include "mfpkit/glm.hpp"
#include "mfpkit/parallel.hpp"
#include "mfpkit/rng.hpp"

namespace mfpkit {

Term CutScheme::term(const std::string& variable) const {
  return Term{variable, CategoricalTransform{cutpoints, coding}};
}

double empirical_quantile(std::span<const double> sorted, double probability) {
  if (sorted.empty()) throw Error(Errc::DomainError, "quantile of empty data");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * probability;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

QuantileCut cut_by_quantiles(std::span<const double> x, std::size_t k) {
  if (k < 2) throw Error(Errc::DomainError, "need at least two groups");
  if (distinct_count(x) < k)
    throw Error(Errc::TooFewDistinct, "fewer than " + std::to_string(k) + " distinct values");
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());

  QuantileCut out;
  for (std::size_t j = 1; j < k; ++j) {
    const double c = empirical_quantile(sorted, static_cast<double>(j) / static_cast<double>(k));
    if (!out.scheme.cutpoints.empty() && c <= out.scheme.cutpoints.back()) {
      out.warnings.push_back("duplicated quantile cutpoint " + std::to_string(c) + " collapsed");
      continue;
    }
    if (c >= sorted.back()) {
      out.warnings.push_back("quantile cutpoint " + std::to_string(c) + " at the maximum dropped");
      continue;
    }
    out.scheme.cutpoints.push_back(c);
  }
  out.group_sizes.assign(out.scheme.group_count(), 0);
  for (const double v : x) ++out.group_sizes[group_of(out.scheme.cutpoints, v)];
  return out;
}

namespace {

Eigen::MatrixXd dichotomy_design(std::span<const double> x, double cut) {
  Eigen::MatrixXd d(static_cast<Eigen::Index>(x.size()), 2);
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    d(i, 0) = 1.0;
    d(i, 1) = x[static_cast<std::size_t>(i)] > cut ? 1.0 : 0.0;
  }
  return d;
}

double dichotomy_p(const FitResult& null_fit, std::span<const double> x, std::span<const double> y, double cut,
                   Family family) {
  const FitResult f = fit_design(dichotomy_design(x, cut), y, family);
  return deviance_test(null_fit, f, 1);
}

FitResult intercept_only(std::span<const double> y, Family family) {
  return fit_design(Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(y.size()), 1), y, family);
}

CutpointResult scan_cutpoints(std::span<const double> x, std::span<const double> y, Family family,
                              SearchRange range, std::size_t min_per_side) {
  if (!(range.lower >= 0.0 && range.lower <= range.upper && range.upper <= 1.0))
    throw Error(Errc::DomainError, "search range must satisfy 0 <= lower <= upper <= 1");
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double nn = static_cast<double>(n);
  constexpr double kSlack = 1e-9;

  CutpointResult out;
  out.range = range;
  out.min_per_side = min_per_side;
  const FitResult null_fit = intercept_only(y, family);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
    const std::size_t below = j + 1;  // observations <= sorted[i]
    if (below < n) {
      const double share = static_cast<double>(below) / nn;
      if (share >= range.lower - kSlack && share <= range.upper + kSlack && below >= min_per_side &&
          n - below >= min_per_side) {
        const double cut = 0.5 * (sorted[j] + sorted[j + 1]);
        out.scan.emplace_back(cut, dichotomy_p(null_fit, x, y, cut, family));
      }
    }
    i = j + 1;
  }
  if (out.scan.empty()) throw Error(Errc::RangeEmpty, "no admissible cutpoint in the search range");
  out.candidates = out.scan.size();
  out.cutpoint = out.scan.front().first;
  out.naive_p = out.scan.front().second;
  for (const auto& [cut, p] : out.scan)
    if (p < out.naive_p) {
      out.naive_p = p;
      out.cutpoint = cut;
    }
  return out;
}

}  // namespace

double cutpoint_p_value(const Dataset& data, std::string_view variable, double cutpoint) {
  const auto x = data.column(variable);
  return dichotomy_p(intercept_only(data.outcome(), data.family()), x, data.outcome(), cutpoint, data.family());
}

CutpointResult min_p_cutpoint(const Dataset& data, std::string_view variable, SearchRange range,
                              std::size_t min_per_side) {
  return scan_cutpoints(data.column(variable), data.outcome(), data.family(), range, min_per_side);
}

Type1Result type1_simulation(std::size_t n, std::size_t replications, double alpha, SearchRange range,
                             std::uint64_t seed, Family family, unsigned workers) {
  if (replications < 100) throw Error(Errc::DomainError, "type-I simulation needs at least 100 replications");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::DomainError, "alpha must lie in (0, 1)");
  std::vector<char> rejected(replications, 0);
  parallel_for(replications, workers, [&](std::size_t r) {
    Rng rng = make_stream(seed, r);
    std::vector<double> x(n);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = standard_normal(rng);
      y[i] = family == Family::Gaussian ? standard_normal(rng) : (uniform01(rng) < 0.5 ? 1.0 : 0.0);
    }
    const auto res = scan_cutpoints(x, y, family, range, 10);
    rejected[r] = res.naive_p < alpha ? 1 : 0;
  });
  Type1Result out;
  out.n = n;
  out.replications = replications;
  out.alpha = alpha;
  out.range = range;
  for (const char c : rejected) out.rejections += static_cast<std::size_t>(c);
  out.rate = static_cast<double>(out.rejections) / static_cast<double>(replications);
  out.mc_se = std::sqrt(out.rate * (1.0 - out.rate) / static_cast<double>(replications));
  return out;
}

}  // namespace mfpkit
