#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mfpkit/dataset.hpp"
#include "mfpkit/model.hpp"

namespace mfpkit {

/// Cutpoints (strictly increasing, interior to the data) plus a coding.
struct CutScheme {
  std::vector<double> cutpoints;
  Coding coding = DummyCoding{0};

  std::size_t group_count() const noexcept { return cutpoints.size() + 1; }
  Term term(const std::string& variable) const;
};

struct QuantileCut {
  CutScheme scheme;
  std::vector<std::size_t> group_sizes;
  std::vector<std::string> warnings;
};

/// Type-7 empirical quantile of sorted data.
double empirical_quantile(std::span<const double> sorted, double probability);

/// Cutpoints at the j/k empirical quantiles, j = 1..k-1. Duplicated cutpoints
/// and cutpoints that would leave a group empty are dropped with a warning.
/// Throws TooFewDistinct when x has fewer than k distinct values.
QuantileCut cut_by_quantiles(std::span<const double> x, std::size_t k);

/// Fractions of observations allowed below a candidate cutpoint.
struct SearchRange {
  double lower = 0.10;
  double upper = 0.90;
};

inline constexpr std::string_view kMinimumPWarning =
    "minimum p-value cutpoint: the p-value is not corrected for the search over cutpoints "
    "and the group difference is strongly overestimated";

struct CutpointResult {
  double cutpoint = 0.0;
  double naive_p = 1.0;
  std::size_t candidates = 0;
  SearchRange range;
  std::size_t min_per_side = 10;
  std::vector<std::pair<double, double>> scan;  // (cutpoint, p) for every candidate
  std::string warning{kMinimumPWarning};
};

/// p-value of the 1-d.f. likelihood-ratio test for the dichotomy x > cutpoint.
double cutpoint_p_value(const Dataset& data, std::string_view variable, double cutpoint);

/// Scans the midpoints between successive distinct values whose share of
/// observations at or below lies in `range` and that leave at least
/// `min_per_side` observations on each side; returns the one with the
/// smallest uncorrected p-value (first on ties). Throws RangeEmpty.
CutpointResult min_p_cutpoint(const Dataset& data, std::string_view variable, SearchRange range = {},
                              std::size_t min_per_side = 10);

struct Type1Result {
  std::size_t n = 0;
  std::size_t replications = 0;
  std::size_t rejections = 0;
  double alpha = 0.05;
  double rate = 0.0;
  double mc_se = 0.0;  // binomial Monte-Carlo standard error
  SearchRange range;
  std::string warning{kMinimumPWarning};
};

/// Empirical rejection rate of the minimum-p cutpoint test on null data: x
/// standard normal, outcome independent (standard normal, or Bernoulli(0.5)
/// for Binomial).
Type1Result type1_simulation(std::size_t n, std::size_t replications, double alpha, SearchRange range,
                             std::uint64_t seed, Family family = Family::Gaussian, unsigned workers = 0);

}  // namespace mfpkit
