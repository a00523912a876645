#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mfpkit/dataset.hpp"
#include "mfpkit/mfp.hpp"
#include "mfpkit/selection.hpp"

namespace mfpkit {

struct ResamplePlan {
  enum class Scheme { Bootstrap, Subsample };
  Scheme scheme = Scheme::Subsample;
  double rate = 0.632;  // subsample fraction
  std::size_t replications = 100;
  std::uint64_t master_seed = 0;

  std::string to_string() const;
};

/// Rows of replication `replication`: n draws with replacement, or
/// round(rate n) distinct rows (sorted) for subsampling.
std::vector<std::size_t> resample_rows(std::size_t n, const ResamplePlan& plan, std::size_t replication);

/// A selection procedure reduced to the set of variables it keeps.
using Selector = std::function<std::vector<std::string>(const Dataset&)>;

Selector be_selector(ModelSpec start, Criterion criterion, SelectionOptions options = {});
Selector mfp_selector(std::vector<std::string> candidates, MfpConfig config);

struct StabilityReport {
  std::vector<std::string> variables;
  std::vector<double> bif;
  /// Pairwise joint inclusion fractions; the diagonal equals bif.
  Eigen::MatrixXd co_inclusion;
  std::vector<std::size_t> inclusion_counts;
  Eigen::Matrix<std::size_t, Eigen::Dynamic, Eigen::Dynamic> co_inclusion_counts;
  /// Selected variable sets (in `variables` order) with their frequencies,
  /// most frequent first.
  std::vector<std::pair<std::vector<std::string>, double>> model_freq;
  ResamplePlan plan;
  std::size_t successes = 0;
  std::size_t failures = 0;
  std::vector<std::string> failure_messages;  // first 10 only

  /// Fraction of replications selecting at least one of the pair.
  double union_frequency(std::size_t i, std::size_t j) const;
};

/// Runs the selector on every resample. Replication r draws from a stream
/// derived from (master_seed, r) only, so the report does not depend on the
/// number of workers. Failed replications are counted and left out of the
/// denominators.
StabilityReport stability(const Dataset& data, const std::vector<std::string>& variables, const Selector& selector,
                          const ResamplePlan& plan, unsigned workers = 0);

struct PairWarning {
  std::string first;
  std::string second;
  double union_frequency = 0.0;
};

struct BifSelection {
  double threshold = 0.0;
  std::vector<std::string> selected;
  /// Pairs excluded individually whose union frequency reaches the threshold.
  std::vector<PairWarning> warnings;
};

BifSelection bif_select(const StabilityReport& report, double threshold);

}  // namespace mfpkit
