#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mfpkit/dataset.hpp"
#include "mfpkit/glm.hpp"
#include "mfpkit/model.hpp"

namespace mfpkit {

struct CvScheme {
  enum class Kind { LeaveOneOut, KFold };
  Kind kind = Kind::LeaveOneOut;
  std::size_t k = 10;
  std::uint64_t seed = 0;

  static CvScheme leave_one_out() { return {}; }
  static CvScheme kfold(std::size_t k, std::uint64_t seed) { return {Kind::KFold, k, seed}; }
  std::string to_string() const;
};

/// Leave-one-out up to n = 200, 10-fold beyond.
CvScheme default_cv_scheme(std::size_t n, std::uint64_t seed);

/// Held-out row sets, one per fold.
std::vector<std::vector<std::size_t>> cv_folds(std::size_t n, const CvScheme& scheme);

enum class ShrinkageMode { Global, Parameterwise, Joint };

std::string_view to_string(ShrinkageMode mode);

/// Factors per group of non-intercept design columns. Global has one group
/// holding every column, Parameterwise one group per column.
struct ShrinkageFactors {
  ShrinkageMode mode = ShrinkageMode::Global;
  std::vector<std::string> group_labels;
  std::vector<std::vector<std::string>> group_columns;
  std::vector<double> factors;
  CvScheme cv;
  std::size_t folds = 0;
  double calibration_intercept = 0.0;
};

struct ShrinkageOptions {
  unsigned workers = 1;
  /// When set, each training fold is re-selected with this procedure before
  /// its out-of-fold predictions are formed.
  std::function<ModelSpec(const Dataset&)> reselect;
};

/// Groups of design column labels (intercept excluded).
using ColumnGroups = std::vector<std::vector<std::string>>;

/// One group per term: the default joint grouping, which keeps the two
/// coefficients of an FP2 together.
ColumnGroups groups_by_term(const Dataset& data, const ModelSpec& spec);

ShrinkageFactors global_shrinkage(const Dataset& data, const ModelSpec& spec, const CvScheme& cv,
                                  const ShrinkageOptions& options = {});
ShrinkageFactors parameterwise_shrinkage(const Dataset& data, const ModelSpec& spec, const CvScheme& cv,
                                         const ShrinkageOptions& options = {});
ShrinkageFactors joint_shrinkage(const Dataset& data, const ModelSpec& spec, const ColumnGroups& groups,
                                 const CvScheme& cv, const ShrinkageOptions& options = {});

struct ShrunkenFit {
  Eigen::VectorXd coefficients;
  double deviance = 0.0;
  double log_likelihood = 0.0;
};

/// Multiplies each coefficient by its group's factor and re-estimates the
/// intercept with the shrunken linear predictor held fixed.
ShrunkenFit apply_shrinkage(const Dataset& data, const ModelSpec& spec, const FitResult& fit,
                            const ShrinkageFactors& factors);

/// Slope of the outcome regressed on a linear predictor (with intercept).
double calibration_slope(std::span<const double> y, const Eigen::VectorXd& linear_predictor, Family family);

}  // namespace mfpkit
