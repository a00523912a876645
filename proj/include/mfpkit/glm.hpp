#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mfpkit/dataset.hpp"
#include "mfpkit/model.hpp"

namespace mfpkit {

struct GlmControl {
  double tolerance = 1e-8;    // relative deviance change
  int max_iterations = 50;
  double alias_tolerance = 1e-10;
  double separation_bound = 15.0;
};

/// Maximum-likelihood fit of a Gaussian-identity or binomial-logit model.
///
/// Coefficients follow the design column order (intercept first). Columns that
/// are exact linear combinations of earlier ones are dropped: their entry in
/// `aliased` is set, their coefficient is 0 and their covariance row is 0.
struct FitResult {
  Family family = Family::Gaussian;
  Eigen::VectorXd coefficients;
  Eigen::MatrixXd covariance;
  std::vector<std::string> column_labels;
  std::vector<std::pair<std::size_t, std::size_t>> term_columns;
  std::vector<bool> aliased;
  double deviance = 0.0;  // residual sum of squares for Gaussian
  double log_likelihood = 0.0;
  double dispersion = 1.0;
  std::size_t model_df = 0;  // estimated (non-aliased) coefficients
  std::size_t n = 0;
  bool converged = false;
  int iterations = 0;
  bool separation = false;
  std::vector<std::string> warnings;

  double standard_error(std::size_t column) const;
};

FitResult fit(const Dataset& data, const ModelSpec& spec, const GlmControl& control = {});

/// Fit on an explicit design; labels and term layout are left empty.
FitResult fit_design(const Eigen::MatrixXd& x, std::span<const double> y, Family family,
                     const GlmControl& control = {});

/// Linear predictor of a fitted spec on (possibly new) data.
Eigen::VectorXd linear_predictor(const Dataset& data, const ModelSpec& spec, const FitResult& fit);

enum class TestKind { ChiSquare, F };

/// Likelihood-ratio statistic 2 (loglik_full - loglik_reduced). For Gaussian
/// models with estimated scale this is n log(RSS_reduced / RSS_full).
/// Throws NotNested when it is negative beyond rounding.
double lr_statistic(const FitResult& reduced, const FitResult& full);

/// p-value for dropping `df` parameters from `full`. ChiSquare refers the LR
/// statistic to chi2(df); F (Gaussian only) uses the exact F test on RSS.
double deviance_test(const FitResult& reduced, const FitResult& full, int df,
                     TestKind kind = TestKind::ChiSquare);

}  // namespace mfpkit
