#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "mfpkit/dataset.hpp"
#include "mfpkit/glm.hpp"
#include "mfpkit/model.hpp"

namespace mfpkit {

/// All FP power vectors of the given degree in canonical order: degree 1 gives
/// the 8 singletons, degree 2 the 36 nondecreasing pairs (repeated powers
/// included), sorted lexicographically.
std::vector<FpPowers> enumerate_fp(int degree);

/// FP design columns for strictly positive x.
Eigen::MatrixXd fp_basis(std::span<const double> x, const FpPowers& powers);

/// Shift to positivity and decimal rescaling.
///
/// shift = 0 when min(x) > 0, otherwise -min(x) + delta with delta the
/// smallest gap between successive distinct values. scale is the power of ten
/// 10^floor(log10(max shifted value)) when that maximum falls outside
/// [0.01, 100], else 1. Throws DegenerateVariable for constant x.
PreTransform pretransform(std::span<const double> x);

std::size_t distinct_count(std::span<const double> x);

struct FpCandidate {
  FpPowers powers;
  double deviance;  // +inf when the candidate fit failed
  double log_likelihood;
};

/// Result of the exhaustive power search. Deviances are not adjusted for the
/// search over powers.
struct FpSearchResult {
  FpPowers best_powers;
  FitResult fit;
  std::vector<FpCandidate> deviance_table;
  PreTransform pre;
};

using FpTermFactory = std::function<Term(const FpPowers&)>;

/// Fits adjustment + make_term(p) for every p of the given degree and returns
/// the minimum-deviance candidate; the first candidate in enumeration order
/// wins ties.
FpSearchResult best_fp_with(const Dataset& data, int degree, const ModelSpec& adjustment,
                            const FpTermFactory& make_term, const PreTransform& pre = {});

/// best_fp_with for an ordinary continuous variable. The pre-transformation is
/// derived from the data unless given.
FpSearchResult best_fp(const Dataset& data, std::string_view variable, int degree,
                       const ModelSpec& adjustment, std::optional<PreTransform> pre = std::nullopt);

}  // namespace mfpkit
