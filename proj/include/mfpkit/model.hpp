#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "mfpkit/dataset.hpp"

namespace mfpkit {

/// Candidate exponents of the fractional polynomial family; 0 stands for log.
inline constexpr std::array<double, 8> kFpPowerSet{-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0};

bool in_fp_power_set(double p);

/// One or two powers from the FP set, stored nondecreasing. Two equal powers
/// denote the repeated-powers basis {x^p, x^p log x}.
class FpPowers {
 public:
  explicit FpPowers(double p);
  FpPowers(double p1, double p2);

  std::size_t degree() const noexcept { return degree_; }
  double operator[](std::size_t i) const { return p_.at(i); }
  bool repeated() const noexcept { return degree_ == 2 && p_[0] == p_[1]; }
  bool contains(double p) const noexcept {
    return p_[0] == p || (degree_ == 2 && p_[1] == p);
  }
  std::string to_string() const;

  bool operator==(const FpPowers&) const = default;

 private:
  std::array<double, 2> p_{};
  std::size_t degree_ = 1;
};

/// Positivity-restoring map x -> (x + shift) / scale applied before FP powers.
struct PreTransform {
  double shift = 0.0;
  double scale = 1.0;

  double apply(double x) const noexcept { return (x + shift) / scale; }
  bool operator==(const PreTransform&) const = default;
};

struct LinearTransform {
  bool operator==(const LinearTransform&) const = default;
};

struct FpTransform {
  FpPowers powers;
  PreTransform pre;
  bool operator==(const FpTransform&) const = default;
};

/// FP of the positive part of a spike-at-zero variable. Each basis column is
/// shifted so that it vanishes at x = 0, and rows with x = 0 get 0; together
/// with the exposure indicator this makes the indicator coefficient the jump
/// at zero.
struct SpikeFpTransform {
  FpPowers powers;
  PreTransform pre;
  bool operator==(const SpikeFpTransform&) const = default;
};

/// 1 when lower < x <= upper, else 0.
struct IndicatorTransform {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  bool operator==(const IndicatorTransform&) const = default;
};

struct DummyCoding {
  std::size_t reference = 0;
  bool operator==(const DummyCoding&) const = default;
};

struct ScoreCoding {
  std::vector<double> scores;
  bool operator==(const ScoreCoding&) const = default;
};

using Coding = std::variant<DummyCoding, ScoreCoding>;

/// Groups defined by strictly increasing cutpoints: group g holds
/// cut[g-1] < x <= cut[g].
struct CategoricalTransform {
  std::vector<double> cutpoints;
  Coding coding;
  std::size_t group_count() const noexcept { return cutpoints.size() + 1; }
  bool operator==(const CategoricalTransform&) const = default;
};

using Transform = std::variant<LinearTransform, FpTransform, SpikeFpTransform,
                               IndicatorTransform, CategoricalTransform>;

std::size_t group_of(std::span<const double> cutpoints, double x);

struct Term {
  std::string variable;
  Transform transform;

  /// Number of design columns generated.
  std::size_t width() const;
  std::string label() const;
  bool operator==(const Term&) const = default;
};

Term linear_term(std::string variable);
Term fp_term(std::string variable, FpPowers powers, PreTransform pre);

struct ModelSpec {
  std::vector<Term> terms;
  bool intercept = true;

  ModelSpec with(Term term) const;
  ModelSpec without(std::size_t index) const;
  /// Index of the first term on `variable`, if any.
  std::optional<std::size_t> find_variable(std::string_view variable) const;
  std::optional<std::size_t> find_label(std::string_view label) const;
  /// Distinct variables in order of first appearance.
  std::vector<std::string> variables() const;
  std::size_t column_count() const;
  bool operator==(const ModelSpec&) const = default;
};

/// Design columns of one term evaluated at arbitrary values.
Eigen::MatrixXd term_basis(const Term& term, std::span<const double> x);

struct Design {
  Eigen::MatrixXd matrix;
  std::vector<std::string> column_labels;
  /// (first column, width) of each term, intercept excluded.
  std::vector<std::pair<std::size_t, std::size_t>> term_columns;
};

/// Validates the spec against the dataset and assembles the design matrix
/// (intercept column first when present).
Design build_design(const Dataset& data, const ModelSpec& spec);

}  // namespace mfpkit
