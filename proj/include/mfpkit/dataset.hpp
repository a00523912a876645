#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mfpkit {

enum class Family { Gaussian, Binomial };

std::string_view to_string(Family family);
Family parse_family(std::string_view text);

/// Immutable column-oriented table with one designated outcome column.
///
/// All columns share the same length n >= 1 and hold finite values only; a
/// Binomial outcome is restricted to {0, 1}. Violations throw InvalidData.
class Dataset {
 public:
  Dataset(std::vector<std::string> names, std::vector<std::vector<double>> columns,
          std::string_view outcome, Family family);

  std::size_t n() const noexcept { return n_; }
  std::size_t column_count() const noexcept { return columns_.size(); }
  Family family() const noexcept { return family_; }

  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& outcome_name() const { return names_[outcome_]; }
  std::size_t outcome_index() const noexcept { return outcome_; }

  bool has_column(std::string_view name) const;
  /// Throws DomainError naming the missing column.
  std::size_t index_of(std::string_view name) const;

  std::span<const double> column(std::size_t index) const { return columns_.at(index); }
  std::span<const double> column(std::string_view name) const { return columns_[index_of(name)]; }
  std::span<const double> outcome() const { return columns_[outcome_]; }

  /// Rows in the given order; repeated indices are allowed (bootstrap).
  Dataset select_rows(std::span<const std::size_t> rows) const;

  /// Copy with `name` added, or replaced when it already exists.
  Dataset with_column(const std::string& name, std::vector<double> values) const;

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<double>> columns_;
  std::size_t outcome_ = 0;
  Family family_ = Family::Gaussian;
  std::size_t n_ = 0;
};

}  // namespace mfpkit
