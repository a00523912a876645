#include "mfpkit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mfpkit/error.hpp"

namespace mfpkit {

std::string_view to_string(Family family) {
  return family == Family::Gaussian ? "gaussian" : "binomial";
}

Family parse_family(std::string_view text) {
  if (text == "gaussian" || text == "normal") return Family::Gaussian;
  if (text == "binomial" || text == "logistic") return Family::Binomial;
  throw Error(Errc::DomainError, "unknown family '" + std::string(text) + "'");
}

Dataset::Dataset(std::vector<std::string> names, std::vector<std::vector<double>> columns,
                 std::string_view outcome, Family family)
    : names_(std::move(names)), columns_(std::move(columns)), family_(family) {
  if (names_.size() != columns_.size())
    throw Error(Errc::InvalidData, "column name count does not match column count");
  if (columns_.empty()) throw Error(Errc::InvalidData, "dataset has no columns");
  n_ = columns_.front().size();
  if (n_ == 0) throw Error(Errc::InvalidData, "dataset has no rows");
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    if (columns_[j].size() != n_)
      throw Error(Errc::InvalidData, "column '" + names_[j] + "' has " +
                                         std::to_string(columns_[j].size()) + " rows, expected " +
                                         std::to_string(n_));
    for (std::size_t i = 0; i < n_; ++i)
      if (!std::isfinite(columns_[j][i]))
        throw Error(Errc::InvalidData, "non-finite value in column '" + names_[j] + "' row " +
                                           std::to_string(i + 1));
    for (std::size_t k = 0; k < j; ++k)
      if (names_[k] == names_[j]) throw Error(Errc::InvalidData, "duplicate column '" + names_[j] + "'");
  }
  outcome_ = index_of(outcome);
  if (family_ == Family::Binomial)
    for (std::size_t i = 0; i < n_; ++i) {
      const double v = columns_[outcome_][i];
      if (v != 0.0 && v != 1.0)
        throw Error(Errc::InvalidData, "binomial outcome '" + names_[outcome_] +
                                           "' must be 0/1, row " + std::to_string(i + 1));
    }
}

bool Dataset::has_column(std::string_view name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

std::size_t Dataset::index_of(std::string_view name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw Error(Errc::DomainError, "no column named '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - names_.begin());
}

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const {
  std::vector<std::vector<double>> cols(columns_.size());
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    cols[j].reserve(rows.size());
    for (const auto r : rows) cols[j].push_back(columns_[j].at(r));
  }
  return Dataset(names_, std::move(cols), names_[outcome_], family_);
}

Dataset Dataset::with_column(const std::string& name, std::vector<double> values) const {
  auto names = names_;
  auto cols = columns_;
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) {
    names.push_back(name);
    cols.push_back(std::move(values));
  } else {
    cols[static_cast<std::size_t>(it - names.begin())] = std::move(values);
  }
  return Dataset(std::move(names), std::move(cols), names_[outcome_], family_);
}

}  // namespace mfpkit
