#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mfpkit/dataset.hpp"

namespace mfpkit::cli {

/// Numeric table read from CSV; missing cells ("" or "NA") are nullopt.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::optional<double>>> columns;
  std::size_t rows = 0;

  std::optional<std::size_t> find(std::string_view name) const;
};

/// RFC 4180 parsing (quoted fields, doubled quotes, CRLF or LF). The header
/// row is required; every cell must be numeric or missing. Throws DataError
/// with source:line diagnostics.
CsvTable parse_csv(std::string_view text, std::string_view source = "<input>");
CsvTable read_csv(const std::filesystem::path& path);

struct CompleteCases {
  Dataset data;
  std::size_t dropped = 0;
};

/// Dataset of the named columns (outcome included), keeping the rows that are
/// complete on those columns. Throws DataError for an unknown column or when
/// no complete row remains.
CompleteCases complete_cases(const CsvTable& table, const std::vector<std::string>& covariates,
                             const std::string& outcome, Family family);

void write_csv(const std::filesystem::path& path, const Dataset& data);

}  // namespace mfpkit::cli
