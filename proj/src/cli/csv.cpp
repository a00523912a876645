#include "mfpkit/cli/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mfpkit/error.hpp"

namespace mfpkit::cli {
namespace {

using Record = std::vector<std::string>;

[[noreturn]] void fail(std::string_view source, std::size_t line, const std::string& what) {
  throw Error(Errc::DataError, std::string(source) + ":" + std::to_string(line) + ": " + what);
}

// Splits RFC 4180 text into records; `lines` receives the starting line of
// each record.
std::vector<Record> split_records(std::string_view text, std::string_view source, std::vector<std::size_t>& lines) {
  std::vector<Record> records;
  Record current;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;
  std::size_t record_line = 1;
  auto end_field = [&] {
    current.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    if (!(current.size() == 1 && current[0].empty())) {
      records.push_back(std::move(current));
      lines.push_back(record_line);
    }
    current.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      if (field_started && !field.empty()) fail(source, line, "quote inside an unquoted field");
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      continue;
    } else if (c == '\n') {
      end_record();
      ++line;
      record_line = line;
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (quoted) fail(source, record_line, "unterminated quoted field");
  if (field_started || !current.empty()) end_record();
  return records;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::optional<std::size_t> CsvTable::find(std::string_view name) const {
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] == name) return j;
  return std::nullopt;
}

CsvTable parse_csv(std::string_view text, std::string_view source) {
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  std::vector<std::size_t> lines;
  const auto records = split_records(text, source, lines);
  if (records.empty()) fail(source, 1, "missing header row");

  CsvTable table;
  for (const auto& h : records[0]) {
    const auto name = trim(h);
    if (name.empty()) fail(source, lines[0], "empty column name");
    if (table.find(name)) fail(source, lines[0], "duplicate column '" + name + "'");
    table.header.push_back(name);
  }
  const std::size_t p = table.header.size();
  table.columns.assign(p, {});
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != p)
      fail(source, lines[r], "expected " + std::to_string(p) + " fields, found " + std::to_string(rec.size()));
    for (std::size_t j = 0; j < p; ++j) {
      const auto cell = trim(rec[j]);
      if (cell.empty() || cell == "NA") {
        table.columns[j].push_back(std::nullopt);
        continue;
      }
      double v = 0.0;
      const auto* first = cell.data();
      const auto* last = cell.data() + cell.size();
      if (*first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last || !std::isfinite(v))
        fail(source, lines[r], "column '" + table.header[j] + "': '" + cell + "' is not a finite number");
      table.columns[j].push_back(v);
    }
  }
  table.rows = records.size() - 1;
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::DataError, "cannot open data file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), path.string());
}

CompleteCases complete_cases(const CsvTable& table, const std::vector<std::string>& covariates,
                             const std::string& outcome, Family family) {
  std::vector<std::string> names = covariates;
  names.push_back(outcome);
  std::vector<std::size_t> idx;
  for (const auto& n : names) {
    const auto j = table.find(n);
    if (!j) throw Error(Errc::DataError, "column '" + n + "' not found in data");
    idx.push_back(*j);
  }
  std::vector<std::vector<double>> columns(names.size());
  std::size_t dropped = 0;
  for (std::size_t r = 0; r < table.rows; ++r) {
    bool complete = true;
    for (const auto j : idx) complete = complete && table.columns[j][r].has_value();
    if (!complete) {
      ++dropped;
      continue;
    }
    for (std::size_t k = 0; k < idx.size(); ++k) columns[k].push_back(*table.columns[idx[k]][r]);
  }
  if (columns.back().empty()) throw Error(Errc::DataError, "no complete rows in the used columns");
  try {
    return {Dataset(names, std::move(columns), outcome, family), dropped};
  } catch (const Error& e) {
    throw Error(Errc::DataError, e.what());
  }
}

void write_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::ConfigError, "cannot write '" + path.string() + "'");
  const auto& names = data.names();
  for (std::size_t j = 0; j < names.size(); ++j) out << (j ? "," : "") << names[j];
  out << '\n';
  char buf[32];
  for (std::size_t i = 0; i < data.n(); ++i) {
    for (std::size_t j = 0; j < names.size(); ++j) {
      const auto r = std::to_chars(buf, buf + sizeof buf, data.column(j)[i]);
      out << (j ? "," : "") << std::string_view(buf, static_cast<std::size_t>(r.ptr - buf));
    }
    out << '\n';
  }
}

}  // namespace mfpkit::cli
