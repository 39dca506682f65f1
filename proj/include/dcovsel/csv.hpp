#pragma once

// CSV ingestion: header row required, comma delimiter, '.' decimal point,
// every data cell numeric. Missing values are rejected, never imputed.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dcovsel/data_matrix.hpp"
#include "dcovsel/error.hpp"

namespace dcovsel {

struct LoadedData {
  DataMatrix features;
  /// Present when a response spec was given.
  std::optional<DataMatrix> response;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t begin = 0;
  for (;;) {
    const auto comma = line.find(',', begin);
    out.push_back(trim(line.substr(begin, comma == std::string_view::npos ? std::string_view::npos : comma - begin)));
    if (comma == std::string_view::npos) return out;
    begin = comma + 1;
  }
}

inline std::string unquote(std::string_view s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return std::string(s);
}

inline std::optional<double> parse_number(std::string_view cell) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || cell.empty()) return std::nullopt;
  return value;
}

// Resolves "y" / "y1,y2" / "0,3" against the header; names win over indices.
inline std::vector<std::size_t> resolve_columns(std::string_view spec, const std::vector<std::string>& header) {
  std::vector<std::size_t> out;
  for (auto token : split_commas(spec)) {
    if (token.empty()) throw InvalidArgument("empty column name in '" + std::string(spec) + "'");
    std::size_t found = header.size();
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (header[j] == token) found = j;
    }
    if (found == header.size()) {
      std::size_t index = 0;
      const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), index);
      if (ec == std::errc{} && ptr == token.data() + token.size() && index < header.size()) found = index;
    }
    if (found == header.size()) throw DataError("unknown column '" + std::string(token) + "'");
    for (auto prior : out) {
      if (prior == found) throw DataError("column '" + header[found] + "' listed twice");
    }
    out.push_back(found);
  }
  return out;
}

}  // namespace detail

/// Parses CSV text. Rows in error messages count data rows from 1 (the header is row 0).
inline LoadedData parse_csv(std::istream& in, std::string_view response_spec = {}) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("input is empty; a header row is required");
  std::vector<std::string> header;
  for (auto cell : detail::split_commas(line)) header.push_back(detail::unquote(cell));

  std::vector<std::vector<double>> columns(header.size());
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    ++row;
    const auto cells = detail::split_commas(line);
    if (cells.size() != header.size()) {
      throw DataError("row " + std::to_string(row) + " has " + std::to_string(cells.size()) + " cells, header has " +
                      std::to_string(header.size()));
    }
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const auto value = detail::parse_number(cells[j]);
      if (!value || !std::isfinite(*value)) {
        throw DataError("non-numeric cell '" + std::string(cells[j]) + "' at row " + std::to_string(row) +
                        ", column '" + header[j] + "'");
      }
      columns[j].push_back(*value);
    }
  }
  if (row < 2) throw DataError("need at least 2 data rows, got " + std::to_string(row));

  std::vector<std::size_t> response_cols;
  if (!detail::trim(response_spec).empty()) response_cols = detail::resolve_columns(response_spec, header);

  std::vector<std::vector<double>> feature_values, response_values(response_cols.size());
  std::vector<std::string> feature_names, response_names(response_cols.size());
  for (std::size_t j = 0; j < header.size(); ++j) {
    bool is_response = false;
    for (std::size_t r = 0; r < response_cols.size(); ++r) {
      if (response_cols[r] == j) {
        response_values[r] = std::move(columns[j]);
        response_names[r] = header[j];
        is_response = true;
      }
    }
    if (!is_response) {
      feature_values.push_back(std::move(columns[j]));
      feature_names.push_back(header[j]);
    }
  }
  if (feature_values.empty()) throw DataError("no feature columns remain after removing the response");

  LoadedData out{DataMatrix::from_columns(feature_values, std::move(feature_names)), std::nullopt};
  if (!response_values.empty()) out.response = DataMatrix::from_columns(response_values, std::move(response_names));
  return out;
}

inline LoadedData load_csv(const std::string& path, std::string_view response_spec = {}) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return parse_csv(in, response_spec);
}

}  // namespace dcovsel
