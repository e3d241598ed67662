#pragma once

// Published reference spectra (two tables, six parameter columns) parsed from
// the CSV embedded at build time.

#include <algorithm>
#include <charconv>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "spectra/golden_data.hpp"

namespace spectra::golden {

struct Cell {
  int table = 0;
  std::string column;
  double V0 = 0;
  double lambda = 0;
  double gamma = 0;
  int n = 0;
  std::string method;  ///< AIM, HDM or PPSM
  std::string text;    ///< energy exactly as published
  double energy = 0;
  std::string note;
};

struct Column {
  int table = 0;
  std::string name;
  double V0 = 0;
  double lambda = 0;
  double gamma = 0;
  int levels = 0;
};

namespace detail {

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class T>
T parse_number(std::string_view s) {
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw config_error("malformed number in reference table: '" + std::string(s) + "'");
  return v;
}

}  // namespace detail

inline std::vector<Cell> parse(std::string_view csv) {
  std::vector<Cell> cells;
  bool header_seen = false;
  while (!csv.empty()) {
    const auto eol = csv.find('\n');
    auto line = csv.substr(0, eol);
    csv = eol == std::string_view::npos ? std::string_view{} : csv.substr(eol + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    const auto f = detail::split(line, ',');
    if (f.size() != 9) throw config_error("reference table row has " + std::to_string(f.size()) + " fields");
    Cell c;
    c.table = detail::parse_number<int>(f[0]);
    c.column = std::string(f[1]);
    c.V0 = detail::parse_number<double>(f[2]);
    c.lambda = detail::parse_number<double>(f[3]);
    c.gamma = detail::parse_number<double>(f[4]);
    c.n = detail::parse_number<int>(f[5]);
    c.method = std::string(f[6]);
    c.text = std::string(f[7]);
    c.energy = detail::parse_number<double>(f[7]);
    c.note = std::string(f[8]);
    cells.push_back(std::move(c));
  }
  return cells;
}

inline const std::vector<Cell>& cells() {
  static const std::vector<Cell> all = parse(tables_csv);
  return all;
}

/// Parameter columns in table order, with the number of published levels.
inline std::vector<Column> columns() {
  std::vector<Column> out;
  for (const auto& c : cells()) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const Column& col) { return col.table == c.table && col.name == c.column; });
    if (it == out.end()) {
      out.push_back({c.table, c.column, c.V0, c.lambda, c.gamma, 0});
      it = std::prev(out.end());
    }
    it->levels = std::max(it->levels, c.n + 1);
  }
  return out;
}

inline std::vector<Cell> select(const Column& col, std::string_view method) {
  std::vector<Cell> out;
  for (const auto& c : cells())
    if (c.table == col.table && c.column == col.name && c.method == method) out.push_back(c);
  std::sort(out.begin(), out.end(), [](const Cell& a, const Cell& b) { return a.n < b.n; });
  return out;
}

}  // namespace spectra::golden
