#pragma once

// Text formats. A dataset file holds one point per line as decimal reals
// separated by whitespace and/or commas; blank lines and lines starting
// with '#' are ignored. A labels file holds one non-negative integer per
// line with the same comment rules. Values are written with 17 significant
// digits so a write/read round trip is lossless.

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "dirstat/error.hpp"
#include "dirstat/types.hpp"

namespace dirstat {

namespace detail {

inline std::string where(const std::string& source, std::size_t line, std::size_t column) {
  return source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": ";
}

inline bool is_separator(char ch) { return ch == ' ' || ch == '\t' || ch == ',' || ch == '\r'; }

inline bool skippable(std::string_view line) {
  const auto first = line.find_first_not_of(" \t\r");
  return first == std::string_view::npos || line[first] == '#';
}

inline void append_number(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  out.append(buf, res.ptr);
}

}  // namespace detail

inline Dataset read_dataset(std::istream& in, const std::string& source = "<input>") {
  std::vector<double> values;
  Eigen::Index cols = -1;
  Eigen::Index rows = 0;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (detail::skippable(line)) continue;
    Eigen::Index count = 0;
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && detail::is_separator(line[pos])) ++pos;
      if (pos >= line.size()) break;
      std::size_t end = pos;
      while (end < line.size() && !detail::is_separator(line[end])) ++end;
      double v = 0.0;
      const char* first = line.data() + pos;
      const char* last = line.data() + end;
      if (*first == '+') ++first;
      const auto res = std::from_chars(first, last, v);
      if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v)) {
        throw data_error(detail::where(source, lineno, pos + 1) + "invalid number '" + line.substr(pos, end - pos) + "'");
      }
      values.push_back(v);
      ++count;
      pos = end;
    }
    if (cols < 0) {
      cols = count;
    } else if (count != cols) {
      throw data_error(detail::where(source, lineno, 1) + "expected " + std::to_string(cols) + " values, found " +
                       std::to_string(count));
    }
    ++rows;
  }
  if (rows == 0) throw data_error(source + ": no data rows");
  Dataset data(rows, cols);
  std::copy(values.begin(), values.end(), data.data());
  return data;
}

inline void write_dataset(std::ostream& out, const Dataset& data, const std::vector<std::string>& comments = {}) {
  for (const std::string& c : comments) out << "# " << c << '\n';
  std::string buf;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    buf.clear();
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
      if (j > 0) buf.push_back(' ');
      detail::append_number(buf, data(i, j));
    }
    buf.push_back('\n');
    out << buf;
  }
}

inline std::vector<int> read_labels(std::istream& in, const std::string& source = "<input>") {
  std::vector<int> labels;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (detail::skippable(line)) continue;
    std::size_t pos = 0;
    while (pos < line.size() && detail::is_separator(line[pos])) ++pos;
    std::size_t end = line.size();
    while (end > pos && detail::is_separator(line[end - 1])) --end;
    int v = 0;
    const auto res = std::from_chars(line.data() + pos, line.data() + end, v);
    if (res.ec != std::errc() || res.ptr != line.data() + end || v < 0) {
      throw data_error(detail::where(source, lineno, pos + 1) + "invalid label '" + line.substr(pos, end - pos) + "'");
    }
    labels.push_back(v);
  }
  if (labels.empty()) throw data_error(source + ": no labels");
  return labels;
}

inline void write_labels(std::ostream& out, const std::vector<int>& labels, const std::vector<std::string>& comments = {}) {
  for (const std::string& c : comments) out << "# " << c << '\n';
  for (int l : labels) out << l << '\n';
}

enum class Normalization { unit, pearson, none };

// Divides each row by its Euclidean norm.
inline void normalize_unit(Dataset& data) {
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const double n = data.row(i).norm();
    if (!(n > 0.0)) throw data_error("row " + std::to_string(i + 1) + " has zero norm");
    data.row(i) /= n;
  }
}

// x -> (x - mean(x)) / |x - mean(x)|, so that the inner product of two
// transformed rows is their Pearson correlation.
inline void normalize_pearson(Dataset& data) {
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    data.row(i).array() -= data.row(i).mean();
    const double n = data.row(i).norm();
    if (!(n > 0.0)) throw data_error("row " + std::to_string(i + 1) + " is constant (zero variance)");
    data.row(i) /= n;
  }
}

inline void normalize(Dataset& data, Normalization mode) {
  switch (mode) {
    case Normalization::unit:
      normalize_unit(data);
      break;
    case Normalization::pearson:
      normalize_pearson(data);
      break;
    case Normalization::none:
      break;
  }
}

}  // namespace dirstat
