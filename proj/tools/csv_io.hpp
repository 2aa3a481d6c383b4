#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hart/errors.hpp"

namespace hart_cli {

/// Fixed 6-significant-digit rendering; NaN renders empty and negative zero
/// is normalized so outputs are bit-stable across platforms.
inline std::string format_real(double v) {
  if (std::isnan(v)) return "";
  if (v == 0.0) v = 0.0;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return std::string(buf);
}

inline double parse_real_strict(const std::string& token, bool& ok) {
  ok = false;
  if (token.empty()) return 0.0;
  double v = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) return 0.0;
  ok = true;
  return v;
}

/// Round-trips v through the output formatter. format(normalize(v)) ==
/// format(v), which makes written files reproduce themselves when re-read.
inline double normalize_real(double v) {
  bool ok = false;
  const std::string s = format_real(v);
  if (s.empty()) return v;
  const double r = parse_real_strict(s, ok);
  return ok ? r : v;
}

struct AnalysisRows {
  std::vector<double> x;
  std::vector<double> sigma;
  std::vector<int> theta; // empty when the column is absent
};

struct CsvError {
  int exit_code;
  std::string message;
};

inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

inline std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

/// Strict reader for the analysis schema: header `x,sigma` or
/// `x,sigma,theta`, decimal-point reals, no padding or quoting. Throws
/// CsvError with the offending 1-based line number.
inline AnalysisRows read_analysis_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError{2, "cannot open input file: " + path};
  std::string line;
  if (!std::getline(in, line))
    throw CsvError{2, "missing header in " + path};
  line = strip_cr(line);
  bool has_theta = false;
  if (line == "x,sigma") {
    has_theta = false;
  } else if (line == "x,sigma,theta") {
    has_theta = true;
  } else {
    throw CsvError{2, "malformed header in " + path +
                          " (expected x,sigma[,theta]), got: " + line};
  }
  AnalysisRows rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    const std::vector<std::string> tok = split_line(line);
    const std::size_t expected = has_theta ? 3 : 2;
    if (tok.size() != expected)
      throw CsvError{2, path + ":" + std::to_string(lineno) +
                            ": expected " + std::to_string(expected) +
                            " fields, got " + std::to_string(tok.size())};
    bool ok = false;
    const double x = parse_real_strict(tok[0], ok);
    if (!ok)
      throw CsvError{2, path + ":" + std::to_string(lineno) +
                            ": cannot parse x value '" + tok[0] + "'"};
    bool ok2 = false;
    const double sigma = parse_real_strict(tok[1], ok2);
    if (!ok2)
      throw CsvError{2, path + ":" + std::to_string(lineno) +
                            ": cannot parse sigma value '" + tok[1] + "'"};
    if (!(sigma > 0.0))
      throw CsvError{2, path + ":" + std::to_string(lineno) +
                            ": sigma must be positive"};
    if (has_theta) {
      if (tok[2] != "0" && tok[2] != "1")
        throw CsvError{2, path + ":" + std::to_string(lineno) +
                              ": theta must be 0 or 1"};
      rows.theta.push_back(tok[2] == "1" ? 1 : 0);
    }
    rows.x.push_back(normalize_real(x));
    rows.sigma.push_back(normalize_real(sigma));
  }
  return rows;
}

/// Buffered CSV writer; content is assembled in memory and written once so
/// a failed run never leaves a truncated file behind.
class CsvWriter {
 public:
  void header(const std::vector<std::string>& names) { row_strings(names); }

  void row_strings(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) buffer_ << ',';
      buffer_ << fields[i];
    }
    buffer_ << '\n';
  }

  void write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CsvError{2, "cannot open output file: " + path};
    out << buffer_.str();
    if (!out) throw CsvError{2, "failed writing output file: " + path};
  }

 private:
  std::ostringstream buffer_;
};

} // namespace hart_cli
