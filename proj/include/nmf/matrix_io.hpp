#ifndef NMF_MATRIX_IO_HPP
#define NMF_MATRIX_IO_HPP

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nmf/matrix.hpp"
#include "nmf/number_format.hpp"

namespace nmf {

/// File access failure (open, write, or rename), as opposed to a syntax
/// problem inside a file.
class FileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Matrix file error carrying the 1-based line and column it occurred at.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, std::size_t column,
             const std::string& message)
      : std::runtime_error(source + ":" + std::to_string(line) + ":" + std::to_string(column) +
                           ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

namespace detail {

inline bool has_matrix_market_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".mtx";
}

inline double parse_finite_token(const std::string& source, std::size_t line, std::size_t column,
                                 std::string_view token) {
  double value = 0.0;
  if (token.empty() || !parse_double(token, value)) {
    throw ParseError(source, line, column,
                     "expected a decimal number, got '" + std::string(token) + "'");
  }
  if (!std::isfinite(value)) {
    throw ParseError(source, line, column, "non-finite value '" + std::string(token) + "'");
  }
  return value;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace detail

/// Reads a CSV matrix: one row per line, comma-separated decimal literals,
/// no header. Errors carry the offending line and column.
inline DenseMatrix read_matrix_csv(std::istream& in, const std::string& source) {
  std::vector<double> data;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::string line;
  std::size_t line_no = 0;
  bool pending_blank = false;
  std::size_t blank_line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) {
      // Tolerated only as trailing whitespace at end of file.
      if (!pending_blank) {
        pending_blank = true;
        blank_line_no = line_no;
      }
      continue;
    }
    if (pending_blank) {
      throw ParseError(source, blank_line_no, 1, "empty row");
    }

    std::size_t row_cols = 0;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = line.find(',', pos);
      const std::string_view raw(line.data() + pos,
                                 (comma == std::string::npos ? line.size() : comma) - pos);
      data.push_back(detail::parse_finite_token(source, line_no, pos + 1, detail::trim(raw)));
      ++row_cols;
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (rows == 0) {
      cols = row_cols;
    } else if (row_cols != cols) {
      throw ParseError(source, line_no, 1,
                       "row has " + std::to_string(row_cols) + " columns, expected " +
                           std::to_string(cols));
    }
    ++rows;
  }
  if (rows == 0) {
    throw ParseError(source, 1, 1, "empty matrix file");
  }
  return DenseMatrix(rows, cols, std::move(data));
}

/// Reads a MatrixMarket dense array file (`array real general`), which
/// stores entries in column-major order.
inline DenseMatrix read_matrix_market(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError(source, 1, 1, "empty matrix file");
  }
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || object != "matrix") {
    throw ParseError(source, 1, 1, "missing %%MatrixMarket matrix banner");
  }
  if (format != "array") {
    throw ParseError(source, 1, 1, "unsupported MatrixMarket format '" + format +
                                       "', only dense 'array' is accepted");
  }
  if (field != "real" && field != "integer") {
    throw ParseError(source, 1, 1, "unsupported MatrixMarket field '" + field + "'");
  }
  if (symmetry != "general") {
    throw ParseError(source, 1, 1, "unsupported MatrixMarket symmetry '" + symmetry + "'");
  }

  std::size_t line_no = 1;
  std::size_t rows = 0;
  std::size_t cols = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string_view body = detail::trim(line);
    if (body.empty() || body.front() == '%') continue;
    std::istringstream dims{std::string(body)};
    long long r = 0, c = 0;
    if (!(dims >> r >> c) || r <= 0 || c <= 0) {
      throw ParseError(source, line_no, 1, "expected positive 'rows cols' sizes");
    }
    std::string extra;
    if (dims >> extra) {
      throw ParseError(source, line_no, 1, "unexpected token '" + extra + "' in size line");
    }
    rows = static_cast<std::size_t>(r);
    cols = static_cast<std::size_t>(c);
    break;
  }
  if (rows == 0) {
    throw ParseError(source, line_no, 1, "missing size line");
  }

  DenseMatrix result(rows, cols);
  std::size_t count = 0;
  const std::size_t total = rows * cols;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
      if (pos >= line.size()) break;
      if (line[pos] == '%') {
        pos = line.size();
        break;
      }
      std::size_t end = pos;
      while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
      if (count >= total) {
        throw ParseError(source, line_no, pos + 1,
                         "more than rows*cols = " + std::to_string(total) + " entries");
      }
      const double value = detail::parse_finite_token(
          source, line_no, pos + 1, std::string_view(line.data() + pos, end - pos));
      result(count % rows, count / rows) = value;  // column-major order
      ++count;
      pos = end;
    }
  }
  if (count != total) {
    throw ParseError(source, line_no + 1, 1,
                     "expected " + std::to_string(total) + " entries, got " +
                         std::to_string(count));
  }
  return result;
}

/// Reads a matrix file; `.mtx` selects MatrixMarket, anything else CSV.
inline DenseMatrix read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw FileError("cannot open '" + path.string() + "' for reading");
  }
  if (detail::has_matrix_market_extension(path)) {
    return read_matrix_market(in, path.string());
  }
  return read_matrix_csv(in, path.string());
}

inline void write_matrix_csv(std::ostream& out, const DenseMatrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

inline void write_matrix_market(std::ostream& out, const DenseMatrix& m) {
  out << "%%MatrixMarket matrix array real general\n";
  out << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t j = 0; j < m.cols(); ++j) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
      out << format_double(m(i, j)) << '\n';
    }
  }
}

namespace detail {

/// Writes `content` to `path` atomically: temp file in the same directory,
/// then rename. No partial file survives a failure.
inline void atomic_write_text(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw FileError("cannot open '" + tmp.string() + "' for writing");
    }
    out << content;
    out.flush();
    if (!out) {
      out.close();
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw FileError("failed writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignore;
    std::filesystem::remove(tmp, ignore);
    throw FileError("failed to move '" + tmp.string() + "' into place: " + ec.message());
  }
}

}  // namespace detail

/// Writes a matrix file atomically; format chosen like read_matrix.
inline void write_matrix(const std::filesystem::path& path, const DenseMatrix& m) {
  std::ostringstream buffer;
  if (detail::has_matrix_market_extension(path)) {
    write_matrix_market(buffer, m);
  } else {
    write_matrix_csv(buffer, m);
  }
  detail::atomic_write_text(path, buffer.str());
}

}  // namespace nmf

#endif  // NMF_MATRIX_IO_HPP
