#include "accprec/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "accprec/errors.hpp"

namespace accprec {

namespace {

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool blank_or_comment(const std::string& line) {
  for (char c : line) {
    if (c == '%') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

SparseMatrix mm_read(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError(1, "empty input");
  ++lineno;
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket") throw ParseError(lineno, "missing %%MatrixMarket banner");
  object = lowercase(object);
  format = lowercase(format);
  field = lowercase(field);
  symmetry = lowercase(symmetry);
  if (object != "matrix") throw ParseError(lineno, "unsupported object '" + object + "'");
  if (format != "coordinate") throw ParseError(lineno, "only coordinate format is supported");
  if (field != "real" && field != "integer")
    throw ParseError(lineno, "unsupported field '" + field + "'");
  if (symmetry != "general" && symmetry != "symmetric")
    throw ParseError(lineno, "unsupported symmetry '" + symmetry + "'");
  const bool symmetric = symmetry == "symmetric";

  while (std::getline(in, line)) {
    ++lineno;
    if (!blank_or_comment(line)) break;
  }
  if (!in && line.empty()) throw ParseError(lineno, "missing size line");
  std::size_t rows = 0, cols = 0, entries = 0;
  {
    std::istringstream size_line(line);
    std::string extra;
    if (!(size_line >> rows >> cols >> entries) || (size_line >> extra))
      throw ParseError(lineno, "malformed size line");
  }
  if (symmetric && rows != cols) throw ParseError(lineno, "symmetric matrix must be square");

  std::vector<Triplet> triplets;
  triplets.reserve(symmetric ? 2 * entries : entries);
  std::size_t read = 0;
  while (read < entries && std::getline(in, line)) {
    ++lineno;
    if (blank_or_comment(line)) continue;
    std::istringstream entry(line);
    long long i = 0, j = 0;
    std::string value_text, extra;
    if (!(entry >> i >> j >> value_text) || (entry >> extra))
      throw ParseError(lineno, "malformed entry");
    double value = 0.0;
    const char* first = value_text.data();
    const char* last = first + value_text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value))
      throw ParseError(lineno, "bad value '" + value_text + "'");
    if (field == "integer" && value != std::floor(value))
      throw ParseError(lineno, "non-integer value in integer matrix");
    if (i < 1 || j < 1 || static_cast<std::size_t>(i) > rows || static_cast<std::size_t>(j) > cols)
      throw ParseError(lineno, "index out of range");
    const auto r = static_cast<std::size_t>(i - 1);
    const auto c = static_cast<std::size_t>(j - 1);
    triplets.push_back({r, c, value});
    if (symmetric && r != c) triplets.push_back({c, r, value});
    ++read;
  }
  if (read != entries)
    throw ParseError(lineno, "expected " + std::to_string(entries) + " entries, found " +
                                 std::to_string(read));
  while (std::getline(in, line)) {
    ++lineno;
    if (!blank_or_comment(line)) throw ParseError(lineno, "more entries than declared");
  }
  return SparseMatrix::from_triplets(rows, cols, std::move(triplets));
}

SparseMatrix mm_read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return mm_read(in);
}

void mm_write(const SparseMatrix& a, std::ostream& out) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << fmt::format("{} {} {}\n", a.rows(), a.cols(), a.nonzeros());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t p = a.row_ptr()[i]; p < a.row_ptr()[i + 1]; ++p)
      out << fmt::format("{} {} {:.17g}\n", i + 1, a.col_idx()[p] + 1, a.values()[p]);
}

void mm_write(const SparseMatrix& a, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  mm_write(a, out);
}

Vector mm_read_vector(const std::filesystem::path& path) {
  const SparseMatrix m = mm_read(path);
  if (m.cols() != 1) throw Error(path.string() + ": expected an n x 1 matrix");
  Vector v(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) v[i] = m.coeff(i, 0);
  return v;
}

void mm_write_vector(std::span<const double> v, std::ostream& out) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << fmt::format("{} 1 {}\n", v.size(), v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out << fmt::format("{} 1 {:.17g}\n", i + 1, v[i]);
}

void mm_write_vector(std::span<const double> v, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  mm_write_vector(v, out);
}

}  // namespace accprec
