#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>

#include "accprec/matrix.hpp"

namespace accprec {

/// Reads `%%MatrixMarket matrix coordinate real|integer general|symmetric`.
/// Symmetric files are expanded to both triangles. Throws ParseError with the
/// offending line number.
SparseMatrix mm_read(std::istream& in);
SparseMatrix mm_read(const std::filesystem::path& path);

/// Writes coordinate/real/general with round-trip (17 significant digit) values.
void mm_write(const SparseMatrix& a, std::ostream& out);
void mm_write(const SparseMatrix& a, const std::filesystem::path& path);

/// Vectors travel as n x 1 coordinate matrices with every entry stored.
Vector mm_read_vector(const std::filesystem::path& path);
void mm_write_vector(std::span<const double> v, const std::filesystem::path& path);
void mm_write_vector(std::span<const double> v, std::ostream& out);

}  // namespace accprec
