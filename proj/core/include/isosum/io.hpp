#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "isosum/sparse.hpp"

namespace isosum {

/// Coordinate format, 1-based, `real general`, 17 significant digits.
void write_matrix_market(const SparseMatrix& a, std::ostream& out);
void write_matrix_market(const SparseMatrix& a, const std::string& path);

/// Reads what write_matrix_market produces (any coordinate real general file).
[[nodiscard]] SparseMatrix read_matrix_market(std::istream& in);
[[nodiscard]] SparseMatrix read_matrix_market(const std::string& path);

/// Plain text, one value per line.
void write_vector(std::span<const double> v, const std::string& path);
[[nodiscard]] std::vector<double> read_vector(const std::string& path);

}  // namespace isosum
