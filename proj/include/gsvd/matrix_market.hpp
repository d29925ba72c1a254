#pragma once

#include <iosfwd>
#include <string>

#include "gsvd/dense_matrix.hpp"

namespace gsvd {

/// Reads a real Matrix Market file (coordinate or array format) into a dense
/// matrix. Symmetric and skew-symmetric files are expanded to full storage.
DenseMatrix read_matrix_market(const std::string& path);
DenseMatrix read_matrix_market(std::istream& in, const std::string& name);

/// Writes a dense matrix in array format with 17 significant digits.
void write_matrix_market(const DenseMatrix& M, const std::string& path);
void write_matrix_market(const DenseMatrix& M, std::ostream& out);

}  // namespace gsvd
