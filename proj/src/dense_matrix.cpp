#include "gsvd/dense_matrix.hpp"

namespace gsvd {

DenseMatrix::DenseMatrix(Matrix values) : m_(std::move(values)) {
  if (!m_.allFinite()) {
    throw std::invalid_argument("DenseMatrix: non-finite entry");
  }
}

DenseMatrix DenseMatrix::from_rows(
    std::initializer_list<std::initializer_list<double>> rows) {
  const Index nr = static_cast<Index>(rows.size());
  const Index nc = nr > 0 ? static_cast<Index>(rows.begin()->size()) : 0;
  Matrix m(nr, nc);
  Index i = 0;
  for (const auto& row : rows) {
    if (static_cast<Index>(row.size()) != nc) {
      throw DimensionError("DenseMatrix::from_rows: ragged rows");
    }
    Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return DenseMatrix(std::move(m));
}

}  // namespace gsvd
