#include "gsvd/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gsvd {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

[[noreturn]] void fail(const std::string& name, const std::string& what) {
  throw std::runtime_error("matrix market '" + name + "': " + what);
}

}  // namespace

DenseMatrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("matrix market: cannot open '" + path + "'");
  return read_matrix_market(in, path);
}

DenseMatrix read_matrix_market(std::istream& in, const std::string& name) {
  std::string line;
  if (!std::getline(in, line)) fail(name, "empty file");
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (lower(tag) != "%%matrixmarket" || lower(object) != "matrix") {
    fail(name, "missing %%MatrixMarket banner");
  }
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (field != "real" && field != "integer" && field != "double") {
    fail(name, "unsupported field '" + field + "' (real data only)");
  }
  const bool symmetric = symmetry == "symmetric";
  const bool skew = symmetry == "skew-symmetric";
  if (!symmetric && !skew && symmetry != "general") {
    fail(name, "unsupported symmetry '" + symmetry + "'");
  }

  // skip comments and blank lines
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  std::istringstream sizes(line);

  if (format == "coordinate") {
    Index rows = 0, cols = 0;
    long long nnz = 0;
    if (!(sizes >> rows >> cols >> nnz)) fail(name, "bad size line");
    Matrix M = Matrix::Zero(rows, cols);
    for (long long t = 0; t < nnz; ++t) {
      Index i = 0, j = 0;
      double v = 0;
      if (!(in >> i >> j >> v)) fail(name, "truncated entry list");
      if (i < 1 || i > rows || j < 1 || j > cols) fail(name, "index out of range");
      M(i - 1, j - 1) = v;
      if ((symmetric || skew) && i != j) M(j - 1, i - 1) = skew ? -v : v;
    }
    return DenseMatrix(std::move(M));
  }
  if (format == "array") {
    Index rows = 0, cols = 0;
    if (!(sizes >> rows >> cols)) fail(name, "bad size line");
    Matrix M = Matrix::Zero(rows, cols);
    if (symmetric || skew) {
      // lower triangle, column-major
      for (Index j = 0; j < cols; ++j) {
        for (Index i = j; i < rows; ++i) {
          double v = 0;
          if (!(in >> v)) fail(name, "truncated array data");
          M(i, j) = v;
          if (i != j) M(j, i) = skew ? -v : v;
        }
      }
    } else {
      for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < rows; ++i) {
          double v = 0;
          if (!(in >> v)) fail(name, "truncated array data");
          M(i, j) = v;
        }
      }
    }
    return DenseMatrix(std::move(M));
  }
  fail(name, "unsupported format '" + format + "'");
}

void write_matrix_market(const DenseMatrix& M, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("matrix market: cannot write '" + path + "'");
  write_matrix_market(M, out);
}

void write_matrix_market(const DenseMatrix& M, std::ostream& out) {
  out << "%%MatrixMarket matrix array real general\n";
  out << M.rows() << " " << M.cols() << "\n";
  char buf[64];
  for (Index j = 0; j < M.cols(); ++j) {
    for (Index i = 0; i < M.rows(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", M(i, j));
      out << buf << "\n";
    }
  }
}

}  // namespace gsvd
