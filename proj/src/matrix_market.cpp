#include <cstdio>
#include <fstream>
#include <sstream>

#include "phhinf/matkit.hpp"

namespace phhinf::matkit {

std::string to_matrix_market(const Matrix& M) {
  std::string out = "%%MatrixMarket matrix array real general\n";
  out += std::to_string(M.rows()) + " " + std::to_string(M.cols()) + "\n";
  char buf[40];
  for (Eigen::Index j = 0; j < M.cols(); ++j) {
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g\n", M(i, j));
      out += buf;
    }
  }
  return out;
}

Matrix from_matrix_market(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("%%MatrixMarket", 0) != 0)
    throw Error(ErrorCode::kIo, "missing MatrixMarket banner");
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (object != "matrix" || format != "array" || field != "real" || symmetry != "general")
    throw Error(ErrorCode::kIo, "only 'matrix array real general' is supported");
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  std::istringstream size(line);
  long rows = -1, cols = -1;
  size >> rows >> cols;
  if (rows < 0 || cols < 0) throw Error(ErrorCode::kIo, "bad size line");
  Matrix M(rows, cols);
  for (long j = 0; j < cols; ++j) {
    for (long i = 0; i < rows; ++i) {
      std::string tok;
      if (!(in >> tok)) throw Error(ErrorCode::kIo, "truncated value list");
      try {
        M(i, j) = std::stod(tok);
      } catch (const std::exception&) {
        throw Error(ErrorCode::kIo, "bad value '" + tok + "'");
      }
    }
  }
  return M;
}

void write_matrix_market(const std::string& path, const Matrix& M) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot write " + path);
  f << to_matrix_market(M);
}

Matrix read_matrix_market(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return from_matrix_market(ss.str());
}

}  // namespace phhinf::matkit
