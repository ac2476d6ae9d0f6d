#include "hinfdae/linalg.hpp"

#include <cmath>

#include "hinfdae/error.hpp"

namespace hinfdae {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage: return "usage";
    case ErrorKind::Dimension: return "dimension";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::Numerical: return "numerical";
  }
  return "unknown";
}

int numerical_rank(const Matrix& m, double rel_tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > rel_tol * sv(0)) ++rank;
  }
  return rank;
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double min_eigenvalue(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double max_eigenvalue(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

Matrix block_diag(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

int svec_size(int dim) { return dim * (dim + 1) / 2; }

Vector svec(const Matrix& sym) {
  const int dim = static_cast<int>(sym.rows());
  Vector v(svec_size(dim));
  int k = 0;
  for (int j = 0; j < dim; ++j) {
    for (int i = 0; i <= j; ++i) {
      v(k++) = (i == j) ? sym(i, j) : M_SQRT2 * sym(i, j);
    }
  }
  return v;
}

Matrix smat(const Vector& v, int dim) {
  if (v.size() != svec_size(dim)) {
    throw Error(ErrorKind::Dimension, "smat: vector length does not match dimension");
  }
  Matrix m(dim, dim);
  int k = 0;
  for (int j = 0; j < dim; ++j) {
    for (int i = 0; i <= j; ++i) {
      const double value = (i == j) ? v(k) : v(k) / M_SQRT2;
      m(i, j) = value;
      m(j, i) = value;
      ++k;
    }
  }
  return m;
}

void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols,
                   const std::string& what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw Error(ErrorKind::Dimension,
                what + " must be " + std::to_string(rows) + "x" + std::to_string(cols) +
                    ", got " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

}  // namespace hinfdae
