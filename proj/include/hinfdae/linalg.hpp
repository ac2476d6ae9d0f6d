#pragma once

#include <Eigen/Dense>

#include <string>

namespace hinfdae {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Singular values below rel_tol * sigma_max count as zero.
inline constexpr double kRankTolerance = 1e-9;

int numerical_rank(const Matrix& m, double rel_tol = kRankTolerance);
double spectral_norm(const Matrix& m);

/// Eigenvalue extremes of the symmetric part of a square matrix.
double min_eigenvalue(const Matrix& m);
double max_eigenvalue(const Matrix& m);

Matrix symmetrize(const Matrix& m);
Matrix block_diag(const Matrix& a, const Matrix& b);

/// Scaled upper-triangle vectorization: off-diagonals carry a factor sqrt(2)
/// so that <A, B> = svec(A) . svec(B) for symmetric A, B.
int svec_size(int dim);
Vector svec(const Matrix& sym);
Matrix smat(const Vector& v, int dim);

/// Throws Error(Dimension) naming `what` unless m is rows x cols.
void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols,
                   const std::string& what);

}  // namespace hinfdae
