#pragma once

#include <string>
#include <vector>

#include "hinfdae/expr.hpp"
#include "hinfdae/linalg.hpp"

namespace hinfdae {

/// Vector-valued map R^n x R^m x R -> R^out built from parsed expressions.
class NonlinearMap {
 public:
  NonlinearMap() = default;
  NonlinearMap(std::vector<Expression> exprs, int n, int m);

  static NonlinearMap zero(int out_dim, int n, int m);

  Vector operator()(const Vector& x, const Vector& u, double t = 0.0) const;
  /// Convenience for maps of t only (disturbances, F(t) diagonals).
  Vector of_time(double t) const;

  int out_dim() const { return static_cast<int>(exprs_.size()); }
  int state_dim() const { return n_; }
  int input_dim() const { return m_; }
  bool is_zero() const;
  const std::vector<Expression>& exprs() const { return exprs_; }
  std::vector<std::string> texts() const;

 private:
  std::vector<Expression> exprs_;
  int n_ = 0;
  int m_ = 0;
};

NonlinearMap parse_nonlinearity(const std::vector<std::string>& texts, int n, int m);

/// E xdot = (A + M1 F(t) N) x + phi(x,u) + B w
///      y = (C + M2 F(t) N) x + psi(x,u) + D w,   z = H x
struct DescriptorPlant {
  Matrix E, A, B, C, D, H;
  Matrix M1, M2, N;
  NonlinearMap phi, psi;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  Vector u_nominal;

  int n() const { return static_cast<int>(E.rows()); }
  int q() const { return static_cast<int>(B.cols()); }
  int p() const { return static_cast<int>(C.rows()); }
  int r() const { return static_cast<int>(H.rows()); }
  int k() const { return static_cast<int>(N.rows()); }
  int m() const { return static_cast<int>(u_nominal.size()); }

  /// Throws Error(Dimension) naming the offending matrix, Error(Domain) for
  /// negative Lipschitz constants and Error(Validation) when phi or psi do
  /// not vanish at the origin.
  void check_dimensions() const;
};

struct ValidationReport {
  enum class Flag { False, True, NotEvaluated };

  int rank_E = 0;
  bool regular = false;
  Flag impulse_free = Flag::NotEvaluated;
  Flag observable = Flag::NotEvaluated;
  /// Finite generalized eigenvalues of (E, A), real and imaginary parts.
  std::vector<std::pair<double, double>> finite_eigenvalues;
  std::vector<std::string> messages;

  bool ok() const {
    return rank_E > 0 && regular && impulse_free == Flag::True && observable == Flag::True;
  }
};

const char* to_string(ValidationReport::Flag flag);

/// Rank, regularity, impulse-freeness and observability of (E, A, C).
/// Throws Error(Dimension) for non-conforming data and Error(Validation) when
/// rank(E) = 0 or the interpolated determinant is indeterminate.
ValidationReport validate_plant(const DescriptorPlant& plant);

/// Orthonormal rows spanning the left null space of E: E_perp * E = 0.
Matrix orth_complement(const Matrix& E);

/// Lower estimate of the Lipschitz constant: the largest spectral norm of a
/// central-difference Jacobian (w.r.t. x, at the nominal input) over a
/// uniform grid of the box.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};
double estimate_lipschitz(const NonlinearMap& map, const std::vector<Interval>& box, int grid);

/// The illustrative two-state descriptor plant used throughout the tests,
/// the README and the acceptance suite.
DescriptorPlant example_plant();

}  // namespace hinfdae
