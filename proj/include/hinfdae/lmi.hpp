#pragma once

#include <map>
#include <string>
#include <vector>

#include "hinfdae/linalg.hpp"

namespace hinfdae::lmi {

enum class VarKind { Scalar, Rectangular, Symmetric, PositiveDefinite };

struct Variable {
  int id = -1;
  VarKind kind = VarKind::Scalar;
  int rows = 1;
  int cols = 1;
  std::string name;

  bool symmetric() const { return kind == VarKind::Symmetric || kind == VarKind::PositiveDefinite; }
};

using Assignment = std::map<int, Matrix>;

/// constant + sum of L * op(V) * R terms (op = identity or transpose). For a
/// scalar variable v the contribution is v * L * R with any inner size, which
/// is how multiples of the identity are expressed.
class AffineExpr {
 public:
  struct Term {
    Variable var;
    Matrix left;
    Matrix right;
    bool transposed = false;
  };

  AffineExpr() = default;
  AffineExpr(const Matrix& constant);  // NOLINT: implicit by design of the DSL
  AffineExpr(const Variable& var);     // NOLINT

  static AffineExpr zero(int rows, int cols);
  static AffineExpr identity(int n);
  /// value(scale_expr) * K for a 1x1 expression built from scalar variables.
  static AffineExpr scaled(const AffineExpr& scalar_expr, const Matrix& K);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const Matrix& constant() const { return constant_; }
  const std::vector<Term>& terms() const { return terms_; }

  AffineExpr transpose() const;
  AffineExpr operator-() const;
  AffineExpr& operator+=(const AffineExpr& other);
  AffineExpr& operator-=(const AffineExpr& other);
  AffineExpr& operator*=(double s);

  friend AffineExpr operator+(AffineExpr a, const AffineExpr& b) { return a += b; }
  friend AffineExpr operator-(AffineExpr a, const AffineExpr& b) { return a -= b; }
  friend AffineExpr operator*(double s, AffineExpr a) { return a *= s; }
  friend AffineExpr operator*(const Matrix& K, const AffineExpr& a) { return a.left_multiply(K); }
  friend AffineExpr operator*(const AffineExpr& a, const Matrix& K) { return a.right_multiply(K); }

 private:
  AffineExpr left_multiply(const Matrix& K) const;
  AffineExpr right_multiply(const Matrix& K) const;

  int rows_ = 0;
  int cols_ = 0;
  Matrix constant_;
  std::vector<Term> terms_;
};

/// Exact affine evaluation; throws Error(Validation) naming a missing variable.
Matrix evaluate(const AffineExpr& expr, const Assignment& assignment);

/// One cell of a block grid.
class Cell {
 public:
  enum class Kind { Expr, Zero, Identity, Star };

  Cell(const AffineExpr& expr) : kind_(Kind::Expr), expr_(expr) {}  // NOLINT
  Cell(const Matrix& m) : kind_(Kind::Expr), expr_(m) {}            // NOLINT
  Cell(const Variable& v) : kind_(Kind::Expr), expr_(v) {}          // NOLINT
  static Cell zero() { return Cell(Kind::Zero); }
  static Cell identity() { return Cell(Kind::Identity); }
  /// Symmetric completion: transpose of the mirrored cell.
  static Cell star() { return Cell(Kind::Star); }

  Kind kind() const { return kind_; }
  const AffineExpr& expr() const { return expr_; }

 private:
  explicit Cell(Kind kind) : kind_(kind) {}
  Kind kind_;
  AffineExpr expr_;
};

using Grid = std::vector<std::vector<Cell>>;

/// Assembles a block matrix. Zero and identity sizes are inferred from the
/// other cells of their row and column; inconsistent sizes raise
/// Error(Dimension) naming the first conflicting cell in row-major order.
AffineExpr block(const Grid& grid);
AffineExpr block_diag(const std::vector<AffineExpr>& blocks);

enum class Sense { NegativeDefinite, PositiveDefinite };

struct Constraint {
  std::string name;
  AffineExpr expr;  // symmetrized at insertion
  Sense sense = Sense::NegativeDefinite;
};

class LmiProgram {
 public:
  Variable scalar(const std::string& name);
  Variable matrix(const std::string& name, int rows, int cols);
  Variable symmetric(const std::string& name, int dim);
  Variable positive_definite(const std::string& name, int dim);

  /// Stores 0.5 * (expr + expr^T); throws Error(Dimension) unless square.
  void add_constraint(const std::string& name, const AffineExpr& expr, Sense sense);
  void add_objective_term(const Variable& var, double coeff);

  /// Strict inequalities are enforced as expr <= -margin I / expr >= margin I
  /// and X >= margin I for positive-definite variables.
  void set_strict_margin(double margin) { margin_ = margin; }
  double strict_margin() const { return margin_; }

  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const std::vector<std::pair<Variable, double>>& objective() const { return objective_; }
  const Variable* find(const std::string& name) const;

 private:
  Variable add(const std::string& name, VarKind kind, int rows, int cols);

  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  std::vector<std::pair<Variable, double>> objective_;
  double margin_ = 0.0;
};

/// Vectorized conic form: minimize c.x subject to F0 + sum_i x_i F_i >= 0 for
/// every block. Symmetric variables use svec coordinates.
struct SdpStandardForm {
  struct Block {
    std::string name;
    int dim = 0;
    Matrix F0;
    std::vector<Matrix> F;  // one per coordinate
  };
  struct Coordinate {
    int var_id = -1;
    int row = 0;
    int col = 0;
  };

  Vector c;
  std::vector<Block> blocks;
  std::vector<Coordinate> coords;
  std::vector<Variable> variables;

  int num_coords() const { return static_cast<int>(c.size()); }
  Matrix block_value(std::size_t b, const Vector& x) const;
  Assignment to_assignment(const Vector& x) const;
  Vector from_assignment(const Assignment& assignment) const;
};

/// Throws Error(Validation) for an empty program or an objective on a
/// matrix variable.
SdpStandardForm canonicalize(const LmiProgram& program);

/// Symmetrized evaluation of a program constraint (exactly symmetric).
Matrix evaluate_constraint(const Constraint& c, const Assignment& assignment);

}  // namespace hinfdae::lmi
