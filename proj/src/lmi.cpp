#include "hinfdae/lmi.hpp"

#include <cmath>

#include "hinfdae/error.hpp"

namespace hinfdae::lmi {
namespace {

std::string dims(int r, int c) { return std::to_string(r) + "x" + std::to_string(c); }

Matrix direction(const Variable& var, int row, int col) {
  Matrix d = Matrix::Zero(var.rows, var.cols);
  if (var.symmetric() && row != col) {
    d(row, col) = M_SQRT1_2;
    d(col, row) = M_SQRT1_2;
  } else {
    d(row, col) = 1.0;
  }
  return d;
}

Matrix term_value(const AffineExpr::Term& t, const Matrix& value) {
  if (t.var.kind == VarKind::Scalar) return value(0, 0) * (t.left * t.right);
  if (t.transposed) return t.left * value.transpose() * t.right;
  return t.left * value * t.right;
}

Matrix selection(int total, int offset, int size) {
  Matrix s = Matrix::Zero(total, size);
  s.block(offset, 0, size, size).setIdentity();
  return s;
}

}  // namespace

AffineExpr::AffineExpr(const Matrix& constant)
    : rows_(static_cast<int>(constant.rows())),
      cols_(static_cast<int>(constant.cols())),
      constant_(constant) {}

AffineExpr::AffineExpr(const Variable& var)
    : rows_(var.rows), cols_(var.cols), constant_(Matrix::Zero(var.rows, var.cols)) {
  terms_.push_back({var, Matrix::Identity(var.rows, var.rows), Matrix::Identity(var.cols, var.cols),
                    false});
}

AffineExpr AffineExpr::zero(int rows, int cols) { return AffineExpr(Matrix::Zero(rows, cols)); }

AffineExpr AffineExpr::identity(int n) { return AffineExpr(Matrix::Identity(n, n)); }

AffineExpr AffineExpr::scaled(const AffineExpr& scalar_expr, const Matrix& K) {
  if (scalar_expr.rows() != 1 || scalar_expr.cols() != 1) {
    throw Error(ErrorKind::Dimension, "scaled() needs a 1x1 expression");
  }
  AffineExpr out(scalar_expr.constant_(0, 0) * K);
  for (const auto& t : scalar_expr.terms_) {
    if (t.var.kind != VarKind::Scalar) {
      throw Error(ErrorKind::Dimension, "scaled() needs scalar variables, got " + t.var.name);
    }
    const double coeff = (t.left * t.right)(0, 0);
    out.terms_.push_back({t.var, coeff * K, Matrix::Identity(K.cols(), K.cols()), false});
  }
  return out;
}

AffineExpr AffineExpr::transpose() const {
  AffineExpr out(Matrix(constant_.transpose()));
  for (const auto& t : terms_) {
    const bool flag = t.var.kind == VarKind::Scalar ? false : !t.transposed;
    out.terms_.push_back({t.var, t.right.transpose(), t.left.transpose(), flag});
  }
  return out;
}

AffineExpr AffineExpr::operator-() const {
  AffineExpr out = *this;
  out *= -1.0;
  return out;
}

AffineExpr& AffineExpr::operator+=(const AffineExpr& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) {
    throw Error(ErrorKind::Dimension,
                "cannot add " + dims(rows_, cols_) + " and " + dims(other.rows_, other.cols_));
  }
  constant_ += other.constant_;
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  return *this;
}

AffineExpr& AffineExpr::operator-=(const AffineExpr& other) { return *this += -other; }

AffineExpr& AffineExpr::operator*=(double s) {
  constant_ *= s;
  for (auto& t : terms_) t.left *= s;
  return *this;
}

AffineExpr AffineExpr::left_multiply(const Matrix& K) const {
  const AffineExpr& a = *this;
  if (K.cols() != a.rows_) {
    throw Error(ErrorKind::Dimension,
                "cannot left-multiply " + dims(a.rows_, a.cols_) + " by " +
                    dims(static_cast<int>(K.rows()), static_cast<int>(K.cols())));
  }
  AffineExpr out(Matrix(K * a.constant_));
  for (const auto& t : a.terms_) out.terms_.push_back({t.var, K * t.left, t.right, t.transposed});
  return out;
}

AffineExpr AffineExpr::right_multiply(const Matrix& K) const {
  const AffineExpr& a = *this;
  if (K.rows() != a.cols_) {
    throw Error(ErrorKind::Dimension,
                "cannot right-multiply " + dims(a.rows_, a.cols_) + " by " +
                    dims(static_cast<int>(K.rows()), static_cast<int>(K.cols())));
  }
  AffineExpr out(Matrix(a.constant_ * K));
  for (const auto& t : a.terms_) out.terms_.push_back({t.var, t.left, t.right * K, t.transposed});
  return out;
}

Matrix evaluate(const AffineExpr& expr, const Assignment& assignment) {
  Matrix out = expr.constant();
  for (const auto& t : expr.terms()) {
    const auto it = assignment.find(t.var.id);
    if (it == assignment.end()) {
      throw Error(ErrorKind::Validation, "assignment is missing variable '" + t.var.name + "'");
    }
    if (it->second.rows() != t.var.rows || it->second.cols() != t.var.cols) {
      throw Error(ErrorKind::Dimension, "value for '" + t.var.name + "' must be " +
                                            dims(t.var.rows, t.var.cols));
    }
    out += term_value(t, it->second);
  }
  return out;
}

AffineExpr block(const Grid& grid) {
  const std::size_t nr = grid.size();
  if (nr == 0) throw Error(ErrorKind::Dimension, "block grid is empty");
  const std::size_t nc = grid[0].size();
  for (const auto& row : grid) {
    if (row.size() != nc) throw Error(ErrorKind::Dimension, "block grid rows differ in length");
  }
  auto cell_name = [](std::size_t i, std::size_t j) {
    return "cell (" + std::to_string(i) + "," + std::to_string(j) + ")";
  };

  // Resolve star cells into explicit transposes.
  std::vector<std::vector<Cell>> cells(grid.begin(), grid.end());
  for (std::size_t i = 0; i < nr; ++i) {
    for (std::size_t j = 0; j < nc; ++j) {
      if (cells[i][j].kind() != Cell::Kind::Star) continue;
      if (j >= nr || i >= nc) throw Error(ErrorKind::Dimension, cell_name(i, j) + ": star needs a square grid");
      const Cell& mirror = grid[j][i];
      switch (mirror.kind()) {
        case Cell::Kind::Expr: cells[i][j] = Cell(mirror.expr().transpose()); break;
        case Cell::Kind::Zero: cells[i][j] = Cell::zero(); break;
        case Cell::Kind::Identity: cells[i][j] = Cell::identity(); break;
        case Cell::Kind::Star:
          throw Error(ErrorKind::Dimension, cell_name(i, j) + ": star mirrors another star");
      }
    }
  }

  // A cell conflicts when another expression in its row/column disagrees.
  for (std::size_t i = 0; i < nr; ++i) {
    for (std::size_t j = 0; j < nc; ++j) {
      if (cells[i][j].kind() != Cell::Kind::Expr) continue;
      const auto& e = cells[i][j].expr();
      for (std::size_t jj = 0; jj < nc; ++jj) {
        if (cells[i][jj].kind() == Cell::Kind::Expr && cells[i][jj].expr().rows() != e.rows()) {
          throw Error(ErrorKind::Dimension, cell_name(i, j) + ": height " + std::to_string(e.rows()) +
                                                " conflicts with " + cell_name(i, jj));
        }
      }
      for (std::size_t ii = 0; ii < nr; ++ii) {
        if (cells[ii][j].kind() == Cell::Kind::Expr && cells[ii][j].expr().cols() != e.cols()) {
          throw Error(ErrorKind::Dimension, cell_name(i, j) + ": width " + std::to_string(e.cols()) +
                                                " conflicts with " + cell_name(ii, j));
        }
      }
    }
  }

  std::vector<int> height(nr, -1), width(nc, -1);
  for (std::size_t i = 0; i < nr; ++i) {
    for (std::size_t j = 0; j < nc; ++j) {
      if (cells[i][j].kind() == Cell::Kind::Expr) {
        height[i] = cells[i][j].expr().rows();
        width[j] = cells[i][j].expr().cols();
      }
    }
  }
  // Identity cells are square: propagate sizes through them.
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < nr; ++i) {
      for (std::size_t j = 0; j < nc; ++j) {
        if (cells[i][j].kind() != Cell::Kind::Identity) continue;
        if (height[i] < 0 && width[j] >= 0) { height[i] = width[j]; changed = true; }
        if (width[j] < 0 && height[i] >= 0) { width[j] = height[i]; changed = true; }
        if (height[i] >= 0 && width[j] >= 0 && height[i] != width[j]) {
          throw Error(ErrorKind::Dimension, cell_name(i, j) + ": identity block is not square");
        }
      }
    }
  }
  for (std::size_t i = 0; i < nr; ++i) {
    if (height[i] < 0) throw Error(ErrorKind::Dimension, "block row " + std::to_string(i) + " has undetermined height");
  }
  for (std::size_t j = 0; j < nc; ++j) {
    if (width[j] < 0) throw Error(ErrorKind::Dimension, "block column " + std::to_string(j) + " has undetermined width");
  }

  int total_rows = 0, total_cols = 0;
  std::vector<int> row_off(nr), col_off(nc);
  for (std::size_t i = 0; i < nr; ++i) { row_off[i] = total_rows; total_rows += height[i]; }
  for (std::size_t j = 0; j < nc; ++j) { col_off[j] = total_cols; total_cols += width[j]; }

  AffineExpr out = AffineExpr::zero(total_rows, total_cols);
  for (std::size_t i = 0; i < nr; ++i) {
    for (std::size_t j = 0; j < nc; ++j) {
      const Cell& c = cells[i][j];
      if (c.kind() == Cell::Kind::Zero) continue;
      const Matrix pr = selection(total_rows, row_off[i], height[i]);
      const Matrix pc = selection(total_cols, col_off[j], width[j]).transpose();
      if (c.kind() == Cell::Kind::Identity) {
        out += AffineExpr(Matrix(pr * pc));
        continue;
      }
      out += pr * c.expr() * pc;
    }
  }
  return out;
}

AffineExpr block_diag(const std::vector<AffineExpr>& blocks) {
  Grid grid(blocks.size(), std::vector<Cell>(blocks.size(), Cell::zero()));
  for (std::size_t i = 0; i < blocks.size(); ++i) grid[i][i] = Cell(blocks[i]);
  return block(grid);
}

Variable LmiProgram::add(const std::string& name, VarKind kind, int rows, int cols) {
  if (find(name) != nullptr) throw Error(ErrorKind::Validation, "duplicate variable '" + name + "'");
  if (rows <= 0 || cols <= 0) throw Error(ErrorKind::Dimension, "variable '" + name + "' has empty shape");
  Variable v{static_cast<int>(variables_.size()), kind, rows, cols, name};
  variables_.push_back(v);
  return v;
}

Variable LmiProgram::scalar(const std::string& name) { return add(name, VarKind::Scalar, 1, 1); }
Variable LmiProgram::matrix(const std::string& name, int rows, int cols) {
  return add(name, VarKind::Rectangular, rows, cols);
}
Variable LmiProgram::symmetric(const std::string& name, int dim) {
  return add(name, VarKind::Symmetric, dim, dim);
}
Variable LmiProgram::positive_definite(const std::string& name, int dim) {
  return add(name, VarKind::PositiveDefinite, dim, dim);
}

void LmiProgram::add_constraint(const std::string& name, const AffineExpr& expr, Sense sense) {
  if (expr.rows() != expr.cols()) {
    throw Error(ErrorKind::Dimension, "constraint '" + name + "' is not square");
  }
  constraints_.push_back({name, 0.5 * (expr + expr.transpose()), sense});
}

void LmiProgram::add_objective_term(const Variable& var, double coeff) {
  objective_.emplace_back(var, coeff);
}

const Variable* LmiProgram::find(const std::string& name) const {
  for (const auto& v : variables_) {
    if (v.name == name) return &v;
  }
  return nullptr;
}

Matrix evaluate_constraint(const Constraint& c, const Assignment& assignment) {
  return symmetrize(evaluate(c.expr, assignment));
}

Matrix SdpStandardForm::block_value(std::size_t b, const Vector& x) const {
  const Block& blk = blocks.at(b);
  Matrix out = blk.F0;
  for (std::size_t i = 0; i < blk.F.size(); ++i) out += x(static_cast<Eigen::Index>(i)) * blk.F[i];
  return out;
}

Assignment SdpStandardForm::to_assignment(const Vector& x) const {
  Assignment out;
  for (const auto& v : variables) out[v.id] = Matrix::Zero(v.rows, v.cols);
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const auto& co = coords[i];
    const Variable& v = variables[static_cast<std::size_t>(co.var_id)];
    const double xi = x(static_cast<Eigen::Index>(i));
    Matrix& m = out[v.id];
    if (v.symmetric() && co.row != co.col) {
      m(co.row, co.col) = xi * M_SQRT1_2;
      m(co.col, co.row) = xi * M_SQRT1_2;
    } else {
      m(co.row, co.col) = xi;
    }
  }
  return out;
}

Vector SdpStandardForm::from_assignment(const Assignment& assignment) const {
  Vector x(num_coords());
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const auto& co = coords[i];
    const Variable& v = variables[static_cast<std::size_t>(co.var_id)];
    const Matrix& m = assignment.at(v.id);
    x(static_cast<Eigen::Index>(i)) =
        (v.symmetric() && co.row != co.col) ? M_SQRT2 * m(co.row, co.col) : m(co.row, co.col);
  }
  return x;
}

SdpStandardForm canonicalize(const LmiProgram& program) {
  if (program.variables().empty()) throw Error(ErrorKind::Validation, "program has no variables");
  SdpStandardForm form;
  form.variables = program.variables();

  std::vector<int> first_coord(form.variables.size(), 0);
  for (const auto& v : form.variables) {
    first_coord[static_cast<std::size_t>(v.id)] = static_cast<int>(form.coords.size());
    if (v.symmetric()) {
      for (int j = 0; j < v.cols; ++j) {
        for (int i = 0; i <= j; ++i) form.coords.push_back({v.id, i, j});
      }
    } else {
      for (int i = 0; i < v.rows; ++i) {
        for (int j = 0; j < v.cols; ++j) form.coords.push_back({v.id, i, j});
      }
    }
  }
  const int ncoord = static_cast<int>(form.coords.size());

  form.c = Vector::Zero(ncoord);
  for (const auto& [var, coeff] : program.objective()) {
    if (var.kind != VarKind::Scalar) {
      throw Error(ErrorKind::Validation, "objective references matrix variable '" + var.name + "'");
    }
    form.c(first_coord[static_cast<std::size_t>(var.id)]) += coeff;
  }

  const double margin = program.strict_margin();
  for (const auto& con : program.constraints()) {
    const double sign = con.sense == Sense::NegativeDefinite ? -1.0 : 1.0;
    const int dim = con.expr.rows();
    SdpStandardForm::Block blk;
    blk.name = con.name;
    blk.dim = dim;
    blk.F0 = symmetrize(sign * con.expr.constant()) - margin * Matrix::Identity(dim, dim);
    blk.F.assign(static_cast<std::size_t>(ncoord), Matrix::Zero(dim, dim));
    for (const auto& t : con.expr.terms()) {
      const Variable& v = t.var;
      const int base = first_coord[static_cast<std::size_t>(v.id)];
      const int count = v.symmetric() ? svec_size(v.rows) : v.rows * v.cols;
      for (int ci = 0; ci < count; ++ci) {
        const auto& co = form.coords[static_cast<std::size_t>(base + ci)];
        blk.F[static_cast<std::size_t>(base + ci)] +=
            sign * term_value(t, direction(v, co.row, co.col));
      }
    }
    for (auto& F : blk.F) F = symmetrize(F);
    form.blocks.push_back(std::move(blk));
  }

  for (const auto& v : form.variables) {
    if (v.kind != VarKind::PositiveDefinite) continue;
    SdpStandardForm::Block blk;
    blk.name = v.name + " > 0";
    blk.dim = v.rows;
    blk.F0 = -margin * Matrix::Identity(v.rows, v.rows);
    blk.F.assign(static_cast<std::size_t>(ncoord), Matrix::Zero(v.rows, v.rows));
    const int base = first_coord[static_cast<std::size_t>(v.id)];
    for (int ci = 0; ci < svec_size(v.rows); ++ci) {
      const auto& co = form.coords[static_cast<std::size_t>(base + ci)];
      blk.F[static_cast<std::size_t>(base + ci)] = direction(v, co.row, co.col);
    }
    form.blocks.push_back(std::move(blk));
  }
  return form;
}

}  // namespace hinfdae::lmi
