#include <gtest/gtest.h>

#include <random>

#include "hinfdae/error.hpp"
#include "hinfdae/lmi.hpp"
#include "hinfdae/synth.hpp"

using namespace hinfdae;
using namespace hinfdae::lmi;

namespace {

Matrix mat(int r, int c, std::initializer_list<double> v) {
  Matrix m(r, c);
  auto it = v.begin();
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = *it++;
  return m;
}

Matrix random_matrix(std::mt19937& rng, int r, int c) {
  std::normal_distribution<double> g;
  Matrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = g(rng);
  return m;
}

Assignment random_assignment(std::mt19937& rng, const std::vector<Variable>& vars) {
  Assignment a;
  for (const auto& v : vars) {
    Matrix m = random_matrix(rng, v.rows, v.cols);
    if (v.symmetric()) m = symmetrize(m);
    a[v.id] = m;
  }
  return a;
}

double relative_error(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

}  // namespace

TEST(Lmi, BlockWithStarAndIdentity) {
  LmiProgram prog;
  const Variable x = prog.symmetric("x", 1);
  const AffineExpr M = block({{x, Cell::identity()}, {Cell::star(), Cell::identity()}});
  Assignment a{{x.id, mat(1, 1, {4.0})}};
  const Matrix v = evaluate(M, a);
  EXPECT_EQ(v, mat(2, 2, {4, 1, 1, 1}));
}

TEST(Lmi, BlockDiagonalFromScalars) {
  LmiProgram prog;
  const Variable eps1 = prog.scalar("eps1");
  const AffineExpr I2 = AffineExpr::identity(2);
  const AffineExpr pi5 = block_diag({-1.0 * AffineExpr::scaled(eps1, Matrix::Identity(2, 2)),
                                     -1.0 * AffineExpr::scaled(eps1, Matrix::Identity(2, 2)),
                                     (-1.0 / 3.0) * I2});
  const Matrix v = evaluate(pi5, {{eps1.id, mat(1, 1, {0.5})}});
  Vector d(6);
  d << -0.5, -0.5, -0.5, -0.5, -1.0 / 3, -1.0 / 3;
  EXPECT_LE((v - Matrix(d.asDiagonal())).norm(), 1e-15);
}

TEST(Lmi, MismatchedWidthsNameTheCell) {
  LmiProgram prog;
  const Variable a = prog.matrix("a", 2, 2);
  const Variable b = prog.matrix("b", 2, 3);
  const Variable c = prog.matrix("c", 1, 2);
  const Variable d = prog.matrix("d", 1, 2);
  try {
    block({{a, b}, {c, d}});
    FAIL() << "expected a dimension error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Dimension);
    EXPECT_NE(std::string(e.what()).find("cell (0,1)"), std::string::npos) << e.what();
  }
}

TEST(Lmi, UndeterminedZeroSizeIsAnError) {
  EXPECT_THROW(block({{Cell::zero()}}), Error);
}

TEST(Lmi, EvaluateXi4Examples) {
  LmiProgram prog;
  const Variable P = prog.matrix("P1", 1, 1);
  const AffineExpr IP = AffineExpr::identity(1) - AffineExpr(P).transpose();
  const AffineExpr xi4 = block({{Cell::identity(), IP}, {Cell::star(), Cell::identity()}});
  EXPECT_EQ(evaluate(xi4, {{P.id, mat(1, 1, {1.0})}}), Matrix::Identity(2, 2));
  const Matrix v = evaluate(xi4, {{P.id, mat(1, 1, {3.0})}});
  EXPECT_EQ(v, mat(2, 2, {1, -2, -2, 1}));
  EXPECT_NEAR(min_eigenvalue(v), -1.0, 1e-12);
}

TEST(Lmi, EvaluateLambda1) {
  LmiProgram prog;
  const Variable G = prog.matrix("G1", 2, 2);
  const AffineExpr lam = AffineExpr(G).transpose() + AffineExpr(G);
  EXPECT_EQ(evaluate(lam, {{G.id, mat(2, 2, {0, 1, 0, 0})}}), mat(2, 2, {0, 1, 1, 0}));
}

TEST(Lmi, MissingVariableNamed) {
  LmiProgram prog;
  const Variable G = prog.matrix("G1", 2, 2);
  try {
    evaluate(AffineExpr(G), {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("G1"), std::string::npos);
  }
}

TEST(Lmi, CanonicalizeSimpleProgram) {
  LmiProgram prog;
  const Variable x = prog.scalar("x");
  const AffineExpr M = block({{x, Cell::identity()}, {Cell::star(), x}});
  prog.add_constraint("M", M, Sense::PositiveDefinite);
  prog.add_objective_term(x, 1.0);
  const SdpStandardForm form = canonicalize(prog);
  ASSERT_EQ(form.blocks.size(), 1u);
  EXPECT_EQ(form.blocks[0].dim, 2);
  ASSERT_EQ(form.num_coords(), 1);
  EXPECT_EQ(form.c(0), 1.0);
}

TEST(Lmi, CanonicalizeErrors) {
  LmiProgram empty;
  EXPECT_THROW(canonicalize(empty), Error);
  LmiProgram prog;
  const Variable X = prog.symmetric("X", 2);
  prog.add_objective_term(X, 1.0);
  EXPECT_THROW(canonicalize(prog), Error);
}

TEST(Lmi, DuplicateVariableRejected) {
  LmiProgram prog;
  prog.scalar("a");
  EXPECT_THROW(prog.scalar("a"), Error);
}

TEST(Lmi, ExampleProgramShape) {
  const DescriptorPlant plant = example_plant();
  const LmiProgram prog = synth::build_program(plant, 0.25, synth::FilterStructure::dynamic(), synth::ModeSpec{});
  const SdpStandardForm form = canonicalize(prog);
  // Xi1..Xi4 plus the X1, X2 domain blocks.
  ASSERT_EQ(form.blocks.size(), 6u);
  EXPECT_EQ(form.blocks[0].name, "Xi1");
  EXPECT_EQ(form.blocks[0].dim, 27);
  EXPECT_EQ(form.blocks[4].name, "X1 > 0");
  EXPECT_EQ(form.blocks[5].name, "X2 > 0");
  int expected = 0;
  for (const auto& v : prog.variables()) expected += v.symmetric() ? svec_size(v.rows) : v.rows * v.cols;
  EXPECT_EQ(form.num_coords(), expected);
  // 4 scalars, C_F 2x2, D_F 2x1, G1 2x2, G2 2x1, X1/X2 svec 3, Y1/Y2 1x2.
  EXPECT_EQ(form.num_coords(), 4 + 4 + 2 + 4 + 2 + 3 + 3 + 2 + 2);
}

TEST(Lmi, CanonicalizeMatchesEvaluateOnRandomAssignments) {
  const DescriptorPlant plant = example_plant();
  const LmiProgram prog = synth::build_program(plant, 0.25, synth::FilterStructure::dynamic(), synth::ModeSpec{});
  const SdpStandardForm form = canonicalize(prog);
  std::mt19937 rng(2024);
  const double margin = prog.strict_margin();
  for (int trial = 0; trial < 100; ++trial) {
    const Assignment a = random_assignment(rng, prog.variables());
    const Vector x = form.from_assignment(a);
    for (std::size_t b = 0; b < prog.constraints().size(); ++b) {
      const Constraint& c = prog.constraints()[b];
      const Matrix direct = evaluate_constraint(c, a);
      const double sign = c.sense == Sense::NegativeDefinite ? -1.0 : 1.0;
      const Matrix expected = sign * direct - margin * Matrix::Identity(direct.rows(), direct.rows());
      EXPECT_LE(relative_error(form.block_value(b, x), expected), 1e-12) << c.name;
      EXPECT_EQ((direct - direct.transpose()).norm(), 0.0) << c.name;
    }
    const Assignment back = form.to_assignment(x);
    for (const auto& v : prog.variables()) EXPECT_LE((back.at(v.id) - a.at(v.id)).norm(), 1e-14);
  }
}

TEST(Lmi, SvecIsometry) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 6;
    const Matrix A = symmetrize(random_matrix(rng, n, n));
    const Matrix B = symmetrize(random_matrix(rng, n, n));
    const double inner = (A.array() * B.array()).sum();
    EXPECT_NEAR(svec(A).dot(svec(B)), inner, 1e-12 * std::max(1.0, std::abs(inner)));
    EXPECT_LE((smat(svec(A), n) - A).norm(), 1e-14);
    EXPECT_EQ(svec(A).size(), svec_size(n));
  }
}

TEST(Lmi, TransposeAndProducts) {
  LmiProgram prog;
  const Variable Y = prog.matrix("Y", 2, 3);
  std::mt19937 rng(9);
  const Matrix L = random_matrix(rng, 4, 2);
  const Matrix R = random_matrix(rng, 3, 5);
  const Matrix Yv = random_matrix(rng, 2, 3);
  const AffineExpr e = L * AffineExpr(Y) * R;
  const Assignment a{{Y.id, Yv}};
  EXPECT_LE((evaluate(e, a) - L * Yv * R).norm(), 1e-12);
  EXPECT_LE((evaluate(e.transpose(), a) - (L * Yv * R).transpose()).norm(), 1e-12);
}
