#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hinfdae/error.hpp"
#include "hinfdae/model.hpp"

using namespace hinfdae;

namespace {

DescriptorPlant state_space_plant() {
  DescriptorPlant p;
  p.E = Matrix::Identity(2, 2);
  p.A = -Matrix::Identity(2, 2);
  p.B = Matrix::Ones(2, 1);
  p.C = Matrix::Identity(2, 2);
  p.D = Matrix::Zero(2, 1);
  p.H = Matrix::Identity(2, 2);
  p.M1 = Matrix::Zero(2, 1);
  p.M2 = Matrix::Zero(2, 1);
  p.N = Matrix::Zero(1, 2);
  p.phi = NonlinearMap::zero(2, 2, 0);
  p.psi = NonlinearMap::zero(2, 2, 0);
  p.u_nominal = Vector::Zero(0);
  return p;
}

Matrix random_rank_deficient(std::mt19937& rng, int n, int s) {
  std::normal_distribution<double> g;
  Matrix L(n, s), R(s, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < s; ++j) L(i, j) = g(rng);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < n; ++j) R(i, j) = g(rng);
  return L * R;
}

}  // namespace

TEST(Model, ExamplePlantValidates) {
  const ValidationReport rep = validate_plant(example_plant());
  EXPECT_EQ(rep.rank_E, 1);
  EXPECT_TRUE(rep.regular);
  EXPECT_EQ(rep.impulse_free, ValidationReport::Flag::True);
  EXPECT_EQ(rep.observable, ValidationReport::Flag::True);
  ASSERT_EQ(rep.finite_eigenvalues.size(), 1u);
  EXPECT_NEAR(rep.finite_eigenvalues[0].first, -57.0 / 54.0, 1e-9);
  EXPECT_NEAR(rep.finite_eigenvalues[0].second, 0.0, 1e-12);
  EXPECT_TRUE(rep.ok());
}

TEST(Model, StateSpacePlantValidates) {
  const ValidationReport rep = validate_plant(state_space_plant());
  EXPECT_EQ(rep.rank_E, 2);
  EXPECT_TRUE(rep.regular);
  EXPECT_EQ(rep.impulse_free, ValidationReport::Flag::True);
  EXPECT_EQ(rep.observable, ValidationReport::Flag::True);
}

TEST(Model, ZeroMassMatrixIsRejected) {
  DescriptorPlant p = state_space_plant();
  p.E.setZero();
  try {
    validate_plant(p);
    FAIL() << "expected rank error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Validation);
  }
}

TEST(Model, SingularPencilSkipsLaterChecks) {
  DescriptorPlant p = state_space_plant();
  p.E << 1, 0, 0, 0;
  p.A << -1, 0, 0, 0;
  const ValidationReport rep = validate_plant(p);
  EXPECT_FALSE(rep.regular);
  EXPECT_EQ(rep.impulse_free, ValidationReport::Flag::NotEvaluated);
  EXPECT_EQ(rep.observable, ValidationReport::Flag::NotEvaluated);
  EXPECT_FALSE(rep.ok());
}

TEST(Model, ImpulsivePencilIsFlagged) {
  DescriptorPlant p = state_space_plant();
  p.E << 0, 1, 0, 0;
  p.A = Matrix::Identity(2, 2);
  const ValidationReport rep = validate_plant(p);
  EXPECT_TRUE(rep.regular);
  EXPECT_EQ(rep.impulse_free, ValidationReport::Flag::False);
}

TEST(Model, UnobservablePlantIsFlagged) {
  DescriptorPlant p = state_space_plant();
  p.C = Matrix(1, 2);
  p.C << 1, 0;
  p.D = Matrix::Zero(1, 1);
  p.M2 = Matrix::Zero(1, 1);
  p.psi = NonlinearMap::zero(1, 2, 0);
  const ValidationReport rep = validate_plant(p);
  EXPECT_EQ(rep.observable, ValidationReport::Flag::False);
}

TEST(Model, DimensionErrorNamesMatrix) {
  DescriptorPlant p = example_plant();
  p.D = Matrix::Zero(2, 1);
  try {
    validate_plant(p);
    FAIL() << "expected dimension error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Dimension);
    EXPECT_NE(std::string(e.what()).find('D'), std::string::npos) << e.what();
  }
}

TEST(Model, NegativeLipschitzConstantIsDomainError) {
  DescriptorPlant p = example_plant();
  p.gamma1 = -1.0;
  try {
    p.check_dimensions();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Domain);
  }
}

TEST(Model, NonlinearityMustVanishAtOrigin) {
  DescriptorPlant p = example_plant();
  p.phi = parse_nonlinearity({"1 + x1", "0"}, 2, 0);
  try {
    p.check_dimensions();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Validation);
  }
}

TEST(Model, OrthComplementOfExampleMassMatrix) {
  const Matrix Ep = orth_complement(example_plant().E);
  ASSERT_EQ(Ep.rows(), 1);
  ASSERT_EQ(Ep.cols(), 2);
  const double c = 1.0 / std::sqrt(5.0);
  EXPECT_NEAR(std::abs(Ep(0, 0)), 2 * c, 1e-12);
  EXPECT_NEAR(Ep(0, 1), -Ep(0, 0) / 2.0, 1e-12);
}

TEST(Model, OrthComplementSpecialCases) {
  EXPECT_EQ(orth_complement(Matrix::Identity(2, 2)).rows(), 0);
  EXPECT_EQ(orth_complement(Matrix::Identity(2, 2)).cols(), 2);
  Matrix E = Matrix::Zero(2, 2);
  E(0, 0) = 1.0;
  const Matrix Ep = orth_complement(E);
  ASSERT_EQ(Ep.rows(), 1);
  EXPECT_NEAR(std::abs(Ep(0, 1)), 1.0, 1e-12);
  EXPECT_NEAR(Ep(0, 0), 0.0, 1e-12);
}

TEST(Model, OrthComplementPropertyOnRandomMatrices) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 5;
    const int s = 1 + trial % n;
    const Matrix E = random_rank_deficient(rng, n, s);
    const Matrix Ep = orth_complement(E);
    EXPECT_EQ(Ep.rows(), n - numerical_rank(E));
    EXPECT_LE((Ep * E).norm(), 1e-10 * E.norm());
    if (Ep.rows() > 0) {
      EXPECT_LE((Ep * Ep.transpose() - Matrix::Identity(Ep.rows(), Ep.rows())).norm(), 1e-12);
    }
  }
}

TEST(Model, NonsingularMassMatrixIsImpulseFree) {
  std::mt19937 rng(5);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    DescriptorPlant p = state_space_plant();
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        p.E(i, j) = g(rng);
        p.A(i, j) = g(rng);
      }
    p.E += 3.0 * Matrix::Identity(2, 2);
    EXPECT_EQ(validate_plant(p).impulse_free, ValidationReport::Flag::True);
  }
}

TEST(Model, ParseNonlinearityEvaluates) {
  const NonlinearMap phi = parse_nonlinearity({"0.5*sin(x2)", "0.5*sin(x1)"}, 2, 0);
  Vector x(2);
  x << 0.7, -1.1;
  const Vector v = phi(x, Vector::Zero(0));
  EXPECT_DOUBLE_EQ(v(0), 0.5 * std::sin(-1.1));
  EXPECT_DOUBLE_EQ(v(1), 0.5 * std::sin(0.7));
  EXPECT_TRUE(parse_nonlinearity({"0", "0"}, 2, 0).is_zero());
  EXPECT_FALSE(phi.is_zero());
  EXPECT_THROW(parse_nonlinearity({"sin(x3)"}, 2, 0), Error);
}

TEST(Model, LipschitzEstimates) {
  const double pi = std::numbers::pi;
  const std::vector<Interval> box = {{-pi, pi}, {-pi, pi}};
  const NonlinearMap phi = parse_nonlinearity({"0.5*sin(x2)", "0.5*sin(x1)"}, 2, 0);
  EXPECT_NEAR(estimate_lipschitz(phi, box, 21), 0.5, 0.01);
  EXPECT_NEAR(estimate_lipschitz(NonlinearMap::zero(2, 2, 0), box, 21), 0.0, 1e-12);
  const NonlinearMap id = parse_nonlinearity({"x1", "x2"}, 2, 0);
  EXPECT_NEAR(estimate_lipschitz(id, {{-3, 5}, {0, 1}}, 5), 1.0, 0.01);
}

TEST(Model, LipschitzEstimateMonotoneUnderNestedBoxes) {
  const NonlinearMap f = parse_nonlinearity({"x1^3 - x2", "tanh(x1*x2)"}, 2, 0);
  double prev = 0.0;
  for (int k = 1; k <= 6; ++k) {
    const double h = 0.5 * k;
    const double est = estimate_lipschitz(f, {{-h, h}, {-h, h}}, 2 * k + 1);
    EXPECT_GE(est, prev - 1e-9);
    prev = est;
  }
}

TEST(Model, LipschitzGridMustHaveTwoPoints) {
  const NonlinearMap id = parse_nonlinearity({"x1"}, 1, 0);
  EXPECT_THROW(estimate_lipschitz(id, {{0, 1}}, 1), Error);
}
