#include <gtest/gtest.h>

#include "hinfdae/error.hpp"
#include "hinfdae/lmi.hpp"
#include "hinfdae/sdp.hpp"
#include "hinfdae/synth.hpp"

using namespace hinfdae;
using namespace hinfdae::lmi;

namespace {

SdpStandardForm min_x_problem() {
  LmiProgram prog;
  const Variable x = prog.scalar("x");
  prog.add_constraint("M", block({{x, Cell::identity()}, {Cell::star(), x}}), Sense::PositiveDefinite);
  prog.add_objective_term(x, 1.0);
  return canonicalize(prog);
}

SdpStandardForm spectral_norm_problem() {
  Matrix M(2, 2);
  M << 3, 0, 0, 4;
  LmiProgram prog;
  const Variable t = prog.scalar("t");
  const AffineExpr tI = AffineExpr::scaled(t, Matrix::Identity(2, 2));
  prog.add_constraint("norm", block({{tI, M}, {Cell::star(), tI}}), Sense::PositiveDefinite);
  prog.add_objective_term(t, 1.0);
  return canonicalize(prog);
}

SdpStandardForm lyapunov_problem() {
  LmiProgram prog;
  prog.set_strict_margin(1e-6);
  const Variable P = prog.positive_definite("P", 2);
  const Matrix A = -Matrix::Identity(2, 2);
  const AffineExpr Pe(P);
  prog.add_constraint("lyap", A.transpose() * Pe + Pe * A, Sense::NegativeDefinite);
  prog.add_constraint("unit", AffineExpr::identity(2) - Pe, Sense::PositiveDefinite);
  return canonicalize(prog);
}

SdpStandardForm infeasible_problem() {
  // x >= 1 and x <= -1.
  LmiProgram prog;
  const Variable x = prog.scalar("x");
  const AffineExpr one = AffineExpr(Matrix::Constant(1, 1, 1.0));
  prog.add_constraint("lo", AffineExpr(x) - one, Sense::PositiveDefinite);
  prog.add_constraint("hi", AffineExpr(x) + one, Sense::NegativeDefinite);
  prog.add_objective_term(x, 1.0);
  return canonicalize(prog);
}

SdpStandardForm unbounded_problem() {
  LmiProgram prog;
  const Variable x = prog.scalar("x");
  prog.add_constraint("lo", AffineExpr(x), Sense::NegativeDefinite);
  prog.add_objective_term(x, 1.0);
  return canonicalize(prog);
}

void expect_checked(const SdpStandardForm& form, const sdp::SdpSolution& sol, const sdp::SolverSettings& set) {
  ASSERT_EQ(sol.status, sdp::Status::Optimal);
  const sdp::SolutionReport rep = sdp::check_solution(form, sol.x, 10 * set.tol_feas);
  EXPECT_TRUE(rep.ok());
  EXPECT_NEAR(rep.objective, sol.objective, 1e-9 * (1 + std::abs(sol.objective)));
  EXPECT_LE(sol.residuals.primal, set.tol_feas);
  EXPECT_LE(sol.residuals.dual, set.tol_feas);
}

}  // namespace

TEST(Sdp, MinimizeXWithTwoByTwoBlock) {
  const SdpStandardForm form = min_x_problem();
  const sdp::SolverSettings set;
  const auto sol = sdp::solve(form, set);
  expect_checked(form, sol, set);
  EXPECT_NEAR(sol.objective, 1.0, 1e-7);
  EXPECT_NEAR(sol.x(0), 1.0, 1e-6);
}

TEST(Sdp, SpectralNorm) {
  const SdpStandardForm form = spectral_norm_problem();
  const sdp::SolverSettings set;
  const auto sol = sdp::solve(form, set);
  expect_checked(form, sol, set);
  EXPECT_NEAR(sol.objective, 4.0, 1e-6);
}

TEST(Sdp, LyapunovFeasibility) {
  const SdpStandardForm form = lyapunov_problem();
  const sdp::SolverSettings set;
  const auto sol = sdp::solve(form, set);
  expect_checked(form, sol, set);
  const Matrix P = form.to_assignment(sol.x).begin()->second;
  EXPECT_GT(min_eigenvalue(P), 0.0);
  EXPECT_LT(max_eigenvalue(-P - P), 0.0);
}

TEST(Sdp, DetectsPrimalInfeasibility) {
  const auto sol = sdp::solve(infeasible_problem());
  EXPECT_EQ(sol.status, sdp::Status::PrimalInfeasible);
}

TEST(Sdp, DetectsUnboundedObjective) {
  const auto sol = sdp::solve(unbounded_problem());
  EXPECT_EQ(sol.status, sdp::Status::DualInfeasible);
}

TEST(Sdp, CheckSolutionFlagsPerturbation) {
  const SdpStandardForm form = min_x_problem();
  const auto sol = sdp::solve(form);
  Vector x = sol.x;
  x(0) -= 1.0;
  const auto rep = sdp::check_solution(form, x, 1e-6);
  EXPECT_FALSE(rep.ok());
  ASSERT_EQ(rep.violations.size(), 1u);
  EXPECT_EQ(rep.violations[0].block, "M");
}

TEST(Sdp, CheckSolutionOnEmptyForm) {
  SdpStandardForm form;
  form.c = Vector::Zero(1);
  const auto rep = sdp::check_solution(form, Vector::Zero(1), 1e-6);
  EXPECT_TRUE(rep.ok());
  EXPECT_TRUE(rep.slacks.empty());
}

TEST(Sdp, RejectsNonConformingData) {
  SdpStandardForm form = min_x_problem();
  form.blocks[0].F.push_back(Matrix::Zero(2, 2));
  EXPECT_THROW(sdp::solve(form), Error);
  sdp::SolverSettings bad;
  bad.step_fraction = 1.0;
  EXPECT_THROW(sdp::solve(min_x_problem(), bad), Error);
}

TEST(Sdp, Deterministic) {
  const SdpStandardForm form = canonicalize(
      synth::build_program(example_plant(), 0.25, synth::FilterStructure::dynamic(), synth::ModeSpec{}));
  const auto a = sdp::solve(form);
  const auto b = sdp::solve(form);
  EXPECT_EQ(a.status, b.status);
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_NEAR(a.objective, b.objective, 1e-12);
  EXPECT_EQ(a.x, b.x);
}

TEST(Sdp, GapDecreasesMonotonically) {
  const std::vector<SdpStandardForm> corpus = {
      min_x_problem(), spectral_norm_problem(), lyapunov_problem(),
      canonicalize(synth::build_program(example_plant(), 0.25, synth::FilterStructure::dynamic(), synth::ModeSpec{}))};
  for (std::size_t c = 0; c < corpus.size(); ++c) {
    const auto sol = sdp::solve(corpus[c]);
    ASSERT_EQ(sol.status, sdp::Status::Optimal) << c;
    for (std::size_t k = 1; k < sol.gap_history.size(); ++k) {
      EXPECT_LE(sol.gap_history[k], 1.1 * sol.gap_history[k - 1]) << "problem " << c << " iteration " << k;
    }
  }
}

TEST(Sdp, IterationLogReceivesEveryIterate) {
  int lines = 0;
  sdp::SolverSettings set;
  set.log = [&lines](const sdp::IterationInfo& info) {
    EXPECT_FALSE(sdp::format(info).empty());
    ++lines;
  };
  const auto sol = sdp::solve(min_x_problem(), set);
  EXPECT_GE(lines, sol.iterations);
}
