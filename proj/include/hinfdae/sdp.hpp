#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hinfdae/lmi.hpp"

namespace hinfdae::sdp {

enum class Status { Optimal, PrimalInfeasible, DualInfeasible, MaxIterations, NumericalFailure };

const char* to_string(Status status);

struct IterationInfo {
  int iteration = 0;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  double mu = 0.0;
  double tau = 0.0;
  double kappa = 0.0;
  double step_predictor = 0.0;
  double step = 0.0;
};

std::string format(const IterationInfo& info);

struct SolverSettings {
  double tol_gap = 1e-8;
  double tol_feas = 1e-8;
  int max_iters = 200;
  double step_fraction = 0.98;
  std::function<void(const IterationInfo&)> log;

  /// Throws Error(Domain) unless tolerances are positive and 0 < step_fraction < 1.
  void validate() const;
};

struct Residuals {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
};

struct SdpSolution {
  Status status = Status::NumericalFailure;
  Vector x;
  std::vector<Matrix> Z;  // dual matrices, one per block
  double objective = 0.0;
  double dual_objective = 0.0;
  std::vector<double> slacks;  // minimum eigenvalue of each block at x
  Residuals residuals;
  int iterations = 0;
  std::vector<double> gap_history;  // <S, Z> + tau kappa of the embedding, per iteration
};

SdpSolution solve(const lmi::SdpStandardForm& form, const SolverSettings& settings = {});

struct Violation {
  std::string block;
  double min_eigenvalue = 0.0;
};

struct SolutionReport {
  double objective = 0.0;
  std::vector<double> slacks;
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

/// Recomputes block minimum eigenvalues at `x`; flags blocks below -tol.
SolutionReport check_solution(const lmi::SdpStandardForm& form, const Vector& x, double tol);

}  // namespace hinfdae::sdp
