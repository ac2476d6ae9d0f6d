#pragma once

#include <functional>
#include <iosfwd>
#include <optional>

#include "hinfdae/model.hpp"
#include "hinfdae/synth.hpp"

namespace hinfdae::daesim {

/// E = S diag(I_s, 0) T with S, T invertible; xbar = T x.
struct SemiExplicitForm {
  Matrix S, T;
  Matrix S_inv, T_inv;
  int s = 0;

  int n() const { return static_cast<int>(T.rows()); }
  /// Validates externally supplied factors: invertible and reconstructing E
  /// to 1e-12 relative, else Error(Validation).
  static SemiExplicitForm from_factors(const Matrix& E, const Matrix& S, const Matrix& T);
};

/// Deterministic SVD-based factorization: S = U diag(sigma_1..sigma_s, 1..1),
/// T = V^T with each singular-vector pair signed so that the largest entry of
/// the V column is positive. Throws Error(Validation) when rank(E) = 0.
SemiExplicitForm semi_explicit(const Matrix& E);

/// E x' = f(x, t)
struct DescriptorDynamics {
  Matrix E;
  std::function<Vector(const Vector&, double)> f;
};

/// Norm of the algebraic rows (S^{-1} f)_{s..n} at x.
double algebraic_residual(const DescriptorDynamics& sys, const SemiExplicitForm& form, const Vector& x,
                          double t);

/// Newton on the algebraic coordinates of xbar = T x, holding the
/// differential coordinates of the guess fixed. Residual target 1e-10;
/// throws Error(Numerical) after 50 iterations with the final residual.
Vector consistent_init(const DescriptorDynamics& sys, const SemiExplicitForm& form, const Vector& guess,
                       double t = 0.0);

/// Nominal plant (w = 0, F = 0) with input u, using semi_explicit(plant.E).
Vector consistent_init(const DescriptorPlant& plant, const Vector& guess, const Vector& u);

struct Scenario {
  NonlinearMap disturbance;  // w(t), q entries; empty map means w = 0
  NonlinearMap F_diagonal;   // k diagonal entries of F(t)
  bool uncertainty_on = false;
  double t0 = 0.0;
  double tf = 10.0;
  double dt = 1e-3;
  std::optional<Vector> x0_plant;
  std::optional<Vector> x0_filter;

  Vector w(double t, int q) const;
  Matrix F(double t, int k) const;
  int steps() const;
  /// Checks the time grid and sigma_max(F(t)) <= 1 + 1e-12 on it.
  void validate(int q, int k) const;
};

struct IntegrationStats {
  int steps = 0;
  long newton_iterations = 0;
  double max_algebraic_residual = 0.0;
};

struct RawTrajectory {
  Vector times;
  Matrix states;  // one row per sample
  IntegrationStats stats;
};

/// Fixed-step implicit midpoint on the differential rows with the algebraic
/// rows enforced at each new time level by Newton projection.
RawTrajectory integrate(const DescriptorDynamics& sys, const Vector& x0, double t0, double tf, double dt);
RawTrajectory integrate(const DescriptorDynamics& sys, const SemiExplicitForm& form, const Vector& x0, double t0,
                        double tf, double dt);

DescriptorDynamics plant_dynamics(const DescriptorPlant& plant, const Scenario& scenario);
Vector plant_output(const DescriptorPlant& plant, const Scenario& scenario, const Vector& x, double t);

/// Joint state [xF; x].
DescriptorDynamics joint_dynamics(const DescriptorPlant& plant, const synth::FilterRealization& filter,
                                  const Scenario& scenario);

/// The augmented error system driven by the plant nonlinearities; state xi = [xF; x].
DescriptorDynamics error_dynamics(const synth::ErrorSystem& es, const DescriptorPlant& plant,
                                  const Scenario& scenario);

struct Trajectory {
  Vector times;
  Matrix x, x_filter;
  Matrix y, z, z_filter, e, w;
  IntegrationStats stats;
  std::optional<double> gain;
};

/// sqrt(int |e|^2 / int |w|^2) by the trapezoid rule on the uniform grid.
/// Throws Error(Domain) when w has zero energy.
double l2_gain(const Matrix& e, const Matrix& w, double dt);

/// Consistent-initializes plant (from the guess) and filter (given y(t0)),
/// integrates the pair jointly and records z, z_F, e and w.
Trajectory run_scenario(const DescriptorPlant& plant, const synth::FilterRealization& filter,
                        const Scenario& scenario, const Vector& x0_plant_guess, const Vector& x0_filter_guess);

void write_csv(std::ostream& os, const Trajectory& traj);

}  // namespace hinfdae::daesim
