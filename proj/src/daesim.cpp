#include "hinfdae/daesim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "hinfdae/error.hpp"

namespace hinfdae::daesim {
namespace {

constexpr double kConsistentTol = 1e-10;
constexpr int kConsistentIters = 50;
constexpr double kStepAlgebraicTol = 1e-9;
constexpr double kInitialConsistencyTol = 1e-8;
constexpr int kStepNewtonIters = 25;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

Matrix fd_jacobian(const std::function<Vector(const Vector&)>& g, const Vector& x, const Vector& gx,
                   const std::vector<int>& cols) {
  Matrix J(gx.size(), static_cast<Eigen::Index>(cols.size()));
  Vector xp = x;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const int c = cols[j];
    const double h = 1e-7 * std::max(1.0, std::abs(x(c)));
    xp(c) = x(c) + h;
    J.col(static_cast<Eigen::Index>(j)) = (g(xp) - gx) / h;
    xp(c) = x(c);
  }
  return J;
}

// Algebraic rows of S^{-1} f at x.
Vector algebraic_part(const DescriptorDynamics& sys, const SemiExplicitForm& form, const Vector& x, double t) {
  const int n = form.n();
  return (form.S_inv * sys.f(x, t)).tail(n - form.s);
}

}  // namespace

SemiExplicitForm SemiExplicitForm::from_factors(const Matrix& E, const Matrix& S, const Matrix& T) {
  if (E.rows() != E.cols()) throw Error(ErrorKind::Dimension, "E must be square");
  const Eigen::Index n = E.rows();
  require_shape(S, n, n, "S");
  require_shape(T, n, n, "T");
  if (numerical_rank(S) < n) throw Error(ErrorKind::Validation, "S is singular");
  if (numerical_rank(T) < n) throw Error(ErrorKind::Validation, "T is singular");
  const int s = numerical_rank(E);
  if (s == 0) throw Error(ErrorKind::Validation, "rank(E) = 0: no differential part");
  Matrix I0 = Matrix::Zero(n, n);
  I0.topLeftCorner(s, s).setIdentity();
  const double mismatch = (S * I0 * T - E).norm();
  if (mismatch > 1e-12 * std::max(1.0, E.norm())) {
    throw Error(ErrorKind::Validation,
                "S diag(I, 0) T does not reconstruct E (mismatch " + fmt(mismatch) + ")");
  }
  SemiExplicitForm f;
  f.S = S;
  f.T = T;
  f.S_inv = S.fullPivLu().inverse();
  f.T_inv = T.fullPivLu().inverse();
  f.s = s;
  return f;
}

SemiExplicitForm semi_explicit(const Matrix& E) {
  if (E.rows() != E.cols()) throw Error(ErrorKind::Dimension, "E must be square");
  const Eigen::Index n = E.rows();
  const int s = numerical_rank(E);
  if (s == 0) throw Error(ErrorKind::Validation, "rank(E) = 0: no differential part");
  Eigen::JacobiSVD<Matrix> svd(E, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix U = svd.matrixU();
  Matrix V = svd.matrixV();
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::Index imax = 0;
    V.col(j).cwiseAbs().maxCoeff(&imax);
    if (V(imax, j) < 0) {
      V.col(j) *= -1.0;
      U.col(j) *= -1.0;
    }
  }
  Vector d = Vector::Ones(n);
  d.head(s) = svd.singularValues().head(s);
  SemiExplicitForm f;
  f.S = U * d.asDiagonal();
  f.T = V.transpose();
  f.S_inv = d.cwiseInverse().asDiagonal() * U.transpose();
  f.T_inv = V;
  f.s = s;
  return f;
}

double algebraic_residual(const DescriptorDynamics& sys, const SemiExplicitForm& form, const Vector& x,
                          double t) {
  if (form.s == form.n()) return 0.0;
  return algebraic_part(sys, form, x, t).norm();
}

Vector consistent_init(const DescriptorDynamics& sys, const SemiExplicitForm& form, const Vector& guess,
                       double t) {
  const int n = form.n();
  if (guess.size() != n) throw Error(ErrorKind::Dimension, "initial guess has wrong length");
  if (form.s == n) return guess;
  Vector xbar = form.T * guess;
  auto g = [&](const Vector& xb) { return algebraic_part(sys, form, form.T_inv * xb, t); };
  std::vector<int> alg;
  for (int i = form.s; i < n; ++i) alg.push_back(i);
  Vector r = g(xbar);
  for (int it = 0; it < kConsistentIters; ++it) {
    if (!r.allFinite()) break;
    if (r.norm() <= kConsistentTol) return form.T_inv * xbar;
    const Matrix J = fd_jacobian(g, xbar, r, alg);
    const Vector delta = J.fullPivLu().solve(-r);
    for (std::size_t j = 0; j < alg.size(); ++j) xbar(alg[j]) += delta(static_cast<Eigen::Index>(j));
    r = g(xbar);
  }
  if (r.allFinite() && r.norm() <= kConsistentTol) return form.T_inv * xbar;
  throw Error(ErrorKind::Numerical,
              "consistent initialization did not converge (residual " + fmt(r.norm()) + ")");
}

Vector consistent_init(const DescriptorPlant& plant, const Vector& guess, const Vector& u) {
  plant.check_dimensions();
  if (u.size() != plant.m()) throw Error(ErrorKind::Dimension, "input u has wrong length");
  DescriptorDynamics sys;
  sys.E = plant.E;
  sys.f = [&plant, &u](const Vector& x, double t) { return Vector(plant.A * x + plant.phi(x, u, t)); };
  return consistent_init(sys, semi_explicit(plant.E), guess, 0.0);
}

Vector Scenario::w(double t, int q) const {
  if (disturbance.out_dim() == 0) return Vector::Zero(q);
  return disturbance.of_time(t);
}

Matrix Scenario::F(double t, int k) const {
  if (!uncertainty_on || F_diagonal.out_dim() == 0) return Matrix::Zero(k, k);
  return F_diagonal.of_time(t).asDiagonal();
}

int Scenario::steps() const { return static_cast<int>(std::llround((tf - t0) / dt)); }

void Scenario::validate(int q, int k) const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorKind::Domain, "dt must be positive");
  if (!(tf > t0)) throw Error(ErrorKind::Domain, "horizon must be positive");
  if (disturbance.out_dim() != 0 && disturbance.out_dim() != q) {
    throw Error(ErrorKind::Dimension, "disturbance has " + std::to_string(disturbance.out_dim()) +
                                          " entries, expected " + std::to_string(q));
  }
  if (x0_plant && x0_filter && x0_plant->size() != x0_filter->size()) {
    throw Error(ErrorKind::Dimension, "x0_plant and x0_filter lengths differ");
  }
  if (!uncertainty_on || F_diagonal.out_dim() == 0) return;
  if (F_diagonal.out_dim() != k) {
    throw Error(ErrorKind::Dimension,
                "F(t) has " + std::to_string(F_diagonal.out_dim()) + " entries, expected " + std::to_string(k));
  }
  const int steps = this->steps();
  for (int i = 0; i <= steps; ++i) {
    const double t = t0 + i * dt;
    const double nrm = k > 0 ? F(t, k).cwiseAbs().maxCoeff() : 0.0;
    if (!(nrm <= 1.0 + 1e-12)) {
      throw Error(ErrorKind::Validation, "sigma_max(F(t)) = " + fmt(nrm) + " > 1 at t = " + fmt(t));
    }
  }
}

RawTrajectory integrate(const DescriptorDynamics& sys, const Vector& x0, double t0, double tf, double dt) {
  return integrate(sys, semi_explicit(sys.E), x0, t0, tf, dt);
}

RawTrajectory integrate(const DescriptorDynamics& sys, const SemiExplicitForm& form, const Vector& x0, double t0,
                        double tf, double dt) {
  const int n = form.n();
  if (x0.size() != n) throw Error(ErrorKind::Dimension, "initial state has wrong length");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorKind::Domain, "dt must be positive");
  if (!(tf > t0)) throw Error(ErrorKind::Domain, "horizon must be positive");
  const int s = form.s;
  {
    const Vector f0 = sys.f(x0, t0);
    const double res0 = algebraic_residual(sys, form, x0, t0);
    if (!(res0 <= kInitialConsistencyTol * std::max(1.0, f0.norm()))) {
      throw Error(ErrorKind::Validation, "initial state is not consistent (algebraic residual " + fmt(res0) + ")");
    }
  }
  const int steps = static_cast<int>(std::llround((tf - t0) / dt));
  RawTrajectory out;
  out.times.resize(steps + 1);
  out.states.resize(steps + 1, n);
  out.times(0) = t0;
  out.states.row(0) = x0.transpose();

  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  auto g = [&](const Vector& xb, double t) { return Vector(form.S_inv * sys.f(form.T_inv * xb, t)); };

  Vector xbar = form.T * x0;
  for (int step = 0; step < steps; ++step) {
    const double t = t0 + step * dt;
    const double tm = t + 0.5 * dt;
    const double tn = t + dt;
    auto residual = [&](const Vector& xn) {
      Vector res(n);
      const Vector gm = g(0.5 * (xbar + xn), tm);
      res.head(s) = xn.head(s) - xbar.head(s) - dt * gm.head(s);
      if (s < n) res.tail(n - s) = g(xn, tn).tail(n - s);
      return res;
    };
    Vector xn = xbar;
    if (s > 0) xn.head(s) += dt * g(xbar, t).head(s);
    Vector res = residual(xn);
    bool converged = false;
    for (int it = 0; it < kStepNewtonIters; ++it) {
      ++out.stats.newton_iterations;
      const Matrix J = fd_jacobian(residual, xn, res, all);
      const Vector delta = J.partialPivLu().solve(-res);
      xn += delta;
      res = residual(xn);
      if (!xn.allFinite() || !res.allFinite()) break;
      if (delta.norm() <= 1e-12 * (1.0 + xn.norm()) || res.norm() <= 1e-12 * (1.0 + xn.norm())) {
        converged = true;
        break;
      }
    }
    if (!converged) throw Error(ErrorKind::Numerical, "Newton iteration diverged at t = " + fmt(tn));
    xbar = xn;
    const Vector x = form.T_inv * xbar;
    const double alg = algebraic_residual(sys, form, x, tn);
    out.stats.max_algebraic_residual = std::max(out.stats.max_algebraic_residual, alg);
    if (!(alg <= kStepAlgebraicTol * std::max(1.0, x.norm()))) {
      throw Error(ErrorKind::Numerical, "algebraic residual " + fmt(alg) + " exceeds tolerance at t = " + fmt(tn));
    }
    out.times(step + 1) = tn;
    out.states.row(step + 1) = x.transpose();
  }
  out.stats.steps = steps;
  return out;
}

DescriptorDynamics plant_dynamics(const DescriptorPlant& plant, const Scenario& scenario) {
  DescriptorDynamics sys;
  sys.E = plant.E;
  sys.f = [plant, scenario](const Vector& x, double t) {
    const Matrix F = scenario.F(t, plant.k());
    return Vector((plant.A + plant.M1 * F * plant.N) * x + plant.phi(x, plant.u_nominal, t) +
                  plant.B * scenario.w(t, plant.q()));
  };
  return sys;
}

Vector plant_output(const DescriptorPlant& plant, const Scenario& scenario, const Vector& x, double t) {
  const Matrix F = scenario.F(t, plant.k());
  return (plant.C + plant.M2 * F * plant.N) * x + plant.psi(x, plant.u_nominal, t) +
         plant.D * scenario.w(t, plant.q());
}

namespace {

Vector filter_rhs(const DescriptorPlant& plant, const synth::FilterRealization& filter, const Vector& xf,
                  const Vector& y, double t) {
  return filter.AF * xf + filter.BF * y + filter.E1 * plant.phi(xf, plant.u_nominal, t) +
         filter.E2 * plant.psi(xf, plant.u_nominal, t);
}

Vector filter_output(const DescriptorPlant& plant, const synth::FilterRealization& filter, const Vector& xf,
                     const Vector& y, double t) {
  return filter.CF * xf + filter.DF * y + filter.E3 * plant.psi(xf, plant.u_nominal, t);
}

}  // namespace

DescriptorDynamics joint_dynamics(const DescriptorPlant& plant, const synth::FilterRealization& filter,
                                  const Scenario& scenario) {
  filter.check(plant);
  const int n = plant.n();
  DescriptorDynamics sys;
  sys.E = block_diag(filter.E, plant.E);
  sys.f = [plant, filter, scenario, n](const Vector& xi, double t) {
    const Vector xf = xi.head(n);
    const Vector x = xi.tail(n);
    const Matrix F = scenario.F(t, plant.k());
    const Vector y = plant_output(plant, scenario, x, t);
    Vector out(2 * n);
    out.head(n) = filter_rhs(plant, filter, xf, y, t);
    out.tail(n) = (plant.A + plant.M1 * F * plant.N) * x + plant.phi(x, plant.u_nominal, t) +
                  plant.B * scenario.w(t, plant.q());
    return out;
  };
  return sys;
}

DescriptorDynamics error_dynamics(const synth::ErrorSystem& es, const DescriptorPlant& plant,
                                  const Scenario& scenario) {
  const int n = plant.n();
  DescriptorDynamics sys;
  sys.E = es.Etilde;
  sys.f = [es, plant, scenario, n](const Vector& xi, double t) {
    const Vector xf = xi.head(n);
    const Vector x = xi.tail(n);
    const int k = plant.k();
    Matrix Ft = Matrix::Zero(2 * k, 2 * k);
    const Matrix F = scenario.F(t, k);
    Ft.topLeftCorner(k, k) = F;
    Ft.bottomRightCorner(k, k) = F;
    Vector omega(2 * n + 2 * plant.p());
    omega << plant.phi(x, plant.u_nominal, t), plant.psi(x, plant.u_nominal, t), plant.phi(xf, plant.u_nominal, t),
        plant.psi(xf, plant.u_nominal, t);
    return Vector((es.Atilde + es.Mtilde1 * Ft * es.Ntilde) * xi + es.S1 * omega +
                  es.Btilde * scenario.w(t, plant.q()));
  };
  return sys;
}

double l2_gain(const Matrix& e, const Matrix& w, double dt) {
  if (e.rows() != w.rows()) throw Error(ErrorKind::Dimension, "e and w have different sample counts");
  if (e.rows() < 2) throw Error(ErrorKind::Domain, "at least two samples are required");
  auto energy = [dt](const Matrix& m) {
    const Vector sq = m.rowwise().squaredNorm();
    return dt * (sq.sum() - 0.5 * (sq(0) + sq(sq.size() - 1)));
  };
  const double ew = energy(w);
  if (!(ew > 0.0)) throw Error(ErrorKind::Domain, "disturbance has zero energy");
  return std::sqrt(energy(e) / ew);
}

Trajectory run_scenario(const DescriptorPlant& plant, const synth::FilterRealization& filter,
                        const Scenario& scenario, const Vector& x0_plant_guess, const Vector& x0_filter_guess) {
  plant.check_dimensions();
  filter.check(plant);
  scenario.validate(plant.q(), plant.k());
  const int n = plant.n();
  if (x0_plant_guess.size() != n || x0_filter_guess.size() != n) {
    throw Error(ErrorKind::Dimension, "initial guesses must have length " + std::to_string(n));
  }
  const double t0 = scenario.t0;
  const DescriptorDynamics psys = plant_dynamics(plant, scenario);
  const Vector x0 = consistent_init(psys, semi_explicit(plant.E), x0_plant_guess, t0);
  const Vector y0 = plant_output(plant, scenario, x0, t0);
  DescriptorDynamics fsys;
  fsys.E = filter.E;
  fsys.f = [&](const Vector& xf, double t) { return filter_rhs(plant, filter, xf, y0, t); };
  const Vector xf0 = consistent_init(fsys, semi_explicit(filter.E), x0_filter_guess, t0);

  const DescriptorDynamics jsys = joint_dynamics(plant, filter, scenario);
  Vector xi0(2 * n);
  xi0 << xf0, x0;
  const RawTrajectory raw = integrate(jsys, xi0, t0, scenario.tf, scenario.dt);

  const Eigen::Index N = raw.times.size();
  Trajectory tr;
  tr.times = raw.times;
  tr.stats = raw.stats;
  tr.x = raw.states.rightCols(n);
  tr.x_filter = raw.states.leftCols(n);
  tr.y.resize(N, plant.p());
  tr.z.resize(N, plant.r());
  tr.z_filter.resize(N, plant.r());
  tr.e.resize(N, plant.r());
  tr.w.resize(N, plant.q());
  for (Eigen::Index i = 0; i < N; ++i) {
    const double t = raw.times(i);
    const Vector x = tr.x.row(i).transpose();
    const Vector xf = tr.x_filter.row(i).transpose();
    const Vector y = plant_output(plant, scenario, x, t);
    const Vector z = plant.H * x;
    const Vector zf = filter_output(plant, filter, xf, y, t);
    tr.y.row(i) = y.transpose();
    tr.z.row(i) = z.transpose();
    tr.z_filter.row(i) = zf.transpose();
    tr.e.row(i) = (z - zf).transpose();
    tr.w.row(i) = scenario.w(t, plant.q()).transpose();
  }
  if (tr.w.squaredNorm() > 0.0) tr.gain = l2_gain(tr.e, tr.w, scenario.dt);
  return tr;
}

void write_csv(std::ostream& os, const Trajectory& traj) {
  os << "t";
  auto header = [&os](const char* prefix, Eigen::Index cols) {
    for (Eigen::Index j = 0; j < cols; ++j) os << ',' << prefix << (j + 1);
  };
  header("x", traj.x.cols());
  header("z", traj.z.cols());
  header("zF", traj.z_filter.cols());
  header("e", traj.e.cols());
  header("w", traj.w.cols());
  os << '\n';
  os.precision(12);
  for (Eigen::Index i = 0; i < traj.times.size(); ++i) {
    os << traj.times(i);
    for (const Matrix* m : {&traj.x, &traj.z, &traj.z_filter, &traj.e, &traj.w}) {
      for (Eigen::Index j = 0; j < m->cols(); ++j) os << ',' << (*m)(i, j);
    }
    os << '\n';
  }
}

}  // namespace hinfdae::daesim
