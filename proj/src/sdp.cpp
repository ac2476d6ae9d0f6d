#include "hinfdae/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "hinfdae/error.hpp"

namespace hinfdae::sdp {
namespace {

using lmi::SdpStandardForm;

double inner(const Matrix& a, const Matrix& b) { return (a.array() * b.array()).sum(); }

struct Scaling {
  Matrix R;     // W = R, with R^T Z R = Lambda = R^{-1} S R^{-T}
  Matrix Rinv;
  Vector lambda;
};

bool nt_scaling(const Matrix& S, const Matrix& Z, Scaling& out) {
  Eigen::LLT<Matrix> ls(S), lz(Z);
  if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
  const Matrix Ls = ls.matrixL();
  const Matrix Lz = lz.matrixL();
  Eigen::JacobiSVD<Matrix> svd(Lz.transpose() * Ls, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  if (sv.minCoeff() <= 0.0 || !sv.allFinite()) return false;
  const Vector inv_sqrt = sv.array().rsqrt();
  const Vector sqrt_sv = sv.array().sqrt();
  out.lambda = sv;
  out.R = Ls * svd.matrixV() * inv_sqrt.asDiagonal();
  const Matrix Ls_inv = Ls.triangularView<Eigen::Lower>().solve(Matrix::Identity(S.rows(), S.cols()));
  out.Rinv = sqrt_sv.asDiagonal() * svd.matrixV().transpose() * Ls_inv;
  return true;
}

// X with (Lambda X + X Lambda)/2 = D.
Matrix lambda_solve(const Vector& lambda, const Matrix& D) {
  Matrix X(D.rows(), D.cols());
  for (Eigen::Index i = 0; i < D.rows(); ++i) {
    for (Eigen::Index j = 0; j < D.cols(); ++j) X(i, j) = 2.0 * D(i, j) / (lambda(i) + lambda(j));
  }
  return X;
}

// Largest step keeping diag(lambda) + alpha * D positive semidefinite.
double max_step(const Vector& lambda, const Matrix& D) {
  const Vector s = lambda.array().rsqrt();
  const double e = min_eigenvalue(s.asDiagonal() * D * s.asDiagonal());
  return e < 0.0 ? -1.0 / e : std::numeric_limits<double>::infinity();
}

class Solver {
 public:
  Solver(const SdpStandardForm& form, const SolverSettings& settings)
      : f_(form), set_(settings), m_(form.num_coords()), nb_(form.blocks.size()) {}

  SdpSolution run();

 private:
  std::vector<Matrix> apply(const Vector& x) const {
    std::vector<Matrix> out(nb_);
    for (std::size_t b = 0; b < nb_; ++b) {
      out[b] = Matrix::Zero(f_.blocks[b].dim, f_.blocks[b].dim);
      for (int i = 0; i < m_; ++i) out[b] += x(i) * f_.blocks[b].F[static_cast<std::size_t>(i)];
    }
    return out;
  }
  Vector adjoint(const std::vector<Matrix>& Z) const {
    Vector out = Vector::Zero(m_);
    for (std::size_t b = 0; b < nb_; ++b) {
      for (int i = 0; i < m_; ++i) out(i) += inner(f_.blocks[b].F[static_cast<std::size_t>(i)], Z[b]);
    }
    return out;
  }
  double f0_inner(const std::vector<Matrix>& Z) const {
    double s = 0.0;
    for (std::size_t b = 0; b < nb_; ++b) s += inner(f_.blocks[b].F0, Z[b]);
    return s;
  }

  bool factor();
  void reduced_solve(const Vector& r1, const std::vector<Matrix>& r2, Vector& dx,
                     std::vector<Matrix>& dZ) const;

  struct Direction {
    Vector dx;
    std::vector<Matrix> dS, dZ;
    double dtau = 0.0, dkappa = 0.0;
  };
  Direction direction(double eta, const std::vector<Matrix>& ds, double dk) const;
  double step_to_boundary(const Direction& d) const;

  const SdpStandardForm& f_;
  const SolverSettings& set_;
  int m_;
  std::size_t nb_;

  Vector x_;
  std::vector<Matrix> S_, Z_;
  double tau_ = 1.0, kappa_ = 1.0;

  std::vector<Matrix> Rp_;
  Vector rd_;
  double rg_ = 0.0;

  std::vector<Scaling> sc_;
  std::vector<std::vector<Matrix>> Ft_;  // scaled data R^{-1} F_i R^{-T}
  Eigen::LDLT<Matrix> schur_;
  Vector x1_;
  std::vector<Matrix> Z1_;
};

bool Solver::factor() {
  sc_.resize(nb_);
  Ft_.assign(nb_, {});
  for (std::size_t b = 0; b < nb_; ++b) {
    if (!nt_scaling(S_[b], Z_[b], sc_[b])) return false;
    Ft_[b].resize(static_cast<std::size_t>(m_));
    for (int i = 0; i < m_; ++i) {
      Ft_[b][static_cast<std::size_t>(i)] =
          sc_[b].Rinv * f_.blocks[b].F[static_cast<std::size_t>(i)] * sc_[b].Rinv.transpose();
    }
  }
  Matrix H = Matrix::Zero(m_, m_);
  for (std::size_t b = 0; b < nb_; ++b) {
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j <= i; ++j) {
        H(i, j) += inner(Ft_[b][static_cast<std::size_t>(i)], Ft_[b][static_cast<std::size_t>(j)]);
      }
    }
  }
  H = H.selfadjointView<Eigen::Lower>();
  schur_.compute(H);
  if (schur_.info() != Eigen::Success || !schur_.isPositive()) {
    const double reg = 1e-14 * std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
    schur_.compute(H + reg * Matrix::Identity(m_, m_));
    if (schur_.info() != Eigen::Success) return false;
  }
  x1_.resize(0);
  Z1_.clear();
  std::vector<Matrix> F0(nb_);
  for (std::size_t b = 0; b < nb_; ++b) F0[b] = f_.blocks[b].F0;
  reduced_solve(-f_.c, F0, x1_, Z1_);
  return x1_.allFinite();
}

// Solves -A*(dZ) = r1, -A(dx) - G dZ G = r2 with G = R R^T.
void Solver::reduced_solve(const Vector& r1, const std::vector<Matrix>& r2, Vector& dx,
                           std::vector<Matrix>& dZ) const {
  Vector rhs = r1;
  std::vector<Matrix> r2t(nb_);
  for (std::size_t b = 0; b < nb_; ++b) {
    r2t[b] = sc_[b].Rinv * r2[b] * sc_[b].Rinv.transpose();
    for (int i = 0; i < m_; ++i) rhs(i) -= inner(Ft_[b][static_cast<std::size_t>(i)], r2t[b]);
  }
  dx = schur_.solve(rhs);
  dZ.resize(nb_);
  for (std::size_t b = 0; b < nb_; ++b) {
    Matrix t = r2t[b];
    for (int i = 0; i < m_; ++i) t += dx(i) * Ft_[b][static_cast<std::size_t>(i)];
    dZ[b] = -symmetrize(sc_[b].Rinv.transpose() * t * sc_[b].Rinv);
  }
}

Solver::Direction Solver::direction(double eta, const std::vector<Matrix>& ds, double dk) const {
  std::vector<Matrix> r2(nb_);
  for (std::size_t b = 0; b < nb_; ++b) {
    r2[b] = -eta * Rp_[b] - sc_[b].R * lambda_solve(sc_[b].lambda, ds[b]) * sc_[b].R.transpose();
  }
  Vector x2;
  std::vector<Matrix> Z2;
  reduced_solve(-eta * rd_, r2, x2, Z2);

  Direction d;
  const double num = -eta * rg_ - dk / tau_ - f_.c.dot(x2) - f0_inner(Z2);
  const double den = f_.c.dot(x1_) + f0_inner(Z1_) - kappa_ / tau_;
  d.dtau = num / den;
  d.dx = x2 + d.dtau * x1_;
  d.dZ.resize(nb_);
  for (std::size_t b = 0; b < nb_; ++b) d.dZ[b] = Z2[b] + d.dtau * Z1_[b];
  d.dS = apply(d.dx);
  for (std::size_t b = 0; b < nb_; ++b) d.dS[b] += d.dtau * f_.blocks[b].F0 - eta * Rp_[b];
  d.dkappa = (dk - kappa_ * d.dtau) / tau_;
  return d;
}

double Solver::step_to_boundary(const Direction& d) const {
  double alpha = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < nb_; ++b) {
    const Matrix dst = sc_[b].Rinv * d.dS[b] * sc_[b].Rinv.transpose();
    const Matrix dzt = sc_[b].R.transpose() * d.dZ[b] * sc_[b].R;
    alpha = std::min({alpha, max_step(sc_[b].lambda, dst), max_step(sc_[b].lambda, dzt)});
  }
  if (d.dtau < 0.0) alpha = std::min(alpha, -tau_ / d.dtau);
  if (d.dkappa < 0.0) alpha = std::min(alpha, -kappa_ / d.dkappa);
  return alpha;
}

SdpSolution Solver::run() {
  SdpSolution sol;
  x_ = Vector::Zero(m_);
  S_.resize(nb_);
  Z_.resize(nb_);
  int nu = 0;
  double f0_norm = 0.0;
  for (std::size_t b = 0; b < nb_; ++b) {
    const int d = f_.blocks[b].dim;
    S_[b] = Matrix::Identity(d, d);
    Z_[b] = Matrix::Identity(d, d);
    nu += d;
    f0_norm += f_.blocks[b].F0.squaredNorm();
  }
  f0_norm = std::sqrt(f0_norm);
  const double c_norm = f_.c.norm();

  auto finish = [&](Status status, bool normalize) {
    sol.status = status;
    const double s = normalize ? tau_ : 1.0;
    sol.x = x_ / s;
    sol.Z.resize(nb_);
    for (std::size_t b = 0; b < nb_; ++b) sol.Z[b] = Z_[b] / s;
    sol.objective = f_.c.dot(sol.x);
    sol.dual_objective = -f0_inner(sol.Z);
    sol.slacks.resize(nb_);
    for (std::size_t b = 0; b < nb_; ++b) sol.slacks[b] = min_eigenvalue(f_.block_value(b, sol.x));
    return sol;
  };

  if (nb_ == 0) {
    // Unconstrained: bounded only if c = 0.
    return finish(c_norm == 0.0 ? Status::Optimal : Status::DualInfeasible, false);
  }

  int stalled = 0;
  for (int iter = 0;; ++iter) {
    const std::vector<Matrix> Ax = apply(x_);
    Rp_.resize(nb_);
    double rp_norm = 0.0, sz = 0.0;
    for (std::size_t b = 0; b < nb_; ++b) {
      Rp_[b] = S_[b] - tau_ * f_.blocks[b].F0 - Ax[b];
      rp_norm += Rp_[b].squaredNorm();
      sz += inner(S_[b], Z_[b]);
    }
    rp_norm = std::sqrt(rp_norm);
    const Vector aZ = adjoint(Z_);
    rd_ = tau_ * f_.c - aZ;
    const double cx = f_.c.dot(x_);
    const double f0z = f0_inner(Z_);
    rg_ = kappa_ + cx + f0z;
    const double mu = (sz + tau_ * kappa_) / (nu + 1);

    IterationInfo info;
    info.iteration = iter;
    info.primal_objective = cx / tau_;
    info.dual_objective = -f0z / tau_;
    info.primal_residual = rp_norm / tau_ / (1.0 + f0_norm);
    info.dual_residual = rd_.norm() / tau_ / (1.0 + c_norm);
    info.gap = std::max(std::abs(info.primal_objective - info.dual_objective), sz / (tau_ * tau_));
    info.mu = mu;
    info.tau = tau_;
    info.kappa = kappa_;
    sol.iterations = iter;
    sol.residuals = {info.primal_residual, info.dual_residual, info.gap};
    sol.gap_history.push_back(sz + tau_ * kappa_);

    if (info.primal_residual <= set_.tol_feas && info.dual_residual <= set_.tol_feas &&
        info.gap <= set_.tol_gap * (1.0 + std::abs(info.primal_objective))) {
      const Vector xh = x_ / tau_;
      bool slack_ok = true;
      for (std::size_t b = 0; b < nb_ && slack_ok; ++b) {
        slack_ok = min_eigenvalue(f_.block_value(b, xh)) >= -set_.tol_feas;
      }
      if (slack_ok) {
        if (set_.log) set_.log(info);
        return finish(Status::Optimal, true);
      }
    }
    // Breakdown with tau -> 0 still identifies the infeasible side.
    auto breakdown = [&]() {
      if (tau_ < 1e-6 * kappa_) {
        if (-f0z > 0.0 && -f0z >= -cx) return finish(Status::PrimalInfeasible, false);
        if (-cx > 0.0) return finish(Status::DualInfeasible, false);
      }
      return finish(Status::NumericalFailure, true);
    };
    if (tau_ < kappa_) {
      const bool ratio = tau_ / kappa_ < 1e-10;
      if (-f0z > 0.0 && (aZ.norm() / (-f0z) <= set_.tol_feas || ratio)) {
        if (set_.log) set_.log(info);
        return finish(Status::PrimalInfeasible, false);
      }
      if (-cx > 0.0) {
        double worst = 0.0;
        for (std::size_t b = 0; b < nb_; ++b) worst = std::min(worst, min_eigenvalue(Ax[b]));
        if (-worst / (-cx) <= set_.tol_feas || ratio) {
          if (set_.log) set_.log(info);
          return finish(Status::DualInfeasible, false);
        }
      }
      if (ratio) {
        if (set_.log) set_.log(info);
        return finish(Status::PrimalInfeasible, false);
      }
    }
    if (iter >= set_.max_iters) {
      if (set_.log) set_.log(info);
      return finish(Status::MaxIterations, true);
    }
    if (!factor()) {
      if (set_.log) set_.log(info);
      return breakdown();
    }

    // Predictor.
    std::vector<Matrix> ds(nb_);
    for (std::size_t b = 0; b < nb_; ++b) ds[b] = -Matrix(sc_[b].lambda.array().square().matrix().asDiagonal());
    const Direction pred = direction(1.0, ds, -tau_ * kappa_);
    const double alpha_a = std::min(1.0, step_to_boundary(pred));
    const double sigma = std::pow(std::max(0.0, 1.0 - alpha_a), 3);

    // Corrector.
    for (std::size_t b = 0; b < nb_; ++b) {
      const Matrix dst = sc_[b].Rinv * pred.dS[b] * sc_[b].Rinv.transpose();
      const Matrix dzt = sc_[b].R.transpose() * pred.dZ[b] * sc_[b].R;
      ds[b] += -0.5 * (dst * dzt + dzt * dst) +
               sigma * mu * Matrix::Identity(f_.blocks[b].dim, f_.blocks[b].dim);
    }
    const double dk = -tau_ * kappa_ - pred.dtau * pred.dkappa + sigma * mu;
    const Direction corr = direction(1.0 - sigma, ds, dk);
    const double alpha = std::min(1.0, set_.step_fraction * step_to_boundary(corr));

    bool finite = corr.dx.allFinite() && std::isfinite(corr.dtau) && std::isfinite(alpha);
    for (std::size_t b = 0; b < nb_ && finite; ++b) finite = corr.dZ[b].allFinite() && corr.dS[b].allFinite();
    if (!finite) {
      if (set_.log) set_.log(info);
      return breakdown();
    }
    info.step_predictor = alpha_a;
    info.step = alpha;
    if (set_.log) set_.log(info);

    stalled = alpha < 1e-10 ? stalled + 1 : 0;
    if (stalled >= 5) return breakdown();

    x_ += alpha * corr.dx;
    for (std::size_t b = 0; b < nb_; ++b) {
      S_[b] = symmetrize(S_[b] + alpha * corr.dS[b]);
      Z_[b] = symmetrize(Z_[b] + alpha * corr.dZ[b]);
    }
    tau_ += alpha * corr.dtau;
    kappa_ += alpha * corr.dkappa;
  }
}

}  // namespace

const char* to_string(Status status) {
  switch (status) {
    case Status::Optimal: return "Optimal";
    case Status::PrimalInfeasible: return "PrimalInfeasible";
    case Status::DualInfeasible: return "DualInfeasible";
    case Status::MaxIterations: return "MaxIterations";
    case Status::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

std::string format(const IterationInfo& info) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "%3d pobj=% .9e dobj=% .9e pres=%.2e dres=%.2e gap=%.2e tau=%.2e kappa=%.2e "
                "step=%.3f/%.3f",
                info.iteration, info.primal_objective, info.dual_objective, info.primal_residual,
                info.dual_residual, info.gap, info.tau, info.kappa, info.step_predictor, info.step);
  return buf;
}

void SolverSettings::validate() const {
  if (!(tol_gap > 0.0) || !(tol_feas > 0.0)) throw Error(ErrorKind::Domain, "solver tolerances must be positive");
  if (max_iters <= 0) throw Error(ErrorKind::Domain, "max_iters must be positive");
  if (!(step_fraction > 0.0 && step_fraction < 1.0)) {
    throw Error(ErrorKind::Domain, "step_fraction must lie in (0,1)");
  }
}

SdpSolution solve(const lmi::SdpStandardForm& form, const SolverSettings& settings) {
  settings.validate();
  const int m = form.num_coords();
  if (m == 0) throw Error(ErrorKind::Validation, "SDP has no decision variables");
  for (const auto& blk : form.blocks) {
    if (blk.F0.rows() != blk.dim || blk.F0.cols() != blk.dim) {
      throw Error(ErrorKind::Dimension, "block '" + blk.name + "': F0 is not " + std::to_string(blk.dim) + "x" +
                                            std::to_string(blk.dim));
    }
    if (static_cast<int>(blk.F.size()) != m) {
      throw Error(ErrorKind::Dimension, "block '" + blk.name + "' has " + std::to_string(blk.F.size()) +
                                            " coefficient matrices, expected " + std::to_string(m));
    }
    for (const auto& F : blk.F) {
      if (F.rows() != blk.dim || F.cols() != blk.dim) {
        throw Error(ErrorKind::Dimension, "block '" + blk.name + "' has a non-conforming coefficient");
      }
    }
  }
  Solver solver(form, settings);
  return solver.run();
}

SolutionReport check_solution(const lmi::SdpStandardForm& form, const Vector& x, double tol) {
  SolutionReport report;
  if (form.blocks.empty() && form.c.size() == 0) return report;
  if (x.size() != form.num_coords()) {
    throw Error(ErrorKind::Dimension, "solution has " + std::to_string(x.size()) + " entries, expected " +
                                          std::to_string(form.num_coords()));
  }
  report.objective = form.c.dot(x);
  for (std::size_t b = 0; b < form.blocks.size(); ++b) {
    const double e = min_eigenvalue(form.block_value(b, x));
    report.slacks.push_back(e);
    if (e < -tol) report.violations.push_back({form.blocks[b].name, e});
  }
  return report;
}

}  // namespace hinfdae::sdp
