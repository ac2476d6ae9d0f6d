#include "hinfdae/model.hpp"

#include <cmath>
#include <complex>
#include <sstream>

#include "hinfdae/error.hpp"

namespace hinfdae {

NonlinearMap::NonlinearMap(std::vector<Expression> exprs, int n, int m)
    : exprs_(std::move(exprs)), n_(n), m_(m) {}

NonlinearMap NonlinearMap::zero(int out_dim, int n, int m) {
  return NonlinearMap(std::vector<Expression>(static_cast<std::size_t>(out_dim),
                                              Expression::constant(0.0)),
                      n, m);
}

Vector NonlinearMap::operator()(const Vector& x, const Vector& u, double t) const {
  Vector out(out_dim());
  const std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
  const std::span<const double> us(u.data(), static_cast<std::size_t>(u.size()));
  for (int i = 0; i < out_dim(); ++i) out(i) = exprs_[static_cast<std::size_t>(i)].evaluate(xs, us, t);
  return out;
}

Vector NonlinearMap::of_time(double t) const {
  Vector out(out_dim());
  for (int i = 0; i < out_dim(); ++i) out(i) = exprs_[static_cast<std::size_t>(i)].evaluate({}, {}, t);
  return out;
}

bool NonlinearMap::is_zero() const {
  for (const auto& e : exprs_) {
    if (!e.is_zero_constant()) return false;
  }
  return true;
}

std::vector<std::string> NonlinearMap::texts() const {
  std::vector<std::string> out;
  out.reserve(exprs_.size());
  for (const auto& e : exprs_) out.push_back(e.to_string());
  return out;
}

NonlinearMap parse_nonlinearity(const std::vector<std::string>& texts, int n, int m) {
  std::vector<Expression> exprs;
  exprs.reserve(texts.size());
  for (const auto& text : texts) exprs.push_back(Expression::parse(text, n, m));
  return NonlinearMap(std::move(exprs), n, m);
}

void DescriptorPlant::check_dimensions() const {
  const Eigen::Index nn = E.rows();
  if (nn == 0) throw Error(ErrorKind::Dimension, "E must be a non-empty square matrix");
  require_shape(E, nn, nn, "E");
  require_shape(A, nn, nn, "A");
  if (B.rows() != nn) require_shape(B, nn, B.cols(), "B");
  const Eigen::Index pp = C.rows();
  if (pp == 0) throw Error(ErrorKind::Dimension, "C must have at least one row (p >= 1)");
  require_shape(C, pp, nn, "C");
  require_shape(D, pp, B.cols(), "D");
  if (H.rows() == 0) throw Error(ErrorKind::Dimension, "H must have at least one row");
  require_shape(H, H.rows(), nn, "H");
  const Eigen::Index kk = N.rows();
  require_shape(N, kk, nn, "N");
  require_shape(M1, nn, kk, "M1");
  require_shape(M2, pp, kk, "M2");
  if (phi.out_dim() != nn) {
    throw Error(ErrorKind::Dimension, "phi must have " + std::to_string(nn) + " components");
  }
  if (psi.out_dim() != pp) {
    throw Error(ErrorKind::Dimension, "psi must have " + std::to_string(pp) + " components");
  }
  if (!(gamma1 >= 0.0) || !(gamma2 >= 0.0)) {
    throw Error(ErrorKind::Domain, "Lipschitz constants gamma1, gamma2 must be nonnegative");
  }
  const Vector zero = Vector::Zero(nn);
  if (phi(zero, u_nominal).cwiseAbs().maxCoeff() > 1e-12) {
    throw Error(ErrorKind::Validation, "phi(0, u*) must vanish");
  }
  if (psi(zero, u_nominal).cwiseAbs().maxCoeff() > 1e-12) {
    throw Error(ErrorKind::Validation, "psi(0, u*) must vanish");
  }
}

const char* to_string(ValidationReport::Flag flag) {
  switch (flag) {
    case ValidationReport::Flag::False: return "false";
    case ValidationReport::Flag::True: return "true";
    case ValidationReport::Flag::NotEvaluated: return "not evaluated";
  }
  return "?";
}

namespace {

// Degree of det(sE - A) from n+1 samples at Chebyshev nodes. Returns -1 for
// the identically zero polynomial.
int determinant_degree(const Matrix& E, const Matrix& A, double scale, bool& regular) {
  const int n = static_cast<int>(E.rows());
  const int npts = n + 1;
  Vector nodes(npts), dets(npts);
  double magnitude = 0.0;
  for (int i = 0; i < npts; ++i) {
    const double tau = std::cos((2.0 * i + 1.0) * M_PI / (2.0 * npts));
    const double s = 10.0 * scale * tau;
    nodes(i) = tau;
    dets(i) = (s * E - A).determinant();
    magnitude = std::max(magnitude, std::pow(std::abs(s) * spectral_norm(E) + spectral_norm(A), n));
  }
  const double det_max = dets.cwiseAbs().maxCoeff();
  regular = det_max > 1e-12 * magnitude;
  if (!regular) return -1;

  // Monomial coefficients in tau; Chebyshev nodes keep the Vandermonde system
  // well conditioned for the small n handled here.
  Matrix vander(npts, npts);
  for (int i = 0; i < npts; ++i) {
    for (int j = 0; j < npts; ++j) vander(i, j) = std::pow(nodes(i), j);
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(vander);
  if (qr.rank() < npts) {
    throw Error(ErrorKind::Validation, "regularity undetermined: singular interpolation");
  }
  const Vector coeffs = qr.solve(dets);
  const double cmax = coeffs.cwiseAbs().maxCoeff();
  for (int j = n; j >= 0; --j) {
    if (std::abs(coeffs(j)) > 1e-8 * cmax) return j;
  }
  return -1;
}

}  // namespace

ValidationReport validate_plant(const DescriptorPlant& plant) {
  plant.check_dimensions();
  ValidationReport report;
  const Matrix& E = plant.E;
  const Matrix& A = plant.A;
  const int n = plant.n();

  report.rank_E = numerical_rank(E);
  if (report.rank_E == 0) {
    throw Error(ErrorKind::Validation, "rank(E)=0 violates 0<rank(E)");
  }

  const double normA = spectral_norm(A);
  const double normE = spectral_norm(E);
  const double scale = normA > 0.0 ? normA / normE : 1.0;
  const int degree = determinant_degree(E, A, scale, report.regular);
  if (!report.regular) {
    report.messages.push_back("pencil (E, A) is singular: det(sE - A) vanishes identically");
    return report;
  }

  report.impulse_free = degree == report.rank_E ? ValidationReport::Flag::True
                                                 : ValidationReport::Flag::False;
  if (report.impulse_free == ValidationReport::Flag::False) {
    std::ostringstream msg;
    msg << "deg det(sE - A) = " << degree << " differs from rank(E) = " << report.rank_E;
    report.messages.push_back(msg.str());
  }

  // Finite generalized eigenvalues solve A v = s E v.
  Eigen::GeneralizedEigenSolver<Matrix> ges(A, E, false);
  const auto alphas = ges.alphas();
  const auto betas = ges.betas();
  const double limit = 1e10 * (scale + 1.0);
  bool observable = true;
  for (Eigen::Index i = 0; i < alphas.size(); ++i) {
    if (std::abs(betas(i)) == 0.0) continue;
    const std::complex<double> s = alphas(i) / betas(i);
    if (!(std::abs(s) < limit)) continue;
    report.finite_eigenvalues.emplace_back(s.real(), s.imag());
    Eigen::MatrixXcd stacked(n + plant.p(), n);
    stacked.topRows(n) = s * E.cast<std::complex<double>>() - A.cast<std::complex<double>>();
    stacked.bottomRows(plant.p()) = plant.C.cast<std::complex<double>>();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(stacked);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (Eigen::Index j = 0; j < sv.size(); ++j) {
      if (sv(j) > kRankTolerance * sv(0)) ++rank;
    }
    if (rank < n) {
      observable = false;
      std::ostringstream msg;
      msg << "rank [sE - A; C] = " << rank << " < n at s = " << s.real()
          << (s.imag() >= 0 ? "+" : "") << s.imag() << "i";
      report.messages.push_back(msg.str());
    }
  }
  report.observable = observable ? ValidationReport::Flag::True : ValidationReport::Flag::False;
  return report;
}

Matrix orth_complement(const Matrix& E) {
  const int n = static_cast<int>(E.rows());
  const int s = numerical_rank(E);
  if (s == n) return Matrix(0, n);
  Eigen::JacobiSVD<Matrix> svd(E, Eigen::ComputeFullU);
  Matrix perp = svd.matrixU().rightCols(n - s).transpose();
  // Fix the sign of each row so that its largest entry is positive.
  for (int i = 0; i < perp.rows(); ++i) {
    Eigen::Index idx = 0;
    perp.row(i).cwiseAbs().maxCoeff(&idx);
    if (perp(i, idx) < 0.0) perp.row(i) *= -1.0;
  }
  return perp;
}

double estimate_lipschitz(const NonlinearMap& map, const std::vector<Interval>& box, int grid) {
  const int n = static_cast<int>(box.size());
  if (n != map.state_dim()) {
    throw Error(ErrorKind::Dimension, "box dimension must equal the state dimension");
  }
  if (grid < 2) throw Error(ErrorKind::Domain, "grid must have at least 2 points per axis");
  for (const auto& iv : box) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || iv.hi < iv.lo) {
      throw Error(ErrorKind::Domain, "box intervals must be finite with lo <= hi");
    }
  }
  const Vector u = Vector::Zero(map.input_dim());
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  double best = 0.0;
  Vector x(n);
  Matrix jac(map.out_dim(), n);
  for (;;) {
    for (int j = 0; j < n; ++j) {
      const auto& iv = box[static_cast<std::size_t>(j)];
      x(j) = iv.lo + (iv.hi - iv.lo) * idx[static_cast<std::size_t>(j)] / (grid - 1);
    }
    for (int j = 0; j < n; ++j) {
      const double h = 1e-6 * std::max(1.0, std::abs(x(j)));
      Vector xp = x, xm = x;
      xp(j) += h;
      xm(j) -= h;
      jac.col(j) = (map(xp, u) - map(xm, u)) / (2.0 * h);
    }
    if (!jac.allFinite()) {
      std::ostringstream msg;
      msg << "non-finite Jacobian at grid point (" << x.transpose() << ")";
      throw Error(ErrorKind::Numerical, msg.str());
    }
    if (jac.size() > 0) best = std::max(best, spectral_norm(jac));

    int axis = 0;
    while (axis < n && ++idx[static_cast<std::size_t>(axis)] == grid) {
      idx[static_cast<std::size_t>(axis)] = 0;
      ++axis;
    }
    if (axis == n) break;
  }
  return best;
}

DescriptorPlant example_plant() {
  DescriptorPlant p;
  p.E.resize(2, 2);
  p.E << 2, 3, 4, 6;
  p.A.resize(2, 2);
  p.A << 1, 12, -6, -15;
  p.B.resize(2, 1);
  p.B << 1, 1;
  p.C.resize(1, 2);
  p.C << 1, 0;
  p.D.resize(1, 1);
  p.D << 0.2;
  p.H = 0.25 * Matrix::Identity(2, 2);
  p.M1.resize(2, 2);
  p.M1 << 0.1, 0.1, -0.2, 0.15;
  p.M2.resize(1, 2);
  p.M2 << -0.25, 0.25;
  p.N = 0.1 * Matrix::Identity(2, 2);
  p.phi = parse_nonlinearity({"0.5*sin(x2)", "0.5*sin(x1)"}, 2, 0);
  p.psi = parse_nonlinearity({"0"}, 2, 0);
  p.gamma1 = 0.5;
  p.gamma2 = 0.0;
  p.u_nominal = Vector::Zero(0);
  return p;
}

}  // namespace hinfdae
