#include "hinfdae/synth.hpp"

#include <cmath>
#include <sstream>

#include "hinfdae/error.hpp"

namespace hinfdae::synth {
namespace {

using lmi::AffineExpr;
using lmi::Cell;
using lmi::Grid;

Matrix eye(int n) { return Matrix::Identity(n, n); }
Matrix zeros(int r, int c) { return Matrix::Zero(r, c); }
AffineExpr sI(const AffineExpr& s, int n) { return AffineExpr::scaled(s, eye(n)); }

// Decision quantities entering Xi1, as affine expressions (variables or constants).
struct Xi1Parts {
  AffineExpr G1, G2, P1, P2, CF, DF, P1tE1, P1tE2;
  AffineExpr eps1, eps2, mu2;
  AffineExpr lipschitz;  // alpha2, or gamma for the static form
  bool static_form = false;
};

AffineExpr assemble_xi1(const DescriptorPlant& pl, const Xi1Parts& v) {
  const int n = pl.n(), p = pl.p(), q = pl.q(), r = pl.r(), k = pl.k();
  const Cell star = Cell::star();
  const AffineExpr P2t = v.P2.transpose();

  const AffineExpr L1 = v.G1 + v.G1.transpose();
  const AffineExpr L2 = P2t * pl.A + Matrix(pl.A.transpose()) * v.P2 +
                        AffineExpr::scaled(v.eps1 + v.eps2, pl.N.transpose() * pl.N);
  const AffineExpr L3 = AffineExpr(Matrix(pl.H.transpose())) - Matrix(pl.C.transpose()) * v.DF.transpose();

  Matrix upper = zeros(n, 2 * n), lower = zeros(n, 2 * n);
  upper.leftCols(n) = eye(n);
  lower.rightCols(n) = eye(n);
  AffineExpr c13, c23, c33;
  if (v.static_form) {
    c13 = AffineExpr::scaled(v.lipschitz, upper);
    c23 = AffineExpr::scaled(v.lipschitz, lower);
    c33 = AffineExpr(Matrix(-eye(2 * n)));
  } else {
    c13 = upper;
    c23 = lower;
    c33 = sI(-1.0 * v.lipschitz, 2 * n);
  }

  const AffineExpr pi1 = lmi::block({{L1, v.G2 * pl.C, c13}, {star, L2, c23}, {star, star, c33}});
  const AffineExpr pi2 = lmi::block({{zeros(n, k), v.G2 * pl.M2, -v.CF.transpose()},
                                     {zeros(n, k), P2t * pl.M1, L3},
                                     {zeros(2 * n, k), zeros(2 * n, k), zeros(2 * n, r)}});
  const AffineExpr pi3 = lmi::block({{zeros(n, n), v.G2, v.P1tE1, v.P1tE2},
                                     {P2t, zeros(n, p), zeros(n, n), zeros(n, p)},
                                     {zeros(2 * n, n), zeros(2 * n, p), zeros(2 * n, n), zeros(2 * n, p)}});
  const AffineExpr pi4 = lmi::block({{v.G2 * pl.D, zeros(n, r)},
                                     {P2t * pl.B, zeros(n, r)},
                                     {zeros(2 * n, q), zeros(2 * n, r)}});
  const AffineExpr pi5 =
      lmi::block_diag({sI(-1.0 * v.eps1, k), sI(-1.0 * v.eps1, k), AffineExpr(Matrix(-eye(r) / 3.0))});
  const AffineExpr pi6 = lmi::block({{zeros(k, k), zeros(k, k)},
                                     {zeros(k, k), zeros(k, k)},
                                     {zeros(r, k), -(v.DF * pl.M2)}});
  const AffineExpr pi7 = lmi::block_diag({sI((-1.0 / 3.0) * v.eps2, k), sI((-1.0 / 3.0) * v.eps2, k)});
  const AffineExpr pi8 = AffineExpr(Matrix(-eye(2 * n + 2 * p)));
  const AffineExpr pi9 = lmi::block({{sI(-1.0 * v.mu2, q), -(Matrix(pl.D.transpose()) * v.DF.transpose())},
                                     {star, AffineExpr(Matrix(-eye(r) / 3.0))}});

  const Cell z = Cell::zero();
  return lmi::block({{pi1, pi2, z, pi3, pi4},
                     {star, pi5, pi6, z, z},
                     {star, star, pi7, z, z},
                     {star, star, star, pi8, z},
                     {star, star, star, star, pi9}});
}

AffineExpr xi2(const DescriptorPlant& pl, const AffineExpr& eps2, const AffineExpr& DF) {
  const int r = pl.r(), k = pl.k();
  return lmi::block({{sI(eps2, r), zeros(r, k), -(DF * pl.M2)},
                     {Cell::star(), eye(k), zeros(k, k)},
                     {Cell::star(), Cell::star(), eye(k)}});
}

AffineExpr xi3(const DescriptorPlant& pl, const AffineExpr& alpha1, const AffineExpr& E3,
               const AffineExpr& DF) {
  const int r = pl.r(), p = pl.p();
  return lmi::block({{sI(alpha1, r), E3, DF},
                     {Cell::star(), sI(alpha1, p), zeros(p, p)},
                     {Cell::star(), Cell::star(), sI(alpha1, p)}});
}

AffineExpr xi4(const AffineExpr& P1, int n) {
  return lmi::block({{eye(n), AffineExpr(eye(n)) - P1.transpose()}, {Cell::star(), eye(n)}});
}

// P = X E + E_perp^T Y
AffineExpr descriptor_p(const lmi::Variable& X, const lmi::Variable* Y, const Matrix& E, const Matrix& Eperp) {
  AffineExpr P = AffineExpr(X) * E;
  if (Y != nullptr) P += Matrix(Eperp.transpose()) * AffineExpr(*Y);
  return P;
}

struct PVars {
  lmi::Variable X1, X2, Y1, Y2;
  bool has_y = false;
  AffineExpr P1, P2;
};

PVars declare_p(lmi::LmiProgram& prog, const DescriptorPlant& pl) {
  const int n = pl.n();
  const Matrix Eperp = orth_complement(pl.E);
  PVars v;
  v.X1 = prog.positive_definite("X1", n);
  v.X2 = prog.positive_definite("X2", n);
  v.has_y = Eperp.rows() > 0;
  if (v.has_y) {
    v.Y1 = prog.matrix("Y1", static_cast<int>(Eperp.rows()), n);
    v.Y2 = prog.matrix("Y2", static_cast<int>(Eperp.rows()), n);
  }
  v.P1 = descriptor_p(v.X1, v.has_y ? &v.Y1 : nullptr, pl.E, Eperp);
  v.P2 = descriptor_p(v.X2, v.has_y ? &v.Y2 : nullptr, pl.E, Eperp);
  return v;
}

void require_valid(const DescriptorPlant& plant) {
  plant.check_dimensions();
  const ValidationReport rep = validate_plant(plant);
  if (!rep.ok()) {
    std::string msg = "plant failed validation";
    for (const auto& m : rep.messages) msg += "; " + m;
    throw Error(ErrorKind::Validation, msg);
  }
}

// Solves M^T X = G with LU and iterative refinement.
Matrix solve_transposed(const Matrix& M, const Matrix& G) {
  const Matrix Mt = M.transpose();
  Eigen::PartialPivLU<Matrix> lu(Mt);
  Matrix X = lu.solve(G);
  for (int i = 0; i < 3; ++i) X += lu.solve(Matrix(G - Mt * X));
  return X;
}

double condition_number(const Matrix& M) {
  Eigen::JacobiSVD<Matrix> svd(M);
  const Vector& s = svd.singularValues();
  const double lo = s(s.size() - 1);
  return lo > 0.0 ? s(0) / lo : std::numeric_limits<double>::infinity();
}

Matrix value(const lmi::SdpStandardForm& form, const lmi::Assignment& a, const lmi::LmiProgram& prog,
             const std::string& name) {
  const lmi::Variable* v = prog.find(name);
  (void)form;
  return a.at(v->id);
}

sdp::SdpSolution run_solver(const lmi::LmiProgram& prog, const SynthesisSettings& settings,
                            const std::string& what, lmi::SdpStandardForm& form) {
  form = lmi::canonicalize(prog);
  sdp::SdpSolution sol = sdp::solve(form, settings.solver);
  switch (sol.status) {
    case sdp::Status::Optimal: break;
    case sdp::Status::PrimalInfeasible:
      throw InfeasibleError("no filter exists at this mu for the " + what +
                                " structure (solver certificate: PrimalInfeasible)",
                            sol);
    case sdp::Status::DualInfeasible:
      throw Error(ErrorKind::Numerical, what + " synthesis: objective unbounded (DualInfeasible)");
    default:
      throw Error(ErrorKind::Numerical, what + " synthesis: solver stopped with " +
                                            std::string(sdp::to_string(sol.status)) + " after " +
                                            std::to_string(sol.iterations) + " iterations");
  }
  return sol;
}

SolverSummary summarize(const sdp::SdpSolution& sol) {
  return {sol.status, sol.iterations, sol.objective, sol.residuals, sol.slacks};
}

void fill_p(SynthesisResult& res, const DescriptorPlant& pl, const lmi::SdpStandardForm& form,
            const lmi::Assignment& a, const lmi::LmiProgram& prog) {
  const int n = pl.n();
  const Matrix Eperp = orth_complement(pl.E);
  res.X1 = value(form, a, prog, "X1");
  res.X2 = value(form, a, prog, "X2");
  res.Y1 = Eperp.rows() > 0 ? value(form, a, prog, "Y1") : zeros(0, n);
  res.Y2 = Eperp.rows() > 0 ? value(form, a, prog, "Y2") : zeros(0, n);
  res.P1 = res.X1 * pl.E + Eperp.transpose() * res.Y1;
  res.P2 = res.X2 * pl.E + Eperp.transpose() * res.Y2;
  res.p1_condition = condition_number(res.P1);
}

void check_invariants(const DescriptorPlant& pl, const SynthesisResult& res, double max_condition) {
  if (!(res.p1_condition <= max_condition)) {
    std::ostringstream os;
    os << "P1 condition number " << res.p1_condition << " exceeds " << max_condition;
    throw Error(ErrorKind::Numerical, os.str());
  }
  for (const auto* P : {&res.P1, &res.P2}) {
    const Matrix EtP = pl.E.transpose() * *P;
    const double scale = std::max(1.0, EtP.norm());
    if ((EtP - EtP.transpose()).norm() > 1e-8 * scale || min_eigenvalue(EtP) < -1e-8 * scale) {
      throw Error(ErrorKind::Numerical, "recovered E^T P is not symmetric positive semidefinite");
    }
  }
  if (spectral_norm(eye(pl.n()) - res.P1) >= 1.0) {
    throw Error(ErrorKind::Numerical, "recovered P1 violates sigma_max(I - P1) < 1");
  }
}

}  // namespace

const char* to_string(StructureKind kind) {
  switch (kind) {
    case StructureKind::GeneralDynamic: return "general";
    case StructureKind::Dynamic: return "dynamic";
    case StructureKind::StaticGain: return "static";
  }
  return "unknown";
}

FilterStructure FilterStructure::dynamic() { return {}; }

FilterStructure FilterStructure::static_gain() {
  FilterStructure s;
  s.kind = StructureKind::StaticGain;
  return s;
}

FilterStructure FilterStructure::general(Matrix E1, Matrix E2, E3Mode mode, Matrix E3) {
  FilterStructure s;
  s.kind = StructureKind::GeneralDynamic;
  s.E1 = std::move(E1);
  s.E2 = std::move(E2);
  s.e3_mode = mode;
  s.E3 = std::move(E3);
  return s;
}

FilterStructure FilterStructure::resolved(const DescriptorPlant& plant) const {
  const int n = plant.n(), p = plant.p(), r = plant.r();
  FilterStructure s = *this;
  if (kind != StructureKind::GeneralDynamic) {
    s.E1 = eye(n);
    s.E2 = zeros(n, p);
    s.e3_mode = E3Mode::Zero;
  }
  require_shape(s.E1, n, n, "E1");
  require_shape(s.E2, n, p, "E2");
  if (s.e3_mode == E3Mode::Fixed) {
    require_shape(s.E3, r, p, "E3");
  } else {
    s.E3 = zeros(r, p);
  }
  return s;
}

void FilterRealization::check(const DescriptorPlant& plant) const {
  const int n = plant.n(), p = plant.p(), r = plant.r();
  require_shape(AF, n, n, "A_F");
  require_shape(BF, n, p, "B_F");
  require_shape(CF, r, n, "C_F");
  require_shape(DF, r, p, "D_F");
  require_shape(E1, n, n, "E1");
  require_shape(E2, n, p, "E2");
  require_shape(E3, r, p, "E3");
  require_shape(E, n, n, "E");
}

FilterRealization FilterRealization::zero(const DescriptorPlant& plant) {
  const int n = plant.n(), p = plant.p(), r = plant.r();
  return {zeros(n, n), zeros(n, p), zeros(r, n), zeros(r, p), zeros(n, n), zeros(n, p), zeros(r, p), plant.E};
}

lmi::LmiProgram build_program(const DescriptorPlant& plant, double mu, const FilterStructure& structure,
                              const ModeSpec& mode, const SynthesisSettings& settings) {
  if (structure.kind == StructureKind::StaticGain) {
    throw Error(ErrorKind::Usage, "static-gain structure is built by build_static_program / synthesize_static");
  }
  require_valid(plant);
  if (mode.mode == Mode::MaxGamma && !(mu > 0.0)) throw Error(ErrorKind::Domain, "mu must be positive");
  if (mode.mode == Mode::MinMu && (!(mode.alpha2 > 0.0) || mode.alpha1 < 0.0)) {
    throw Error(ErrorKind::Domain, "min-mu mode needs alpha1 >= 0 and alpha2 > 0");
  }
  const FilterStructure st = structure.resolved(plant);
  const int n = plant.n(), p = plant.p(), r = plant.r();

  lmi::LmiProgram prog;
  prog.set_strict_margin(settings.strict_margin);
  const auto eps1 = prog.scalar("eps1");
  const auto eps2 = prog.scalar("eps2");
  AffineExpr alpha1, alpha2, mu2;
  lmi::Variable zeta;
  if (mode.mode == Mode::MaxGamma) {
    const auto a1 = prog.scalar("alpha1");
    const auto a2 = prog.scalar("alpha2");
    alpha1 = a1;
    alpha2 = a2;
    mu2 = AffineExpr(Matrix::Constant(1, 1, mu * mu));
    prog.add_objective_term(a1, settings.c1);
    prog.add_objective_term(a2, settings.c2);
  } else {
    zeta = prog.scalar("zeta");
    alpha1 = AffineExpr(Matrix::Constant(1, 1, mode.alpha1));
    alpha2 = AffineExpr(Matrix::Constant(1, 1, mode.alpha2));
    mu2 = zeta;
    prog.add_objective_term(zeta, 1.0);
  }
  const auto CF = prog.matrix("C_F", r, n);
  const auto DF = prog.matrix("D_F", r, p);
  AffineExpr E3 = zeros(r, p);
  if (st.e3_mode == E3Mode::Variable) E3 = prog.matrix("E3", r, p);
  if (st.e3_mode == E3Mode::Fixed) E3 = st.E3;
  const auto G1 = prog.matrix("G1", n, n);
  const auto G2 = prog.matrix("G2", n, p);
  const PVars pv = declare_p(prog, plant);

  Xi1Parts parts;
  parts.G1 = G1;
  parts.G2 = G2;
  parts.P1 = pv.P1;
  parts.P2 = pv.P2;
  parts.CF = CF;
  parts.DF = DF;
  parts.P1tE1 = pv.P1.transpose() * st.E1;
  parts.P1tE2 = pv.P1.transpose() * st.E2;
  parts.eps1 = eps1;
  parts.eps2 = eps2;
  parts.mu2 = mu2;
  parts.lipschitz = alpha2;

  prog.add_constraint("Xi1", assemble_xi1(plant, parts), lmi::Sense::NegativeDefinite);
  prog.add_constraint("Xi2", xi2(plant, eps2, DF), lmi::Sense::PositiveDefinite);
  prog.add_constraint("Xi3", xi3(plant, alpha1, E3, DF), lmi::Sense::PositiveDefinite);
  prog.add_constraint("Xi4", xi4(pv.P1, n), lmi::Sense::PositiveDefinite);
  return prog;
}

lmi::LmiProgram build_static_program(const DescriptorPlant& plant, double mu, const SynthesisSettings& settings) {
  if (plant.p() == 0) throw Error(ErrorKind::Dimension, "static-gain filter needs at least one output (p = 0)");
  require_valid(plant);
  if (!(mu > 0.0)) throw Error(ErrorKind::Domain, "mu must be positive");
  const int n = plant.n(), p = plant.p(), r = plant.r();
  if (plant.H.cols() != n) throw Error(ErrorKind::Dimension, "H must have n columns");

  lmi::LmiProgram prog;
  prog.set_strict_margin(settings.strict_margin);
  const auto eps1 = prog.scalar("eps1");
  const auto eps2 = prog.scalar("eps2");
  const auto gamma = prog.scalar("gamma");
  prog.add_objective_term(gamma, -1.0);
  const auto G = prog.matrix("G", n, p);
  const PVars pv = declare_p(prog, plant);

  Xi1Parts parts;
  parts.P1 = pv.P1;
  parts.P2 = pv.P2;
  parts.G1 = pv.P1.transpose() * plant.A - AffineExpr(G) * plant.C;
  parts.G2 = G;
  parts.CF = AffineExpr(plant.H);
  parts.DF = AffineExpr(zeros(r, p));
  parts.P1tE1 = pv.P1.transpose();
  parts.P1tE2 = -AffineExpr(G);
  parts.eps1 = eps1;
  parts.eps2 = eps2;
  parts.mu2 = AffineExpr(Matrix::Constant(1, 1, mu * mu));
  parts.lipschitz = gamma;
  parts.static_form = true;

  prog.add_constraint("Xi1", assemble_xi1(plant, parts), lmi::Sense::NegativeDefinite);
  prog.add_constraint("Xi4", xi4(pv.P1, n), lmi::Sense::PositiveDefinite);
  return prog;
}

SynthesisResult synthesize(const DescriptorPlant& plant, double mu, const FilterStructure& structure,
                           const SynthesisSettings& settings, const ModeSpec& mode) {
  if (structure.kind == StructureKind::StaticGain) return synthesize_static(plant, mu, settings);
  ModeSpec m = mode;
  if (m.mode == Mode::MinMu && !(m.alpha2 > 0.0)) {
    const SynthesisResult base = synthesize(plant, mu, structure, settings, ModeSpec::max_gamma());
    m.alpha1 = base.alpha1;
    m.alpha2 = base.alpha2;
  }
  const lmi::LmiProgram prog = build_program(plant, mu, structure, m, settings);
  const FilterStructure st = structure.resolved(plant);
  lmi::SdpStandardForm form;
  const sdp::SdpSolution sol = run_solver(prog, settings, to_string(structure.kind), form);
  const lmi::Assignment a = form.to_assignment(sol.x);
  auto get = [&](const std::string& name) { return value(form, a, prog, name); };

  SynthesisResult res;
  res.structure = structure.kind;
  res.mode = m.mode;
  res.solver = summarize(sol);
  res.eps1 = get("eps1")(0, 0);
  res.eps2 = get("eps2")(0, 0);
  if (m.mode == Mode::MaxGamma) {
    res.alpha1 = get("alpha1")(0, 0);
    res.alpha2 = get("alpha2")(0, 0);
    res.mu = mu;
  } else {
    res.alpha1 = m.alpha1;
    res.alpha2 = m.alpha2;
    res.mu = std::sqrt(std::max(0.0, get("zeta")(0, 0)));
  }
  res.gamma_star = recover_gamma(res.alpha1, res.alpha2);
  fill_p(res, plant, form, a, prog);

  FilterRealization& f = res.filter;
  f.E = plant.E;
  f.E1 = st.E1;
  f.E2 = st.E2;
  f.E3 = st.e3_mode == E3Mode::Variable ? get("E3") : st.E3;
  f.CF = get("C_F");
  f.DF = get("D_F");
  f.AF = solve_transposed(res.P1, get("G1"));
  f.BF = solve_transposed(res.P1, get("G2"));
  check_invariants(plant, res, settings.max_condition);
  return res;
}

SynthesisResult synthesize_static(const DescriptorPlant& plant, double mu, const SynthesisSettings& settings) {
  const lmi::LmiProgram prog = build_static_program(plant, mu, settings);
  lmi::SdpStandardForm form;
  const sdp::SdpSolution sol = run_solver(prog, settings, "static", form);
  const lmi::Assignment a = form.to_assignment(sol.x);
  auto get = [&](const std::string& name) { return value(form, a, prog, name); };

  SynthesisResult res;
  res.structure = StructureKind::StaticGain;
  res.mode = Mode::MaxGamma;
  res.mu = mu;
  res.solver = summarize(sol);
  res.eps1 = get("eps1")(0, 0);
  res.eps2 = get("eps2")(0, 0);
  const double gamma = get("gamma")(0, 0);
  if (!(gamma > 0.0)) {
    throw Error(ErrorKind::Infeasible, "static-gain synthesis: no positive admissible Lipschitz constant");
  }
  res.alpha1 = 0.0;
  res.alpha2 = 1.0 / (gamma * gamma);
  res.gamma_star = recover_gamma(res.alpha1, res.alpha2);
  fill_p(res, plant, form, a, prog);

  const Matrix L = solve_transposed(res.P1, get("G"));
  const int n = plant.n(), p = plant.p(), r = plant.r();
  FilterRealization& f = res.filter;
  f.E = plant.E;
  f.AF = plant.A - L * plant.C;
  f.BF = L;
  f.CF = plant.H;
  f.DF = zeros(r, p);
  f.E1 = eye(n);
  f.E2 = -L;
  f.E3 = zeros(r, p);
  check_invariants(plant, res, settings.max_condition);
  return res;
}

double recover_gamma(double alpha1, double alpha2) {
  if (!(alpha2 > 0.0)) throw Error(ErrorKind::Domain, "alpha2 must be positive");
  if (alpha1 < 0.0) throw Error(ErrorKind::Domain, "alpha1 must be non-negative");
  return 1.0 / std::sqrt(alpha2 * (1.0 + 3.0 * alpha1 * alpha1));
}

Sensitivity sensitivities(double alpha1, double alpha2) {
  if (!(alpha1 > 0.0) || !(alpha2 > 0.0)) throw Error(ErrorKind::Domain, "alpha1 and alpha2 must be positive");
  const double a = 3.0 * alpha1 * alpha1;
  return {-a / (1.0 + a), -0.5};
}

ErrorSystem assemble_error_system(const DescriptorPlant& plant, const FilterRealization& filter) {
  filter.check(plant);
  const int n = plant.n(), p = plant.p(), k = plant.k(), r = plant.r();
  const Matrix& E = plant.E;
  ErrorSystem es;
  es.Etilde = zeros(2 * n, 2 * n);
  es.Etilde << E, zeros(n, n), zeros(n, n), E;
  es.Atilde = zeros(2 * n, 2 * n);
  es.Atilde << filter.AF, filter.BF * plant.C, zeros(n, n), plant.A;
  es.Btilde = Matrix(2 * n, plant.q());
  es.Btilde << filter.BF * plant.D, plant.B;
  es.Ctilde = Matrix(r, 2 * n);
  es.Ctilde << -filter.CF, plant.H - filter.DF * plant.C;
  es.Dtilde = -filter.DF * plant.D;
  es.Mtilde1 = zeros(2 * n, 2 * k);
  es.Mtilde1 << zeros(n, k), filter.BF * plant.M2, zeros(n, k), plant.M1;
  es.Ntilde = zeros(2 * k, 2 * n);
  es.Ntilde.bottomRightCorner(k, n) = plant.N;
  es.Mtilde2 = zeros(r, 2 * k);
  es.Mtilde2.rightCols(k) = -filter.DF * plant.M2;
  es.S1 = zeros(2 * n, 2 * n + 2 * p);
  es.S1 << zeros(n, n), filter.BF, filter.E1, filter.E2, eye(n), zeros(n, p), zeros(n, n), zeros(n, p);
  es.S2 = zeros(r, 2 * n + 2 * p);
  es.S2 << zeros(r, n), -filter.DF, zeros(r, n), -filter.E3;
  es.Gamma = Matrix(4, 2);
  es.Gamma << 0.0, plant.gamma1, 0.0, plant.gamma2, plant.gamma1, 0.0, plant.gamma2, 0.0;
  es.gamma = std::hypot(plant.gamma1, plant.gamma2);
  return es;
}

Matrix dissipation_matrix(const DescriptorPlant& plant, const SynthesisResult& res) {
  const ErrorSystem es = assemble_error_system(plant, res.filter);
  const int n = plant.n(), p = plant.p(), q = plant.q(), r = plant.r(), k = plant.k();
  const Matrix P = block_diag(res.P1, res.P2);
  const Matrix Pt = P.transpose();
  const Matrix ups = es.Atilde.transpose() * P + Pt * es.Atilde +
                     (res.eps1 + res.eps2) * es.Ntilde.transpose() * es.Ntilde;

  // Block order: xi, alpha2, eps1, e, eps2, Omega, w, w-feedthrough.
  const int sizes[] = {2 * n, 2 * n, 2 * k, r, 2 * k, 2 * n + 2 * p, q, r};
  int off[9] = {0};
  for (int i = 0; i < 8; ++i) off[i + 1] = off[i] + sizes[i];
  Matrix M = zeros(off[8], off[8]);
  auto put = [&](int i, int j, const Matrix& b) {
    M.block(off[i], off[j], b.rows(), b.cols()) = b;
    if (i != j) M.block(off[j], off[i], b.cols(), b.rows()) = b.transpose();
  };
  put(0, 0, ups);
  put(0, 1, eye(2 * n));
  put(0, 2, Pt * es.Mtilde1);
  put(0, 3, es.Ctilde.transpose());
  put(0, 5, Pt * es.S1);
  put(0, 6, Pt * es.Btilde);
  put(1, 1, -res.alpha2 * eye(2 * n));
  put(2, 2, -res.eps1 * eye(2 * k));
  put(3, 3, -eye(r) / 3.0);
  put(3, 4, es.Mtilde2);
  put(4, 4, -res.eps2 / 3.0 * eye(2 * k));
  put(5, 5, -eye(2 * n + 2 * p));
  put(6, 6, -res.mu * res.mu * eye(q));
  put(6, 7, es.Dtilde.transpose());
  put(7, 7, -eye(r) / 3.0);
  return M;
}

bool CertificateReport::ok() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

const CertificateCheck* CertificateReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

CertificateReport verify_certificate(const DescriptorPlant& plant, const SynthesisResult& res, double tol) {
  CertificateReport rep;
  auto add = [&](const std::string& name, double v, bool ok) { rep.checks.push_back({name, v, ok}); };
  const int n = plant.n();
  const bool is_static = res.structure == StructureKind::StaticGain;

  bool gamma_ok = false;
  double gamma_err = std::numeric_limits<double>::infinity();
  if (res.alpha2 > 0.0 && res.alpha1 >= 0.0) {
    gamma_err = std::abs(res.gamma_star - recover_gamma(res.alpha1, res.alpha2));
    gamma_ok = gamma_err <= 1e-12 * std::max(1.0, res.gamma_star);
  }
  add("gamma_star", gamma_err, gamma_ok);
  add("eps1 > 0", res.eps1, res.eps1 > 0.0);
  add("eps2 > 0", res.eps2, res.eps2 > 0.0);
  add("alpha2 > 0", res.alpha2, res.alpha2 > 0.0);

  try {
    const double xi1 = max_eigenvalue(dissipation_matrix(plant, res));
    add("Xi1 < 0", xi1, xi1 <= -tol);
  } catch (const Error&) {
    add("Xi1 < 0", std::numeric_limits<double>::quiet_NaN(), false);
  }
  if (!is_static) {
    const DescriptorPlant& pl = plant;
    const int r = pl.r(), k = pl.k(), p = pl.p();
    Matrix x2 = zeros(r + 2 * k, r + 2 * k);
    x2.topLeftCorner(r, r) = res.eps2 * eye(r);
    x2.block(r + k, r + k, k, k) = eye(k);
    x2.block(r, r, k, k) = eye(k);
    const Matrix dm = -res.filter.DF * pl.M2;
    x2.block(0, r + k, r, k) = dm;
    x2.block(r + k, 0, k, r) = dm.transpose();
    const double e2 = min_eigenvalue(x2);
    add("Xi2 > 0", e2, e2 >= -tol);

    Matrix x3 = res.alpha1 * eye(r + 2 * p);
    x3.block(0, r, r, p) = res.filter.E3;
    x3.block(r, 0, p, r) = res.filter.E3.transpose();
    x3.block(0, r + p, r, p) = res.filter.DF;
    x3.block(r + p, 0, p, r) = res.filter.DF.transpose();
    const double e3 = min_eigenvalue(x3);
    add("Xi3 > 0", e3, e3 >= -tol);
  }
  Matrix x4 = eye(2 * n);
  x4.topRightCorner(n, n) = eye(n) - res.P1.transpose();
  x4.bottomLeftCorner(n, n) = eye(n) - res.P1;
  const double e4 = min_eigenvalue(x4);
  add("Xi4 > 0", e4, e4 >= -tol);
  const double contraction = spectral_norm(eye(n) - res.P1);
  add("sigma_max(I - P1) < 1", contraction, contraction < 1.0);

  auto descriptor_checks = [&](const Matrix& P, const std::string& name) {
    const Matrix EtP = plant.E.transpose() * P;
    const double scale = std::max(1.0, EtP.norm());
    const double asym = (EtP - EtP.transpose()).norm();
    add("E^T " + name + " symmetric", asym, asym <= tol * scale);
    const double lo = min_eigenvalue(EtP);
    add("E^T " + name + " >= 0", lo, lo >= -tol * scale);
  };
  descriptor_checks(res.P1, "P1");
  descriptor_checks(res.P2, "P2");
  if (res.X1.size() > 0) {
    const double x1 = min_eigenvalue(res.X1);
    add("X1 > 0", x1, x1 > 0.0);
  }
  if (res.X2.size() > 0) {
    const double x2v = min_eigenvalue(res.X2);
    add("X2 > 0", x2v, x2v > 0.0);
  }
  return rep;
}

}  // namespace hinfdae::synth
