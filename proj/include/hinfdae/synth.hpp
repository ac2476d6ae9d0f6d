#pragma once

#include <string>
#include <vector>

#include "hinfdae/error.hpp"
#include "hinfdae/lmi.hpp"
#include "hinfdae/model.hpp"
#include "hinfdae/sdp.hpp"

namespace hinfdae::synth {

enum class StructureKind { GeneralDynamic, Dynamic, StaticGain };
enum class E3Mode { Variable, Fixed, Zero };

const char* to_string(StructureKind kind);

/// Selects the filter family through the nonlinearity couplings E1, E2, E3.
struct FilterStructure {
  StructureKind kind = StructureKind::Dynamic;
  Matrix E1;  // n x n
  Matrix E2;  // n x p
  E3Mode e3_mode = E3Mode::Zero;
  Matrix E3;  // r x p, used when e3_mode == Fixed

  static FilterStructure dynamic();
  static FilterStructure static_gain();
  static FilterStructure general(Matrix E1, Matrix E2, E3Mode mode, Matrix E3 = {});

  /// Fills Dynamic defaults for the plant and checks every shape.
  FilterStructure resolved(const DescriptorPlant& plant) const;
};

/// E xF' = AF xF + BF y + E1 phi(xF) + E2 psi(xF),  zF = CF xF + DF y + E3 psi(xF)
struct FilterRealization {
  Matrix AF, BF, CF, DF;
  Matrix E1, E2, E3;
  Matrix E;

  int n() const { return static_cast<int>(AF.rows()); }
  void check(const DescriptorPlant& plant) const;
  static FilterRealization zero(const DescriptorPlant& plant);
};

enum class Mode { MaxGamma, MinMu };

struct ModeSpec {
  Mode mode = Mode::MaxGamma;
  /// Fixed scalars for MinMu. Non-positive alpha2 means "take them from a
  /// MaxGamma run at the supplied mu".
  double alpha1 = 0.0;
  double alpha2 = 0.0;

  static ModeSpec max_gamma() { return {}; }
  static ModeSpec min_mu(double alpha1, double alpha2) { return {Mode::MinMu, alpha1, alpha2}; }
};

struct SynthesisSettings {
  sdp::SolverSettings solver;
  double strict_margin = 1e-6;
  double c1 = 2.0;  // objective weight on alpha1
  double c2 = 1.0;  // objective weight on alpha2
  double max_condition = 1e12;
};

struct SolverSummary {
  sdp::Status status = sdp::Status::NumericalFailure;
  int iterations = 0;
  double objective = 0.0;
  sdp::Residuals residuals;
  std::vector<double> slacks;
};

struct SynthesisResult {
  FilterRealization filter;
  StructureKind structure = StructureKind::Dynamic;
  Mode mode = Mode::MaxGamma;
  double mu = 0.0;
  double eps1 = 0.0, eps2 = 0.0;
  double alpha1 = 0.0, alpha2 = 0.0;
  double gamma_star = 0.0;
  Matrix X1, X2, Y1, Y2;
  Matrix P1, P2;
  double p1_condition = 0.0;
  SolverSummary solver;
};

/// Raised when the SDP certifies that no filter exists; carries the solver
/// output (dual certificate included).
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, sdp::SdpSolution certificate)
      : Error(ErrorKind::Infeasible, what), certificate_(std::move(certificate)) {}
  const sdp::SdpSolution& certificate() const { return certificate_; }

 private:
  sdp::SdpSolution certificate_;
};

lmi::LmiProgram build_program(const DescriptorPlant& plant, double mu, const FilterStructure& structure,
                              const ModeSpec& mode, const SynthesisSettings& settings = {});

/// Single-gain program: G = P1^T L, objective max gamma.
lmi::LmiProgram build_static_program(const DescriptorPlant& plant, double mu,
                                     const SynthesisSettings& settings = {});

SynthesisResult synthesize(const DescriptorPlant& plant, double mu, const FilterStructure& structure,
                           const SynthesisSettings& settings = {}, const ModeSpec& mode = {});

SynthesisResult synthesize_static(const DescriptorPlant& plant, double mu,
                                  const SynthesisSettings& settings = {});

double recover_gamma(double alpha1, double alpha2);

struct Sensitivity {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
};
Sensitivity sensitivities(double alpha1, double alpha2);

/// Augmented error dynamics over xi = [xF; x]:
///   Et xi' = (At + Mt1 Ft Nt) xi + S1 Omega + Bt w,  e = (Ct + Mt2 Ft Nt) xi + S2 Omega + Dt w
/// with Ft = diag(F, F) and Omega = [phi(x); psi(x); phi(xF); psi(xF)].
struct ErrorSystem {
  Matrix Etilde, Atilde, Btilde, Ctilde, Dtilde;
  Matrix Mtilde1, Mtilde2, Ntilde;
  Matrix S1, S2;
  Matrix Gamma;  // 4 x 2 array of Lipschitz constants, rows matching Omega
  double gamma = 0.0;
};

ErrorSystem assemble_error_system(const DescriptorPlant& plant, const FilterRealization& filter);

struct CertificateCheck {
  std::string name;
  double value = 0.0;
  bool passed = false;
};

struct CertificateReport {
  std::vector<CertificateCheck> checks;
  bool ok() const;
  const CertificateCheck* find(const std::string& name) const;
};

/// Numerical re-evaluation of every synthesis condition from the stored
/// result, independent of the SDP vector.
CertificateReport verify_certificate(const DescriptorPlant& plant, const SynthesisResult& result,
                                     double tol);

/// The dissipation inequality in xi coordinates (P = diag(P1, P2)); a block
/// permutation of Xi1 when filter and P come from the same solution.
Matrix dissipation_matrix(const DescriptorPlant& plant, const SynthesisResult& result);

}  // namespace hinfdae::synth
