#include "hinfdae/io.hpp"

#include <fstream>
#include <sstream>

#include "hinfdae/error.hpp"

namespace hinfdae::io {
namespace {

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorKind::Parse, std::string("missing key \"") + key + "\"");
  return j.at(key);
}

double number(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_number()) throw Error(ErrorKind::Parse, std::string("\"") + key + "\" must be a number");
  return v.get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? number(j, key) : fallback;
}

std::vector<std::string> strings(const json& j, const std::string& what) {
  if (!j.is_array()) throw Error(ErrorKind::Parse, what + " must be an array of expression strings");
  std::vector<std::string> out;
  for (const auto& e : j) {
    if (e.is_string()) {
      out.push_back(e.get<std::string>());
    } else if (e.is_number()) {
      std::ostringstream os;
      os.precision(17);
      os << e.get<double>();
      out.push_back(os.str());
    } else {
      throw Error(ErrorKind::Parse, what + " entries must be strings");
    }
  }
  return out;
}

json texts_to_json(const NonlinearMap& map) { return json(map.texts()); }

void check_schema(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::Parse, "document must be a JSON object");
  if (j.contains("schema") && (!j.at("schema").is_number_integer() || j.at("schema").get<int>() != kSchemaVersion)) {
    throw Error(ErrorKind::Parse, "unsupported schema version");
  }
}

sdp::Status status_from_string(const std::string& s) {
  for (auto st : {sdp::Status::Optimal, sdp::Status::PrimalInfeasible, sdp::Status::DualInfeasible,
                  sdp::Status::MaxIterations, sdp::Status::NumericalFailure}) {
    if (s == sdp::to_string(st)) return st;
  }
  throw Error(ErrorKind::Parse, "unknown solver status \"" + s + "\"");
}

synth::StructureKind structure_from_string(const std::string& s) {
  for (auto k : {synth::StructureKind::GeneralDynamic, synth::StructureKind::Dynamic, synth::StructureKind::StaticGain}) {
    if (s == synth::to_string(k)) return k;
  }
  throw Error(ErrorKind::Parse, "unknown structure \"" + s + "\"");
}

}  // namespace

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) throw Error(ErrorKind::Parse, what + " must be an array of rows");
  if (j.empty()) return Matrix(0, 0);
  const std::size_t cols = j.at(0).is_array() ? j.at(0).size() : 0;
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& row = j.at(i);
    if (!row.is_array() || row.size() != cols) throw Error(ErrorKind::Parse, what + " is ragged");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!row.at(c).is_number()) throw Error(ErrorKind::Parse, what + " has a non-numeric entry");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = row.at(c).get<double>();
    }
  }
  return m;
}

json vector_to_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Vector vector_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) throw Error(ErrorKind::Parse, what + " must be an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j.at(i).is_number()) throw Error(ErrorKind::Parse, what + " has a non-numeric entry");
    v(static_cast<Eigen::Index>(i)) = j.at(i).get<double>();
  }
  return v;
}

DescriptorPlant plant_from_json(const json& j) {
  check_schema(j);
  DescriptorPlant p;
  p.E = matrix_from_json(require(j, "E"), "E");
  p.A = matrix_from_json(require(j, "A"), "A");
  p.B = matrix_from_json(require(j, "B"), "B");
  p.C = matrix_from_json(require(j, "C"), "C");
  p.D = matrix_from_json(require(j, "D"), "D");
  p.H = matrix_from_json(require(j, "H"), "H");
  const Eigen::Index n = p.E.rows(), pp = p.C.rows();
  Eigen::Index k = 1;
  if (j.contains("N")) {
    p.N = matrix_from_json(j.at("N"), "N");
    k = p.N.rows();
  } else if (j.contains("M1")) {
    k = matrix_from_json(j.at("M1"), "M1").cols();
  } else if (j.contains("M2")) {
    k = matrix_from_json(j.at("M2"), "M2").cols();
  }
  p.M1 = j.contains("M1") ? matrix_from_json(j.at("M1"), "M1") : Matrix::Zero(n, k);
  p.M2 = j.contains("M2") ? matrix_from_json(j.at("M2"), "M2") : Matrix::Zero(pp, k);
  if (!j.contains("N")) p.N = Matrix::Zero(k, n);
  p.u_nominal = j.contains("u") ? vector_from_json(j.at("u"), "u") : Vector::Zero(0);
  const int m = static_cast<int>(p.u_nominal.size());
  p.phi = j.contains("phi") ? parse_nonlinearity(strings(j.at("phi"), "phi"), static_cast<int>(n), m)
                            : NonlinearMap::zero(static_cast<int>(n), static_cast<int>(n), m);
  p.psi = j.contains("psi") ? parse_nonlinearity(strings(j.at("psi"), "psi"), static_cast<int>(n), m)
                            : NonlinearMap::zero(static_cast<int>(pp), static_cast<int>(n), m);
  p.gamma1 = number(j, "gamma1");
  p.gamma2 = number(j, "gamma2");
  p.check_dimensions();
  return p;
}

json plant_to_json(const DescriptorPlant& p) {
  json j;
  j["schema"] = kSchemaVersion;
  j["E"] = matrix_to_json(p.E);
  j["A"] = matrix_to_json(p.A);
  j["B"] = matrix_to_json(p.B);
  j["C"] = matrix_to_json(p.C);
  j["D"] = matrix_to_json(p.D);
  j["H"] = matrix_to_json(p.H);
  j["M1"] = matrix_to_json(p.M1);
  j["M2"] = matrix_to_json(p.M2);
  j["N"] = matrix_to_json(p.N);
  j["phi"] = texts_to_json(p.phi);
  j["psi"] = texts_to_json(p.psi);
  j["gamma1"] = p.gamma1;
  j["gamma2"] = p.gamma2;
  if (p.u_nominal.size() > 0) j["u"] = vector_to_json(p.u_nominal);
  return j;
}

daesim::Scenario scenario_from_json(const json& j) {
  check_schema(j);
  daesim::Scenario s;
  if (j.contains("disturbance")) s.disturbance = parse_nonlinearity(strings(j.at("disturbance"), "disturbance"), 0, 0);
  if (j.contains("F")) s.F_diagonal = parse_nonlinearity(strings(j.at("F"), "F"), 0, 0);
  if (j.contains("uncertainty")) {
    if (!j.at("uncertainty").is_boolean()) throw Error(ErrorKind::Parse, "\"uncertainty\" must be a boolean");
    s.uncertainty_on = j.at("uncertainty").get<bool>();
  } else {
    s.uncertainty_on = j.contains("F");
  }
  s.t0 = number_or(j, "t0", 0.0);
  s.tf = s.t0 + number_or(j, "horizon", 10.0);
  s.dt = number_or(j, "dt", 1e-3);
  if (j.contains("x0_plant")) s.x0_plant = vector_from_json(j.at("x0_plant"), "x0_plant");
  if (j.contains("x0_filter")) s.x0_filter = vector_from_json(j.at("x0_filter"), "x0_filter");
  return s;
}

json scenario_to_json(const daesim::Scenario& s) {
  json j;
  j["schema"] = kSchemaVersion;
  if (s.disturbance.out_dim() > 0) j["disturbance"] = texts_to_json(s.disturbance);
  if (s.F_diagonal.out_dim() > 0) j["F"] = texts_to_json(s.F_diagonal);
  j["uncertainty"] = s.uncertainty_on;
  j["t0"] = s.t0;
  j["horizon"] = s.tf - s.t0;
  j["dt"] = s.dt;
  if (s.x0_plant) j["x0_plant"] = vector_to_json(*s.x0_plant);
  if (s.x0_filter) j["x0_filter"] = vector_to_json(*s.x0_filter);
  return j;
}

json filter_to_json(const synth::FilterRealization& f) {
  return json{{"AF", matrix_to_json(f.AF)}, {"BF", matrix_to_json(f.BF)}, {"CF", matrix_to_json(f.CF)},
              {"DF", matrix_to_json(f.DF)}, {"E1", matrix_to_json(f.E1)}, {"E2", matrix_to_json(f.E2)},
              {"E3", matrix_to_json(f.E3)}, {"E", matrix_to_json(f.E)}};
}

synth::FilterRealization filter_from_json(const json& j) {
  synth::FilterRealization f;
  f.AF = matrix_from_json(require(j, "AF"), "AF");
  f.BF = matrix_from_json(require(j, "BF"), "BF");
  f.CF = matrix_from_json(require(j, "CF"), "CF");
  f.DF = matrix_from_json(require(j, "DF"), "DF");
  f.E1 = matrix_from_json(require(j, "E1"), "E1");
  f.E2 = matrix_from_json(require(j, "E2"), "E2");
  f.E3 = matrix_from_json(require(j, "E3"), "E3");
  f.E = matrix_from_json(require(j, "E"), "E");
  return f;
}

json result_to_json(const synth::SynthesisResult& r) {
  json j;
  j["schema"] = kSchemaVersion;
  j["structure"] = synth::to_string(r.structure);
  j["mode"] = r.mode == synth::Mode::MaxGamma ? "max-gamma" : "min-mu";
  j["mu"] = r.mu;
  j["gamma_star"] = r.gamma_star;
  j["alpha1"] = r.alpha1;
  j["alpha2"] = r.alpha2;
  j["eps1"] = r.eps1;
  j["eps2"] = r.eps2;
  j["p1_condition"] = r.p1_condition;
  j["filter"] = filter_to_json(r.filter);
  j["certificate"] = json{{"X1", matrix_to_json(r.X1)}, {"X2", matrix_to_json(r.X2)}, {"Y1", matrix_to_json(r.Y1)},
                          {"Y2", matrix_to_json(r.Y2)}, {"P1", matrix_to_json(r.P1)}, {"P2", matrix_to_json(r.P2)}};
  j["solver"] = json{{"status", sdp::to_string(r.solver.status)},
                     {"iterations", r.solver.iterations},
                     {"objective", r.solver.objective},
                     {"residuals", json{{"primal", r.solver.residuals.primal},
                                        {"dual", r.solver.residuals.dual},
                                        {"gap", r.solver.residuals.gap}}},
                     {"slacks", r.solver.slacks}};
  return j;
}

synth::SynthesisResult result_from_json(const json& j) {
  check_schema(j);
  synth::SynthesisResult r;
  r.structure = structure_from_string(require(j, "structure").get<std::string>());
  const std::string mode = j.value("mode", std::string("max-gamma"));
  if (mode != "max-gamma" && mode != "min-mu") throw Error(ErrorKind::Parse, "unknown mode \"" + mode + "\"");
  r.mode = mode == "max-gamma" ? synth::Mode::MaxGamma : synth::Mode::MinMu;
  r.mu = number(j, "mu");
  r.gamma_star = number(j, "gamma_star");
  r.alpha1 = number(j, "alpha1");
  r.alpha2 = number(j, "alpha2");
  r.eps1 = number(j, "eps1");
  r.eps2 = number(j, "eps2");
  r.p1_condition = number_or(j, "p1_condition", 0.0);
  r.filter = filter_from_json(require(j, "filter"));
  if (j.contains("certificate")) {
    const json& c = j.at("certificate");
    r.X1 = matrix_from_json(require(c, "X1"), "X1");
    r.X2 = matrix_from_json(require(c, "X2"), "X2");
    r.Y1 = matrix_from_json(require(c, "Y1"), "Y1");
    r.Y2 = matrix_from_json(require(c, "Y2"), "Y2");
    r.P1 = matrix_from_json(require(c, "P1"), "P1");
    r.P2 = matrix_from_json(require(c, "P2"), "P2");
  }
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    r.solver.status = status_from_string(require(s, "status").get<std::string>());
    r.solver.iterations = require(s, "iterations").get<int>();
    r.solver.objective = number(s, "objective");
    if (s.contains("residuals")) {
      const json& res = s.at("residuals");
      r.solver.residuals.primal = number(res, "primal");
      r.solver.residuals.dual = number(res, "dual");
      r.solver.residuals.gap = number(res, "gap");
    }
    if (s.contains("slacks")) r.solver.slacks = s.at("slacks").get<std::vector<double>>();
  }
  return r;
}

json sdp_to_json(const lmi::SdpStandardForm& form) {
  json j;
  j["schema"] = kSchemaVersion;
  j["c"] = vector_to_json(form.c);
  json blocks = json::array();
  for (const auto& b : form.blocks) {
    json F = json::array();
    for (const auto& Fi : b.F) F.push_back(matrix_to_json(Fi));
    blocks.push_back(json{{"name", b.name}, {"dim", b.dim}, {"F0", matrix_to_json(b.F0)}, {"F", F}});
  }
  j["blocks"] = blocks;
  return j;
}

lmi::SdpStandardForm sdp_from_json(const json& j) {
  check_schema(j);
  lmi::SdpStandardForm form;
  form.c = vector_from_json(require(j, "c"), "c");
  const json& blocks = require(j, "blocks");
  if (!blocks.is_array()) throw Error(ErrorKind::Parse, "\"blocks\" must be an array");
  for (const auto& bj : blocks) {
    lmi::SdpStandardForm::Block b;
    b.name = bj.value("name", std::string("block"));
    b.F0 = matrix_from_json(require(bj, "F0"), "F0");
    b.dim = static_cast<int>(b.F0.rows());
    const json& F = require(bj, "F");
    if (!F.is_array() || F.size() != static_cast<std::size_t>(form.c.size())) {
      throw Error(ErrorKind::Dimension, "block \"" + b.name + "\" needs one F matrix per coordinate");
    }
    for (const auto& Fi : F) b.F.push_back(matrix_from_json(Fi, "F"));
    form.blocks.push_back(std::move(b));
  }
  return form;
}

json solution_to_json(const sdp::SdpSolution& s) {
  json j;
  j["schema"] = kSchemaVersion;
  j["status"] = sdp::to_string(s.status);
  j["x"] = vector_to_json(s.x);
  j["objective"] = s.objective;
  j["dual_objective"] = s.dual_objective;
  j["iterations"] = s.iterations;
  j["slacks"] = s.slacks;
  j["residuals"] = json{{"primal", s.residuals.primal}, {"dual", s.residuals.dual}, {"gap", s.residuals.gap}};
  return j;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Usage, "cannot read \"" + path + "\"");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Usage, "cannot write \"" + path + "\"");
  out << text;
  if (!out) throw Error(ErrorKind::Usage, "write failed for \"" + path + "\"");
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace hinfdae::io
