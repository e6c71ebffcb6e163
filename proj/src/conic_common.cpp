#include <json.hpp>

#include "sccvar/conic.hpp"
#include "sccvar/errors.hpp"

namespace sccvar::conic {

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal:
      return "optimal";
    case SolveStatus::Infeasible:
      return "infeasible";
    case SolveStatus::Unbounded:
      return "unbounded";
    case SolveStatus::IterationLimit:
      return "iteration_limit";
    case SolveStatus::NumericalError:
      return "numerical_error";
  }
  return "unknown";
}

void LinearProgramSpec::check() const {
  const int n = num_variables();
  if (A.rows() != b.size()) throw DimensionMismatch("LP: rows of A != length of b");
  if (A.rows() > 0 && A.cols() != n) throw DimensionMismatch("LP: columns of A != n");
  if (lower.size() != n || upper.size() != n) throw DimensionMismatch("LP: bound length != n");
  if (!objective.allFinite() || !A.allFinite() || !b.allFinite())
    throw DimensionMismatch("LP: non-finite data");
}

void SocpSpec::check() const {
  const int n = num_variables();
  if (A.rows() != b.size()) throw DimensionMismatch("SOCP: rows of A != length of b");
  if (A.rows() > 0 && A.cols() != n) throw DimensionMismatch("SOCP: columns of A != n");
  for (const ConeBlock& cb : cones) {
    if (cb.F.rows() < 1) throw DimensionMismatch("SOCP: cone block with empty F");
    if (cb.F.cols() != n || cb.f.size() != cb.F.rows() || cb.g.size() != n)
      throw DimensionMismatch("SOCP: inconsistent cone block");
  }
}

LinearProgramSpec as_linear_program(const SocpSpec& spec) {
  if (!spec.cones.empty()) throw DimensionMismatch("spec has cone blocks");
  LinearProgramSpec lp;
  const int n = spec.num_variables();
  lp.objective = spec.objective;
  lp.A = spec.A.rows() > 0 ? spec.A : Matrix::Zero(0, n);
  lp.b = spec.b;
  lp.lower = Vector::Constant(n, -kInf);
  lp.upper = Vector::Constant(n, kInf);
  return lp;
}

SolveResult solve_conic(const SocpSpec& spec, const Tolerances& tol) {
  if (spec.cones.empty()) return solve_lp(as_linear_program(spec), tol);
  return solve_socp(spec, tol);
}

namespace {

nlohmann::json to_json(const Vector& v) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) {
    if (std::isinf(v(i)))
      a.push_back(v(i) > 0 ? "inf" : "-inf");
    else
      a.push_back(v(i));
  }
  return a;
}

nlohmann::json to_json(const Matrix& m) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < m.rows(); ++i) a.push_back(to_json(Vector(m.row(i).transpose())));
  return a;
}

}  // namespace

std::string dump_json(const LinearProgramSpec& spec) {
  nlohmann::json j;
  j["kind"] = "lp";
  j["objective"] = to_json(spec.objective);
  j["A"] = to_json(spec.A);
  j["b"] = to_json(spec.b);
  j["lower"] = to_json(spec.lower);
  j["upper"] = to_json(spec.upper);
  return j.dump(1);
}

std::string dump_json(const SocpSpec& spec) {
  nlohmann::json j;
  j["kind"] = "socp";
  j["objective"] = to_json(spec.objective);
  j["A"] = to_json(spec.A);
  j["b"] = to_json(spec.b);
  j["cones"] = nlohmann::json::array();
  for (const ConeBlock& cb : spec.cones)
    j["cones"].push_back({{"F", to_json(cb.F)}, {"f", to_json(cb.f)}, {"g", to_json(cb.g)}, {"h", cb.h}});
  return j.dump(1);
}

}  // namespace sccvar::conic
