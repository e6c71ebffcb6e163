#include "sccvar/io.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "sccvar/errors.hpp"

namespace sccvar {

using nlohmann::json;

namespace {

double number(const json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf" || s == "+inf" || s == "Infinity") return kInf;
    if (s == "-inf" || s == "-Infinity") return -kInf;
  }
  throw ParseError(where + ": expected a number");
}

json encode(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return v;
}

Vector vector_of(const json& v, const std::string& where, int expected = -1) {
  if (!v.is_array()) throw ParseError(where + ": expected an array");
  if (expected >= 0 && static_cast<int>(v.size()) != expected)
    throw ParseError(where + ": expected " + std::to_string(expected) + " entries, got " +
                     std::to_string(v.size()));
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out(i) = number(v[i], where + "[" + std::to_string(i) + "]");
  return out;
}

Matrix matrix_of(const json& v, const std::string& where, int cols) {
  if (!v.is_array()) throw ParseError(where + ": expected an array of rows");
  Matrix out(v.size(), cols);
  for (std::size_t r = 0; r < v.size(); ++r)
    out.row(r) = vector_of(v[r], where + "[" + std::to_string(r) + "]", cols).transpose();
  return out;
}

json encode(const Vector& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(encode(v(i)));
  return a;
}

json encode(const Matrix& m) {
  json a = json::array();
  for (int r = 0; r < m.rows(); ++r) a.push_back(encode(Vector(m.row(r).transpose())));
  return a;
}

const json& field(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw ParseError(std::string("missing field '") + key + "'");
  return *it;
}

int integer_field(const json& doc, const char* key) {
  const json& v = field(doc, key);
  if (!v.is_number_integer()) throw ParseError(std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

}  // namespace

CcpInstance instance_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("instance document must be an object");
  CcpInstance inst;
  const int n = integer_field(doc, "n");
  const int N = integer_field(doc, "N");
  const int J = integer_field(doc, "J");
  if (n < 1 || N < 1 || J < 1) throw ParseError("n, N and J must be positive");
  inst.name = doc.value("name", std::string("unnamed"));
  inst.epsilon = number(field(doc, "epsilon"), "epsilon");
  inst.cost = vector_of(field(doc, "cost"), "cost", n);
  const Vector probs = vector_of(field(doc, "probs"), "probs", N);
  const json& scen = field(doc, "scenarios");
  if (!scen.is_array() || static_cast<int>(scen.size()) != N)
    throw ParseError("scenarios must be an array of N entries");
  inst.scenarios.resize(N);
  for (int i = 0; i < N; ++i) {
    const std::string where = "scenarios[" + std::to_string(i) + "]";
    if (!scen[i].is_object()) throw ParseError(where + " must be an object");
    Scenario& s = inst.scenarios[i];
    s.W = matrix_of(field(scen[i], "W"), where + ".W", n);
    s.d = vector_of(field(scen[i], "d"), where + ".d", J);
    if (s.W.rows() != J) throw ParseError(where + ".W must have J rows");
    s.p = probs(i);
  }
  inst.domain = Domain::box(n, -kInf, kInf);
  if (doc.contains("domain")) {
    const json& dom = doc["domain"];
    if (dom.contains("lb")) inst.domain.lb = vector_of(dom["lb"], "domain.lb", n);
    if (dom.contains("ub")) inst.domain.ub = vector_of(dom["ub"], "domain.ub", n);
    if (dom.contains("P")) inst.domain.P = matrix_of(dom["P"], "domain.P", n);
    if (dom.contains("q")) inst.domain.q = vector_of(dom["q"], "domain.q");
  }
  validate(inst);
  return inst;
}

std::string instance_to_json(const CcpInstance& inst) {
  json doc;
  doc["name"] = inst.name;
  doc["n"] = inst.n();
  doc["N"] = inst.num_scenarios();
  doc["J"] = inst.rows_per_scenario();
  doc["epsilon"] = inst.epsilon;
  doc["cost"] = encode(inst.cost);
  doc["probs"] = encode(inst.probabilities());
  doc["scenarios"] = json::array();
  for (const Scenario& s : inst.scenarios) doc["scenarios"].push_back({{"W", encode(s.W)}, {"d", encode(s.d)}});
  doc["domain"] = {{"lb", encode(inst.domain.lb)},
                   {"ub", encode(inst.domain.ub)},
                   {"P", encode(inst.domain.P)},
                   {"q", encode(inst.domain.q)}};
  return doc.dump(1);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

CcpInstance read_instance(const std::string& path) { return instance_from_json(read_text_file(path)); }

void write_instance(const std::string& path, const CcpInstance& inst) {
  write_text_file(path, instance_to_json(inst));
}

std::string solution_to_json(const SolutionDocument& doc) {
  json j;
  j["objective"] = encode(doc.objective);
  j["x"] = encode(doc.x);
  j["beta"] = encode(doc.beta);
  j["s"] = encode(doc.s);
  j["alpha"] = encode(doc.alpha);
  j["status"] = doc.status;
  j["violation_prob"] = encode(doc.violation_prob);
  return j.dump(1);
}

SolutionDocument solution_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  SolutionDocument doc;
  doc.objective = number(field(j, "objective"), "objective");
  doc.x = vector_of(field(j, "x"), "x");
  doc.beta = j.contains("beta") ? number(j["beta"], "beta") : 0.0;
  doc.s = j.contains("s") ? vector_of(j["s"], "s") : Vector();
  doc.alpha = j.contains("alpha") ? vector_of(j["alpha"], "alpha") : Vector();
  doc.status = j.value("status", std::string());
  doc.violation_prob = j.contains("violation_prob") ? number(j["violation_prob"], "violation_prob") : 0.0;
  return doc;
}

std::string trace_to_json(const IterationTrace& trace) {
  json j;
  j["termination"] = to_string(trace.termination);
  j["incumbent_objective"] = encode(trace.incumbent_objective);
  j["incumbent_x"] = encode(trace.incumbent_x);
  j["incumbent_alpha"] = encode(trace.incumbent_alpha);
  j["alpha_clipped"] = trace.alpha_clipped;
  j["records"] = json::array();
  for (const IterationRecord& r : trace.records) {
    j["records"].push_back({{"k", r.k},
                            {"stage", r.stage},
                            {"objective", encode(r.objective)},
                            {"delta", encode(r.delta)},
                            {"feasible", r.feasible},
                            {"stalled", r.stalled},
                            {"clipped", r.clipped},
                            {"kept_previous", r.kept_previous},
                            {"x", encode(r.x)},
                            {"alpha", encode(r.alpha)}});
  }
  return j.dump(1);
}

}  // namespace sccvar
