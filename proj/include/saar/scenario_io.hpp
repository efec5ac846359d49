#pragma once

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "saar/scenario.hpp"

namespace saar {

/// Parse or validation failure while loading a scenario file.
class ScenarioError : public Error {
 public:
  ScenarioError(const std::string& what, std::vector<ValidationIssue> issues)
      : Error(what), issues_(std::move(issues)) {}
  const std::vector<ValidationIssue>& issues() const { return issues_; }

 private:
  std::vector<ValidationIssue> issues_;
};

namespace io {

using Json = nlohmann::json;

/// Collects schema problems instead of stopping at the first.
class Reader {
 public:
  explicit Reader(std::vector<ValidationIssue>& issues) : issues_(issues) {}

  void fail(const std::string& field, const std::string& msg) { issues_.push_back({field, msg}); }

  std::optional<double> number(const Json& j, const std::string& field) {
    if (!j.is_number()) {
      fail(field, "expected a number");
      return std::nullopt;
    }
    return j.get<double>();
  }

  Vector vector(const Json& j, const std::string& field) {
    if (!j.is_array()) {
      fail(field, "expected an array of numbers");
      return {};
    }
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) {
      const auto x = number(j[k], field + "[" + std::to_string(k) + "]");
      v(static_cast<Eigen::Index>(k)) = x.value_or(0.0);
    }
    return v;
  }

  /// Nested row arrays, row-major.
  Matrix matrix(const Json& j, const std::string& field) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) {
      fail(field, "expected a non-empty array of rows");
      return {};
    }
    const std::size_t cols = j[0].size();
    Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < j.size(); ++r) {
      if (!j[r].is_array() || j[r].size() != cols) {
        fail(field, "row " + std::to_string(r) + " has the wrong length");
        return {};
      }
      for (std::size_t c = 0; c < cols; ++c) {
        const auto x = number(j[r][c], field + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = x.value_or(0.0);
      }
    }
    return m;
  }

  /// Array of {"coeff": c, "rate": k}.
  ExpSignal signal(const Json& j, const std::string& field) {
    ExpSignal s;
    if (!j.is_array()) {
      fail(field, "expected an array of {coeff, rate} objects");
      return s;
    }
    s.coeff.resize(static_cast<Eigen::Index>(j.size()));
    s.rate.resize(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) {
      const std::string f = field + "[" + std::to_string(k) + "]";
      if (!j[k].is_object() || !j[k].contains("coeff") || !j[k].contains("rate")) {
        fail(f, "expected {\"coeff\": number, \"rate\": number}");
        continue;
      }
      s.coeff(static_cast<Eigen::Index>(k)) = number(j[k]["coeff"], f + ".coeff").value_or(0.0);
      s.rate(static_cast<Eigen::Index>(k)) = number(j[k]["rate"], f + ".rate").value_or(0.0);
    }
    return s;
  }

  template <class T>
  void optional_scalar(const Json& obj, const char* key, const std::string& field, T& out) {
    if (!obj.is_object() || !obj.contains(key)) return;
    if constexpr (std::is_same_v<T, bool>) {
      if (!obj[key].is_boolean()) return fail(field, "expected true/false");
      out = obj[key].template get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!obj[key].is_number_integer()) return fail(field, "expected an integer");
      out = obj[key].template get<T>();
    } else {
      if (auto v = number(obj[key], field)) out = *v;
    }
  }

 private:
  std::vector<ValidationIssue>& issues_;
};

inline std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

inline Json vector_json(const Vector& v) {
  return Json(std::vector<double>(v.data(), v.data() + v.size()));
}

inline Json signal_json(const ExpSignal& s) {
  Json out = Json::array();
  for (Eigen::Index k = 0; k < s.coeff.size(); ++k)
    out.push_back({{"coeff", s.coeff(k)}, {"rate", s.rate(k)}});
  return out;
}

}  // namespace io

/// Builds a scenario from its JSON document. Throws ScenarioError listing
/// every schema and validation problem.
inline ScenarioConfig scenario_from_json(const io::Json& doc) {
  std::vector<ValidationIssue> issues;
  io::Reader rd(issues);
  ScenarioConfig cfg;
  if (!doc.is_object()) throw ScenarioError("scenario must be a JSON object", {{"", "expected an object"}});

  cfg.name = doc.value("name", std::string("unnamed"));
  if (doc.contains("leader") && doc["leader"].contains("S")) {
    cfg.leader.S = rd.matrix(doc["leader"]["S"], "leader.S");
  } else {
    rd.fail("leader.S", "missing");
  }
  if (doc.contains("leaders") && doc["leaders"].is_array()) {
    for (std::size_t r = 0; r < doc["leaders"].size(); ++r) {
      const auto& l = doc["leaders"][r];
      const std::string f = "leaders[" + std::to_string(r) + "]";
      if (!l.contains("x0")) {
        rd.fail(f + ".x0", "missing");
        continue;
      }
      cfg.leader_x0.push_back(rd.vector(l["x0"], f + ".x0"));
    }
  } else {
    rd.fail("leaders", "missing array of {x0}");
  }

  if (doc.contains("attack_start")) rd.optional_scalar(doc, "attack_start", "attack_start", cfg.attack_start);
  rd.optional_scalar(doc, "absolute_clock", "absolute_clock", cfg.absolute_clock);

  if (doc.contains("followers") && doc["followers"].is_array()) {
    for (std::size_t i = 0; i < doc["followers"].size(); ++i) {
      const auto& j = doc["followers"][i];
      const std::string f = "followers[" + std::to_string(i) + "]";
      FollowerConfig fc;
      for (const char* key : {"A", "B", "Q", "U", "x0"}) {
        if (!j.contains(key)) rd.fail(f + "." + key, "missing");
      }
      if (j.contains("A")) fc.model.A = rd.matrix(j["A"], f + ".A");
      if (j.contains("B")) fc.model.B = rd.matrix(j["B"], f + ".B");
      if (j.contains("Q")) fc.model.Q = rd.matrix(j["Q"], f + ".Q");
      if (j.contains("U")) fc.model.U = rd.matrix(j["U"], f + ".U");
      if (j.contains("x0")) fc.x0 = rd.vector(j["x0"], f + ".x0");
      if (j.contains("zeta0")) fc.zeta0 = rd.vector(j["zeta0"], f + ".zeta0");
      rd.optional_scalar(j, "theta0", f + ".theta0", fc.theta0);
      rd.optional_scalar(j, "rho0", f + ".rho0", fc.rho0);
      rd.optional_scalar(j, "q", f + ".q", fc.q);
      rd.optional_scalar(j, "alpha", f + ".alpha", fc.alpha);
      rd.optional_scalar(j, "c", f + ".c", fc.c);
      if (j.contains("attack")) {
        const auto& a = j["attack"];
        if (a.contains("cil")) fc.attack.cil = rd.signal(a["cil"], f + ".attack.cil");
        if (a.contains("ol")) fc.attack.ol = rd.signal(a["ol"], f + ".attack.ol");
      }
      const auto m = fc.model.B.cols();
      const auto n = fc.model.A.rows();
      if (fc.attack.cil.coeff.size() == 0) fc.attack.cil = {Vector::Zero(m), Vector::Zero(m)};
      if (fc.attack.ol.coeff.size() == 0) fc.attack.ol = {Vector::Zero(n), Vector::Zero(n)};
      if (j.contains("input_bounds")) {
        const auto& b = j["input_bounds"];
        InputBounds ib;
        if (b.contains("lower")) ib.lower = rd.vector(b["lower"], f + ".input_bounds.lower");
        else rd.fail(f + ".input_bounds.lower", "missing");
        if (b.contains("upper")) ib.upper = rd.vector(b["upper"], f + ".input_bounds.upper");
        else rd.fail(f + ".input_bounds.upper", "missing");
        fc.bounds = ib;
      }
      cfg.followers.push_back(std::move(fc));
    }
  } else {
    rd.fail("followers", "missing array of follower objects");
  }

  if (doc.contains("topology")) {
    const auto& t = doc["topology"];
    if (t.contains("adjacency")) cfg.topology.adjacency = rd.matrix(t["adjacency"], "topology.adjacency");
    else rd.fail("topology.adjacency", "missing");
    if (t.contains("pinning")) cfg.topology.pinning = rd.matrix(t["pinning"], "topology.pinning");
    else rd.fail("topology.pinning", "missing");
  } else {
    rd.fail("topology", "missing");
  }

  const auto nf = static_cast<Eigen::Index>(cfg.followers.size());
  double delta_default = 5.0;
  if (doc.contains("safety")) {
    const auto& s = doc["safety"];
    rd.optional_scalar(s, "d_s", "safety.d_s", cfg.d_s);
    rd.optional_scalar(s, "delta", "safety.delta", delta_default);
  }
  cfg.delta = Matrix::Constant(nf, nf, delta_default);
  if (doc.contains("safety") && doc["safety"].contains("delta_pairs")) {
    const auto& dp = doc["safety"]["delta_pairs"];
    for (std::size_t k = 0; k < dp.size(); ++k) {
      const std::string f = "safety.delta_pairs[" + std::to_string(k) + "]";
      const auto& e = dp[k];
      if (!e.contains("i") || !e.contains("j") || !e.contains("delta") || !e["i"].is_number_integer() ||
          !e["j"].is_number_integer()) {
        rd.fail(f, "expected {\"i\": int, \"j\": int, \"delta\": number} with 1-based indices");
        continue;
      }
      const int i = e["i"].get<int>(), jj = e["j"].get<int>();
      if (i < 1 || jj < 1 || i > nf || jj > nf || i >= jj) {
        rd.fail(f, "indices must satisfy 1 <= i < j <= N");
        continue;
      }
      if (auto v = rd.number(e["delta"], f + ".delta")) cfg.delta(i - 1, jj - 1) = *v;
    }
  }

  if (doc.contains("simulation")) {
    const auto& s = doc["simulation"];
    rd.optional_scalar(s, "horizon", "simulation.horizon", cfg.horizon);
    rd.optional_scalar(s, "dt", "simulation.dt", cfg.dt);
    rd.optional_scalar(s, "output_stride", "simulation.output_stride", cfg.output_stride);
    rd.optional_scalar(s, "theta_cap", "simulation.theta_cap", cfg.theta_cap);
    rd.optional_scalar(s, "rho_cap", "simulation.rho_cap", cfg.rho_cap);
    rd.optional_scalar(s, "divergence_threshold", "simulation.divergence_threshold",
                       cfg.divergence_threshold);
    if (s.contains("mode")) {
      const auto mode = s["mode"].is_string() ? parse_mode(s["mode"].get<std::string>()) : std::nullopt;
      if (mode) cfg.mode = *mode;
      else rd.fail("simulation.mode", "expected one of saar, resilient_unsafe, conventional");
    }
    if (s.contains("infeasible_policy")) {
      const auto p = s["infeasible_policy"].is_string() ? s["infeasible_policy"].get<std::string>() : "";
      if (p == "abort") cfg.infeasible_policy = InfeasiblePolicy::kAbort;
      else if (p == "passthrough") cfg.infeasible_policy = InfeasiblePolicy::kPassThrough;
      else rd.fail("simulation.infeasible_policy", "expected abort or passthrough");
    }
  }
  apply_attack_timing(cfg);

  if (!issues.empty()) throw ScenarioError("scenario has schema errors", issues);
  if (auto v = validate_scenario(cfg); !v.empty()) throw ScenarioError("scenario failed validation", v);
  return cfg;
}

inline ScenarioConfig parse_scenario(const std::string& text) {
  io::Json doc;
  try {
    doc = io::Json::parse(text);
  } catch (const io::Json::parse_error& e) {
    const auto [line, col] = io::line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    std::ostringstream msg;
    msg << "parse error at line " << line << ", column " << col << ": " << e.what();
    throw ScenarioError(msg.str(), {{"", msg.str()}});
  }
  return scenario_from_json(doc);
}

/// Bundled scenario directory, overridable through SAAR_SCENARIO_DIR.
inline std::filesystem::path scenario_dir() {
  if (const char* env = std::getenv("SAAR_SCENARIO_DIR")) return env;
#ifdef SAAR_SCENARIO_DIR
  return SAAR_SCENARIO_DIR;
#else
  return "scenarios";
#endif
}

/// Accepts a path, or the bare name of a bundled scenario ("paper_sec4").
inline std::filesystem::path resolve_scenario(const std::string& name_or_path) {
  std::filesystem::path p(name_or_path);
  if (std::filesystem::exists(p)) return p;
  auto bundled = scenario_dir() / (name_or_path + ".json");
  if (std::filesystem::exists(bundled)) return bundled;
  return p;
}

inline ScenarioConfig load_scenario(const std::string& name_or_path) {
  const auto path = resolve_scenario(name_or_path);
  std::ifstream in(path);
  if (!in) {
    const std::string msg = "cannot open scenario file " + path.string();
    throw ScenarioError(msg, {{"", msg}});
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

inline io::Json scenario_to_json(const ScenarioConfig& cfg) {
  using io::Json;
  Json doc;
  doc["name"] = cfg.name;
  doc["leader"] = {{"S", io::matrix_json(cfg.leader.S)}};
  doc["leaders"] = Json::array();
  for (const auto& x : cfg.leader_x0) doc["leaders"].push_back({{"x0", io::vector_json(x)}});
  doc["attack_start"] = cfg.attack_start;
  doc["absolute_clock"] = cfg.absolute_clock;
  doc["followers"] = Json::array();
  for (const auto& f : cfg.followers) {
    Json j;
    j["A"] = io::matrix_json(f.model.A);
    j["B"] = io::matrix_json(f.model.B);
    j["Q"] = io::matrix_json(f.model.Q);
    j["U"] = io::matrix_json(f.model.U);
    j["x0"] = io::vector_json(f.x0);
    if (f.zeta0) j["zeta0"] = io::vector_json(*f.zeta0);
    j["theta0"] = f.theta0;
    j["rho0"] = f.rho0;
    j["q"] = f.q;
    j["alpha"] = f.alpha;
    j["c"] = f.c;
    j["attack"] = {{"cil", io::signal_json(f.attack.cil)}, {"ol", io::signal_json(f.attack.ol)}};
    if (f.bounds) j["input_bounds"] = {{"lower", io::vector_json(f.bounds->lower)}, {"upper", io::vector_json(f.bounds->upper)}};
    doc["followers"].push_back(j);
  }
  doc["topology"] = {{"adjacency", io::matrix_json(cfg.topology.adjacency)},
                     {"pinning", io::matrix_json(cfg.topology.pinning)}};
  Json pairs = Json::array();
  const double base = cfg.delta.size() > 1 ? cfg.delta(0, 1) : 5.0;
  for (Eigen::Index i = 0; i < cfg.delta.rows(); ++i)
    for (Eigen::Index j = i + 1; j < cfg.delta.cols(); ++j)
      if (cfg.delta(i, j) != base) pairs.push_back({{"i", i + 1}, {"j", j + 1}, {"delta", cfg.delta(i, j)}});
  doc["safety"] = {{"d_s", cfg.d_s}, {"delta", base}};
  if (!pairs.empty()) doc["safety"]["delta_pairs"] = pairs;
  doc["simulation"] = {
      {"horizon", cfg.horizon},
      {"dt", cfg.dt},
      {"mode", to_string(cfg.mode)},
      {"output_stride", cfg.output_stride},
      {"theta_cap", cfg.theta_cap},
      {"rho_cap", cfg.rho_cap},
      {"divergence_threshold", cfg.divergence_threshold},
      {"infeasible_policy", cfg.infeasible_policy == InfeasiblePolicy::kAbort ? "abort" : "passthrough"}};
  return doc;
}

}  // namespace saar

namespace saar {

/// Pretty JSON with numeric arrays (vectors, matrix rows) kept on one line.
inline std::string dump_scenario(const ScenarioConfig& cfg) {
  static const std::regex flat_array(R"(\[\s*(-?[0-9][^\[\]{}"]*?)\s*\])");
  const std::string pretty = scenario_to_json(cfg).dump(2);
  std::string out;
  std::sregex_iterator it(pretty.begin(), pretty.end(), flat_array), end;
  std::size_t last = 0;
  for (; it != end; ++it) {
    out.append(pretty, last, static_cast<std::size_t>(it->position()) - last);
    std::string body = (*it)[1].str();
    std::string compact;
    for (char ch : body) {
      if (ch == '\n' || ch == ' ') continue;
      compact += ch;
      if (ch == ',') compact += ' ';
    }
    out += "[" + compact + "]";
    last = static_cast<std::size_t>(it->position() + it->length());
  }
  out.append(pretty, last, std::string::npos);
  return out + "\n";
}

}  // namespace saar
