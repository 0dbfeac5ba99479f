#include "nmq/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "nmq/errors.hpp"

namespace nmq::io {

namespace {

const Json& require(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ParseError(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw ParseError(path.empty() ? key : path + "." + key, "missing field");
  return *it;
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

double number(const Json& j, const std::string& field) {
  if (!j.is_number()) throw ParseError(field, "expected a number");
  return j.get<double>();
}

Index count(const Json& j, const std::string& field) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) {
    throw ParseError(field, "expected a non-negative integer");
  }
  const long long v = j.get<long long>();
  if (v < 0) throw ParseError(field, "expected a non-negative integer");
  return static_cast<Index>(v);
}

std::vector<double> vector_of(const Json& j, const std::string& field) {
  if (!j.is_array()) throw ParseError(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(number(j[i], field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& path) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (allowed.count(it.key()) == 0) throw ParseError(join(path, it.key()), "unknown field");
  }
}

}  // namespace

Json matrix_to_json(const RealMatrix& m) {
  Json data = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

RealMatrix matrix_from_json(const Json& j, const std::string& field) {
  const Index rows = count(require(j, "rows", field), field + ".rows");
  const Index cols = count(require(j, "cols", field), field + ".cols");
  const Json& data = require(j, "data", field);
  if (!data.is_array() || static_cast<Index>(data.size()) != rows * cols) {
    throw ParseError(field + ".data", "expected " + std::to_string(rows * cols) +
                                          " entries (rows x cols, row-major)");
  }
  RealMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index c = 0; c < cols; ++c) {
      const std::size_t k = static_cast<std::size_t>(i * cols + c);
      m(i, c) = number(data[k], field + ".data[" + std::to_string(k) + "]");
    }
  }
  return m;
}

Json complex_matrix_to_json(const ComplexMatrix& m) {
  Json data = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) data.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

ComplexMatrix complex_matrix_from_json(const Json& j, const std::string& field) {
  const Index rows = count(require(j, "rows", field), field + ".rows");
  const Index cols = count(require(j, "cols", field), field + ".cols");
  const Json& data = require(j, "data", field);
  if (!data.is_array() || static_cast<Index>(data.size()) != rows * cols) {
    throw ParseError(field + ".data", "expected " + std::to_string(rows * cols) +
                                          " [re, im] entries (row-major)");
  }
  ComplexMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index c = 0; c < cols; ++c) {
      const std::size_t k = static_cast<std::size_t>(i * cols + c);
      const std::string f = field + ".data[" + std::to_string(k) + "]";
      const Json& e = data[k];
      if (!e.is_array() || e.size() != 2) throw ParseError(f, "expected an [re, im] pair");
      m(i, c) = Complex(number(e[0], f + "[0]"), number(e[1], f + "[1]"));
    }
  }
  return m;
}

Json parse(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream os;
    os << origin << ":" << line << ":" << col;
    throw ParseError(os.str(), "malformed document");
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json params_to_json(const PhysicalParams& p) {
  Json j;
  j["m"] = p.m;
  j["n"] = p.n;
  j["omega_p"] = p.omega_p;
  j["omega_a"] = p.omega_a;
  j["gamma_p"] = p.gamma_p;
  j["gamma_a"] = p.gamma_a;
  j["kappa"] = p.kappa;
  j["coupling_scale"] = p.coupling_scale;
  const auto opt = [&](const char* key, const std::optional<ComplexMatrix>& m) {
    if (m) j[key] = complex_matrix_to_json(*m);
  };
  opt("Omega_p", p.Omega_p);
  opt("Omega_a", p.Omega_a);
  opt("N_p", p.N_p);
  opt("N_a", p.N_a);
  opt("G_a_row", p.G_a_row);
  opt("K_p_row", p.K_p_row);
  return j;
}

PhysicalParams params_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("<root>", "expected an object");
  check_keys(j,
             {"format", "comment", "input_sign", "m", "n", "omega_p", "omega_a", "gamma_p",
              "gamma_a", "kappa", "coupling_scale", "Omega_p", "Omega_a", "N_p", "N_a",
              "G_a_row", "K_p_row"},
             "");
  PhysicalParams p;
  p.m = count(require(j, "m", ""), "m");
  p.n = count(require(j, "n", ""), "n");
  p.omega_p = vector_of(require(j, "omega_p", ""), "omega_p");
  p.omega_a = vector_of(require(j, "omega_a", ""), "omega_a");
  p.gamma_p = vector_of(require(j, "gamma_p", ""), "gamma_p");
  p.gamma_a = vector_of(require(j, "gamma_a", ""), "gamma_a");
  p.kappa = vector_of(require(j, "kappa", ""), "kappa");
  if (j.contains("coupling_scale")) p.coupling_scale = number(j["coupling_scale"], "coupling_scale");
  const auto opt = [&](const char* key, std::optional<ComplexMatrix>& m) {
    if (j.contains(key)) m = complex_matrix_from_json(j[key], key);
  };
  opt("Omega_p", p.Omega_p);
  opt("Omega_a", p.Omega_a);
  opt("N_p", p.N_p);
  opt("N_a", p.N_a);
  opt("G_a_row", p.G_a_row);
  opt("K_p_row", p.K_p_row);
  if (j.contains("input_sign")) {
    if (!j["input_sign"].is_string()) throw ParseError("input_sign", "expected a string");
    try {
      input_sign_from_string(j["input_sign"].get<std::string>());
    } catch (const Error& e) {
      throw ParseError("input_sign", e.what());
    }
  }
  p.validate();
  return p;
}

PhysicalParams load_params(const std::string& path) {
  return params_from_json(parse(read_file(path), path));
}

Json model_to_json(const QuadratureModel& m) {
  Json j;
  j["format"] = "nmq-model";
  j["version"] = 1;
  j["dims"] = Json{{"m", m.m}, {"n_or_r", m.k}, {"n_in", m.n_in}, {"m_out", m.m_out}};
  j["matrices"] = Json{{"A", matrix_to_json(m.A)},
                       {"B", matrix_to_json(m.B)},
                       {"C", matrix_to_json(m.C)},
                       {"D", matrix_to_json(m.D)}};
  j["provenance"] = Json{{"source", m.source},
                         {"input_sign", to_string(m.sign)},
                         {"synthesized", m.synthesized}};
  return j;
}

QuadratureModel model_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("<root>", "expected an object");
  if (j.contains("format") && j["format"] != "nmq-model") {
    throw ParseError("format", "expected \"nmq-model\"");
  }
  QuadratureModel m;
  const Json& dims = require(j, "dims", "");
  m.m = count(require(dims, "m", "dims"), "dims.m");
  m.k = count(require(dims, "n_or_r", "dims"), "dims.n_or_r");
  m.n_in = count(require(dims, "n_in", "dims"), "dims.n_in");
  m.m_out = dims.contains("m_out") ? count(dims["m_out"], "dims.m_out") : m.m;
  const Json& mats = require(j, "matrices", "");
  m.A = matrix_from_json(require(mats, "A", "matrices"), "matrices.A");
  m.B = matrix_from_json(require(mats, "B", "matrices"), "matrices.B");
  m.C = matrix_from_json(require(mats, "C", "matrices"), "matrices.C");
  m.D = mats.contains("D") ? matrix_from_json(mats["D"], "matrices.D")
                           : feedthrough(m.m_out, m.n_in);
  if (j.contains("provenance")) {
    const Json& pv = j["provenance"];
    if (pv.contains("source") && pv["source"].is_string()) m.source = pv["source"].get<std::string>();
    if (pv.contains("input_sign")) {
      if (!pv["input_sign"].is_string()) throw ParseError("provenance.input_sign", "expected a string");
      try {
        m.sign = input_sign_from_string(pv["input_sign"].get<std::string>());
      } catch (const Error& e) {
        throw ParseError("provenance.input_sign", e.what());
      }
    }
    if (pv.contains("synthesized")) {
      const Json& s = pv["synthesized"];
      if (!s.is_array()) throw ParseError("provenance.synthesized", "expected an array of strings");
      for (const auto& e : s) {
        if (!e.is_string()) throw ParseError("provenance.synthesized", "expected strings");
        m.synthesized.push_back(e.get<std::string>());
      }
    }
  }
  try {
    m.validate();
  } catch (const DimensionError& e) {
    throw ParseError("matrices", e.what());
  }
  return m;
}

QuadratureModel load_model(const std::string& path) {
  return model_from_json(parse(read_file(path), path));
}

Json report_to_json(const RealizabilityReport& r) {
  Json conds = Json::array();
  for (const auto& c : r.conditions) {
    conds.push_back(Json{{"name", c.name},
                         {"equation", c.equation},
                         {"residual", c.residual},
                         {"pass", c.pass}});
  }
  Json j{{"tol", r.tol}, {"pass", r.pass}, {"max_residual", r.max_residual()},
         {"conditions", std::move(conds)}};
  if (r.K_G.size() > 0) j["K_G"] = matrix_to_json(r.K_G);
  return j;
}

Json h2_to_json(const H2Result& h) {
  const auto vec = [](const RealVector& v) {
    Json a = Json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
  };
  return Json{{"h2_error", h.norm()},
              {"h2_squared_ctrl", h.ctrl_trace},
              {"h2_squared_obs", h.obs_trace},
              {"relative_gap", h.relative_gap()},
              {"per_output", vec(h.per_output)},
              {"per_input", vec(h.per_input)}};
}

Json result_to_json(const ReductionResult& r, const ReductionSpec& spec) {
  const ReductionDiagnostics& d = r.diagnostics;
  Json j;
  j["format"] = "nmq-reduction";
  j["spec"] = Json{{"r", spec.r},
                   {"method", to_string(spec.method)},
                   {"seed", spec.seed},
                   {"alignment", to_string(spec.alignment)},
                   {"grad_tol", spec.grad_tol},
                   {"max_iter", spec.max_iter},
                   {"seed_iter", spec.seed_iter},
                   {"random_starts", spec.random_starts}};
  j["h2_error"] = r.h2_error;
  j["h2_squared"] = r.h2_squared;
  j["params"] = Json{{"theta_skew", matrix_to_json(r.params.theta_skew)},
                     {"G22", matrix_to_json(r.params.g22)},
                     {"beta", matrix_to_json(r.params.beta)}};
  Json diag{{"method", d.method},
            {"selected_seed", d.selected_seed},
            {"seeds_tried", d.seeds_tried},
            {"iterations", d.iterations},
            {"gradient_norm", d.gradient_norm},
            {"converged", d.converged},
            {"stationarity_residual", d.stationarity}};
  diag["br_reconstruction"] = Json{{"res_211", d.br.res_211},
                                   {"res_212", d.br.res_212},
                                   {"res_221", d.br.res_221},
                                   {"condition_Q322", d.br.condition},
                                   {"ill_conditioned", d.br.ill_conditioned}};
  if (d.has_sdp) {
    diag["sdp"] = Json{{"status", d.sdp.status},
                       {"objective", d.sdp.objective},
                       {"iterations", d.sdp.iterations},
                       {"rank_gap", d.sdp.rank_gap},
                       {"linear_residual", d.sdp.linear_residual},
                       {"start_feasible", d.sdp.start_feasible},
                       {"candidate", d.sdp.has_candidate}};
  }
  j["diagnostics"] = std::move(diag);
  j["realizability"] = report_to_json(r.realizability);
  j["model"] = model_to_json(r.reduced);
  return j;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, "cannot open file for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw Error("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot rename " + tmp.string() + " to " + path + ": " + ec.message());
  }
}

}  // namespace nmq::io
