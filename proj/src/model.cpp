#include "nmq/model.hpp"

#include <cmath>
#include <sstream>

#include "nmq/errors.hpp"

namespace nmq {

namespace {

constexpr Complex kI{0.0, 1.0};

void require_shape(const ComplexMatrix& m, Index rows, Index cols,
                   const char* field) {
  if (m.rows() != rows || m.cols() != cols) {
    std::ostringstream os;
    os << field << ": expected " << rows << "x" << cols << ", got " << m.rows()
       << "x" << m.cols();
    throw DimensionError(os.str());
  }
}

void require_length(const std::vector<double>& v, Index n, const char* field) {
  if (static_cast<Index>(v.size()) != n) {
    std::ostringstream os;
    os << field << ": expected " << n << " entries, got " << v.size();
    throw DimensionError(os.str());
  }
}

void require_hermitian(const ComplexMatrix& m, const char* field) {
  const double gap = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (m.size() > 0 && gap > 1e-12) {
    std::ostringstream os;
    os << "matrix is not Hermitian (deviation " << gap << ")";
    throw ParseError(field, os.str());
  }
}

ComplexMatrix diag_of(const std::vector<double>& v, bool take_sqrt) {
  ComplexMatrix out = ComplexMatrix::Zero(v.size(), v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out(i, i) = take_sqrt ? std::sqrt(v[i]) : v[i];
  }
  return out;
}

ComplexMatrix row_of_sqrt(const std::vector<double>& v, double scale) {
  ComplexMatrix out(1, v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out(0, i) = scale * std::sqrt(v[i]);
  return out;
}

}  // namespace

const char* to_string(InputSign sign) {
  return sign == InputSign::Physical ? "physical" : "positive";
}

InputSign input_sign_from_string(const std::string& text) {
  if (text == "physical") return InputSign::Physical;
  if (text == "positive") return InputSign::Positive;
  throw ParseError("sign", "expected 'physical' or 'positive', got '" + text + "'");
}

void PhysicalParams::validate() const {
  if (m < 0 || n < 0) throw ParseError("m", "mode counts must be non-negative");

  if (Omega_p) {
    require_shape(*Omega_p, m, m, "Omega_p");
    require_hermitian(*Omega_p, "Omega_p");
  } else {
    require_length(omega_p, m, "omega_p");
  }
  if (Omega_a) {
    require_shape(*Omega_a, n, n, "Omega_a");
    require_hermitian(*Omega_a, "Omega_a");
  } else {
    require_length(omega_a, n, "omega_a");
  }
  if (N_p) {
    if (N_p->cols() != m || (m > 0 && N_p->rows() < 1)) {
      std::ostringstream os;
      os << "N_p: expected m'x" << m << " with m' >= 1, got " << N_p->rows()
         << "x" << N_p->cols();
      throw DimensionError(os.str());
    }
  } else {
    require_length(gamma_p, m, "gamma_p");
  }
  if (N_a) {
    require_shape(*N_a, n, n, "N_a");
  } else {
    require_length(gamma_a, n, "gamma_a");
  }
  if (!G_a_row) require_length(gamma_a, n, "gamma_a");
  if (G_a_row) require_shape(*G_a_row, 1, n, "G_a_row");
  if (K_p_row) {
    require_shape(*K_p_row, 1, m, "K_p_row");
  } else {
    require_length(kappa, m, "kappa");
  }

  for (double g : gamma_p) {
    if (!(g > 0.0) || !std::isfinite(g)) throw ParseError("gamma_p", "damping rates must be > 0");
  }
  for (double g : gamma_a) {
    if (!(g > 0.0) || !std::isfinite(g)) throw ParseError("gamma_a", "damping rates must be > 0");
  }
  for (double k : kappa) {
    if (!(k >= 0.0) || !std::isfinite(k)) throw ParseError("kappa", "coupling strengths must be >= 0");
  }
  for (double w : omega_p) {
    if (!std::isfinite(w)) throw ParseError("omega_p", "frequencies must be finite");
  }
  for (double w : omega_a) {
    if (!std::isfinite(w)) throw ParseError("omega_a", "frequencies must be finite");
  }
  if (!std::isfinite(coupling_scale)) {
    throw ParseError("coupling_scale", "must be finite");
  }
}

void QuadratureModel::validate() const {
  const auto check = [](const RealMatrix& x, Index r, Index c, const char* name) {
    if (x.rows() != r || x.cols() != c) {
      std::ostringstream os;
      os << name << ": expected " << r << "x" << c << ", got " << x.rows() << "x"
         << x.cols();
      throw DimensionError(os.str());
    }
  };
  if (m < 0 || k < 0 || m_out < 0 || n_in < 0) {
    throw DimensionError("QuadratureModel: negative partition size");
  }
  check(A, states(), states(), "A");
  check(B, states(), inputs(), "B");
  check(C, outputs(), states(), "C");
  check(D, outputs(), inputs(), "D");
}

ComplexQSDE build_complex(const PhysicalParams& p) {
  p.validate();
  ComplexQSDE q;
  q.m = p.m;
  q.n = p.n;

  const ComplexMatrix omega_p = p.Omega_p ? *p.Omega_p : diag_of(p.omega_p, false);
  const ComplexMatrix omega_a = p.Omega_a ? *p.Omega_a : diag_of(p.omega_a, false);
  const ComplexMatrix n_p = p.N_p ? *p.N_p : diag_of(p.gamma_p, true);
  const ComplexMatrix n_a = p.N_a ? *p.N_a : diag_of(p.gamma_a, true);
  const ComplexMatrix k_p = p.K_p_row ? *p.K_p_row : row_of_sqrt(p.kappa, 1.0);
  const ComplexMatrix g_a =
      p.G_a_row ? *p.G_a_row : row_of_sqrt(p.gamma_a, p.coupling_scale);

  if (!p.Omega_p) q.synthesized.push_back("Omega_p=diag(omega_p)");
  if (!p.Omega_a) q.synthesized.push_back("Omega_a=diag(omega_a)");
  if (!p.N_p) q.synthesized.push_back("N_p=diag(sqrt(gamma_p))");
  if (!p.N_a) q.synthesized.push_back("N_a=diag(sqrt(gamma_a))");
  if (!p.K_p_row) q.synthesized.push_back("K_p_row=sqrt(kappa)");
  if (!p.G_a_row) {
    std::ostringstream os;
    os.precision(17);
    os << "G_a_row=" << p.coupling_scale << "*sqrt(gamma_a)";
    q.synthesized.push_back(os.str());
  }

  const Index m = p.m, n = p.n, mo = n_p.rows();
  q.m_out = mo;

  q.F = ComplexMatrix::Zero(m + n, m + n);
  q.F.topLeftCorner(m, m) = -kI * omega_p - 0.5 * n_p.adjoint() * n_p;
  q.F.bottomRightCorner(n, n) = -kI * omega_a - 0.5 * n_a.adjoint() * n_a;
  q.F.topRightCorner(m, n) = k_p.adjoint() * g_a;
  q.F.bottomLeftCorner(n, m) = -g_a.adjoint() * k_p;

  q.G = ComplexMatrix::Zero(m + n, mo + n);
  q.G.topLeftCorner(m, mo) = -n_p.adjoint();
  q.G.bottomRightCorner(n, n) = -n_a.adjoint();

  q.H = ComplexMatrix::Zero(mo, m + n);
  q.H.leftCols(m) = n_p;
  return q;
}

RealMatrix quadrature_map(const ComplexMatrix& m) {
  RealMatrix out(2 * m.rows(), 2 * m.cols());
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      const double a = m(i, j).real(), b = m(i, j).imag();
      out(2 * i, 2 * j) = a;
      out(2 * i, 2 * j + 1) = -b;
      out(2 * i + 1, 2 * j) = b;
      out(2 * i + 1, 2 * j + 1) = a;
    }
  }
  return out;
}

RealMatrix feedthrough(Index m_out, Index n_in) {
  RealMatrix d = RealMatrix::Zero(2 * m_out, 2 * (m_out + n_in));
  d.leftCols(2 * m_out).setIdentity();
  return d;
}

QuadratureModel to_quadrature(const ComplexQSDE& q, InputSign sign) {
  QuadratureModel out;
  out.m = q.m;
  out.k = q.n;
  out.m_out = q.m_out;
  out.n_in = q.n;
  out.sign = sign;
  out.synthesized = q.synthesized;
  const double s = sign == InputSign::Physical ? 1.0 : -1.0;
  out.A = quadrature_map(q.F);
  out.B = s * quadrature_map(q.G);
  out.C = s * quadrature_map(q.H);
  out.D = feedthrough(q.m_out, q.n);
  out.source = "physical-params";
  out.validate();
  return out;
}

PhysicalParams example_params() {
  PhysicalParams p;
  p.m = 2;
  p.n = 3;
  p.omega_p = {10.85, 9.74};
  p.omega_a = {10.03, 8.93, 5.06};
  p.gamma_p = {0.954, 0.987};
  p.gamma_a = {0.848, 1.034, 0.775};
  p.kappa = {1.25, 1.14};
  return p;
}

QuadratureModel build_example() {
  QuadratureModel q = to_quadrature(build_complex(example_params()), InputSign::Positive);
  q.source = "builtin:paper-example";
  return q;
}

QuadratureModel reduced_example() {
  const QuadratureModel orig = build_example();
  RealMatrix fa(2, 2);
  fa << -0.6278, 10.0793, -10.0696, -0.6277;
  RealMatrix fpa(4, 2);
  fpa << 0.5528, 0, 0, 0.5528, 0.5262, 0, 0, 0.5262;
  RealMatrix na(2, 2);
  na << 1.1201, -0.0310, 0.0224, 1.1202;

  QuadratureModel r;
  r.m = 2;
  r.k = 1;
  r.m_out = 2;
  r.n_in = 1;
  r.sign = InputSign::Positive;
  r.A = RealMatrix::Zero(6, 6);
  r.A.topLeftCorner(4, 4) = orig.A11();
  r.A.topRightCorner(4, 2) = fpa;
  r.A.bottomLeftCorner(2, 4) = -fpa.transpose();
  r.A.bottomRightCorner(2, 2) = fa;
  r.B = RealMatrix::Zero(6, 6);
  r.B.topLeftCorner(4, 4) = orig.B11();
  r.B.bottomRightCorner(2, 2) = na;
  r.C = RealMatrix::Zero(4, 6);
  r.C.leftCols(4) = orig.C11();
  r.D = feedthrough(2, 1);
  r.source = "builtin:paper-reduced";
  r.validate();
  return r;
}

}  // namespace nmq
