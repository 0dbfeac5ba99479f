#include "nmq/realizability.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nmq/errors.hpp"

namespace nmq {

namespace {

double fro(const RealMatrix& m) { return m.size() == 0 ? 0.0 : m.norm(); }
double fro(const ComplexMatrix& m) { return m.size() == 0 ? 0.0 : m.norm(); }

void finish(RealizabilityReport& report) {
  report.pass = true;
  for (auto& c : report.conditions) {
    c.pass = std::isfinite(c.residual) && c.residual <= report.tol;
    report.pass = report.pass && c.pass;
  }
}

RealMatrix tensor_i2(const RealMatrix& beta) {
  return linalg::kron(beta, RealMatrix::Identity(2, 2));
}

}  // namespace

double RealizabilityReport::max_residual() const {
  double worst = 0.0;
  for (const auto& c : conditions) worst = std::max(worst, c.residual);
  return worst;
}

const Condition& RealizabilityReport::at(const std::string& name) const {
  for (const auto& c : conditions) {
    if (c.name == name) return c;
  }
  throw Error("RealizabilityReport: no condition named '" + name + "'");
}

RealizabilityReport check_complex(const ComplexQSDE& q, double tol) {
  const Index m = q.m, n = q.n, mo = q.m_out;
  if (q.F.rows() != m + n || q.F.cols() != m + n || q.G.rows() != m + n ||
      q.G.cols() != mo + n || q.H.rows() != mo || q.H.cols() != m + n) {
    throw DimensionError("check_complex: matrices do not match the partition");
  }
  const ComplexMatrix f11 = q.F.topLeftCorner(m, m);
  const ComplexMatrix f12 = q.F.topRightCorner(m, n);
  const ComplexMatrix f21 = q.F.bottomLeftCorner(n, m);
  const ComplexMatrix f22 = q.F.bottomRightCorner(n, n);
  const ComplexMatrix g11 = q.G.topLeftCorner(m, mo);
  const ComplexMatrix g12 = q.G.topRightCorner(m, n);
  const ComplexMatrix g21 = q.G.bottomLeftCorner(n, mo);
  const ComplexMatrix g22 = q.G.bottomRightCorner(n, n);
  const ComplexMatrix h11 = q.H.leftCols(m);
  const ComplexMatrix h12 = q.H.rightCols(n);

  RealizabilityReport r;
  r.tol = tol;
  r.conditions.push_back({"principal_dissipation", "F11 + F11^dag + G11 G11^dag = 0",
                          fro(ComplexMatrix(f11 + f11.adjoint() + g11 * g11.adjoint())), false});
  r.conditions.push_back({"principal_io", "G11 = -H11^dag",
                          fro(ComplexMatrix(g11 + h11.adjoint())), false});
  r.conditions.push_back({"ancillary_dissipation", "F22 + F22^dag + G22 G22^dag = 0",
                          fro(ComplexMatrix(f22 + f22.adjoint() + g22 * g22.adjoint())), false});
  r.conditions.push_back({"coupling_real", "F12 = conj(F12)",
                          fro(RealMatrix(f12.imag())), false});
  r.conditions.push_back({"coupling_antisymmetry", "F12 = -F21^dag",
                          fro(ComplexMatrix(f12 + f21.adjoint())), false});
  const double cross = std::sqrt(std::pow(fro(g12), 2) + std::pow(fro(g21), 2) +
                                 std::pow(fro(h12), 2));
  r.conditions.push_back({"cross_io", "G12 = G21 = H12 = 0", cross, false});
  r.K_G = f12.real();
  finish(r);
  return r;
}

RealMatrix extract_coupling(const RealMatrix& a12) {
  if (a12.rows() % 2 != 0 || a12.cols() % 2 != 0) {
    throw DimensionError("extract_coupling: A12 must have even dimensions");
  }
  RealMatrix beta(a12.rows() / 2, a12.cols() / 2);
  for (Index i = 0; i < beta.rows(); ++i) {
    for (Index j = 0; j < beta.cols(); ++j) {
      beta(i, j) = 0.5 * (a12(2 * i, 2 * j) + a12(2 * i + 1, 2 * j + 1));
    }
  }
  return beta;
}

RealizabilityReport check_quadrature(const QuadratureModel& model, double tol) {
  model.validate();
  const RealMatrix a11 = model.A11(), a12 = model.A12(), a21 = model.A21(),
                   a22 = model.A22();
  const RealMatrix b11 = model.B11(), b22 = model.B22();
  RealizabilityReport r;
  r.tol = tol;
  r.K_G = extract_coupling(a12);
  r.conditions.push_back({"principal_dissipation", "A11 + A11^T + B11 B11^T = 0",
                          fro(RealMatrix(a11 + a11.transpose() + b11 * b11.transpose())), false});
  r.conditions.push_back({"principal_io", "B11 = -C11^T",
                          fro(RealMatrix(b11 + model.C11().transpose())), false});
  r.conditions.push_back({"ancillary_dissipation", "A22 + A22^T + B22 B22^T = 0",
                          fro(RealMatrix(a22 + a22.transpose() + b22 * b22.transpose())), false});
  r.conditions.push_back({"coupling_tensor", "A12 = K_G (x) I2",
                          fro(RealMatrix(a12 - tensor_i2(r.K_G))), false});
  r.conditions.push_back({"coupling_antisymmetry", "A12 = -A21^T",
                          fro(RealMatrix(a12 + a21.transpose())), false});
  const double cross = std::sqrt(std::pow(fro(model.B12()), 2) +
                                 std::pow(fro(model.B21()), 2) +
                                 std::pow(fro(model.C12()), 2));
  r.conditions.push_back({"cross_io", "B12 = B21 = C12 = 0", cross, false});
  finish(r);
  return r;
}

QuadratureModel realizable_parameterization(const RealMatrix& theta_skew,
                                            const RealMatrix& g22,
                                            const RealMatrix& beta,
                                            const QuadratureModel& principal) {
  const Index m = principal.m;
  if (theta_skew.rows() != theta_skew.cols() || theta_skew.rows() % 2 != 0) {
    throw DimensionError("realizable_parameterization: Theta must be 2r x 2r");
  }
  const Index r = theta_skew.rows() / 2;
  if (g22.rows() != 2 * r || g22.cols() % 2 != 0) {
    throw DimensionError("realizable_parameterization: G22 must be 2r x 2n_in");
  }
  if (beta.rows() != m || beta.cols() != r) {
    throw DimensionError("realizable_parameterization: beta must be m x r");
  }
  const double asym = theta_skew.size() == 0
                          ? 0.0
                          : (theta_skew + theta_skew.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12) {
    std::ostringstream os;
    os << "realizable_parameterization: Theta is not antisymmetric (deviation "
       << asym << ")";
    throw DimensionError(os.str());
  }
  const Index n_in = g22.cols() / 2;
  QuadratureModel out;
  out.m = m;
  out.k = r;
  out.m_out = principal.m_out;
  out.n_in = n_in;
  out.sign = principal.sign;
  out.source = "realizable-parameterization";

  const RealMatrix a12 = tensor_i2(beta);
  out.A = RealMatrix::Zero(2 * (m + r), 2 * (m + r));
  out.A.topLeftCorner(2 * m, 2 * m) = principal.A11();
  out.A.topRightCorner(2 * m, 2 * r) = a12;
  out.A.bottomLeftCorner(2 * r, 2 * m) = -a12.transpose();
  out.A.bottomRightCorner(2 * r, 2 * r) = theta_skew - 0.5 * g22 * g22.transpose();

  out.B = RealMatrix::Zero(2 * (m + r), 2 * (out.m_out + n_in));
  out.B.topLeftCorner(2 * m, 2 * out.m_out) = principal.B11();
  out.B.bottomRightCorner(2 * r, 2 * n_in) = g22;

  out.C = RealMatrix::Zero(2 * out.m_out, 2 * (m + r));
  out.C.leftCols(2 * m) = principal.C11();
  out.D = feedthrough(out.m_out, n_in);
  return out;
}

QuadratureModel project_to_realizable(const QuadratureModel& model) {
  model.validate();
  QuadratureModel out = model;
  const Index m = model.m, k = model.k;
  const RealMatrix a22 = model.A22();
  const RealMatrix b22 = model.B22();
  const RealMatrix a12 = tensor_i2(extract_coupling(model.A12()));
  out.A.bottomRightCorner(2 * k, 2 * k) =
      0.5 * (a22 - a22.transpose()) - 0.5 * b22 * b22.transpose();
  out.A.topRightCorner(2 * m, 2 * k) = a12;
  out.A.bottomLeftCorner(2 * k, 2 * m) = -a12.transpose();
  out.B.topRightCorner(2 * m, 2 * model.n_in).setZero();
  out.B.bottomLeftCorner(2 * k, 2 * model.m_out).setZero();
  out.C.rightCols(2 * k).setZero();
  return out;
}

}  // namespace nmq
