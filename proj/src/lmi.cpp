#include "nmq/lmi.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "nmq/errors.hpp"
#include "nmq/realizability.hpp"

namespace nmq {

using sdp::AffineExpr;
using sdp::AffineMatrix;

namespace {

// Dense matrix of affine forms with constant-matrix products.
class ExprMat {
 public:
  ExprMat(Index rows, Index cols) : rows_(rows), cols_(cols), e_(rows * cols) {}

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  AffineExpr& operator()(Index i, Index j) { return e_[i + j * rows_]; }
  const AffineExpr& operator()(Index i, Index j) const { return e_[i + j * rows_]; }

  static ExprMat constant(const RealMatrix& k) {
    ExprMat out(k.rows(), k.cols());
    for (Index j = 0; j < k.cols(); ++j) {
      for (Index i = 0; i < k.rows(); ++i) out(i, j).constant = k(i, j);
    }
    return out;
  }

  ExprMat transpose() const {
    ExprMat out(cols_, rows_);
    for (Index j = 0; j < cols_; ++j) {
      for (Index i = 0; i < rows_; ++i) out(j, i) = (*this)(i, j);
    }
    return out;
  }

  ExprMat& add(const ExprMat& o, double s = 1.0) {
    if (o.rows_ != rows_ || o.cols_ != cols_) throw DimensionError("ExprMat: size mismatch");
    for (std::size_t k = 0; k < e_.size(); ++k) e_[k].add(o.e_[k], s);
    return *this;
  }

  ExprMat& add_constant(const RealMatrix& k, double s = 1.0) {
    for (Index j = 0; j < cols_; ++j) {
      for (Index i = 0; i < rows_; ++i) (*this)(i, j).constant += s * k(i, j);
    }
    return *this;
  }

  ExprMat scaled(double s) const {
    ExprMat out(rows_, cols_);
    out.add(*this, s);
    return out;
  }

  ExprMat sym() const {
    ExprMat out = scaled(0.5);
    out.add(transpose(), 0.5);
    out.compact();
    return out;
  }

  ExprMat cols_range(Index c0, Index count) const {
    ExprMat out(rows_, count);
    for (Index j = 0; j < count; ++j) {
      for (Index i = 0; i < rows_; ++i) out(i, j) = (*this)(i, c0 + j);
    }
    return out;
  }

  void compact() {
    for (auto& x : e_) x.compact();
  }

  friend ExprMat operator*(const RealMatrix& k, const ExprMat& x) {
    if (k.cols() != x.rows_) throw DimensionError("ExprMat: product size mismatch");
    ExprMat out(k.rows(), x.cols_);
    for (Index j = 0; j < x.cols_; ++j) {
      for (Index l = 0; l < k.cols(); ++l) {
        const AffineExpr& src = x(l, j);
        if (src.terms.empty() && src.constant == 0.0) continue;
        for (Index i = 0; i < k.rows(); ++i) {
          if (k(i, l) != 0.0) out(i, j).add(src, k(i, l));
        }
      }
    }
    out.compact();
    return out;
  }

  friend ExprMat operator*(const ExprMat& x, const RealMatrix& k) {
    return (k.transpose() * x.transpose()).transpose();
  }

 private:
  Index rows_, cols_;
  std::vector<AffineExpr> e_;
};

void place(AffineMatrix& big, Index r0, Index c0, const ExprMat& x) {
  for (Index j = 0; j < x.cols(); ++j) {
    for (Index i = 0; i < x.rows(); ++i) big(r0 + i, c0 + j).add(x(i, j));
  }
}

// [[tl, tr], [tr^T, br]] as an affine matrix.
AffineMatrix block2(const ExprMat& tl, const ExprMat& tr, const ExprMat& br) {
  AffineMatrix out(tl.rows() + br.rows());
  place(out, 0, 0, tl);
  place(out, 0, tl.cols(), tr);
  place(out, tl.rows(), 0, tr.transpose());
  place(out, tl.rows(), tl.cols(), br);
  return out;
}

AffineMatrix to_affine(const ExprMat& x) {
  AffineMatrix out(x.rows());
  place(out, 0, 0, x);
  return out;
}

// Sum over p, q of X(p, q) * K(q, p), i.e. tr(X K).
AffineExpr trace_product(const ExprMat& x, const RealMatrix& k) {
  AffineExpr out;
  for (Index p = 0; p < x.rows(); ++p) {
    for (Index q = 0; q < x.cols(); ++q) {
      if (k(q, p) != 0.0) out.add(x(p, q), k(q, p));
    }
  }
  out.compact();
  return out;
}

RealMatrix tensor_i2(const RealMatrix& beta) {
  return linalg::kron(beta, RealMatrix::Identity(2, 2));
}

double max_eig(const RealMatrix& m) {
  return -linalg::min_symmetric_eigenvalue(-linalg::symmetric_part(m));
}

RealMatrix inverse_spd(const RealMatrix& m, const char* what) {
  Eigen::FullPivLU<RealMatrix> lu(m);
  if (!lu.isInvertible() || lu.rcond() < 1e-14) {
    throw SingularMatrixError(std::string(what) + " is singular");
  }
  return lu.inverse();
}

}  // namespace

LmiProblem::LmiProblem(const QuadratureModel& orig, Index r, double alpha1, double alpha2)
    : orig_(orig), r_(r), alpha1_(alpha1), alpha2_(alpha2) {
  orig_.validate();
  if (r < 1 || r >= orig.k) {
    std::ostringstream os;
    os << "LmiProblem: target ancillary mode count r=" << r << " must satisfy 1 <= r < n="
       << orig.k;
    throw DimensionError(os.str());
  }
}

RealMatrix LmiProblem::A_r1(const RealMatrix& beta) const {
  const Index m2 = 2 * m(), r2 = 2 * r_;
  if (beta.rows() != m() || beta.cols() != r_) throw DimensionError("A_r1: beta must be m x r");
  RealMatrix a = RealMatrix::Zero(R(), R());
  a.topLeftCorner(m2, m2) = orig_.A11();
  a.topRightCorner(m2, r2) = tensor_i2(beta);
  a.bottomLeftCorner(r2, m2) = -tensor_i2(beta).transpose();
  return a;
}

RealMatrix LmiProblem::B_r1() const {
  RealMatrix b = RealMatrix::Zero(R(), inputs());
  b.topLeftCorner(2 * m(), 2 * orig_.m_out) = orig_.B11();
  return b;
}

RealMatrix LmiProblem::C_r() const {
  RealMatrix c = RealMatrix::Zero(orig_.outputs(), R());
  c.leftCols(2 * m()) = orig_.C11();
  return c;
}

RealMatrix LmiProblem::E() const {
  RealMatrix e = RealMatrix::Zero(2 * r_, R());
  e.rightCols(2 * r_).setIdentity();
  return e;
}

RealMatrix LmiProblem::Ebar() const {
  RealMatrix e = RealMatrix::Zero(R(), R());
  e.bottomRightCorner(2 * r_, 2 * r_).setIdentity();
  return e;
}

RealMatrix LmiProblem::E_R() const {
  RealMatrix e = RealMatrix::Zero(2 * orig_.n_in, inputs());
  e.rightCols(2 * orig_.n_in).setIdentity();
  return e;
}

RealMatrix LmiProblem::F_sel() const {
  RealMatrix f = RealMatrix::Zero(inputs(), inputs());
  f.bottomRightCorner(2 * orig_.n_in, 2 * orig_.n_in).setIdentity();
  return f;
}

RealMatrix LmiProblem::lifted_M(const RealMatrix& Q2, const RealMatrix& Q3) const {
  return Q2 * Ebar() * inverse_spd(Q3, "Q3") * Q2.transpose();
}

RealMatrix LmiProblem::B_r(const RealMatrix& T) const {
  return B_r1() + Ebar() * T * orig_.B * F_sel();
}

LmiEvaluation LmiProblem::evaluate(const LmiCandidate& c, double margin) const {
  const Index N_ = N(), R_ = R();
  if (c.Q1.rows() != N_ || c.Q1.cols() != N_ || c.Q2.rows() != N_ || c.Q2.cols() != R_ ||
      c.Q3.rows() != R_ || c.Q3.cols() != R_ || c.M.rows() != N_ || c.M.cols() != N_ ||
      c.beta.rows() != m() || c.beta.cols() != r_) {
    throw DimensionError("LmiProblem::evaluate: candidate dimensions do not match");
  }
  const RealMatrix& A = orig_.A;
  const RealMatrix& B = orig_.B;
  const RealMatrix& C = orig_.C;
  const RealMatrix Cr = C_r();
  const RealMatrix Ar1 = A_r1(c.beta);
  LmiEvaluation ev;

  RealMatrix qhat(N_ + R_, N_ + R_);
  qhat << c.Q1, c.Q2, c.Q2.transpose(), c.Q3;
  ev.q_hat_min_eig = linalg::min_symmetric_eigenvalue(linalg::symmetric_part(qhat));

  const RealMatrix L1 = A.transpose() * c.Q1 + c.Q1 * A;
  const RealMatrix CC = C.transpose() * C;
  RealMatrix m36(2 * N_, 2 * N_);
  m36 << c.alpha1 * (L1 + CC), c.M * A, (c.M * A).transpose(), L1;
  ev.eq36_max_eig = max_eig(m36);

  const RealMatrix tr37 = A.transpose() * c.Q2 + c.Q2 * Ar1 - C.transpose() * Cr;
  RealMatrix m37(N_ + R_, N_ + R_);
  m37 << c.alpha2 * (L1 + CC), tr37, tr37.transpose(),
      Ar1.transpose() * c.Q3 + c.Q3 * Ar1 + Cr.transpose() * Cr;
  ev.eq37_max_eig = max_eig(m37);

  ev.alpha_sum_residual = std::abs(c.alpha1 + c.alpha2 - 1.0);
  ev.alpha_positive = c.alpha1 > 0.0 && c.alpha2 > 0.0;

  const RealMatrix q3inv = inverse_spd(c.Q3, "Q3");
  const RealMatrix T = q3inv * c.Q2.transpose();
  RealMatrix bh(N_ + R_, inputs());
  bh << B, B_r(T);
  ev.trace_bound = (bh.transpose() * qhat * bh).trace();
  ev.trace_slack = c.gamma_sq - ev.trace_bound;

  const double scale = 1.0 + c.Q1.norm() * c.Q2.norm() + c.Q2.norm() * c.Q3.norm();
  ev.commutation_residual = (c.Q1 * c.Q2 - c.Q2 * c.Q3).norm();
  ev.m_residual = (c.M - c.Q2 * Ebar() * q3inv * c.Q2.transpose()).norm();
  ev.feasible = ev.q_hat_min_eig >= margin && ev.eq36_max_eig <= -margin &&
                ev.eq37_max_eig <= -margin && ev.alpha_sum_residual <= 1e-12 &&
                ev.alpha_positive && ev.trace_slack >= 0.0 &&
                ev.commutation_residual <= 1e-8 * scale && ev.m_residual <= 1e-8 * scale;
  return ev;
}

QuadratureModel LmiProblem::reconstruct(const LmiCandidate& c) const {
  const RealMatrix T = inverse_spd(c.Q3, "Q3") * c.Q2.transpose();
  const RealMatrix V = inverse_spd(c.Q1, "Q1") * c.Q2;
  const RealMatrix e = E();
  const Index r2 = 2 * r_;
  QuadratureModel out;
  out.m = m();
  out.k = r_;
  out.m_out = orig_.m_out;
  out.n_in = orig_.n_in;
  out.sign = orig_.sign;
  out.source = "lmi-reconstruction";
  out.A = A_r1(c.beta);
  out.A.bottomRightCorner(r2, r2) = e * T * orig_.A * V * e.transpose();
  out.B = B_r1();
  out.B.bottomRightCorner(r2, 2 * orig_.n_in) = e * T * orig_.B * E_R().transpose();
  out.C = C_r();
  out.D = feedthrough(out.m_out, out.n_in);
  return out;
}

sdp::ConicProblem LmiProblem::fixed_beta_problem(const RealMatrix& beta, double margin) const {
  const Index N_ = N(), R_ = R();
  sdp::ProblemBuilder pb;
  const auto q1 = pb.add_symmetric(N_, "Q1");
  const Index q2 = pb.add_variables(N_ * R_, "Q2");
  const auto q3 = pb.add_symmetric(R_, "Q3");
  const Index mm = pb.add_variables(N_ * N_, "M");

  const auto symexpr = [](const sdp::SymmetricVariable& v) {
    ExprMat out(v.n, v.n);
    for (Index j = 0; j < v.n; ++j) {
      for (Index i = 0; i < v.n; ++i) out(i, j).add(v.index(i, j), 1.0);
    }
    return out;
  };
  ExprMat Q1 = symexpr(q1), Q3 = symexpr(q3);
  ExprMat Q2(N_, R_), M(N_, N_);
  for (Index i = 0; i < N_; ++i) {
    for (Index j = 0; j < R_; ++j) Q2(i, j).add(q2 + i * R_ + j, 1.0);
    for (Index j = 0; j < N_; ++j) M(i, j).add(mm + i * N_ + j, 1.0);
  }

  const RealMatrix& A = orig_.A;
  const RealMatrix CC = orig_.C.transpose() * orig_.C;
  const RealMatrix Cr = C_r();
  const RealMatrix Ar1 = A_r1(beta);

  pb.add_psd(block2(Q1, Q2, Q3), "Q_hat_pos", margin);

  ExprMat L1 = A.transpose() * Q1;
  L1.add(Q1 * A);
  ExprMat tl1 = L1.scaled(alpha1_);
  tl1.add_constant(CC, alpha1_);
  pb.add_nsd(block2(tl1, M * A, L1), "eq36", margin);

  ExprMat tl2 = L1.scaled(alpha2_);
  tl2.add_constant(CC, alpha2_);
  ExprMat tr2 = A.transpose() * Q2;
  tr2.add(Q2 * Ar1);
  tr2.add_constant(orig_.C.transpose() * Cr, -1.0);
  ExprMat br2 = Ar1.transpose() * Q3;
  br2.add(Q3 * Ar1);
  br2.add_constant(Cr.transpose() * Cr);
  pb.add_nsd(block2(tl2, tr2, br2), "eq37", margin);

  pb.add_equality(AffineExpr(alpha1_ + alpha2_ - 1.0), "alpha_sum");
  pb.add_nonneg({AffineExpr(alpha1_ - margin), AffineExpr(alpha2_ - margin)}, "alpha_pos");
  return pb.build();
}

LmiCandidate LmiProblem::fixed_beta_candidate(const RealVector& x, const RealMatrix& beta) const {
  const Index N_ = N(), R_ = R();
  sdp::SymmetricVariable q1{N_, 0};
  const Index q2 = q1.count();
  sdp::SymmetricVariable q3{R_, q2 + N_ * R_};
  const Index mm = q3.offset + q3.count();
  LmiCandidate c;
  c.Q1 = q1.value(x);
  c.Q2.resize(N_, R_);
  for (Index i = 0; i < N_; ++i) {
    for (Index j = 0; j < R_; ++j) c.Q2(i, j) = x(q2 + i * R_ + j);
  }
  c.Q3 = q3.value(x);
  c.M.resize(N_, N_);
  for (Index i = 0; i < N_; ++i) {
    for (Index j = 0; j < N_; ++j) c.M(i, j) = x(mm + i * N_ + j);
  }
  c.beta = beta;
  c.alpha1 = alpha1_;
  c.alpha2 = alpha2_;
  return c;
}

LiftedSdp::LiftedSdp(const LmiProblem& lmi) : lmi_(lmi) {
  const Index N = lmi.N(), R = lmi.R(), m2 = 2 * lmi.m(), r2 = 2 * lmi.r();
  const std::vector<LiftBlock> layout = {
      {"0", 0, N, N},      {"x1", 0, N, N},     {"x2", 0, N, R},     {"x3", 0, R, R},
      {"x4", 0, N, N},     {"x5", 0, R, R},     {"x6", 0, R, N},     {"x7", 0, r2, m2},
      {"x8", 0, m2, r2},   {"x9", 0, N, m2},    {"x10", 0, N, r2},   {"x11", 0, R, m2},
      {"x12", 0, R, r2},   {"v1", 0, N, R},     {"v2", 0, R, N},     {"v3", 0, N, R},
      {"v4", 0, N, R},     {"v5", 0, N, r2},    {"v6", 0, N, m2},    {"v7", 0, R, r2},
      {"v8", 0, R, m2}};
  Index offset = 0;
  for (auto b : layout) {
    b.offset = offset;
    offset += b.rows;
    index_[b.name] = blocks_.size();
    blocks_.push_back(b);
  }
  build();
}

const LiftBlock& LiftedSdp::block(const std::string& name) const {
  const auto it = index_.find(name);
  if (it == index_.end()) throw Error("LiftedSdp: unknown block '" + name + "'");
  return blocks_[it->second];
}

void LiftedSdp::build() {
  const LmiProblem& L = lmi_;
  const Index N = L.N(), R = L.R(), m = L.m(), r = L.r(), m2 = 2 * m, r2 = 2 * r;
  Index D = 0;
  for (const auto& b : blocks_) D += b.rows;
  const Index I = L.inputs();

  for (int pass = 0; pass < 2; ++pass) {
    const bool full = pass == 0;
    sdp::ProblemBuilder pb;
    Z_ = pb.add_symmetric(D, "Z");
    beta_ = pb.add_variables(m * r, "beta");
    W_ = pb.add_symmetric(I, "W");
    gamma_ = pb.add_variables(1, "gamma_sq");

    const auto z = [&](const std::string& a, Index p, const std::string& b, Index q) {
      return Z_.index(off(a) + p, off(b) + q);
    };
    // Z_{a,b} restricted to rows x cols as an expression matrix.
    const auto zb = [&](const std::string& a, const std::string& b, Index rows, Index cols) {
      ExprMat out(rows, cols);
      for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < rows; ++i) out(i, j).add(z(a, i, b, j), 1.0);
      }
      return out;
    };
    const auto link = [&](std::vector<AffineExpr>& rows, Index i1, Index i2, double rhs = 0.0) {
      AffineExpr e(-rhs);
      e.add(i1, 1.0);
      if (i2 >= 0) e.add(i2, -1.0);
      rows.push_back(std::move(e));
    };

    const ExprMat Q1 = zb("x1", "0", N, N).sym();
    const ExprMat Q2 = zb("x2", "0", N, R);
    const ExprMat Q3 = zb("x3", "0", R, R).sym();
    const ExprMat M = zb("x4", "0", N, N);
    const RealMatrix& A = L.original().A;
    const RealMatrix& B = L.original().B;
    const RealMatrix CC = L.original().C.transpose() * L.original().C;
    const RealMatrix Cr = L.C_r();
    const RealMatrix Fp = L.original().A11();

    ExprMat L1 = A.transpose() * Q1;
    L1.add(Q1 * A);

    if (full) {
      std::vector<AffineExpr> rows;
      for (Index j = 0; j < N; ++j) {
        for (Index i = 0; i <= j; ++i) link(rows, Z_.index(i, j), -1, i == j ? 1.0 : 0.0);
      }
      pb.add_equality(rows, "identity_anchor");

      rows.clear();
      for (const char* a : {"x1", "x3", "x5"}) {
        const Index s = block(a).active_cols;
        for (Index q = 0; q < s; ++q) {
          for (Index p = 0; p < q; ++p) link(rows, z(a, p, "0", q), z(a, q, "0", p));
        }
      }
      pb.add_equality(rows, "symmetry");

      rows.clear();
      for (const auto& b : blocks_) {
        for (Index q = b.active_cols; q < N; ++q) {
          for (Index p = 0; p < b.rows; ++p) link(rows, z(b.name, p, "0", q), -1);
        }
      }
      pb.add_equality(rows, "padding");

      rows.clear();
      for (Index p = 0; p < R; ++p) {
        for (Index q = 0; q < N; ++q) link(rows, z("x6", p, "0", q), z("x2", q, "0", p));
      }
      for (Index p = 0; p < N; ++p) {
        for (Index q = 0; q < m2; ++q) link(rows, z("x9", p, "0", q), z("x2", p, "0", q));
        for (Index q = 0; q < r2; ++q) link(rows, z("x10", p, "0", q), z("x2", p, "0", m2 + q));
      }
      for (Index p = 0; p < R; ++p) {
        for (Index q = 0; q < m2; ++q) link(rows, z("x11", p, "0", q), z("x3", p, "0", q));
        for (Index q = 0; q < r2; ++q) link(rows, z("x12", p, "0", q), z("x3", p, "0", m2 + q));
      }
      pb.add_equality(rows, "slices");

      rows.clear();
      for (Index i = 0; i < m; ++i) {
        for (Index j = 0; j < r; ++j) {
          for (Index a = 0; a < 2; ++a) {
            for (Index b = 0; b < 2; ++b) {
              const Index bv = a == b ? beta_index(i, j) : -1;
              link(rows, z("x7", 2 * j + a, "0", 2 * i + b), bv);
              link(rows, z("x8", 2 * i + a, "0", 2 * j + b), bv);
            }
          }
        }
      }
      pb.add_equality(rows, "kron_structure");

      rows.clear();
      for (Index p = 0; p < N; ++p) {
        for (Index q = 0; q < r2; ++q) link(rows, z("v1", p, "0", q), z("x2", p, "x5", m2 + q));
        for (Index q = 0; q < m2; ++q) link(rows, z("v1", p, "0", r2 + q), z("x2", p, "x5", q));
      }
      for (Index p = 0; p < R; ++p) {
        for (Index q = 0; q < N; ++q) link(rows, z("v2", p, "0", q), z("x5", p, "x2", q));
      }
      for (Index p = 0; p < N; ++p) {
        for (Index q = 0; q < R; ++q) {
          link(rows, z("v3", p, "0", q), z("x1", p, "x6", q));
          link(rows, z("v4", p, "0", q), z("x2", p, "x3", q));
        }
        for (Index q = 0; q < r2; ++q) link(rows, z("v5", p, "0", q), z("x9", p, "x7", q));
        for (Index q = 0; q < m2; ++q) link(rows, z("v6", p, "0", q), z("x10", p, "x8", q));
      }
      for (Index p = 0; p < R; ++p) {
        for (Index q = 0; q < r2; ++q) link(rows, z("v7", p, "0", q), z("x11", p, "x7", q));
        for (Index q = 0; q < m2; ++q) link(rows, z("v8", p, "0", q), z("x12", p, "x8", q));
      }
      for (Index p = 0; p < N; ++p) {
        for (Index q = 0; q < N; ++q) link(rows, z("x4", p, "0", q), z("x10", p, "v1", q));
      }
      pb.add_equality(rows, "lift_links");

      rows.clear();
      for (Index p = 0; p < N; ++p) {
        for (Index q = 0; q < R; ++q) link(rows, z("v3", p, "0", q), z("v4", p, "0", q));
      }
      pb.add_equality(rows, "commutation");

      rows.clear();
      for (Index p = 0; p < R; ++p) {
        for (Index q = 0; q < R; ++q) link(rows, z("x3", p, "x5", q), -1, p == q ? 1.0 : 0.0);
      }
      pb.add_equality(rows, "inverse_anchor");
    }

    pb.add_psd(to_affine(Q1), "Q1_pos", kLmiMargin);
    pb.add_psd(to_affine(Q3), "Q3_pos", kLmiMargin);

    ExprMat tl1 = L1.scaled(L.alpha1());
    tl1.add_constant(CC, L.alpha1());
    pb.add_nsd(block2(tl1, M * A, L1), "eq36", kLmiMargin);

    if (full) {
      pb.add_psd(block2(Q1, Q2, Q3), "Q_hat_pos", kLmiMargin);

      ExprMat tl2 = L1.scaled(L.alpha2());
      tl2.add_constant(CC, L.alpha2());
      ExprMat q2ar1(N, R);
      {
        ExprMat left = zb("x9", "0", N, m2) * Fp;
        left.add(zb("v6", "0", N, m2), -1.0);
        const ExprMat right = zb("v5", "0", N, r2);
        for (Index p = 0; p < N; ++p) {
          for (Index q = 0; q < m2; ++q) q2ar1(p, q) = left(p, q);
          for (Index q = 0; q < r2; ++q) q2ar1(p, m2 + q) = right(p, q);
        }
      }
      ExprMat q3ar1(R, R);
      {
        ExprMat left = zb("x11", "0", R, m2) * Fp;
        left.add(zb("v8", "0", R, m2), -1.0);
        const ExprMat right = zb("v7", "0", R, r2);
        for (Index p = 0; p < R; ++p) {
          for (Index q = 0; q < m2; ++q) q3ar1(p, q) = left(p, q);
          for (Index q = 0; q < r2; ++q) q3ar1(p, m2 + q) = right(p, q);
        }
      }
      ExprMat tr2 = A.transpose() * Q2;
      tr2.add(q2ar1);
      tr2.add_constant(L.original().C.transpose() * Cr, -1.0);
      ExprMat br2 = q3ar1;
      br2.add(q3ar1.transpose());
      br2.add_constant(Cr.transpose() * Cr);
      pb.add_nsd(block2(tl2, tr2, br2), "eq37", kLmiMargin);

      // gamma^2 >= tr(B^T Q1 B) + 2 tr(B^T Q2 K) + 2 tr(B^T M B F) + tr(W)
      const RealMatrix K = L.B_r1();
      const RealMatrix F = L.F_sel();
      AffineExpr bound;
      bound.add(gamma_, 1.0);
      bound.add(trace_product(Q1, B * B.transpose()), -1.0);
      bound.add(trace_product(Q2, K * B.transpose()), -2.0);
      bound.add(trace_product(M, B * F * B.transpose()), -2.0);
      for (Index i = 0; i < I; ++i) bound.add(W_.index(i, i), -1.0);
      pb.add_nonneg(bound, "trace_bound");

      // [[W, B_r^T], [B_r, Q3^{-1}]] >= 0 with B_r = K + Ebar T B F.
      ExprMat Wm(I, I);
      for (Index j = 0; j < I; ++j) {
        for (Index i = 0; i < I; ++i) Wm(i, j).add(W_.index(i, j), 1.0);
      }
      ExprMat Br = L.Ebar() * zb("v2", "0", R, N) * RealMatrix(B * F);
      Br.add_constant(K);
      const ExprMat X5 = zb("x5", "0", R, R).sym();
      pb.add_psd(block2(Wm, Br.transpose(), X5), "trace_schur", 0.0);

      pb.add_psd(Z_, "Z_psd");

      AffineExpr obj;
      obj.add(gamma_, 1.0);
      pb.set_objective(obj);
      problem_ = pb.build();
    } else {
      start_problem_ = pb.build();
    }
  }
}

RealMatrix LiftedSdp::construct_moment_matrix(const LmiCandidate& c) const {
  const LmiProblem& L = lmi_;
  const Index N = L.N(), R = L.R(), m2 = 2 * L.m(), r2 = 2 * L.r();
  const Index D = dim();
  const RealMatrix q3inv = inverse_spd(c.Q3, "Q3");
  const RealMatrix M = L.lifted_M(c.Q2, c.Q3);
  const RealMatrix bt = tensor_i2(c.beta);  // 2m x 2r
  const RealMatrix S = c.Q2 * q3inv;        // N x R
  const RealMatrix T = q3inv * c.Q2.transpose();
  const RealMatrix Q2p = c.Q2.leftCols(m2), Q2a = c.Q2.rightCols(r2);
  const RealMatrix Q3p = c.Q3.leftCols(m2), Q3a = c.Q3.rightCols(r2);

  RealMatrix w = RealMatrix::Zero(D, N);
  const auto put = [&](const std::string& name, const RealMatrix& x) {
    const LiftBlock& b = block(name);
    if (x.rows() != b.rows || x.cols() > N) throw DimensionError("lift: block size for " + name);
    w.block(b.offset, 0, x.rows(), x.cols()) = x;
  };
  put("0", RealMatrix::Identity(N, N));
  put("x1", c.Q1);
  put("x2", c.Q2);
  put("x3", c.Q3);
  put("x4", M);
  put("x5", q3inv);
  put("x6", c.Q2.transpose());
  put("x7", bt.transpose());
  put("x8", bt);
  put("x9", Q2p);
  put("x10", Q2a);
  put("x11", Q3p);
  put("x12", Q3a);
  RealMatrix v1(N, R);
  v1 << S.rightCols(r2), S.leftCols(m2);
  put("v1", v1);
  put("v2", T);
  put("v3", RealMatrix(c.Q1 * c.Q2));
  put("v4", RealMatrix(c.Q2 * c.Q3));
  put("v5", RealMatrix(Q2p * bt));
  put("v6", RealMatrix(Q2a * bt.transpose()));
  put("v7", RealMatrix(Q3p * bt));
  put("v8", RealMatrix(Q3a * bt.transpose()));
  return w * w.transpose();
}

RealVector LiftedSdp::embed(const LmiCandidate& c) const {
  const LmiProblem& L = lmi_;
  RealVector x = RealVector::Zero(problem_.num_vars);
  Z_.set(x, construct_moment_matrix(c));
  for (Index i = 0; i < L.m(); ++i) {
    for (Index j = 0; j < L.r(); ++j) x(beta_index(i, j)) = c.beta(i, j);
  }
  const RealMatrix T = inverse_spd(c.Q3, "Q3") * c.Q2.transpose();
  const RealMatrix Br = L.B_r(T);
  const RealMatrix W = Br.transpose() * c.Q3 * Br;
  W_.set(x, W);
  const RealMatrix& B = L.original().B;
  const RealMatrix M = L.lifted_M(c.Q2, c.Q3);
  x(gamma_) = (B.transpose() * c.Q1 * B).trace() +
              2.0 * (B.transpose() * c.Q2 * L.B_r1()).trace() +
              2.0 * (B.transpose() * M * B * L.F_sel()).trace() + W.trace();
  return x;
}

LmiCandidate LiftedSdp::extract(const RealVector& x) const {
  const LmiProblem& L = lmi_;
  const Index N = L.N(), R = L.R();
  const RealMatrix Z = Z_.value(x);
  LmiCandidate c;
  c.Q1 = linalg::symmetric_part(Z.block(off("x1"), 0, N, N));
  c.Q2 = Z.block(off("x2"), 0, N, R);
  c.Q3 = linalg::symmetric_part(Z.block(off("x3"), 0, R, R));
  c.M = Z.block(off("x4"), 0, N, N);
  c.beta.resize(L.m(), L.r());
  for (Index i = 0; i < L.m(); ++i) {
    for (Index j = 0; j < L.r(); ++j) c.beta(i, j) = x(beta_index(i, j));
  }
  c.alpha1 = L.alpha1();
  c.alpha2 = L.alpha2();
  c.gamma_sq = x(gamma_);
  return c;
}

double LiftedSdp::linear_residual(const RealVector& x) const {
  return sdp::residuals(problem_, x).max_equality;
}

LiftDiagnostics LiftedSdp::diagnostics(const RealVector& x) const {
  LiftDiagnostics d;
  d.max_linear_residual = linear_residual(x);
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(Z_.value(x), Eigen::EigenvaluesOnly);
  const RealVector ev = es.eigenvalues().reverse();  // descending
  d.min_z_eigenvalue = ev(ev.size() - 1);
  const Index N = lmi_.N();
  d.rank_gap = (ev(0) > 0 && ev.size() > N) ? std::max(ev(N), 0.0) / ev(0) : 0.0;
  return d;
}

}  // namespace nmq
