#include "nmq/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "nmq/errors.hpp"

namespace nmq::linalg {

namespace {

void require_square(const RealMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << what << ": expected a square matrix, got " << m.rows() << "x" << m.cols();
    throw DimensionError(os.str());
  }
}

std::vector<Index> edges_from_cuts(Index dim, const std::vector<Index>& cuts,
                                   const char* axis) {
  std::vector<Index> edges{0};
  for (Index c : cuts) {
    if (c <= edges.back() || c >= dim) {
      std::ostringstream os;
      os << "BlockSpec: " << axis << " cut " << c
         << " must be strictly increasing and inside (0, " << dim << ")";
      throw DimensionError(os.str());
    }
    edges.push_back(c);
  }
  edges.push_back(dim);
  return edges;
}

// Diagonal block boundaries of a quasi-upper-triangular matrix.
std::vector<Index> schur_block_starts(const RealMatrix& t) {
  std::vector<Index> starts;
  const Index n = t.rows();
  Index i = 0;
  while (i < n) {
    starts.push_back(i);
    if (i + 1 < n && t(i + 1, i) != 0.0) {
      i += 2;
    } else {
      i += 1;
    }
  }
  starts.push_back(n);
  return starts;
}

// Eigenvalues of the 1x1 and 2x2 diagonal blocks, sorted by (real, imag).
std::vector<Complex> schur_eigenvalues(const RealMatrix& t) {
  std::vector<Complex> out;
  const auto starts = schur_block_starts(t);
  for (std::size_t b = 0; b + 1 < starts.size(); ++b) {
    const Index i = starts[b];
    if (starts[b + 1] - i == 1) {
      out.emplace_back(t(i, i), 0.0);
      continue;
    }
    const double a = t(i, i), bb = t(i, i + 1), c = t(i + 1, i), d = t(i + 1, i + 1);
    const double mean = 0.5 * (a + d);
    const double disc = 0.25 * (a - d) * (a - d) + bb * c;
    if (disc >= 0.0) {
      const double s = std::sqrt(disc);
      out.emplace_back(mean - s, 0.0);
      out.emplace_back(mean + s, 0.0);
    } else {
      const double s = std::sqrt(-disc);
      out.emplace_back(mean, -s);
      out.emplace_back(mean, s);
    }
  }
  std::sort(out.begin(), out.end(), [](const Complex& x, const Complex& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  return out;
}

void throw_if_unstable(const std::vector<Complex>& ev, const char* what,
                       double margin) {
  if (ev.empty()) return;
  const auto worst = std::max_element(
      ev.begin(), ev.end(),
      [](const Complex& x, const Complex& y) { return x.real() < y.real(); });
  if (!(worst->real() < -margin)) {
    std::ostringstream os;
    os << what << ": matrix is not Hurwitz (eigenvalue " << worst->real()
       << (worst->imag() < 0 ? " - " : " + ") << std::abs(worst->imag())
       << "i, margin " << margin << ")";
    throw NotHurwitzError(os.str(), *worst);
  }
}

// Solves T_ii Y + Y T_jj^T = R for blocks of size 1 or 2.
RealMatrix solve_small_sylvester(const RealMatrix& tii, const RealMatrix& tjj,
                                 const RealMatrix& r) {
  const Index p = tii.rows();
  const Index q = tjj.rows();
  if (p == 1 && q == 1) {
    const double denom = tii(0, 0) + tjj(0, 0);
    RealMatrix y(1, 1);
    y(0, 0) = r(0, 0) / denom;
    return y;
  }
  // Column-major vec: vec(T Y) = (I ⊗ T) vec Y, vec(Y S^T) = (S ⊗ I) vec Y.
  RealMatrix k = kron(RealMatrix::Identity(q, q), tii) +
                 kron(tjj, RealMatrix::Identity(p, p));
  Eigen::Map<const RealVector> rhs(r.data(), p * q);
  RealVector y = k.fullPivLu().solve(rhs);
  return Eigen::Map<RealMatrix>(y.data(), p, q);
}

}  // namespace

BlockSpec::BlockSpec(Index rows, Index cols, std::vector<Index> row_cuts,
                     std::vector<Index> col_cuts)
    : rows_(rows),
      cols_(cols),
      row_edges_(edges_from_cuts(rows, row_cuts, "row")),
      col_edges_(edges_from_cuts(cols, col_cuts, "column")) {}

RealMatrix BlockSpec::block(const RealMatrix& m, Index i, Index j) const {
  if (m.rows() != rows_ || m.cols() != cols_) {
    throw DimensionError("BlockSpec::block: matrix does not match the partition");
  }
  const Index r0 = row_edges_.at(i), r1 = row_edges_.at(i + 1);
  const Index c0 = col_edges_.at(j), c1 = col_edges_.at(j + 1);
  return m.block(r0, c0, r1 - r0, c1 - c0);
}

void BlockSpec::set_block(RealMatrix& m, Index i, Index j,
                          const RealMatrix& value) const {
  const Index r0 = row_edges_.at(i), r1 = row_edges_.at(i + 1);
  const Index c0 = col_edges_.at(j), c1 = col_edges_.at(j + 1);
  if (value.rows() != r1 - r0 || value.cols() != c1 - c0) {
    throw DimensionError("BlockSpec::set_block: block size mismatch");
  }
  m.block(r0, c0, r1 - r0, c1 - c0) = value;
}

SchurForm real_schur(const RealMatrix& m) {
  require_square(m, "real_schur");
  if (m.rows() == 0) return {RealMatrix(0, 0), RealMatrix(0, 0)};
  Eigen::RealSchur<RealMatrix> schur(m.rows());
  schur.setMaxIterations(80 * m.rows());
  schur.compute(m, true);
  if (schur.info() != Eigen::Success) {
    throw ConvergenceError("real_schur: QR iteration did not converge");
  }
  return {schur.matrixU(), schur.matrixT()};
}

std::vector<Complex> eigenvalues(const RealMatrix& m) {
  require_square(m, "eigenvalues");
  if (m.rows() == 0) return {};
  Eigen::RealSchur<RealMatrix> schur(m.rows());
  schur.setMaxIterations(80 * m.rows());
  schur.compute(m, false);
  if (schur.info() != Eigen::Success) {
    throw ConvergenceError("eigenvalues: QR iteration did not converge");
  }
  return schur_eigenvalues(schur.matrixT());
}

double spectral_abscissa(const RealMatrix& m) {
  const auto ev = eigenvalues(m);
  if (ev.empty()) return -std::numeric_limits<double>::infinity();
  double best = ev.front().real();
  for (const auto& z : ev) best = std::max(best, z.real());
  return best;
}

bool is_hurwitz(const RealMatrix& m, double margin) {
  return spectral_abscissa(m) < -margin;
}

void require_hurwitz(const RealMatrix& m, const char* what, double margin) {
  throw_if_unstable(eigenvalues(m), what, margin);
}

RealMatrix solve_lyapunov(const RealMatrix& a, const RealMatrix& rhs) {
  require_square(a, "solve_lyapunov");
  if (rhs.rows() != a.rows() || rhs.cols() != a.cols()) {
    throw DimensionError("solve_lyapunov: RHS must match the size of A");
  }
  const Index n = a.rows();
  if (n == 0) return RealMatrix(0, 0);
  const SchurForm schur = real_schur(a);
  const RealMatrix& u = schur.orthogonal;
  const RealMatrix& t = schur.quasi_triangular;
  throw_if_unstable(schur_eigenvalues(t), "solve_lyapunov", kHurwitzMargin);
  // T Y + Y T^T = -F with F = U^T RHS U, X = U Y U^T.
  const RealMatrix f = u.transpose() * symmetric_part(rhs) * u;
  const auto starts = schur_block_starts(t);
  const Index blocks = static_cast<Index>(starts.size()) - 1;

  RealMatrix y = RealMatrix::Zero(n, n);
  for (Index bj = blocks - 1; bj >= 0; --bj) {
    const Index j0 = starts[bj], nj = starts[bj + 1] - j0;
    for (Index bi = blocks - 1; bi >= 0; --bi) {
      const Index i0 = starts[bi], ni = starts[bi + 1] - i0;
      RealMatrix r = -f.block(i0, j0, ni, nj);
      const Index after_i = i0 + ni, after_j = j0 + nj;
      if (after_i < n) {
        r.noalias() -= t.block(i0, after_i, ni, n - after_i) *
                       y.block(after_i, j0, n - after_i, nj);
      }
      if (after_j < n) {
        r.noalias() -= y.block(i0, after_j, ni, n - after_j) *
                       t.block(j0, after_j, nj, n - after_j).transpose();
      }
      y.block(i0, j0, ni, nj) =
          solve_small_sylvester(t.block(i0, i0, ni, ni), t.block(j0, j0, nj, nj), r);
    }
  }
  RealMatrix x = u * y * u.transpose();
  return symmetric_part(x);
}

double lyapunov_residual(const RealMatrix& a, const RealMatrix& x,
                         const RealMatrix& rhs) {
  return (a * x + x * a.transpose() + rhs).norm();
}

RealMatrix kron(const RealMatrix& left, const RealMatrix& right) {
  const Index p = right.rows(), q = right.cols();
  RealMatrix out(left.rows() * p, left.cols() * q);
  for (Index i = 0; i < left.rows(); ++i) {
    for (Index j = 0; j < left.cols(); ++j) {
      out.block(i * p, j * q, p, q) = left(i, j) * right;
    }
  }
  return out;
}

RealMatrix symmetric_part(const RealMatrix& m) {
  return 0.5 * (m + m.transpose());
}

double min_symmetric_eigenvalue(const RealMatrix& m) {
  require_square(m, "min_symmetric_eigenvalue");
  if (m.rows() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(symmetric_part(m),
                                               Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

bool is_psd(const RealMatrix& m, double tol) {
  require_square(m, "is_psd");
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (m.rows() > 0 && asym > tol) {
    std::ostringstream os;
    os << "is_psd: matrix is not symmetric (max asymmetry " << asym
       << " exceeds tolerance " << tol << ")";
    throw DimensionError(os.str());
  }
  return min_symmetric_eigenvalue(m) >= -tol;
}

RealMatrix psd_sqrt(const RealMatrix& m) {
  require_square(m, "psd_sqrt");
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(symmetric_part(m));
  const RealVector roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().transpose();
}

bool all_finite(const RealMatrix& m) { return m.allFinite(); }

}  // namespace nmq::linalg
