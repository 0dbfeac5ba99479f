#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>

namespace nmq {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;

namespace linalg {

/// Strict Hurwitz test: every eigenvalue must satisfy Re(λ) < -kHurwitzMargin.
inline constexpr double kHurwitzMargin = 1e-9;

/// Partition of a matrix into a grid of blocks by interior cut points.
///
/// Cuts are strictly increasing and strictly inside (0, dim). Block (i, j)
/// spans rows [row_cut[i-1], row_cut[i]) and likewise for columns, with the
/// matrix edges as implicit outer cuts.
class BlockSpec {
 public:
  BlockSpec(Index rows, Index cols, std::vector<Index> row_cuts,
            std::vector<Index> col_cuts);

  Index block_rows() const { return static_cast<Index>(row_edges_.size()) - 1; }
  Index block_cols() const { return static_cast<Index>(col_edges_.size()) - 1; }

  RealMatrix block(const RealMatrix& m, Index i, Index j) const;
  void set_block(RealMatrix& m, Index i, Index j, const RealMatrix& value) const;

 private:
  Index rows_;
  Index cols_;
  std::vector<Index> row_edges_;
  std::vector<Index> col_edges_;
};

struct SchurForm {
  RealMatrix orthogonal;        // U with U^T U = I
  RealMatrix quasi_triangular;  // T with U T U^T = M
};

SchurForm real_schur(const RealMatrix& m);

/// Eigenvalues read off the Schur diagonal blocks, sorted by (real, imag).
std::vector<Complex> eigenvalues(const RealMatrix& m);

/// Maximum real part of the spectrum.
double spectral_abscissa(const RealMatrix& m);

bool is_hurwitz(const RealMatrix& m, double margin = kHurwitzMargin);

/// Throws NotHurwitzError naming `what` and the offending eigenvalue.
void require_hurwitz(const RealMatrix& m, const char* what,
                     double margin = kHurwitzMargin);

/// Solves A X + X A^T + RHS = 0 for Hurwitz A (Bartels–Stewart).
/// The observability form A^T Q + Q A + C^T C = 0 is solve_lyapunov(A^T, C^T C).
RealMatrix solve_lyapunov(const RealMatrix& a, const RealMatrix& rhs);

/// Frobenius norm of A X + X A^T + RHS.
double lyapunov_residual(const RealMatrix& a, const RealMatrix& x,
                         const RealMatrix& rhs);

RealMatrix kron(const RealMatrix& left, const RealMatrix& right);

/// True iff the minimum eigenvalue of the symmetric matrix is >= -tol.
/// Throws DimensionError when M is not symmetric within tol.
bool is_psd(const RealMatrix& m, double tol);

double min_symmetric_eigenvalue(const RealMatrix& m);

RealMatrix symmetric_part(const RealMatrix& m);

/// Principal square root of a symmetric PSD matrix (negative eigenvalues clamped).
RealMatrix psd_sqrt(const RealMatrix& m);

bool all_finite(const RealMatrix& m);

}  // namespace linalg
}  // namespace nmq
