#pragma once

#include <string>
#include <vector>

#include "nmq/model.hpp"

namespace nmq {

/// How the input channels of two models with different ancillary input
/// counts are matched before forming the error system.
enum class InputAlignment {
  ZeroPad,   // reduced model gains zero input columns
  Truncate,  // original model loses its trailing input columns
};

const char* to_string(InputAlignment a);

/// Error system x_hat = [x; x_r], y_hat = y - y_r.
struct ErrorSystem {
  RealMatrix A_hat;
  RealMatrix B_hat;
  RealMatrix C_hat;
  Index m = 0;
  Index n = 0;      // original ancillary modes
  Index r = 0;      // reduced ancillary modes
  Index m_out = 0;
  Index inputs = 0;  // common input count after alignment
  InputAlignment alignment = InputAlignment::ZeroPad;

  Index orig_states() const { return 2 * (m + n); }
  Index red_states() const { return 2 * (m + r); }
};

/// Returns `model` with zero input columns appended so that n_in = target.
QuadratureModel pad_inputs(const QuadratureModel& model, Index target_n_in);

ErrorSystem build_error_system(const QuadratureModel& orig,
                               const QuadratureModel& red,
                               InputAlignment align = InputAlignment::ZeroPad);

/// Block views of a Gramian of the error system.
///
/// X = [[X1, X2], [X2^T, X3]] with X1 over the original states and X3 over
/// the reduced states. X2 = [[X211, X212], [X221, X222]] and
/// X3 = [[X311, X312], [X312^T, X322]], split principal/ancillary.
struct GramianBlocks {
  RealMatrix X1, X2, X3;
  RealMatrix X211, X212, X221, X222;
  RealMatrix X311, X312, X322;
};

GramianBlocks partition_gramian(const RealMatrix& x, Index m, Index n, Index r);

struct GramianPair {
  RealMatrix P;  // A_hat P + P A_hat^T + B_hat B_hat^T = 0
  RealMatrix Q;  // A_hat^T Q + Q A_hat + C_hat^T C_hat = 0
  Index m = 0;
  Index n = 0;
  Index r = 0;

  GramianBlocks p_blocks() const { return partition_gramian(P, m, n, r); }
  GramianBlocks q_blocks() const { return partition_gramian(Q, m, n, r); }
};

GramianPair compute_gramians(const ErrorSystem& es);

struct H2Result {
  double ctrl_trace = 0.0;  // tr(C_hat P C_hat^T)
  double obs_trace = 0.0;   // tr(B_hat^T Q B_hat)
  GramianPair gramians;
  RealVector per_output;  // diag(C_hat P C_hat^T)
  RealVector per_input;   // diag(B_hat^T Q B_hat)

  /// Squared H2 norm (the controllability-form trace).
  double squared() const { return ctrl_trace; }
  /// H2 norm, with tiny negative rounding clamped to zero.
  double norm() const;
  double relative_gap() const;
};

/// Squared H2 norm of the error system via both Gramian trace formulas.
/// Throws NotHurwitzError if A_hat is not Hurwitz, ConvergenceError if the
/// two traces disagree beyond 1e-8 relative.
H2Result h2_norm_sq(const ErrorSystem& es);

/// C (sI - A)^{-1} B + D. Throws SingularMatrixError when s is on the spectrum.
ComplexMatrix transfer_eval(const QuadratureModel& model, Complex s);

/// Logarithmically spaced grid from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, Index points);
std::vector<double> default_grid();

struct BodeRow {
  double omega;
  Index in_idx;
  Index out_idx;
  double mag_db;
  double phase_deg;
};

struct BodeTable {
  Index outputs = 0;
  Index inputs = 0;
  std::vector<double> omega;
  std::vector<BodeRow> rows;  // omega major, then output, then input
};

/// Magnitude in dB (floored at -400 dB) and phase in degrees, unwrapped per
/// channel starting from the lowest grid point.
BodeTable bode_data(const QuadratureModel& model, const std::vector<double>& grid);

/// CSV with columns omega,in_idx,out_idx,mag_db,phase_deg. When `other` is
/// given it must share the grid and channel layout, and a delta_mag_db column
/// (other minus base) is appended.
std::string bode_csv(const BodeTable& base, const BodeTable* other = nullptr);

}  // namespace nmq
