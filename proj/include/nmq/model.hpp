#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nmq/linalg.hpp"

namespace nmq {

/// Sign applied to the noise input matrix when mapping to quadratures.
///
/// Physical keeps B = M(G) with G = diag(-N_p^dag, -N_a^dag). Positive flips
/// the sign of both B and C so the principal input block reads
/// +diag(sqrt(gamma)). The transfer function is identical under both.
enum class InputSign { Physical, Positive };

const char* to_string(InputSign sign);
InputSign input_sign_from_string(const std::string& text);

/// Physical description of the principal (m modes) and ancillary (n modes)
/// oscillators. Rates and frequencies are in GHz.
struct PhysicalParams {
  Index m = 0;
  Index n = 0;
  std::vector<double> omega_p;
  std::vector<double> omega_a;
  std::vector<double> gamma_p;
  std::vector<double> gamma_a;
  std::vector<double> kappa;

  // Optional full matrices; diagonal defaults are synthesized when absent.
  std::optional<ComplexMatrix> Omega_p;  // m x m Hermitian
  std::optional<ComplexMatrix> Omega_a;  // n x n Hermitian
  std::optional<ComplexMatrix> N_p;      // m' x m
  std::optional<ComplexMatrix> N_a;      // n x n
  std::optional<ComplexMatrix> G_a_row;  // 1 x n
  std::optional<ComplexMatrix> K_p_row;  // 1 x m

  /// Scale of the default fictitious-output row G_a = scale * [sqrt(gamma_a)].
  double coupling_scale = 0.5;

  /// Shape problems raise DimensionError, bad values raise ParseError; both
  /// name the offending field.
  void validate() const;
};

/// Complex QSDE dx = F x dt + G db, dy = H x dt + db.
struct ComplexQSDE {
  ComplexMatrix F;  // (m+n) x (m+n)
  ComplexMatrix G;  // (m+n) x (m'+n)
  ComplexMatrix H;  // m' x (m+n)
  Index m = 0;
  Index n = 0;
  Index m_out = 0;
  std::vector<std::string> synthesized;
};

/// Real quadrature state space with principal/ancillary partition.
///
/// States: 2m principal then 2k ancillary. Inputs: 2 m_out principal then
/// 2 n_in ancillary. Outputs: 2 m_out.
struct QuadratureModel {
  RealMatrix A;
  RealMatrix B;
  RealMatrix C;
  RealMatrix D;
  Index m = 0;
  Index k = 0;
  Index m_out = 0;
  Index n_in = 0;
  InputSign sign = InputSign::Physical;
  std::vector<std::string> synthesized;
  std::string source;

  Index states() const { return 2 * (m + k); }
  Index inputs() const { return 2 * (m_out + n_in); }
  Index outputs() const { return 2 * m_out; }

  RealMatrix A11() const { return A.topLeftCorner(2 * m, 2 * m); }
  RealMatrix A12() const { return A.topRightCorner(2 * m, 2 * k); }
  RealMatrix A21() const { return A.bottomLeftCorner(2 * k, 2 * m); }
  RealMatrix A22() const { return A.bottomRightCorner(2 * k, 2 * k); }
  RealMatrix B11() const { return B.topLeftCorner(2 * m, 2 * m_out); }
  RealMatrix B12() const { return B.topRightCorner(2 * m, 2 * n_in); }
  RealMatrix B21() const { return B.bottomLeftCorner(2 * k, 2 * m_out); }
  RealMatrix B22() const { return B.bottomRightCorner(2 * k, 2 * n_in); }
  RealMatrix C11() const { return C.leftCols(2 * m); }
  RealMatrix C12() const { return C.rightCols(2 * k); }

  /// Checks matrix shapes against the partition; throws DimensionError.
  void validate() const;
};

ComplexQSDE build_complex(const PhysicalParams& p);

/// Entrywise map a+bi -> [[a, -b], [b, a]].
RealMatrix quadrature_map(const ComplexMatrix& m);

QuadratureModel to_quadrature(const ComplexQSDE& q,
                              InputSign sign = InputSign::Physical);

/// D = [I_{2 m_out} 0].
RealMatrix feedthrough(Index m_out, Index n_in);

/// Two principal, three ancillary oscillators (superconducting-cavity scale).
PhysicalParams example_params();

/// Quadrature model of example_params() in the Positive sign convention.
QuadratureModel build_example();

/// Published one-ancillary-mode reduction of build_example(), four decimals.
/// The ancillary input block is the 2x2 matrix N_a, so n_in = 1.
QuadratureModel reduced_example();

}  // namespace nmq
