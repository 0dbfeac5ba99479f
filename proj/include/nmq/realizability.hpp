#pragma once

#include <string>
#include <vector>

#include "nmq/model.hpp"

namespace nmq {

/// Default tolerance for machine-built models.
inline constexpr double kRealizabilityTol = 1e-8;
/// Tolerance for matrices transcribed to four decimals.
inline constexpr double kTranscribedTol = 1.5e-2;

struct Condition {
  std::string name;      // stable identifier, shared by both forms
  std::string equation;  // human-readable form of the condition
  double residual = 0.0; // Frobenius norm
  bool pass = false;
};

struct RealizabilityReport {
  std::vector<Condition> conditions;
  double tol = kRealizabilityTol;
  bool pass = false;
  RealMatrix K_G;  // m x k coupling matrix (quadrature form only)

  double max_residual() const;
  const Condition& at(const std::string& name) const;
};

/// Six conditions on (F, G, H): principal_dissipation, principal_io,
/// ancillary_dissipation, coupling_real, coupling_antisymmetry, cross_io.
RealizabilityReport check_complex(const ComplexQSDE& q, double tol);

/// Six conditions on (A, B, C): principal_dissipation, principal_io,
/// ancillary_dissipation, coupling_tensor, coupling_antisymmetry, cross_io.
RealizabilityReport check_quadrature(const QuadratureModel& m, double tol);

/// beta_ij = half the trace of the (i, j) 2x2 block of A12. This is the
/// Frobenius projection onto span{E_ij (x) I_2}.
RealMatrix extract_coupling(const RealMatrix& a12);

/// Reduced model with A22 = Theta - G22 G22^T / 2, A12 = beta (x) I_2,
/// A21 = -A12^T, B22 = G22 and principal blocks copied from `principal`.
QuadratureModel realizable_parameterization(const RealMatrix& theta_skew,
                                            const RealMatrix& g22,
                                            const RealMatrix& beta,
                                            const QuadratureModel& principal);

/// Nearest realizable model in the ancillary/coupling blocks. Idempotent.
QuadratureModel project_to_realizable(const QuadratureModel& m);

}  // namespace nmq
