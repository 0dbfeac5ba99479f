#pragma once

#include <map>
#include <string>
#include <vector>

#include "nmq/model.hpp"
#include "nmq/sdp.hpp"

namespace nmq {

/// Strict-inequality margin used for every "< 0" / "> 0" matrix constraint.
inline constexpr double kLmiMargin = 1e-9;

/// Decision matrices of the Gramian-bound problem.
///
/// Q1 is N x N, Q2 is N x R, Q3 is R x R with N = 2(m+n), R = 2(m+r).
/// M is N x N and beta is m x r.
struct LmiCandidate {
  RealMatrix Q1, Q2, Q3, M, beta;
  double alpha1 = 0.5;
  double alpha2 = 0.5;
  double gamma_sq = 0.0;
};

struct LmiEvaluation {
  double q_hat_min_eig = 0.0;     // [[Q1, Q2], [Q2^T, Q3]] > 0
  double eq36_max_eig = 0.0;      // < 0
  double eq37_max_eig = 0.0;      // < 0
  double alpha_sum_residual = 0.0;
  bool alpha_positive = false;
  double trace_bound = 0.0;       // tr([B; B_r]^T Q_hat [B; B_r])
  double trace_slack = 0.0;       // gamma^2 - trace_bound
  double commutation_residual = 0.0;  // ||Q1 Q2 - Q2 Q3||
  double m_residual = 0.0;            // ||M - Q2 Ebar Q3^{-1} Q2^T||
  bool feasible = false;
};

/// Gramian-bound formulation for reducing the ancillary block of `orig` to r
/// modes, with the principal dynamics and the coupling tensor structure kept.
class LmiProblem {
 public:
  LmiProblem(const QuadratureModel& orig, Index r, double alpha1 = 0.5,
             double alpha2 = 0.5);

  const QuadratureModel& original() const { return orig_; }
  Index m() const { return orig_.m; }
  Index n() const { return orig_.k; }
  Index r() const { return r_; }
  Index N() const { return 2 * (orig_.m + orig_.k); }
  Index R() const { return 2 * (orig_.m + r_); }
  Index inputs() const { return orig_.inputs(); }
  double alpha1() const { return alpha1_; }
  double alpha2() const { return alpha2_; }

  Index eq36_size() const { return 2 * N(); }
  Index eq37_size() const { return N() + R(); }

  /// [[F_p, beta (x) I], [-(beta (x) I)^T, 0]].
  RealMatrix A_r1(const RealMatrix& beta) const;
  /// [[G_p, 0], [0, 0]] with the original input width.
  RealMatrix B_r1() const;
  /// C_r = [C11, 0].
  RealMatrix C_r() const;
  /// E = [0 I_2r] (2r x R).
  RealMatrix E() const;
  /// Ebar = diag(0_2m, I_2r) (R x R).
  RealMatrix Ebar() const;
  /// Input selector E_R = [0 I_2n_in] (2n_in x inputs).
  RealMatrix E_R() const;
  /// diag(0, I_2n_in) over the inputs.
  RealMatrix F_sel() const;

  /// M = Q2 Ebar Q3^{-1} Q2^T.
  RealMatrix lifted_M(const RealMatrix& Q2, const RealMatrix& Q3) const;
  /// B_r = B_r1 + Ebar T B F_sel with T = Q3^{-1} Q2^T.
  RealMatrix B_r(const RealMatrix& T) const;

  LmiEvaluation evaluate(const LmiCandidate& c, double margin = kLmiMargin) const;

  /// Reduced model A_r = [[F_p, beta (x) I], [-(.)^T, E T A V E^T]],
  /// B_r ancillary block E T B E_R^T, with T = Q3^{-1} Q2^T, V = Q1^{-1} Q2.
  QuadratureModel reconstruct(const LmiCandidate& c) const;

  /// Linear feasibility problem in (Q1, Q2, Q3, M) with beta held fixed:
  /// Q_hat > 0 and the two block LMIs. Variables: Q1, Q2 (row-major), Q3, M (row-major).
  sdp::ConicProblem fixed_beta_problem(const RealMatrix& beta,
                                       double margin = kLmiMargin) const;
  LmiCandidate fixed_beta_candidate(const RealVector& x, const RealMatrix& beta) const;

 private:
  QuadratureModel orig_;
  Index r_;
  double alpha1_, alpha2_;
};

/// Named block of the lifted decision matrix Z.
struct LiftBlock {
  std::string name;
  Index offset = 0;
  Index rows = 0;
  Index active_cols = 0;  // columns beyond this are constrained to zero
};

struct LiftDiagnostics {
  double max_linear_residual = 0.0;
  double min_z_eigenvalue = 0.0;
  double rank_gap = 0.0;  // lambda_{N+1}(Z) / lambda_1(Z)
};

/// Lifted semidefinite relaxation.
///
/// Z = w w^T with w = [I_N; X_x1; ...; X_v8], so Z_{a,0} = X_a and
/// Z_{a,b} = X_a X_b^T. Products of decision matrices become linear in Z;
/// the rank condition is dropped.
class LiftedSdp {
 public:
  explicit LiftedSdp(const LmiProblem& lmi);

  const LmiProblem& lmi() const { return lmi_; }
  const std::vector<LiftBlock>& blocks() const { return blocks_; }
  const LiftBlock& block(const std::string& name) const;
  Index dim() const { return Z_.n; }

  const sdp::ConicProblem& problem() const { return problem_; }
  /// Subset used to compute the starting point: Q1, Q3 > 0 and the first
  /// block LMI with alpha fixed.
  const sdp::ConicProblem& start_problem() const { return start_problem_; }

  const sdp::SymmetricVariable& Z() const { return Z_; }
  Index gamma_index() const { return gamma_; }
  Index beta_index(Index i, Index j) const { return beta_ + i * lmi_.r() + j; }

  /// Outer-product moment matrix of a candidate; M is recomputed from Q2, Q3.
  RealMatrix construct_moment_matrix(const LmiCandidate& c) const;
  /// Full variable vector (Z, beta, W, gamma^2) with the trace bound tight.
  RealVector embed(const LmiCandidate& c) const;
  LmiCandidate extract(const RealVector& x) const;

  /// Max residual over the equality blocks (the linear lifted constraints).
  double linear_residual(const RealVector& x) const;
  LiftDiagnostics diagnostics(const RealVector& x) const;

 private:
  Index off(const std::string& name) const { return block(name).offset; }
  void build();

  LmiProblem lmi_;
  std::vector<LiftBlock> blocks_;
  std::map<std::string, std::size_t> index_;
  sdp::SymmetricVariable Z_;
  sdp::SymmetricVariable W_;
  Index beta_ = 0;
  Index gamma_ = 0;
  sdp::ConicProblem problem_;
  sdp::ConicProblem start_problem_;
};

}  // namespace nmq
