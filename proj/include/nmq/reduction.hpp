#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nmq/analysis.hpp"
#include "nmq/model.hpp"
#include "nmq/realizability.hpp"
#include "nmq/sdp.hpp"

namespace nmq {

enum class Method { Gradient, SdpLift, SdpThenGradient };

const char* to_string(Method m);
/// "gradient", "sdp-lift", "sdp-then-gradient". Throws ParseError otherwise.
Method method_from_string(const std::string& text);

struct ReductionSpec {
  Index r = 1;
  Method method = Method::Gradient;
  std::uint64_t seed = 7;
  InputAlignment alignment = InputAlignment::ZeroPad;
  double grad_tol = 1e-7;          // stop when ||grad||_inf <= grad_tol * (1 + J)
  int max_iter = 3000;             // BFGS iterations for the final polish
  int seed_iter = 150;             // BFGS iterations spent on each seed
  int random_starts = 12;
  int max_subset_seeds = 64;
  double realizability_tol = 1e-10;
  sdp::SolveOptions sdp_options = [] {
    sdp::SolveOptions o;
    o.max_iter = 4000;
    o.eps_abs = 1e-6;
    o.eps_rel = 1e-6;
    return o;
  }();
};

/// Free parameters of a realizable reduced model: Theta (2r x 2r skew),
/// G22 (2r x 2n_in) and beta (m x r).
struct ReducedParams {
  RealMatrix theta_skew;
  RealMatrix g22;
  RealMatrix beta;

  Index r() const { return beta.cols(); }
};

/// Packing order: strict upper triangle of Theta (row by row), G22
/// (row-major), beta (row-major).
Index parameter_count(Index m, Index r, Index n_in);
RealVector pack(const ReducedParams& p);
ReducedParams unpack(const RealVector& v, Index m, Index r, Index n_in);

/// Realizable reduced model for `p` with the principal blocks of `orig`.
QuadratureModel assemble(const ReducedParams& p, const QuadratureModel& orig);

/// Parameters reproducing the ancillary and coupling blocks of a realizable model.
ReducedParams params_of(const QuadratureModel& realizable);

struct Objective {
  double J = 0.0;
  ErrorSystem es;
  GramianPair g;
};

/// J = ||Xi_G - Xi_Gr||^2 with Gramians. Throws NotHurwitzError if either
/// model is not Hurwitz.
Objective objective_and_gramians(const QuadratureModel& orig, const QuadratureModel& red,
                                 InputAlignment align = InputAlignment::ZeroPad);

struct ValueGradient {
  double J = 0.0;
  RealVector grad;  // same packing as pack()
};

/// Analytic gradient through the realizable parameterization.
ValueGradient value_and_gradient(const QuadratureModel& orig, const ReducedParams& p,
                                 InputAlignment align = InputAlignment::ZeroPad);

/// dJ/dA_r = 2 (Q2^T P2 + Q3 P3) and dJ/dB_r = 2 (Q2^T B + Q3 B_r).
struct RawGradient {
  RealMatrix dA;
  RealMatrix dB;
};
RawGradient raw_gradient(const Objective& obj);

struct BrReconstruction {
  RealMatrix B_r;          // [[G_p, 0], [0, -Q322^{-1} Q222^T G_a]]
  double res_211 = 0.0;    // ||Q211^T + Q311||
  double res_212 = 0.0;    // ||Q212 + Q312||
  double res_221 = 0.0;    // ||Q221^T - Q312 Q322^{-1} Q222^T||
  double condition = 0.0;  // cond(Q322)
  bool ill_conditioned = false;
};

/// Input matrix from the observability-Gramian stationarity condition.
BrReconstruction reconstruct_Br(const GramianPair& g, const QuadratureModel& orig);

struct FaReconstruction {
  RealMatrix F_a;  // -Q322^{-1} Q222^T F_a P222 P322^{-1}
  double res_P212 = 0.0;
  double res_P312 = 0.0;
  double condition_Q = 0.0;
  double condition_P = 0.0;
  bool sign_flipped = false;  // r = n and the result is closer to -F_a than F_a
};

FaReconstruction reconstruct_Fa(const GramianPair& g, const QuadratureModel& orig);

/// ||Q2^T B + Q3 B_r|| / ||Q3 B_r|| over the ancillary rows and ancillary
/// input columns of the reduced model.
double stationarity_residual(const Objective& obj);

struct DescentResult {
  ReducedParams params;
  double J = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;  // J after each accepted step, starting value first
};

/// BFGS with Armijo backtracking; steps leaving the Hurwitz region are rejected.
DescentResult descend(const QuadratureModel& orig, const ReducedParams& start,
                      InputAlignment align, int max_iter, double grad_tol);

/// Ancillary truncation onto dominant mode directions of the original
/// Gramians (kept realizable by acting mode-wise).
ReducedParams hankel_seed(const QuadratureModel& orig, Index r);
/// Seed keeping the ancillary modes listed in `modes`.
ReducedParams subset_seed(const QuadratureModel& orig, const std::vector<Index>& modes);
ReducedParams random_seed(const QuadratureModel& orig, Index r, std::uint64_t seed,
                          std::uint64_t stream);

struct SdpOutcome {
  std::string status;
  double objective = 0.0;
  double rank_gap = 0.0;
  double linear_residual = 0.0;
  int iterations = 0;
  bool start_feasible = false;
  bool has_candidate = false;
  QuadratureModel candidate;  // projected to the realizable set
};

/// Relaxed lifted problem solved from the feasibility-phase starting point.
SdpOutcome sdp_lift_candidate(const QuadratureModel& orig, Index r,
                              const sdp::SolveOptions& opts);

struct ReductionDiagnostics {
  std::string method;
  std::string selected_seed;
  int seeds_tried = 0;
  int iterations = 0;
  double gradient_norm = 0.0;
  bool converged = false;
  double stationarity = 0.0;
  BrReconstruction br;
  bool has_sdp = false;
  SdpOutcome sdp;
};

struct ReductionResult {
  QuadratureModel reduced;
  ReducedParams params;
  double h2_error = 0.0;
  double h2_squared = 0.0;
  RealizabilityReport realizability;
  ReductionDiagnostics diagnostics;
};

ReductionResult reduce(const QuadratureModel& orig, const ReductionSpec& spec);

}  // namespace nmq
