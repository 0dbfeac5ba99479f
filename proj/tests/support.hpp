#pragma once

#include <random>

#include "nmq/linalg.hpp"
#include "nmq/model.hpp"
#include "nmq/reduction.hpp"

namespace nmq::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline RealMatrix randn(Rng& rng, Index rows, Index cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  RealMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = n(rng);
  }
  return m;
}

/// Random matrix shifted so its spectral abscissa is -margin.
inline RealMatrix random_hurwitz(Rng& rng, Index n, double margin = 0.5) {
  RealMatrix a = randn(rng, n, n);
  const double alpha = linalg::spectral_abscissa(a);
  a -= (alpha + margin) * RealMatrix::Identity(n, n);
  return a;
}

inline PhysicalParams random_params(Rng& rng, Index m, Index n) {
  PhysicalParams p;
  p.m = m;
  p.n = n;
  for (Index i = 0; i < m; ++i) {
    p.omega_p.push_back(uniform(rng, 1.0, 10.0));
    p.gamma_p.push_back(uniform(rng, 0.3, 1.5));
    p.kappa.push_back(uniform(rng, 0.2, 1.5));
  }
  for (Index i = 0; i < n; ++i) {
    p.omega_a.push_back(uniform(rng, 1.0, 10.0));
    p.gamma_a.push_back(uniform(rng, 0.3, 1.5));
  }
  return p;
}

inline QuadratureModel random_model(Rng& rng, Index m, Index n) {
  return to_quadrature(build_complex(random_params(rng, m, n)), InputSign::Positive);
}

/// Random realizable reduced parameters with Hurwitz reduced dynamics.
inline ReducedParams random_reduced(Rng& rng, const QuadratureModel& orig, Index r) {
  for (;;) {
    ReducedParams p;
    const RealMatrix t = randn(rng, 2 * r, 2 * r) * 3.0;
    p.theta_skew = 0.5 * (t - t.transpose());
    p.g22 = randn(rng, 2 * r, 2 * orig.n_in) * 0.7;
    p.beta = randn(rng, orig.m, r) * 0.6;
    if (linalg::is_hurwitz(assemble(p, orig).A, 1e-3)) return p;
  }
}

}  // namespace nmq::testing

#include <Eigen/QR>

#include "nmq/lmi.hpp"

namespace nmq::testing {

inline RealMatrix random_orthogonal(Rng& rng, Index n) {
  return Eigen::HouseholderQR<RealMatrix>(randn(rng, n, n)).householderQ();
}

/// Candidate with Q_hat > 0 and Q1 Q2 = Q2 Q3 by construction:
/// Q1 = V diag(l) V^T, Q2 = c V_R G, Q3 = G^T diag(l_R) G with c < min l.
inline LmiCandidate hand_candidate(Rng& rng, const LmiProblem& lmi, bool zero_beta = false) {
  const Index N = lmi.N(), R = lmi.R();
  const RealMatrix v = random_orthogonal(rng, N);
  const RealMatrix g = random_orthogonal(rng, R);
  RealVector l(N);
  for (Index i = 0; i < N; ++i) l(i) = uniform(rng, 1.0, 3.0);
  const double c = 0.5 * l.minCoeff();
  LmiCandidate out;
  out.Q1 = v * l.asDiagonal() * v.transpose();
  out.Q2 = c * v.leftCols(R) * g;
  out.Q3 = g.transpose() * l.head(R).asDiagonal() * g;
  out.beta = zero_beta ? RealMatrix::Zero(lmi.m(), lmi.r()) : randn(rng, lmi.m(), lmi.r());
  out.M = lmi.lifted_M(out.Q2, out.Q3);
  return out;
}

}  // namespace nmq::testing
