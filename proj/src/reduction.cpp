#include "nmq/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "nmq/errors.hpp"
#include "nmq/lmi.hpp"
#include "nmq/rng.hpp"

namespace nmq {

const char* to_string(Method m) {
  switch (m) {
    case Method::Gradient:
      return "gradient";
    case Method::SdpLift:
      return "sdp-lift";
    case Method::SdpThenGradient:
      return "sdp-then-gradient";
  }
  return "gradient";
}

Method method_from_string(const std::string& text) {
  if (text == "gradient") return Method::Gradient;
  if (text == "sdp-lift") return Method::SdpLift;
  if (text == "sdp-then-gradient") return Method::SdpThenGradient;
  throw ParseError("method", "unknown method '" + text +
                                 "' (expected gradient, sdp-lift or sdp-then-gradient)");
}

Index parameter_count(Index m, Index r, Index n_in) {
  return r * (2 * r - 1) + 4 * r * n_in + m * r;
}

RealVector pack(const ReducedParams& p) {
  const Index r2 = p.theta_skew.rows();
  RealVector v(r2 * (r2 - 1) / 2 + p.g22.size() + p.beta.size());
  Index k = 0;
  for (Index i = 0; i < r2; ++i) {
    for (Index j = i + 1; j < r2; ++j) v(k++) = p.theta_skew(i, j);
  }
  for (Index i = 0; i < p.g22.rows(); ++i) {
    for (Index j = 0; j < p.g22.cols(); ++j) v(k++) = p.g22(i, j);
  }
  for (Index i = 0; i < p.beta.rows(); ++i) {
    for (Index j = 0; j < p.beta.cols(); ++j) v(k++) = p.beta(i, j);
  }
  return v;
}

ReducedParams unpack(const RealVector& v, Index m, Index r, Index n_in) {
  if (v.size() != parameter_count(m, r, n_in)) {
    throw DimensionError("unpack: parameter vector has the wrong length");
  }
  const Index r2 = 2 * r;
  ReducedParams p;
  p.theta_skew = RealMatrix::Zero(r2, r2);
  p.g22.resize(r2, 2 * n_in);
  p.beta.resize(m, r);
  Index k = 0;
  for (Index i = 0; i < r2; ++i) {
    for (Index j = i + 1; j < r2; ++j) {
      p.theta_skew(i, j) = v(k);
      p.theta_skew(j, i) = -v(k);
      ++k;
    }
  }
  for (Index i = 0; i < p.g22.rows(); ++i) {
    for (Index j = 0; j < p.g22.cols(); ++j) p.g22(i, j) = v(k++);
  }
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < r; ++j) p.beta(i, j) = v(k++);
  }
  return p;
}

QuadratureModel assemble(const ReducedParams& p, const QuadratureModel& orig) {
  QuadratureModel out = realizable_parameterization(p.theta_skew, p.g22, p.beta, orig);
  out.source = "reduced";
  return out;
}

ReducedParams params_of(const QuadratureModel& model) {
  ReducedParams p;
  const RealMatrix a22 = model.A22();
  p.theta_skew = 0.5 * (a22 - a22.transpose());
  p.g22 = model.B22();
  p.beta = extract_coupling(model.A12());
  return p;
}

Objective objective_and_gramians(const QuadratureModel& orig, const QuadratureModel& red,
                                 InputAlignment align) {
  Objective o;
  o.es = build_error_system(orig, red, align);
  const H2Result h = h2_norm_sq(o.es);
  o.J = h.squared();
  o.g = h.gramians;
  return o;
}

RawGradient raw_gradient(const Objective& obj) {
  const Index no = obj.es.orig_states(), nr = obj.es.red_states();
  const RealMatrix P2 = obj.g.P.topRightCorner(no, nr);
  const RealMatrix P3 = obj.g.P.bottomRightCorner(nr, nr);
  const RealMatrix Q2 = obj.g.Q.topRightCorner(no, nr);
  const RealMatrix Q3 = obj.g.Q.bottomRightCorner(nr, nr);
  RawGradient rg;
  rg.dA = 2.0 * (Q2.transpose() * P2 + Q3 * P3);
  rg.dB = 2.0 * (Q2.transpose() * obj.es.B_hat.topRows(no) + Q3 * obj.es.B_hat.bottomRows(nr));
  return rg;
}

ValueGradient value_and_gradient(const QuadratureModel& orig, const ReducedParams& p,
                                 InputAlignment align) {
  const QuadratureModel red = assemble(p, orig);
  const Objective obj = objective_and_gramians(orig, red, align);
  const RawGradient rg = raw_gradient(obj);
  const Index m = orig.m, r = p.r(), m2 = 2 * m, r2 = 2 * r;
  const RealMatrix dA22 = rg.dA.bottomRightCorner(r2, r2);
  const RealMatrix dA12 = rg.dA.topRightCorner(m2, r2);
  const RealMatrix dA21 = rg.dA.bottomLeftCorner(r2, m2);
  const Index in_cols = p.g22.cols();
  const RealMatrix dB22 = rg.dB.block(m2, 2 * red.m_out, r2, in_cols);

  ReducedParams d;
  d.theta_skew = dA22 - dA22.transpose();
  d.g22 = -0.5 * (dA22 + dA22.transpose()) * p.g22 + dB22;
  d.beta.resize(m, r);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < r; ++j) {
      d.beta(i, j) = dA12.block(2 * i, 2 * j, 2, 2).trace() -
                     dA21.block(2 * j, 2 * i, 2, 2).trace();
    }
  }
  ValueGradient vg;
  vg.J = obj.J;
  vg.grad = pack(d);
  return vg;
}

namespace {

double condition_number(const RealMatrix& m) {
  Eigen::JacobiSVD<RealMatrix> svd(m);
  const RealVector s = svd.singularValues();
  if (s.size() == 0) return 1.0;
  const double lo = s(s.size() - 1);
  return lo > 0.0 ? s(0) / lo : std::numeric_limits<double>::infinity();
}

RealMatrix checked_inverse(const RealMatrix& m, const char* what) {
  Eigen::FullPivLU<RealMatrix> lu(m);
  if (!lu.isInvertible() || lu.rcond() < 1e-15) {
    throw SingularMatrixError(std::string(what) + " is singular");
  }
  return lu.inverse();
}

}  // namespace

BrReconstruction reconstruct_Br(const GramianPair& g, const QuadratureModel& orig) {
  const GramianBlocks q = g.q_blocks();
  BrReconstruction out;
  out.condition = condition_number(q.X322);
  out.ill_conditioned = out.condition > 1e10;
  const RealMatrix inv = checked_inverse(q.X322, "Q322");
  const Index m2 = 2 * orig.m, r2 = 2 * g.r;
  out.B_r = RealMatrix::Zero(m2 + r2, orig.inputs());
  out.B_r.topLeftCorner(m2, 2 * orig.m_out) = orig.B11();
  out.B_r.bottomRightCorner(r2, 2 * orig.n_in) = -inv * q.X222.transpose() * orig.B22();
  out.res_211 = (q.X211.transpose() + q.X311).norm();
  out.res_212 = (q.X212 + q.X312).norm();
  out.res_221 = (q.X221.transpose() - q.X312 * inv * q.X222.transpose()).norm();
  return out;
}

FaReconstruction reconstruct_Fa(const GramianPair& g, const QuadratureModel& orig) {
  const GramianBlocks q = g.q_blocks();
  const GramianBlocks p = g.p_blocks();
  FaReconstruction out;
  out.condition_Q = condition_number(q.X322);
  out.condition_P = condition_number(p.X322);
  const RealMatrix qinv = checked_inverse(q.X322, "Q322");
  const RealMatrix pinv = checked_inverse(p.X322, "P322");
  const RealMatrix fa = orig.A22();
  out.F_a = -qinv * q.X222.transpose() * fa * p.X222 * pinv;
  out.res_P212 = p.X212.norm();
  out.res_P312 = p.X312.norm();
  if (g.r == g.n) out.sign_flipped = (out.F_a + fa).norm() < (out.F_a - fa).norm();
  return out;
}

double stationarity_residual(const Objective& obj) {
  const Index no = obj.es.orig_states(), nr = obj.es.red_states();
  const RealMatrix Q2 = obj.g.Q.topRightCorner(no, nr);
  const RealMatrix Q3 = obj.g.Q.bottomRightCorner(nr, nr);
  const RealMatrix q3b = Q3 * obj.es.B_hat.bottomRows(nr);
  const RealMatrix full = Q2.transpose() * obj.es.B_hat.topRows(no) + q3b;
  const Index m2 = 2 * obj.es.m, r2 = 2 * obj.es.r, c0 = 2 * obj.es.m_out;
  const Index cols = obj.es.inputs - c0;
  const double den = q3b.block(m2, c0, r2, cols).norm();
  const double num = full.block(m2, c0, r2, cols).norm();
  return den > 0.0 ? num / den : num;
}

DescentResult descend(const QuadratureModel& orig, const ReducedParams& start,
                      InputAlignment align, int max_iter, double grad_tol) {
  const Index m = orig.m, r = start.r(), n_in = start.g22.cols() / 2;
  const auto eval = [&](const RealVector& v, ValueGradient& out) {
    try {
      out = value_and_gradient(orig, unpack(v, m, r, n_in), align);
      return std::isfinite(out.J) && out.grad.allFinite();
    } catch (const Error&) {
      return false;
    }
  };

  RealVector x = pack(start);
  ValueGradient cur;
  if (!eval(x, cur)) {
    throw NotHurwitzError("descend: starting point is not Hurwitz", Complex(0.0, 0.0));
  }
  const Index p = x.size();
  RealMatrix H = RealMatrix::Identity(p, p);
  bool scaled = false;
  DescentResult res;
  res.history.push_back(cur.J);
  int stalls = 0;
  for (int it = 0; it < max_iter; ++it) {
    const double gnorm = cur.grad.lpNorm<Eigen::Infinity>();
    if (gnorm <= grad_tol * (1.0 + cur.J)) {
      res.converged = true;
      break;
    }
    RealVector d = -H * cur.grad;
    double slope = cur.grad.dot(d);
    if (!(slope < 0.0)) {
      H.setIdentity();
      scaled = false;
      d = -cur.grad;
      slope = cur.grad.dot(d);
    }
    double t = 1.0;
    if (!scaled) t = std::min(1.0, 1.0 / std::max(gnorm, 1e-300));
    ValueGradient trial;
    bool accepted = false;
    for (int k = 0; k < 60; ++k) {
      if (eval(x + t * d, trial) && trial.J <= cur.J + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
    const RealVector s = t * d;
    const RealVector y = trial.grad - cur.grad;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (!scaled) {
        H *= sy / y.squaredNorm();
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const RealVector hy = H * y;
      H += (rho * rho * y.dot(hy) + rho) * s * s.transpose() -
           rho * (hy * s.transpose() + s * hy.transpose());
    }
    const double prev = cur.J;
    x += s;
    cur = trial;
    res.history.push_back(cur.J);
    res.iterations = it + 1;
    stalls = (prev - cur.J <= 1e-15 * std::max(prev, 1e-300)) ? stalls + 1 : 0;
    if (stalls >= 10) break;
  }
  res.params = unpack(x, m, r, n_in);
  res.J = cur.J;
  res.grad_norm = cur.grad.lpNorm<Eigen::Infinity>();
  if (!res.converged) res.converged = res.grad_norm <= grad_tol * (1.0 + cur.J);
  return res;
}

namespace {

ReducedParams project_modes(const QuadratureModel& orig, const RealMatrix& v0) {
  const RealMatrix v = linalg::kron(v0, RealMatrix::Identity(2, 2));
  const RealMatrix a22 = v.transpose() * orig.A22() * v;
  ReducedParams p;
  p.theta_skew = 0.5 * (a22 - a22.transpose());
  p.g22 = v.transpose() * orig.B22();
  p.beta = extract_coupling(orig.A12()) * v0;
  return p;
}

}  // namespace

ReducedParams hankel_seed(const QuadratureModel& orig, Index r) {
  const RealMatrix P = linalg::solve_lyapunov(orig.A, orig.B * orig.B.transpose());
  const RealMatrix Q = linalg::solve_lyapunov(orig.A.transpose(), orig.C.transpose() * orig.C);
  const Index n = orig.k;
  const RealMatrix pa = P.bottomRightCorner(2 * n, 2 * n);
  const RealMatrix qa = Q.bottomRightCorner(2 * n, 2 * n);
  const RealMatrix h = 0.5 * (pa * qa + qa * pa);
  RealMatrix hm(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) hm(i, j) = 0.5 * h.block(2 * i, 2 * j, 2, 2).trace();
  }
  hm = linalg::symmetric_part(hm);
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(hm);
  RealMatrix v0(n, r);
  for (Index k = 0; k < r; ++k) {
    RealVector col = es.eigenvectors().col(n - 1 - k);
    Index pivot = 0;
    col.cwiseAbs().maxCoeff(&pivot);
    if (col(pivot) < 0.0) col = -col;
    v0.col(k) = col;
  }
  return project_modes(orig, v0);
}

ReducedParams subset_seed(const QuadratureModel& orig, const std::vector<Index>& modes) {
  RealMatrix v0 = RealMatrix::Zero(orig.k, static_cast<Index>(modes.size()));
  for (std::size_t k = 0; k < modes.size(); ++k) {
    if (modes[k] < 0 || modes[k] >= orig.k) throw DimensionError("subset_seed: mode out of range");
    v0(modes[k], static_cast<Index>(k)) = 1.0;
  }
  return project_modes(orig, v0);
}

ReducedParams random_seed(const QuadratureModel& orig, Index r, std::uint64_t seed,
                          std::uint64_t stream) {
  CounterRng rng(seed, stream);
  const RealMatrix kg = extract_coupling(orig.A12());
  const double beta_scale = kg.size() > 0 ? kg.cwiseAbs().mean() : 1.0;
  const RealMatrix b22 = orig.B22();
  const double g_scale = b22.size() > 0 ? std::sqrt(b22.squaredNorm() / b22.size()) : 1.0;
  const RealMatrix a22 = orig.A22();
  const RealMatrix theta = 0.5 * (a22 - a22.transpose());

  ReducedParams p;
  p.theta_skew = RealMatrix::Zero(2 * r, 2 * r);
  for (Index k = 0; k < r; ++k) {
    const Index mode = std::min<Index>(orig.k - 1, static_cast<Index>(rng.uniform() * orig.k));
    p.theta_skew.block(2 * k, 2 * k, 2, 2) = theta.block(2 * mode, 2 * mode, 2, 2);
  }
  p.g22.resize(2 * r, 2 * orig.n_in);
  for (Index i = 0; i < p.g22.rows(); ++i) {
    for (Index j = 0; j < p.g22.cols(); ++j) p.g22(i, j) = g_scale * rng.normal();
  }
  p.beta.resize(orig.m, r);
  for (Index i = 0; i < orig.m; ++i) {
    for (Index j = 0; j < r; ++j) p.beta(i, j) = beta_scale * rng.normal();
  }
  return p;
}

SdpOutcome sdp_lift_candidate(const QuadratureModel& orig, Index r,
                              const sdp::SolveOptions& opts) {
  SdpOutcome out;
  const LmiProblem lmi(orig, r);
  const LiftedSdp lift(lmi);
  const sdp::FeasibilityResult fr = sdp::feasibility_phase(lift.start_problem(), kLmiMargin, opts);
  out.start_feasible = fr.feasible;
  const sdp::SolveResult sr =
      sdp::solve(lift.problem(), fr.feasible ? fr.x : RealVector(), opts);
  out.status = sdp::to_string(sr.status);
  out.objective = sr.objective;
  out.iterations = sr.iterations;
  if (sr.x.size() != lift.problem().num_vars) return out;
  const LiftDiagnostics diag = lift.diagnostics(sr.x);
  out.rank_gap = diag.rank_gap;
  out.linear_residual = diag.max_linear_residual;
  if (sr.status == sdp::Status::Infeasible || sr.status == sdp::Status::Unbounded) return out;
  try {
    const LmiCandidate c = lift.extract(sr.x);
    QuadratureModel cand = project_to_realizable(lmi.reconstruct(c));
    cand.source = "sdp-lift";
    if (linalg::all_finite(cand.A) && linalg::all_finite(cand.B) && linalg::is_hurwitz(cand.A)) {
      out.candidate = cand;
      out.has_candidate = true;
    }
  } catch (const Error&) {
  }
  return out;
}

namespace {

struct Seed {
  std::string label;
  ReducedParams params;
};

std::vector<std::vector<Index>> combinations(Index n, Index r, int limit) {
  std::vector<std::vector<Index>> out;
  std::vector<Index> idx(r);
  for (Index i = 0; i < r; ++i) idx[i] = i;
  while (static_cast<int>(out.size()) < limit) {
    out.push_back(idx);
    Index i = r - 1;
    while (i >= 0 && idx[i] == n - r + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (Index j = i + 1; j < r; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

std::string join_modes(const std::vector<Index>& modes) {
  std::ostringstream os;
  for (std::size_t k = 0; k < modes.size(); ++k) os << (k ? "," : "") << modes[k];
  return os.str();
}

}  // namespace

ReductionResult reduce(const QuadratureModel& orig, const ReductionSpec& spec) {
  orig.validate();
  if (spec.r < 1 || spec.r >= orig.k) {
    std::ostringstream os;
    os << "r must be < n (got r=" << spec.r << ", n=" << orig.k << ") and at least 1";
    throw DimensionError(os.str());
  }
  linalg::require_hurwitz(orig.A, "original model");
  const RealizabilityReport rep = check_quadrature(orig, kRealizabilityTol);
  if (!rep.pass) {
    throw Error("original model is not physically realizable (max residual " +
                std::to_string(rep.max_residual()) + ")");
  }

  ReductionResult res;
  ReductionDiagnostics& diag = res.diagnostics;
  diag.method = to_string(spec.method);

  std::vector<Seed> seeds;
  if (spec.method != Method::Gradient) {
    diag.has_sdp = true;
    diag.sdp = sdp_lift_candidate(orig, spec.r, spec.sdp_options);
    if (diag.sdp.has_candidate) seeds.push_back({"sdp-lift", params_of(diag.sdp.candidate)});
  }

  if (spec.method == Method::SdpLift) {
    if (seeds.empty()) {
      throw ConvergenceError("sdp-lift: no Hurwitz realizable candidate (solver status " +
                             diag.sdp.status + ")");
    }
    res.params = seeds.front().params;
    diag.selected_seed = "sdp-lift";
    diag.seeds_tried = 1;
  } else {
    try {
      seeds.push_back({"hankel", hankel_seed(orig, spec.r)});
    } catch (const Error&) {
    }
    for (const auto& modes : combinations(orig.k, spec.r, spec.max_subset_seeds)) {
      seeds.push_back({"modes:" + join_modes(modes), subset_seed(orig, modes)});
    }
    for (int k = 0; k < spec.random_starts; ++k) {
      seeds.push_back({"random:" + std::to_string(k),
                       random_seed(orig, spec.r, spec.seed, static_cast<std::uint64_t>(k))});
    }

    double best_j = std::numeric_limits<double>::infinity();
    ReducedParams best;
    int best_iters = 0;
    for (const Seed& s : seeds) {
      try {
        const DescentResult d = descend(orig, s.params, spec.alignment, spec.seed_iter,
                                        spec.grad_tol);
        ++diag.seeds_tried;
        if (d.J < best_j) {
          best_j = d.J;
          best = d.params;
          best_iters = d.iterations;
          diag.selected_seed = s.label;
        }
      } catch (const Error&) {
      }
    }
    if (!std::isfinite(best_j)) {
      throw ConvergenceError("reduce: no Hurwitz candidate found from any seed");
    }
    const DescentResult polish =
        descend(orig, best, spec.alignment, spec.max_iter, spec.grad_tol);
    res.params = polish.params;
    diag.iterations = best_iters + polish.iterations;
    diag.gradient_norm = polish.grad_norm;
    diag.converged = polish.converged;
  }

  res.reduced = assemble(res.params, orig);
  res.reduced.source = std::string("reduce:") + to_string(spec.method);
  linalg::require_hurwitz(res.reduced.A, "reduced model");
  res.realizability = check_quadrature(res.reduced, spec.realizability_tol);
  if (!res.realizability.pass) {
    throw ConvergenceError("reduce: result failed the realizability check");
  }
  const Objective obj = objective_and_gramians(orig, res.reduced, spec.alignment);
  res.h2_squared = obj.J;
  res.h2_error = std::sqrt(std::max(obj.J, 0.0));
  diag.stationarity = stationarity_residual(obj);
  if (spec.method == Method::SdpLift) {
    diag.gradient_norm = value_and_gradient(orig, res.params, spec.alignment)
                             .grad.lpNorm<Eigen::Infinity>();
  }
  try {
    diag.br = reconstruct_Br(obj.g, orig);
  } catch (const Error&) {
    diag.br = BrReconstruction{};
    diag.br.ill_conditioned = true;
  }
  return res;
}

}  // namespace nmq
