#include "nmq/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "nmq/errors.hpp"

namespace nmq::sdp {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

double inf_norm(const RealVector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

// Projection of the slack onto the product cone, block by block.
void project_cone(const std::vector<ConstraintBlock>& blocks, RealVector& v) {
  for (const auto& blk : blocks) {
    auto seg = v.segment(blk.row_offset, blk.rows);
    switch (blk.kind) {
      case ConeKind::Zero:
        seg.setZero();
        break;
      case ConeKind::NonNeg:
        seg = seg.cwiseMax(0.0);
        break;
      case ConeKind::Psd: {
        const RealMatrix m = smat(seg, blk.psd_n);
        Eigen::SelfAdjointEigenSolver<RealMatrix> es(m);
        const RealVector& ev = es.eigenvalues();
        if (ev(0) >= 0.0) break;
        const RealVector clipped = ev.cwiseMax(0.0);
        const RealMatrix& u = es.eigenvectors();
        seg = svec(u * clipped.asDiagonal() * u.transpose());
        break;
      }
    }
  }
}

// Distance-style check that v lies in the cone: ||v - proj(v)||_inf.
double cone_distance(const std::vector<ConstraintBlock>& blocks, const RealVector& v) {
  RealVector p = v;
  project_cone(blocks, p);
  return inf_norm(v - p);
}

struct Scaling {
  RealVector d;  // variable scaling: x = D x_hat
  RealVector e;  // row scaling: s_hat = E s
  double cost = 1.0;
};

Scaling equilibrate(SparseMatrix& a, RealVector& b, RealVector& c,
                    const std::vector<ConstraintBlock>& blocks, const SolveOptions& opts) {
  Scaling sc;
  const Index n = a.cols(), m = a.rows();
  sc.d = RealVector::Ones(n);
  sc.e = RealVector::Ones(m);
  if (!opts.equilibrate) return sc;
  const auto clamp = [](double v) { return std::clamp(v, 1e-4, 1e4); };
  for (int it = 0; it < opts.ruiz_iterations; ++it) {
    RealVector col = RealVector::Zero(n), row = RealVector::Zero(m);
    for (Index j = 0; j < a.outerSize(); ++j) {
      for (SparseMatrix::InnerIterator itr(a, j); itr; ++itr) {
        const double v = std::abs(itr.value());
        col(j) = std::max(col(j), v);
        row(itr.row()) = std::max(row(itr.row()), v);
      }
    }
    RealVector dd(n), ee(m);
    for (Index j = 0; j < n; ++j) dd(j) = col(j) > 0 ? clamp(1.0 / std::sqrt(col(j))) : 1.0;
    for (Index i = 0; i < m; ++i) ee(i) = row(i) > 0 ? clamp(1.0 / std::sqrt(row(i))) : 1.0;
    for (const auto& blk : blocks) {
      if (blk.kind != ConeKind::Psd) continue;
      const double mean = ee.segment(blk.row_offset, blk.rows).mean();
      ee.segment(blk.row_offset, blk.rows).setConstant(mean);
    }
    a = ee.asDiagonal() * a * dd.asDiagonal();
    sc.d = sc.d.cwiseProduct(dd);
    sc.e = sc.e.cwiseProduct(ee);
  }
  b = sc.e.cwiseProduct(b);
  c = sc.d.cwiseProduct(c);
  const double cn = inf_norm(c);
  sc.cost = cn > 0 ? clamp(1.0 / cn) : 1.0;
  c *= sc.cost;
  return sc;
}

class KktSolver {
 public:
  KktSolver(const SparseMatrix& a, double sigma, const RealVector& rho)
      : n_(a.cols()), m_(a.rows()), sigma_(sigma) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(n_ + m_ + a.nonZeros());
    for (Index j = 0; j < n_; ++j) trip.emplace_back(j, j, sigma_);
    for (Index j = 0; j < a.outerSize(); ++j) {
      for (SparseMatrix::InnerIterator it(a, j); it; ++it) {
        trip.emplace_back(n_ + it.row(), j, it.value());
      }
    }
    for (Index i = 0; i < m_; ++i) trip.emplace_back(n_ + i, n_ + i, -1.0 / rho(i));
    kkt_.resize(n_ + m_, n_ + m_);
    kkt_.setFromTriplets(trip.begin(), trip.end());
    kkt_.makeCompressed();
    ldlt_.analyzePattern(kkt_);
    factor();
  }

  void update_rho(const RealVector& rho) {
    for (Index i = 0; i < m_; ++i) kkt_.coeffRef(n_ + i, n_ + i) = -1.0 / rho(i);
    factor();
  }

  RealVector solve(const RealVector& rhs) const { return ldlt_.solve(rhs); }

 private:
  void factor() {
    ldlt_.factorize(kkt_);
    if (ldlt_.info() != Eigen::Success) {
      throw SingularMatrixError("sdp::solve: KKT factorization failed");
    }
  }

  Index n_, m_;
  double sigma_;
  SparseMatrix kkt_;
  Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower> ldlt_;
};

}  // namespace

AffineExpr& AffineExpr::add(Index var, double coef) {
  if (coef != 0.0) terms.emplace_back(var, coef);
  return *this;
}

AffineExpr& AffineExpr::add(const AffineExpr& other, double scale) {
  if (scale == 0.0) return *this;
  for (const auto& [v, c] : other.terms) terms.emplace_back(v, scale * c);
  constant += scale * other.constant;
  return *this;
}

double AffineExpr::eval(const RealVector& x) const {
  double s = constant;
  for (const auto& [v, c] : terms) s += c * x(v);
  return s;
}

void AffineExpr::compact() {
  if (terms.empty()) return;
  std::sort(terms.begin(), terms.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<Index, double>> merged;
  merged.reserve(terms.size());
  for (const auto& t : terms) {
    if (!merged.empty() && merged.back().first == t.first) {
      merged.back().second += t.second;
    } else {
      merged.push_back(t);
    }
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(),
                              [](const auto& t) { return t.second == 0.0; }),
               merged.end());
  terms = std::move(merged);
}

AffineMatrix::AffineMatrix(Index n) : n_(n), entries_(n * n) {}

void AffineMatrix::add_constant(const RealMatrix& m, double coef) {
  if (m.rows() != n_ || m.cols() != n_) {
    throw DimensionError("AffineMatrix::add_constant: size mismatch");
  }
  for (Index j = 0; j < n_; ++j) {
    for (Index i = 0; i < n_; ++i) entries_[i + j * n_].constant += coef * m(i, j);
  }
}

void AffineMatrix::add_block(Index row0, Index col0, const AffineMatrix& block,
                             double coef) {
  if (row0 + block.size() > n_ || col0 + block.size() > n_) {
    throw DimensionError("AffineMatrix::add_block: block exceeds matrix");
  }
  for (Index j = 0; j < block.size(); ++j) {
    for (Index i = 0; i < block.size(); ++i) {
      (*this)(row0 + i, col0 + j).add(block(i, j), coef);
    }
  }
}

RealMatrix AffineMatrix::eval(const RealVector& x) const {
  RealMatrix out(n_, n_);
  for (Index j = 0; j < n_; ++j) {
    for (Index i = 0; i < n_; ++i) out(i, j) = entries_[i + j * n_].eval(x);
  }
  return out;
}

Index SymmetricVariable::index(Index i, Index j) const {
  if (i > j) std::swap(i, j);
  return offset + j * (j + 1) / 2 + i;
}

RealMatrix SymmetricVariable::value(const RealVector& x) const {
  RealMatrix out(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i <= j; ++i) out(i, j) = out(j, i) = x(index(i, j));
  }
  return out;
}

void SymmetricVariable::set(RealVector& x, const RealMatrix& value) const {
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i <= j; ++i) x(index(i, j)) = 0.5 * (value(i, j) + value(j, i));
  }
}

RealVector svec(const RealMatrix& m) {
  const Index n = m.rows();
  RealVector v(n * (n + 1) / 2);
  Index k = 0;
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i <= j; ++i) {
      v(k++) = i == j ? m(i, i) : kSqrt2 * 0.5 * (m(i, j) + m(j, i));
    }
  }
  return v;
}

RealMatrix smat(const RealVector& v, Index n) {
  if (v.size() != n * (n + 1) / 2) throw DimensionError("smat: length mismatch");
  RealMatrix m(n, n);
  Index k = 0;
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i <= j; ++i) {
      const double x = v(k++);
      if (i == j) {
        m(i, i) = x;
      } else {
        m(i, j) = m(j, i) = x / kSqrt2;
      }
    }
  }
  return m;
}

void ConicProblem::validate() const {
  if (c.size() != num_vars || A.cols() != num_vars || A.rows() != b.size()) {
    throw DimensionError("ConicProblem: inconsistent dimensions");
  }
  Index next = 0;
  for (const auto& blk : blocks) {
    if (blk.row_offset != next) throw DimensionError("ConicProblem: blocks are not contiguous");
    if (blk.kind == ConeKind::Psd && blk.rows != blk.psd_n * (blk.psd_n + 1) / 2) {
      throw DimensionError("ConicProblem: PSD block '" + blk.name + "' has wrong length");
    }
    next += blk.rows;
  }
  if (next != A.rows()) throw DimensionError("ConicProblem: blocks do not cover all rows");
}

Index ProblemBuilder::add_variables(Index count, const std::string& name) {
  const Index off = num_vars_;
  num_vars_ += count;
  var_names_.push_back(name + "@" + std::to_string(off) + "+" + std::to_string(count));
  return off;
}

SymmetricVariable ProblemBuilder::add_symmetric(Index n, const std::string& name) {
  SymmetricVariable v;
  v.n = n;
  v.offset = add_variables(n * (n + 1) / 2, name);
  return v;
}

void ProblemBuilder::set_objective(const AffineExpr& e) {
  objective_ = e;
  objective_.compact();
}

void ProblemBuilder::push_block(ConeKind kind, Index psd_n, std::vector<AffineExpr> rows,
                                const std::string& name) {
  ConstraintBlock blk;
  blk.name = name;
  blk.kind = kind;
  blk.row_offset = static_cast<Index>(rows_.size());
  blk.rows = static_cast<Index>(rows.size());
  blk.psd_n = psd_n;
  for (auto& r : rows) {
    r.compact();
    for (const auto& [v, c] : r.terms) {
      if (v < 0 || v >= num_vars_) {
        throw DimensionError("ProblemBuilder: constraint '" + name +
                             "' references an unknown variable");
      }
    }
    rows_.push_back(std::move(r));
  }
  blocks_.push_back(std::move(blk));
}

void ProblemBuilder::add_equality(const std::vector<AffineExpr>& rows,
                                  const std::string& name) {
  push_block(ConeKind::Zero, 0, rows, name);
}

void ProblemBuilder::add_equality(const AffineExpr& row, const std::string& name) {
  push_block(ConeKind::Zero, 0, {row}, name);
}

void ProblemBuilder::add_nonneg(const std::vector<AffineExpr>& rows,
                                const std::string& name) {
  push_block(ConeKind::NonNeg, 0, rows, name);
}

void ProblemBuilder::add_nonneg(const AffineExpr& row, const std::string& name) {
  push_block(ConeKind::NonNeg, 0, {row}, name);
}

void ProblemBuilder::add_psd(const AffineMatrix& m, const std::string& name,
                             double margin) {
  const Index n = m.size();
  std::vector<AffineExpr> rows;
  rows.reserve(n * (n + 1) / 2);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i <= j; ++i) {
      AffineExpr e;
      if (i == j) {
        e.add(m(i, i));
        e.constant -= margin;
      } else {
        e.add(m(i, j), 0.5 * kSqrt2);
        e.add(m(j, i), 0.5 * kSqrt2);
      }
      rows.push_back(std::move(e));
    }
  }
  push_block(ConeKind::Psd, n, std::move(rows), name);
}

void ProblemBuilder::add_nsd(const AffineMatrix& m, const std::string& name,
                             double margin) {
  AffineMatrix neg(m.size());
  neg.add_block(0, 0, m, -1.0);
  add_psd(neg, name, margin);
}

void ProblemBuilder::add_psd(const SymmetricVariable& v, const std::string& name) {
  std::vector<AffineExpr> rows;
  rows.reserve(v.count());
  for (Index j = 0; j < v.n; ++j) {
    for (Index i = 0; i <= j; ++i) {
      AffineExpr e;
      e.add(v.index(i, j), i == j ? 1.0 : kSqrt2);
      rows.push_back(std::move(e));
    }
  }
  push_block(ConeKind::Psd, v.n, std::move(rows), name);
}

ConicProblem ProblemBuilder::build() const {
  ConicProblem p;
  p.num_vars = num_vars_;
  p.c = RealVector::Zero(num_vars_);
  for (const auto& [v, c] : objective_.terms) p.c(v) += c;
  p.c0 = objective_.constant;
  const Index m = static_cast<Index>(rows_.size());
  p.b.resize(m);
  std::vector<Eigen::Triplet<double>> trip;
  for (Index i = 0; i < m; ++i) {
    p.b(i) = rows_[i].constant;
    for (const auto& [v, c] : rows_[i].terms) trip.emplace_back(i, v, -c);
  }
  p.A.resize(m, num_vars_);
  p.A.setFromTriplets(trip.begin(), trip.end());
  p.A.makeCompressed();
  p.blocks = blocks_;
  p.var_names = var_names_;
  p.validate();
  return p;
}

const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::FeasiblePoint: return "feasible-point";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::IterationLimit: return "iteration-limit";
  }
  return "unknown";
}

SolveResult solve(const ConicProblem& p, const RealVector& start, const SolveOptions& opts) {
  p.validate();
  const Index n = p.num_vars, m = p.rows();
  if (start.size() != 0 && start.size() != n) {
    throw DimensionError("sdp::solve: start point has the wrong length");
  }
  SparseMatrix a = p.A;
  RealVector b = p.b, c = p.c;
  const Scaling sc = equilibrate(a, b, c, p.blocks, opts);
  const SparseMatrix at = a.transpose();

  RealVector rho(m);
  double rho_base = opts.rho;
  const auto fill_rho = [&]() {
    for (const auto& blk : p.blocks) {
      const double v = blk.kind == ConeKind::Zero ? 1e3 * rho_base : rho_base;
      rho.segment(blk.row_offset, blk.rows).setConstant(v);
    }
  };
  fill_rho();
  KktSolver kkt(a, opts.sigma, rho);

  RealVector x = start.size() == n ? RealVector(start.cwiseQuotient(sc.d)) : RealVector::Zero(n);
  RealVector s = b - a * x;
  project_cone(p.blocks, s);
  RealVector y = RealVector::Zero(m);
  RealVector x_prev = x, y_prev = y;

  const RealVector d_inv = sc.d.cwiseInverse();
  const RealVector e_inv = sc.e.cwiseInverse();

  SolveResult res;
  RealVector rhs(n + m);
  const double alpha = opts.alpha;
  for (int k = 1; k <= opts.max_iter; ++k) {
    x_prev = x;
    y_prev = y;
    rhs.head(n) = opts.sigma * x - c;
    rhs.tail(m) = b - s + y.cwiseQuotient(rho);
    const RealVector sol = kkt.solve(rhs);
    const auto x_tilde = sol.head(n);
    const RealVector s_tilde = s - (sol.tail(m) + y).cwiseQuotient(rho);
    x = alpha * x_tilde + (1.0 - alpha) * x;
    const RealVector s_relax = alpha * s_tilde + (1.0 - alpha) * s;
    RealVector s_next = s_relax + y.cwiseQuotient(rho);
    project_cone(p.blocks, s_next);
    y += rho.cwiseProduct(s_relax - s_next);
    s = std::move(s_next);

    const bool check = k % opts.check_every == 0 || k == opts.max_iter;
    if (!check) continue;

    const RealVector ax = a * x;
    const RealVector aty = at * y;
    const double rp = inf_norm(e_inv.cwiseProduct(ax + s - b));
    const double rd = inf_norm(d_inv.cwiseProduct(c - aty)) / sc.cost;
    const double tp = opts.eps_abs + opts.eps_rel * std::max({inf_norm(e_inv.cwiseProduct(ax)),
                                                              inf_norm(e_inv.cwiseProduct(s)),
                                                              inf_norm(e_inv.cwiseProduct(b))});
    const double td = opts.eps_abs + opts.eps_rel * std::max(inf_norm(d_inv.cwiseProduct(c)),
                                                             inf_norm(d_inv.cwiseProduct(aty))) /
                                         sc.cost;
    const double pobj = c.dot(x) / sc.cost;
    const double dobj = b.dot(y) / sc.cost;
    const double tg = opts.eps_abs + opts.eps_rel * std::max(std::abs(pobj), std::abs(dobj));
    res.iterations = k;
    res.primal_residual = rp;
    res.dual_residual = rd;
    if (rp <= tp && rd <= td && std::abs(pobj - dobj) <= tg) {
      res.status = Status::Optimal;
      break;
    }

    // Infeasibility certificates from successive differences.
    const RealVector dy = y - y_prev;
    const RealVector dx = x - x_prev;
    const double dy_norm = inf_norm(sc.e.cwiseProduct(dy));
    if (dy_norm > 1e-12) {
      const double aty_d = inf_norm(d_inv.cwiseProduct(at * dy));
      RealVector dy_neg = -dy;
      if (aty_d <= opts.eps_infeasible * dy_norm && b.dot(dy) > opts.eps_infeasible * dy_norm &&
          cone_distance(p.blocks, dy_neg) <= opts.eps_infeasible * inf_norm(dy)) {
        res.status = Status::Infeasible;
        break;
      }
    }
    const double dx_norm = inf_norm(sc.d.cwiseProduct(dx));
    if (dx_norm > 1e-12) {
      RealVector adx = -(a * dx);
      if (cone_distance(p.blocks, adx) <= opts.eps_infeasible * dx_norm &&
          c.dot(dx) < -opts.eps_infeasible * dx_norm * sc.cost) {
        res.status = Status::Unbounded;
        break;
      }
    }

    if (opts.adaptive_rho && k % opts.adapt_every == 0) {
      const double prel = inf_norm(ax + s - b) /
                          std::max({inf_norm(ax), inf_norm(s), inf_norm(b), 1e-10});
      const double drel = inf_norm(c - aty) / std::max({inf_norm(c), inf_norm(aty), 1e-10});
      const double ratio = std::sqrt(prel / std::max(drel, 1e-300));
      if (ratio > 5.0 || ratio < 0.2) {
        rho_base = std::clamp(rho_base * ratio, 1e-6, 1e6);
        fill_rho();
        kkt.update_rho(rho);
      }
    }
  }

  res.x = sc.d.cwiseProduct(x);
  res.s = e_inv.cwiseProduct(s);
  res.y = sc.e.cwiseProduct(y) / sc.cost;
  res.objective = p.c.dot(res.x) + p.c0;
  res.dual_objective = p.b.dot(res.y) + p.c0;
  return res;
}

ResidualReport residuals(const ConicProblem& p, const RealVector& x, double tol) {
  p.validate();
  if (x.size() != p.num_vars) throw DimensionError("sdp::residuals: point has the wrong length");
  const RealVector slack = p.b - p.A * x;
  ResidualReport rep;
  rep.objective = p.c.dot(x) + p.c0;
  rep.min_margin = std::numeric_limits<double>::infinity();
  for (const auto& blk : p.blocks) {
    BlockResidual br{blk.name, blk.kind, 0.0, false};
    const RealVector seg = slack.segment(blk.row_offset, blk.rows);
    switch (blk.kind) {
      case ConeKind::Zero:
        br.value = inf_norm(seg);
        br.satisfied = br.value <= tol;
        rep.max_equality = std::max(rep.max_equality, br.value);
        break;
      case ConeKind::NonNeg:
        br.value = seg.size() ? seg.minCoeff() : 0.0;
        br.satisfied = br.value >= -tol;
        rep.min_margin = std::min(rep.min_margin, br.value);
        break;
      case ConeKind::Psd:
        br.value = linalg::min_symmetric_eigenvalue(smat(seg, blk.psd_n));
        br.satisfied = br.value >= -tol;
        rep.min_margin = std::min(rep.min_margin, br.value);
        break;
    }
    rep.blocks.push_back(std::move(br));
  }
  return rep;
}

FeasibilityResult feasibility_phase(const ConicProblem& p, double min_margin,
                                    const SolveOptions& opts) {
  p.validate();
  const Index n = p.num_vars, m = p.rows();
  ConicProblem q;
  q.num_vars = n + 1;
  q.c = RealVector::Zero(n + 1);
  q.c(n) = -1.0;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(p.A.nonZeros() + m + 1);
  for (Index j = 0; j < p.A.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(p.A, j); it; ++it) {
      trip.emplace_back(it.row(), j, it.value());
    }
  }
  for (const auto& blk : p.blocks) {
    if (blk.kind == ConeKind::NonNeg) {
      for (Index i = 0; i < blk.rows; ++i) trip.emplace_back(blk.row_offset + i, n, 1.0);
    } else if (blk.kind == ConeKind::Psd) {
      for (Index j = 0; j < blk.psd_n; ++j) {
        trip.emplace_back(blk.row_offset + j * (j + 1) / 2 + j, n, 1.0);
      }
    }
  }
  trip.emplace_back(m, n, 1.0);
  q.A.resize(m + 1, n + 1);
  q.A.setFromTriplets(trip.begin(), trip.end());
  q.A.makeCompressed();
  q.b.resize(m + 1);
  q.b << p.b, 1.0;
  q.blocks = p.blocks;
  q.blocks.push_back({"margin_cap", ConeKind::NonNeg, m, 1, 0});

  FeasibilityResult out;
  out.solve = solve(q, RealVector(), opts);
  out.x = out.solve.x.head(n);
  out.margin = out.solve.x(n);
  out.certificate = residuals(p, out.x, 0.0);
  const bool converged = out.solve.status == Status::Optimal;
  out.feasible = converged && out.margin > min_margin &&
                 out.certificate.max_equality <= std::max(1e-6, 10 * opts.eps_abs) &&
                 out.certificate.min_margin > 0.0;
  if (out.feasible) out.solve.status = Status::FeasiblePoint;
  return out;
}

std::string dump(const ConicProblem& p, const RealVector* x) {
  std::ostringstream os;
  char buf[64];
  const auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  os << "conic_problem\n";
  os << "num_vars " << p.num_vars << "\nrows " << p.rows() << "\n";
  os << "objective_constant " << num(p.c0) << "\n";
  os << "variables " << p.var_names.size() << "\n";
  for (const auto& v : p.var_names) os << "  " << v << "\n";
  os << "blocks " << p.blocks.size() << "\n";
  for (const auto& blk : p.blocks) {
    const char* kind = blk.kind == ConeKind::Zero ? "zero" : blk.kind == ConeKind::NonNeg ? "nonneg" : "psd";
    os << "  " << blk.name << " " << kind << " offset=" << blk.row_offset
       << " rows=" << blk.rows << " n=" << blk.psd_n << "\n";
  }
  os << "c\n";
  for (Index j = 0; j < p.c.size(); ++j) {
    if (p.c(j) != 0.0) os << "  " << j << " " << num(p.c(j)) << "\n";
  }
  os << "A " << p.A.nonZeros() << "\n";
  for (Index j = 0; j < p.A.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(p.A, j); it; ++it) {
      os << "  " << it.row() << " " << j << " " << num(it.value()) << "\n";
    }
  }
  os << "b\n";
  for (Index i = 0; i < p.b.size(); ++i) {
    if (p.b(i) != 0.0) os << "  " << i << " " << num(p.b(i)) << "\n";
  }
  if (x != nullptr) {
    os << "point " << x->size() << "\n";
    for (Index j = 0; j < x->size(); ++j) os << "  " << num((*x)(j)) << "\n";
  }
  return os.str();
}

}  // namespace nmq::sdp
