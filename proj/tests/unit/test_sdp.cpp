#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "../support.hpp"
#include "nmq/errors.hpp"
#include "nmq/sdp.hpp"

using namespace nmq;
using namespace nmq::sdp;
using namespace nmq::testing;

namespace {

AffineExpr inner(const RealMatrix& c, const SymmetricVariable& x) {
  AffineExpr e;
  for (Index j = 0; j < x.n; ++j) {
    for (Index i = 0; i < x.n; ++i) {
      if (c(i, j) != 0.0) e.add(x.index(i, j), c(i, j));
    }
  }
  e.compact();
  return e;
}

AffineExpr trace(const SymmetricVariable& x) { return inner(RealMatrix::Identity(x.n, x.n), x); }

struct MinEig {
  ConicProblem p;
  SymmetricVariable x;
};

MinEig min_eigen_program(const RealMatrix& c) {
  ProblemBuilder b;
  MinEig out;
  out.x = b.add_symmetric(c.rows(), "X");
  b.set_objective(inner(c, out.x));
  AffineExpr tr = trace(out.x);
  tr.constant -= 1.0;
  b.add_equality(tr, "unit_trace");
  b.add_psd(out.x, "X_psd");
  out.p = b.build();
  return out;
}

}  // namespace

TEST_CASE("svec and smat are inverse and isometric") {
  Rng rng(51);
  const RealMatrix a = randn(rng, 5, 5);
  const RealMatrix s = a + a.transpose();
  const RealVector v = svec(s);
  CHECK(v.size() == 15);
  CHECK((smat(v, 5) - s).norm() < 1e-14);
  CHECK(v.squaredNorm() == doctest::Approx(s.squaredNorm()));
}

TEST_CASE("min-eigenvalue program") {
  RealMatrix c = RealMatrix::Zero(3, 3);
  c.diagonal() << 1.0, 2.0, 3.0;
  const MinEig me = min_eigen_program(c);
  SolveOptions opts;
  opts.eps_abs = opts.eps_rel = 1e-9;
  const SolveResult r = solve(me.p, {}, opts);
  REQUIRE(r.status == Status::Optimal);
  CHECK(r.objective == doctest::Approx(1.0).epsilon(1e-7));
  RealMatrix e1 = RealMatrix::Zero(3, 3);
  e1(0, 0) = 1.0;
  CHECK((me.x.value(r.x) - e1).norm() < 1e-6);
  CHECK(r.primal_residual <= 1e-6);
  CHECK(r.dual_objective <= r.objective + 1e-6);
}

TEST_CASE("min-eigenvalue program matches a direct eigen-solver") {
  Rng rng(52);
  for (Index n : {4, 12, 30, 50}) {
    const RealMatrix a = randn(rng, n, n);
    const RealMatrix c = 0.5 * (a + a.transpose());
    const MinEig me = min_eigen_program(c);
    SolveOptions opts;
    opts.eps_abs = opts.eps_rel = 1e-9;
    opts.max_iter = 100000;
    const SolveResult r = solve(me.p, {}, opts);
    const double lmin = Eigen::SelfAdjointEigenSolver<RealMatrix>(c).eigenvalues()(0);
    CHECK(r.status == Status::Optimal);
    CHECK(std::abs(r.objective - lmin) <= 1e-8 * (1.0 + std::abs(lmin)));
    CHECK(r.dual_objective <= r.objective + 1e-6);
  }
}

TEST_CASE("feasibility phase finds the analytic center of the trace simplex") {
  for (Index n : {2, 4}) {
    ProblemBuilder b;
    const SymmetricVariable x = b.add_symmetric(n, "X");
    AffineExpr tr = trace(x);
    tr.constant -= 1.0;
    b.add_equality(tr, "unit_trace");
    b.add_psd(x, "X_psd");
    const FeasibilityResult f = feasibility_phase(b.build());
    REQUIRE(f.feasible);
    CHECK(f.margin == doctest::Approx(1.0 / n).epsilon(1e-5));
    CHECK((x.value(f.x) - RealMatrix::Identity(n, n) / double(n)).norm() < 1e-5);
  }
}

TEST_CASE("contradictory constraints are infeasible with a certificate") {
  ProblemBuilder b;
  const Index x = b.add_variables(1, "x");
  AffineExpr lo;
  lo.add(x, 1.0);
  lo.constant = -1.0;  // x - 1 >= 0
  AffineExpr hi;
  hi.add(x, -1.0);     // -x >= 0
  b.add_nonneg(lo, "x_ge_1");
  b.add_nonneg(hi, "x_le_0");
  const ConicProblem p = b.build();
  const FeasibilityResult f = feasibility_phase(p);
  CHECK_FALSE(f.feasible);
  REQUIRE(f.certificate.blocks.size() == 2);
  CHECK(f.certificate.min_margin < 0.0);
  const SolveResult r = solve(p);
  CHECK(r.status == Status::Infeasible);
}

TEST_CASE("unbounded problem is detected") {
  ProblemBuilder b;
  const Index x = b.add_variables(1, "x");
  AffineExpr obj;
  obj.add(x, 1.0);
  b.set_objective(obj);
  AffineExpr up;
  up.add(x, -1.0);  // x <= 0
  b.add_nonneg(up, "x_le_0");
  const SolveResult r = solve(b.build());
  CHECK(r.status == Status::Unbounded);
}

TEST_CASE("trace bound is tight at the optimum") {
  Rng rng(53);
  const RealMatrix g = randn(rng, 4, 4);
  const RealMatrix q = g * g.transpose();
  const RealMatrix bm = randn(rng, 4, 2);
  const double t = (bm.transpose() * q * bm).trace();
  ProblemBuilder b;
  const Index gamma = b.add_variables(1, "gamma_sq");
  AffineExpr obj;
  obj.add(gamma, 1.0);
  b.set_objective(obj);
  AffineExpr bound;
  bound.add(gamma, 1.0);
  bound.constant = -t;
  b.add_nonneg(bound, "trace_bound");
  const SolveResult r = solve(b.build());
  REQUIRE(r.status == Status::Optimal);
  CHECK(r.objective == doctest::Approx(t).epsilon(1e-6));
}

TEST_CASE("random SDP with an optimum built from complementary primal and dual") {
  Rng rng(54);
  for (int trial = 0; trial < 5; ++trial) {
    const Index n = 6, k = 4, rank = 2;
    const RealMatrix u = Eigen::HouseholderQR<RealMatrix>(randn(rng, n, n)).householderQ();
    RealVector lx = RealVector::Zero(n), ls = RealVector::Zero(n);
    for (Index i = 0; i < rank; ++i) lx(i) = uniform(rng, 0.5, 2.0);
    for (Index i = rank; i < n; ++i) ls(i) = uniform(rng, 0.5, 2.0);
    const RealMatrix xs = u * lx.asDiagonal() * u.transpose();
    const RealMatrix ss = u * ls.asDiagonal() * u.transpose();
    std::vector<RealMatrix> a(k);
    RealMatrix c = ss;
    ProblemBuilder b;
    const SymmetricVariable x = b.add_symmetric(n, "X");
    for (Index i = 0; i < k; ++i) {
      const RealMatrix g = randn(rng, n, n);
      a[i] = g + g.transpose();
      const double y = uniform(rng, -1.0, 1.0);
      c += y * a[i];
      AffineExpr row = inner(a[i], x);
      row.constant = -(a[i].cwiseProduct(xs)).sum();
      b.add_equality(row, "a" + std::to_string(i));
    }
    b.set_objective(inner(c, x));
    b.add_psd(x, "X_psd");
    SolveOptions opts;
    opts.eps_abs = opts.eps_rel = 1e-10;
    opts.max_iter = 50000;
    const SolveResult r = solve(b.build(), {}, opts);
    const double opt = c.cwiseProduct(xs).sum();
    CHECK(r.status == Status::Optimal);
    CHECK(std::abs(r.objective - opt) <= 1e-6 * (1.0 + std::abs(opt)));
    CHECK(r.dual_objective <= r.objective + 1e-6);
  }
}

TEST_CASE("solve is deterministic") {
  Rng rng(55);
  const RealMatrix a = randn(rng, 8, 8);
  const MinEig me = min_eigen_program(a + a.transpose());
  const SolveResult r1 = solve(me.p);
  const SolveResult r2 = solve(me.p);
  CHECK(r1.iterations == r2.iterations);
  CHECK(r1.objective == r2.objective);
  CHECK(r1.x == r2.x);
}

TEST_CASE("residual report names violated constraints") {
  RealMatrix c = RealMatrix::Identity(2, 2);
  const MinEig me = min_eigen_program(c);
  RealVector good = RealVector::Zero(me.p.num_vars);
  me.x.set(good, 0.5 * RealMatrix::Identity(2, 2));
  const ResidualReport ok = residuals(me.p, good);
  for (const auto& blk : ok.blocks) CHECK(blk.satisfied);
  CHECK(ok.min_margin >= 0.0);
  RealVector bad = good;
  me.x.set(bad, RealMatrix::Identity(2, 2) * -1.0);
  const ResidualReport r = residuals(me.p, bad);
  bool trace_flagged = false, psd_flagged = false;
  for (const auto& blk : r.blocks) {
    if (blk.name == "unit_trace") trace_flagged = !blk.satisfied && blk.value == doctest::Approx(3.0);
    if (blk.name == "X_psd") psd_flagged = !blk.satisfied && blk.value == doctest::Approx(-1.0);
  }
  CHECK(trace_flagged);
  CHECK(psd_flagged);
  const std::string text = dump(me.p, &good);
  CHECK(text.find("unit_trace") != std::string::npos);
  CHECK(text.find("X_psd") != std::string::npos);
}

TEST_CASE("affine matrix constraints are symmetrized") {
  ProblemBuilder b;
  const Index v = b.add_variables(1, "v");
  AffineMatrix m(2);
  m(0, 1).add(v, 2.0);  // only the upper entry: sym part has v on both off-diagonals
  m.add_constant(RealMatrix::Identity(2, 2));
  b.add_psd(m, "lmi");
  AffineExpr obj;
  obj.add(v, -1.0);
  b.set_objective(obj);
  const SolveResult r = solve(b.build());
  REQUIRE(r.status == Status::Optimal);
  CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK_THROWS_AS(ProblemBuilder().add_equality(AffineExpr().add(5, 1.0), "bad"), DimensionError);
}
