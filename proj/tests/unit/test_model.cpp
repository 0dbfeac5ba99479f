#include <doctest.h>

#include <cmath>

#include "../support.hpp"
#include "nmq/errors.hpp"
#include "nmq/model.hpp"
#include "nmq/realizability.hpp"

using namespace nmq;
using namespace nmq::testing;

namespace {

RealMatrix oscillator(double gamma, double omega) {
  RealMatrix b(2, 2);
  b << -gamma / 2.0, omega, -omega, -gamma / 2.0;
  return b;
}

}  // namespace

TEST_CASE("worked example matches the printed oscillator matrices") {
  const QuadratureModel q = build_example();
  REQUIRE(q.m == 2);
  REQUIRE(q.k == 3);
  const double w[] = {10.85, 9.74, 10.03, 8.93, 5.06};
  const double g[] = {0.954, 0.987, 0.848, 1.034, 0.775};
  const double kappa[] = {1.25, 1.14};
  RealMatrix fp = RealMatrix::Zero(4, 4), fa = RealMatrix::Zero(6, 6);
  fp.block(0, 0, 2, 2) = oscillator(g[0], w[0]);
  fp.block(2, 2, 2, 2) = oscillator(g[1], w[1]);
  for (int i = 0; i < 3; ++i) fa.block(2 * i, 2 * i, 2, 2) = oscillator(g[2 + i], w[2 + i]);
  RealMatrix kg(2, 3);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 3; ++j) kg(i, j) = std::sqrt(kappa[i] * g[2 + j]) / 2.0;
  }
  const RealMatrix fpa = linalg::kron(kg, RealMatrix::Identity(2, 2));
  CHECK((q.A11() - fp).norm() < 1e-12);
  CHECK((q.A22() - fa).norm() < 1e-12);
  CHECK((q.A12() - fpa).norm() < 1e-12);
  CHECK((q.A21() + fpa.transpose()).norm() < 1e-12);

  RealVector gp(4), ga(6);
  gp << std::sqrt(g[0]), std::sqrt(g[0]), std::sqrt(g[1]), std::sqrt(g[1]);
  ga << std::sqrt(g[2]), std::sqrt(g[2]), std::sqrt(g[3]), std::sqrt(g[3]), std::sqrt(g[4]),
      std::sqrt(g[4]);
  CHECK((q.B11() - RealMatrix(gp.asDiagonal())).norm() < 1e-12);
  CHECK((q.B22() - RealMatrix(ga.asDiagonal())).norm() < 1e-12);
  CHECK(q.B12().norm() == 0.0);
  CHECK(q.B21().norm() == 0.0);
  CHECK((q.D - feedthrough(2, 3)).norm() == 0.0);
}

TEST_CASE("defaults are recorded as synthesized") {
  const QuadratureModel q = build_example();
  bool saw_coupling = false;
  for (const auto& s : q.synthesized) saw_coupling |= s.rfind("G_a_row", 0) == 0;
  CHECK(saw_coupling);
  PhysicalParams p = example_params();
  p.G_a_row = ComplexMatrix::Ones(1, 3);
  const ComplexQSDE c = build_complex(p);
  for (const auto& s : c.synthesized) CHECK(s.rfind("G_a_row", 0) != 0);
}

TEST_CASE("quadrature map is a ring homomorphism with adjoint to transpose") {
  Rng rng(21);
  for (int t = 0; t < 10; ++t) {
    const ComplexMatrix a = randn(rng, 3, 4).cast<Complex>() + Complex(0, 1) * randn(rng, 3, 4).cast<Complex>();
    const ComplexMatrix b = randn(rng, 4, 2).cast<Complex>() + Complex(0, 1) * randn(rng, 4, 2).cast<Complex>();
    const ComplexMatrix c = randn(rng, 3, 4).cast<Complex>() + Complex(0, 1) * randn(rng, 3, 4).cast<Complex>();
    CHECK((quadrature_map(a * b) - quadrature_map(a) * quadrature_map(b)).norm() < 1e-12);
    CHECK((quadrature_map(a + c) - quadrature_map(a) - quadrature_map(c)).norm() < 1e-12);
    CHECK((quadrature_map(a.adjoint()) - quadrature_map(a).transpose()).norm() < 1e-12);
  }
  ComplexMatrix z(1, 1);
  z << Complex(1.0, 2.0);
  RealMatrix expected(2, 2);
  expected << 1.0, -2.0, 2.0, 1.0;
  CHECK(quadrature_map(z) == expected);
}

TEST_CASE("every constructed model is realizable and tensor-structured") {
  Rng rng(22);
  for (int t = 0; t < 20; ++t) {
    const Index m = 1 + static_cast<Index>(rng() % 3), n = 1 + static_cast<Index>(rng() % 4);
    const PhysicalParams p = random_params(rng, m, n);
    for (InputSign sign : {InputSign::Physical, InputSign::Positive}) {
      const QuadratureModel q = to_quadrature(build_complex(p), sign);
      const RealizabilityReport rep = check_quadrature(q, 1e-12);
      CHECK(rep.pass);
      const RealMatrix beta = extract_coupling(q.A12());
      CHECK((q.A12() - linalg::kron(beta, RealMatrix::Identity(2, 2))).norm() < 1e-12);
    }
  }
}

TEST_CASE("sign conventions share the transfer function") {
  const PhysicalParams p = example_params();
  const QuadratureModel a = to_quadrature(build_complex(p), InputSign::Physical);
  const QuadratureModel b = to_quadrature(build_complex(p), InputSign::Positive);
  CHECK((a.B + b.B).norm() < 1e-14);
  CHECK((a.C + b.C).norm() < 1e-14);
  CHECK((a.C * a.B - b.C * b.B).norm() < 1e-14);
}

TEST_CASE("general principal output count") {
  PhysicalParams p;
  p.m = 2;
  p.n = 1;
  p.omega_p = {3.0, 4.0};
  p.omega_a = {2.0};
  p.gamma_p = {0.5, 0.6};
  p.gamma_a = {0.7};
  p.kappa = {0.3, 0.4};
  ComplexMatrix np(1, 2);
  np << Complex(0.5, 0.0), Complex(0.2, 0.1);
  p.N_p = np;
  const QuadratureModel q = to_quadrature(build_complex(p));
  CHECK(q.m_out == 1);
  CHECK(q.outputs() == 2);
  CHECK(q.inputs() == 4);
  CHECK(check_quadrature(q, 1e-12).pass);
}

TEST_CASE("validation names the offending field") {
  PhysicalParams p = example_params();
  p.gamma_a[1] = -1.0;
  try {
    p.validate();
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.field() == "gamma_a");
  }
  PhysicalParams q = example_params();
  q.omega_a.pop_back();
  CHECK_THROWS_AS(q.validate(), DimensionError);
  CHECK_THROWS_AS(input_sign_from_string("sideways"), ParseError);
}

TEST_CASE("reduced example keeps the principal block") {
  const QuadratureModel orig = build_example();
  const QuadratureModel red = reduced_example();
  CHECK(red.k == 1);
  CHECK(red.n_in == 1);
  CHECK(red.A11() == orig.A11());
  CHECK(red.B11() == orig.B11());
  CHECK(red.C11() == orig.C11());
}
