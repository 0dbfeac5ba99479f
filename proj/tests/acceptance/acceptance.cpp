#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "../support.hpp"
#include "nmq/analysis.hpp"
#include "nmq/io.hpp"
#include "nmq/lmi.hpp"
#include "nmq/realizability.hpp"
#include "nmq/reduction.hpp"

using namespace nmq;
using namespace nmq::testing;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string g_cli;

Verdict ac1() {
  const auto t0 = std::chrono::steady_clock::now();
  const QuadratureModel orig = build_example();
  const QuadratureModel red = reduced_example();
  const double zp = h2_norm_sq(build_error_system(orig, red, InputAlignment::ZeroPad)).norm();
  const double tr = h2_norm_sq(build_error_system(orig, red, InputAlignment::Truncate)).norm();
  const double dt = seconds_since(t0);
  const double target = 0.1746;
  const bool within = std::abs(zp - target) <= 0.02 * target || std::abs(tr - target) <= 0.02 * target;
  return {within && dt < 1.0, "zero-pad=" + fmt(zp) + " truncate=" + fmt(tr) + " target=0.1746+-2% t=" +
                                  fmt(dt) + "s"};
}

Verdict ac2() {
  const auto t0 = std::chrono::steady_clock::now();
  const QuadratureModel orig = build_example();
  ReductionSpec spec;
  spec.r = 1;
  const ReductionResult res = reduce(orig, spec);
  const double dt = seconds_since(t0);
  const bool realizable = check_quadrature(res.reduced, kRealizabilityTol).pass;
  const bool hurwitz = linalg::is_hurwitz(res.reduced.A);
  const bool ok = realizable && hurwitz && res.h2_error <= 0.183 && dt < 60.0;
  return {ok, "h2=" + fmt(res.h2_error) + " bound=0.183 realizable=" + (realizable ? "yes" : "no") +
                  " hurwitz=" + (hurwitz ? "yes" : "no") + " t=" + fmt(dt) + "s"};
}

Verdict ac3() {
  const RealizabilityReport rep = check_quadrature(reduced_example(), kTranscribedTol);
  bool built_ok = check_quadrature(build_example(), 1e-10).pass;
  Rng rng(1003);
  for (int t = 0; t < 20; ++t) {
    const QuadratureModel q = random_model(rng, 1 + t % 3, 1 + t % 4);
    built_ok = built_ok && check_quadrature(q, 1e-10).pass;
    if (q.k > 1) built_ok = built_ok && check_quadrature(assemble(random_reduced(rng, q, 1), q), 1e-10).pass;
  }
  return {rep.pass && built_ok, "transcribed_max_residual=" + fmt(rep.max_residual()) +
                                    " tol=1.5e-2 machine_built_1e-10=" + (built_ok ? "pass" : "fail")};
}

Verdict ac4() {
  const RealMatrix a12 = reduced_example().A12();
  const RealMatrix beta = extract_coupling(a12);
  const double block_res = (a12 - linalg::kron(beta, RealMatrix::Identity(2, 2))).cwiseAbs().maxCoeff();
  const bool exact = beta.rows() == 2 && beta.cols() == 1 && beta(0, 0) == 0.5528 && beta(1, 0) == 0.5262;
  return {exact && block_res == 0.0,
          "beta=[" + fmt(beta(0, 0)) + ";" + fmt(beta(1, 0)) + "] block_residual=" + fmt(block_res)};
}

Verdict ac5() {
  Rng rng(1005);
  double worst = 0.0;
  int count = 0;
  for (int t = 0; t < 100; ++t) {
    ErrorSystem es;
    if (t % 2 == 0) {
      const Index m = 1 + t % 3, n = 1 + (t / 2) % 4;
      const Index r = std::min<Index>(1 + (t / 6) % n, 12 - 2 * m - n);
      const QuadratureModel orig = random_model(rng, m, n);
      es = build_error_system(orig, assemble(random_reduced(rng, orig, r), orig));
    } else {
      const Index s = 2 + (t * 7) % 23;
      es.A_hat = random_hurwitz(rng, s, uniform(rng, 0.05, 1.0));
      es.B_hat = randn(rng, s, 1 + t % 5);
      es.C_hat = randn(rng, 1 + t % 4, s);
    }
    if (es.A_hat.rows() > 24) continue;
    const H2Result h = h2_norm_sq(es);
    worst = std::max(worst, std::abs(h.ctrl_trace - h.obs_trace) / std::abs(h.ctrl_trace));
    ++count;
  }
  return {count == 100 && worst <= 1e-8, "systems=" + std::to_string(count) + " worst_relative_gap=" + fmt(worst)};
}

double frequency_h2_sq(const ErrorSystem& es) {
  const Index n = es.A_hat.rows();
  const ComplexMatrix a = es.A_hat.cast<Complex>();
  const ComplexMatrix b = es.B_hat.cast<Complex>();
  const ComplexMatrix c = es.C_hat.cast<Complex>();
  auto integrand = [&](double w) {
    const ComplexMatrix m = Complex(0.0, w) * ComplexMatrix::Identity(n, n) - a;
    const ComplexMatrix g = c * m.partialPivLu().solve(b);
    return g.squaredNorm();
  };
  std::vector<double> cuts{0.0};
  double top = 0.0;
  const Eigen::VectorXcd poles = Eigen::EigenSolver<RealMatrix>(es.A_hat).eigenvalues();
  for (const Complex& l : poles) {
    const double w0 = std::abs(l.imag()), hw = std::max(std::abs(l.real()), 1e-6);
    for (double p : {w0 - 4 * hw, w0 - hw, w0, w0 + hw, w0 + 4 * hw}) {
      if (p > 0.0) cuts.push_back(p);
    }
    top = std::max(top, w0 + 10 * hw + std::abs(l));
  }
  cuts.push_back(top);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  using boost::math::quadrature::gauss_kronrod;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += gauss_kronrod<double, 61>::integrate(integrand, cuts[i], cuts[i + 1], 15, 1e-12);
  }
  total += gauss_kronrod<double, 61>::integrate(integrand, cuts.back(),
                                                std::numeric_limits<double>::infinity(), 15, 1e-12);
  return total / M_PI;
}

Verdict ac6() {
  Rng rng(1006);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    ErrorSystem es;
    if (t % 2 == 0) {
      const QuadratureModel orig = random_model(rng, 1 + t % 2, 2 + t % 3);
      es = build_error_system(orig, assemble(random_reduced(rng, orig, 1), orig));
    } else {
      const Index s = 2 + t % 9;
      es.A_hat = random_hurwitz(rng, s, uniform(rng, 0.1, 1.0));
      es.B_hat = randn(rng, s, 2);
      es.C_hat = randn(rng, 2, s);
    }
    const double gram = h2_norm_sq(es).ctrl_trace;
    const double quad = frequency_h2_sq(es);
    worst = std::max(worst, std::abs(gram - quad) / std::abs(gram));
  }
  return {worst <= 1e-3, "systems=20 worst_relative_error=" + fmt(worst)};
}

using LongMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

/// J with one refinement sweep of the controllability Gramian; the residual
/// and the trace are accumulated in extended precision.
long double refined_objective(const QuadratureModel& orig, const QuadratureModel& red) {
  const ErrorSystem es = build_error_system(orig, red);
  const LongMatrix a = es.A_hat.cast<long double>();
  const LongMatrix b = es.B_hat.cast<long double>();
  const LongMatrix c = es.C_hat.cast<long double>();
  const LongMatrix bb = b * b.transpose();
  const RealMatrix p0 = linalg::solve_lyapunov(es.A_hat, RealMatrix((b * b.transpose()).cast<double>()));
  const LongMatrix p0l = p0.cast<long double>();
  const LongMatrix res = a * p0l + p0l * a.transpose() + bb;
  const RealMatrix delta = linalg::solve_lyapunov(es.A_hat, RealMatrix(res.cast<double>()));
  const LongMatrix p = p0l + delta.cast<long double>();
  return (c * p * c.transpose()).trace();
}

Verdict ac7() {
  Rng rng(1007);
  const double h = 1e-6;
  double worst = 0.0;
  double smallest = std::numeric_limits<double>::infinity();
  Index compared = 0, skipped = 0;
  for (int t = 0; t < 50; ++t) {
    const Index m = 1 + t % 3, n = 2 + t % 3, r = 1 + t % 2;
    const QuadratureModel orig = random_model(rng, m, n);
    const ReducedParams p = random_reduced(rng, orig, r);
    const ValueGradient vg = value_and_gradient(orig, p);
    const RealVector x = pack(p);
    for (Index i = 0; i < x.size(); ++i) {
      RealVector up = x, dn = x;
      up(i) += h;
      dn(i) -= h;
      const long double jp = refined_objective(orig, assemble(unpack(up, m, r, orig.n_in), orig));
      const long double jm = refined_objective(orig, assemble(unpack(dn, m, r, orig.n_in), orig));
      const double fd = static_cast<double>((jp - jm) / (static_cast<long double>(up(i)) - dn(i)));
      if (std::abs(vg.grad(i)) <= 1e-8) {
        ++skipped;
        continue;
      }
      worst = std::max(worst, std::abs(vg.grad(i) - fd) / std::abs(vg.grad(i)));
      smallest = std::min(smallest, std::abs(vg.grad(i)));
      ++compared;
    }
  }
  return {worst <= 1e-5, "instances=50 components=" + std::to_string(compared) +
                             " below_1e-8=" + std::to_string(skipped) + " smallest=" + fmt(smallest) +
                             " worst_relative_error=" + fmt(worst) + " step=1e-6"};
}

Verdict ac8() {
  Rng rng(1008);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const Index n = 1 + t % 40;
    const RealMatrix a = random_hurwitz(rng, n, uniform(rng, 1e-2, 1.0));
    RealMatrix rhs;
    if (t % 2 == 0) {
      const RealMatrix b = randn(rng, n, 1 + t % 4);
      rhs = b * b.transpose();
    } else {
      const RealMatrix s = randn(rng, n, n);
      rhs = s + s.transpose();
    }
    const RealMatrix x = linalg::solve_lyapunov(a, rhs);
    const double res = (a * x + x * a.transpose() + rhs).norm();
    worst = std::max(worst, res / (a.norm() * x.norm() + rhs.norm()));
  }
  return {worst <= 1e-10, "systems=200 worst_scaled_residual=" + fmt(worst)};
}

Verdict ac9() {
  Rng rng(1009);
  int wins = 0;
  double worst_ratio = 0.0;
  for (int t = 0; t < 20; ++t) {
    const QuadratureModel orig = random_model(rng, 1, 2);
    ReductionSpec spec;
    spec.r = 1;
    spec.seed = 100 + t;
    const double pipeline = reduce(orig, spec).h2_squared;
    const RealMatrix beta0 = extract_coupling(orig.A12());
    const double wmax = orig.A22().cwiseAbs().maxCoeff();
    const double gmax = orig.B22().cwiseAbs().maxCoeff();
    const double bmax = beta0.cwiseAbs().maxCoeff();
    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < 10000; ++s) {
      ReducedParams p;
      p.theta_skew = RealMatrix::Zero(2, 2);
      p.theta_skew(0, 1) = uniform(rng, -1.5 * wmax, 1.5 * wmax);
      p.theta_skew(1, 0) = -p.theta_skew(0, 1);
      p.g22 = RealMatrix(2, 2 * orig.n_in);
      for (Index j = 0; j < p.g22.cols(); ++j) {
        for (Index i = 0; i < 2; ++i) p.g22(i, j) = uniform(rng, -1.5 * gmax, 1.5 * gmax);
      }
      p.beta = RealMatrix::Constant(1, 1, uniform(rng, -2.0 * bmax, 2.0 * bmax));
      const QuadratureModel red = assemble(p, orig);
      if (!linalg::is_hurwitz(red.A)) continue;
      best = std::min(best, objective_and_gramians(orig, red).J);
    }
    if (pipeline <= best * (1.0 + 1e-9)) ++wins;
    worst_ratio = std::max(worst_ratio, pipeline / best);
  }
  return {wins >= 19, "instances=20 wins_or_ties=" + std::to_string(wins) + " samples=10000 worst_ratio=" +
                          fmt(worst_ratio)};
}

Verdict ac10() {
  Rng rng(1010);
  double worst_res = 0.0, worst_eig = 0.0;
  for (int t = 0; t < 10; ++t) {
    const QuadratureModel orig = t == 0 ? build_example() : random_model(rng, 1 + t % 2, 2 + t % 2);
    const LmiProblem lmi(orig, orig.k >= 3 && t % 3 == 0 ? 2 : 1);
    const LiftedSdp lift(lmi);
    const LmiCandidate c = hand_candidate(rng, lmi, t == 5);
    if (lmi.evaluate(c).q_hat_min_eig <= 0.0) {
      return {false, "hand candidate " + std::to_string(t) + " is not positive definite"};
    }
    const LiftDiagnostics d = lift.diagnostics(lift.embed(c));
    worst_res = std::max(worst_res, d.max_linear_residual);
    worst_eig = std::min(worst_eig, d.min_z_eigenvalue);
  }
  return {worst_res <= 1e-9 && worst_eig >= -1e-9,
          "candidates=10 max_linear_residual=" + fmt(worst_res) + " min_z_eigenvalue=" + fmt(worst_eig)};
}

std::string quote(const std::string& s) { return "'" + s + "'"; }

Verdict ac11() {
  if (g_cli.empty()) return {false, "no --cli path given"};
  const fs::path root = fs::temp_directory_path() / "nmq_acceptance_ac11";
  fs::remove_all(root);
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"build", "build --builtin paper-example"},
      {"check", "check --builtin paper-example"},
      {"reduce", "reduce --builtin paper-example --r 1 --seed 7"},
      {"reduce-sdp", "reduce --builtin paper-example --r 1 --seed 7 --method sdp-lift"},
      {"compare", "compare --builtin paper-example --reduced builtin:paper-reduced"},
      {"bode", "bode --builtin paper-example --reduced builtin:paper-reduced"},
  };
  int files = 0;
  for (const auto& [name, args] : commands) {
    std::vector<std::map<std::string, std::string>> outputs;
    for (int run = 0; run < 2; ++run) {
      const fs::path dir = root / name;
      fs::remove_all(dir);
      fs::create_directories(dir);
      const std::string cmd = quote(g_cli) + " " + args + " --out " + quote(dir.string()) + " > " +
                              quote((dir / "stdout.txt").string()) + " 2>&1";
      const int code = std::system(cmd.c_str());
      if (code != 0) return {false, name + " exited with status " + std::to_string(code)};
      std::map<std::string, std::string> contents;
      for (const auto& e : fs::directory_iterator(dir)) {
        contents[e.path().filename().string()] = io::read_file(e.path().string());
      }
      outputs.push_back(std::move(contents));
    }
    if (outputs[0] != outputs[1]) return {false, name + " outputs differ between runs"};
    files += static_cast<int>(outputs[0].size());
  }
  fs::remove_all(root);
  return {true, "commands=" + std::to_string(commands.size()) + " files_compared=" + std::to_string(files)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4},   {"AC5", ac5},  {"AC6", ac6},
      {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}, {"AC10", ac10}, {"AC11", ac11}};
  std::vector<std::string> wanted;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--cli" && i + 1 < argc) {
      g_cli = argv[++i];
    } else {
      wanted.push_back(a);
    }
  }
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), name) == wanted.end()) continue;
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::cout << name << " " << (v.pass ? "PASS" : "FAIL") << " " << v.detail << std::endl;
    if (!v.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
