#include "nmq/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include <Eigen/LU>

#include "nmq/errors.hpp"

namespace nmq {

const char* to_string(InputAlignment a) {
  return a == InputAlignment::ZeroPad ? "zero-pad" : "truncate";
}

QuadratureModel pad_inputs(const QuadratureModel& model, Index target_n_in) {
  if (target_n_in < model.n_in) {
    throw DimensionError("pad_inputs: target input count is below the current one");
  }
  QuadratureModel out = model;
  out.n_in = target_n_in;
  out.B = RealMatrix::Zero(model.states(), out.inputs());
  out.B.leftCols(model.inputs()) = model.B;
  out.D = RealMatrix::Zero(model.outputs(), out.inputs());
  out.D.leftCols(model.inputs()) = model.D;
  return out;
}

ErrorSystem build_error_system(const QuadratureModel& orig,
                               const QuadratureModel& red, InputAlignment align) {
  orig.validate();
  red.validate();
  if (orig.m != red.m || orig.m_out != red.m_out) {
    std::ostringstream os;
    os << "build_error_system: principal dimensions differ (m=" << orig.m << "/"
       << red.m << ", outputs=" << orig.outputs() << "/" << red.outputs() << ")";
    throw DimensionError(os.str());
  }
  if (red.n_in > orig.n_in) {
    throw DimensionError(
        "build_error_system: reduced model has more input channels than the original");
  }
  ErrorSystem es;
  es.m = orig.m;
  es.n = orig.k;
  es.r = red.k;
  es.m_out = orig.m_out;
  es.alignment = align;

  RealMatrix b, br;
  if (align == InputAlignment::ZeroPad) {
    b = orig.B;
    br = pad_inputs(red, orig.n_in).B;
  } else {
    b = orig.B.leftCols(red.inputs());
    br = red.B;
  }
  es.inputs = b.cols();

  const Index no = orig.states(), nr = red.states();
  es.A_hat = RealMatrix::Zero(no + nr, no + nr);
  es.A_hat.topLeftCorner(no, no) = orig.A;
  es.A_hat.bottomRightCorner(nr, nr) = red.A;
  es.B_hat.resize(no + nr, es.inputs);
  es.B_hat << b, br;
  es.C_hat.resize(orig.outputs(), no + nr);
  es.C_hat << orig.C, -red.C;
  return es;
}

GramianBlocks partition_gramian(const RealMatrix& x, Index m, Index n, Index r) {
  const Index no = 2 * (m + n), nr = 2 * (m + r);
  if (x.rows() != no + nr || x.cols() != no + nr) {
    throw DimensionError("partition_gramian: size does not match the partition");
  }
  GramianBlocks g;
  g.X1 = x.topLeftCorner(no, no);
  g.X2 = x.topRightCorner(no, nr);
  g.X3 = x.bottomRightCorner(nr, nr);
  const Index p = 2 * m;
  g.X211 = g.X2.topLeftCorner(p, p);
  g.X212 = g.X2.topRightCorner(p, 2 * r);
  g.X221 = g.X2.bottomLeftCorner(2 * n, p);
  g.X222 = g.X2.bottomRightCorner(2 * n, 2 * r);
  g.X311 = g.X3.topLeftCorner(p, p);
  g.X312 = g.X3.topRightCorner(p, 2 * r);
  g.X322 = g.X3.bottomRightCorner(2 * r, 2 * r);
  return g;
}

GramianPair compute_gramians(const ErrorSystem& es) {
  GramianPair g;
  g.m = es.m;
  g.n = es.n;
  g.r = es.r;
  g.P = linalg::solve_lyapunov(es.A_hat, es.B_hat * es.B_hat.transpose());
  g.Q = linalg::solve_lyapunov(es.A_hat.transpose(), es.C_hat.transpose() * es.C_hat);
  return g;
}

double H2Result::norm() const { return std::sqrt(std::max(ctrl_trace, 0.0)); }

double H2Result::relative_gap() const {
  const double scale = std::max(std::abs(ctrl_trace), std::abs(obs_trace));
  return scale == 0.0 ? 0.0 : std::abs(ctrl_trace - obs_trace) / scale;
}

H2Result h2_norm_sq(const ErrorSystem& es) {
  H2Result h;
  h.gramians = compute_gramians(es);
  const RealMatrix cpc = es.C_hat * h.gramians.P * es.C_hat.transpose();
  const RealMatrix bqb = es.B_hat.transpose() * h.gramians.Q * es.B_hat;
  h.per_output = cpc.diagonal();
  h.per_input = bqb.diagonal();
  h.ctrl_trace = cpc.trace();
  h.obs_trace = bqb.trace();
  // Absolute floor covers cancellation when the two systems coincide.
  const double floor = 1e-12 * (es.C_hat.squaredNorm() * h.gramians.P.norm() +
                                es.B_hat.squaredNorm() * h.gramians.Q.norm());
  const double gap = std::abs(h.ctrl_trace - h.obs_trace);
  const double scale = std::max(std::abs(h.ctrl_trace), std::abs(h.obs_trace));
  if (!std::isfinite(gap) || gap > 1e-8 * scale + floor) {
    std::ostringstream os;
    os.precision(12);
    os << "h2_norm_sq: Gramian traces disagree (" << h.ctrl_trace << " vs "
       << h.obs_trace << ")";
    throw ConvergenceError(os.str());
  }
  return h;
}

ComplexMatrix transfer_eval(const QuadratureModel& model, Complex s) {
  model.validate();
  const Index n = model.states();
  ComplexMatrix resolvent = s * ComplexMatrix::Identity(n, n) - model.A.cast<Complex>();
  ComplexMatrix out = model.D.cast<Complex>();
  if (n == 0) return out;
  Eigen::FullPivLU<ComplexMatrix> lu(resolvent);
  if (!lu.isInvertible() || lu.rcond() < 1e-14) {
    std::ostringstream os;
    os << "transfer_eval: sI - A is singular at s = " << s.real() << "+" << s.imag() << "i";
    throw SingularMatrixError(os.str());
  }
  out.noalias() += model.C.cast<Complex>() * lu.solve(model.B.cast<Complex>());
  return out;
}

std::vector<double> log_grid(double lo, double hi, Index points) {
  if (!(lo > 0.0) || !(hi > lo) || points < 2 || !std::isfinite(hi)) {
    throw DimensionError("log_grid: need 0 < lo < hi and at least two points");
  }
  std::vector<double> grid(points);
  const double a = std::log10(lo), b = std::log10(hi);
  for (Index i = 0; i < points; ++i) {
    grid[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) /
                                     static_cast<double>(points - 1));
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

std::vector<double> default_grid() { return log_grid(1e-2, 1e3, 400); }

BodeTable bode_data(const QuadratureModel& model, const std::vector<double>& grid) {
  for (double w : grid) {
    if (!std::isfinite(w) || !(w > 0.0)) {
      throw DimensionError("bode_data: grid must be finite and positive");
    }
  }
  BodeTable t;
  t.outputs = model.outputs();
  t.inputs = model.inputs();
  t.omega = grid;
  const Index channels = t.outputs * t.inputs;
  std::vector<double> previous(channels, 0.0);
  t.rows.reserve(grid.size() * channels);
  constexpr double kDeg = 180.0 / std::numbers::pi;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const ComplexMatrix h = transfer_eval(model, Complex(0.0, grid[g]));
    for (Index o = 0; o < t.outputs; ++o) {
      for (Index i = 0; i < t.inputs; ++i) {
        const Complex z = h(o, i);
        const double mag = 20.0 * std::log10(std::max(std::abs(z), 1e-20));
        double phase = std::arg(z) * kDeg;
        const Index c = o * t.inputs + i;
        if (g > 0) phase += 360.0 * std::round((previous[c] - phase) / 360.0);
        previous[c] = phase;
        t.rows.push_back({grid[g], i, o, mag, phase});
      }
    }
  }
  return t;
}

std::string bode_csv(const BodeTable& base, const BodeTable* other) {
  if (other != nullptr &&
      (other->rows.size() != base.rows.size() || other->omega != base.omega ||
       other->inputs != base.inputs || other->outputs != base.outputs)) {
    throw DimensionError("bode_csv: tables do not share grid and channel layout");
  }
  std::string out = "omega,in_idx,out_idx,mag_db,phase_deg";
  if (other != nullptr) out += ",delta_mag_db";
  out += "\n";
  char buf[160];
  for (std::size_t k = 0; k < base.rows.size(); ++k) {
    const BodeRow& row = base.rows[k];
    std::snprintf(buf, sizeof buf, "%.17g,%lld,%lld,%.17g,%.17g", row.omega,
                  static_cast<long long>(row.in_idx), static_cast<long long>(row.out_idx),
                  row.mag_db, row.phase_deg);
    out += buf;
    if (other != nullptr) {
      std::snprintf(buf, sizeof buf, ",%.17g", other->rows[k].mag_db - row.mag_db);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

}  // namespace nmq
