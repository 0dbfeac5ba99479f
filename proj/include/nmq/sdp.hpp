#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/SparseCore>

#include "nmq/linalg.hpp"

namespace nmq::sdp {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

/// Sparse linear form sum(coef * x[var]) + constant.
struct AffineExpr {
  std::vector<std::pair<Index, double>> terms;
  double constant = 0.0;

  AffineExpr() = default;
  explicit AffineExpr(double c) : constant(c) {}

  AffineExpr& add(Index var, double coef);
  AffineExpr& add(const AffineExpr& other, double scale = 1.0);
  double eval(const RealVector& x) const;
  /// Merges duplicate variables and drops exact zeros; sorted by variable.
  void compact();
};

/// Square matrix of affine forms. Constraints use its symmetric part.
class AffineMatrix {
 public:
  explicit AffineMatrix(Index n);

  Index size() const { return n_; }
  AffineExpr& operator()(Index i, Index j) { return entries_[i + j * n_]; }
  const AffineExpr& operator()(Index i, Index j) const { return entries_[i + j * n_]; }

  /// Adds coef * M to the constant part.
  void add_constant(const RealMatrix& m, double coef = 1.0);
  /// Adds the block at (row0, col0).
  void add_block(Index row0, Index col0, const AffineMatrix& block, double coef = 1.0);
  RealMatrix eval(const RealVector& x) const;

 private:
  Index n_;
  std::vector<AffineExpr> entries_;
};

/// Symmetric matrix of decision variables, one per upper-triangular entry.
struct SymmetricVariable {
  Index n = 0;
  Index offset = 0;
  Index index(Index i, Index j) const;
  Index count() const { return n * (n + 1) / 2; }
  RealMatrix value(const RealVector& x) const;
  void set(RealVector& x, const RealMatrix& value) const;
};

enum class ConeKind { Zero, NonNeg, Psd };

/// Contiguous row range of A belonging to one named constraint.
struct ConstraintBlock {
  std::string name;
  ConeKind kind = ConeKind::Zero;
  Index row_offset = 0;
  Index rows = 0;
  Index psd_n = 0;  // matrix size for PSD blocks
};

/// minimize c^T x subject to A x + s = b, s in K (product cone).
///
/// PSD blocks use the scaled vectorization svec: upper triangle column by
/// column, off-diagonal entries multiplied by sqrt(2).
struct ConicProblem {
  Index num_vars = 0;
  RealVector c;
  double c0 = 0.0;  // constant added to the objective
  SparseMatrix A;
  RealVector b;
  std::vector<ConstraintBlock> blocks;
  std::vector<std::string> var_names;  // one label per variable group start

  Index rows() const { return A.rows(); }
  void validate() const;
};

/// Incrementally assembles a ConicProblem.
class ProblemBuilder {
 public:
  Index add_variables(Index count, const std::string& name);
  SymmetricVariable add_symmetric(Index n, const std::string& name);
  Index num_vars() const { return num_vars_; }

  void set_objective(const AffineExpr& e);
  void add_equality(const std::vector<AffineExpr>& rows, const std::string& name);
  void add_equality(const AffineExpr& row, const std::string& name);
  void add_nonneg(const std::vector<AffineExpr>& rows, const std::string& name);
  void add_nonneg(const AffineExpr& row, const std::string& name);
  /// sym(M) >= margin * I.
  void add_psd(const AffineMatrix& m, const std::string& name, double margin = 0.0);
  /// sym(M) <= -margin * I.
  void add_nsd(const AffineMatrix& m, const std::string& name, double margin = 0.0);
  /// Constrains the variable itself to the PSD cone.
  void add_psd(const SymmetricVariable& v, const std::string& name);

  ConicProblem build() const;

 private:
  void push_block(ConeKind kind, Index psd_n, std::vector<AffineExpr> rows,
                  const std::string& name);

  Index num_vars_ = 0;
  AffineExpr objective_;
  std::vector<std::string> var_names_;
  std::vector<ConstraintBlock> blocks_;
  std::vector<AffineExpr> rows_;  // s = expr, so A = -terms and b = constant
};

enum class Status { Optimal, FeasiblePoint, Infeasible, Unbounded, IterationLimit };
const char* to_string(Status s);

struct SolveOptions {
  double eps_abs = 1e-7;
  double eps_rel = 1e-7;
  double eps_infeasible = 1e-8;
  int max_iter = 25000;
  double rho = 0.1;
  double sigma = 1e-6;
  double alpha = 1.6;
  bool equilibrate = true;
  int ruiz_iterations = 15;
  bool adaptive_rho = true;
  int adapt_every = 50;
  int check_every = 10;
};

struct SolveResult {
  Status status = Status::IterationLimit;
  RealVector x;
  RealVector s;
  RealVector y;  // lies in the polar cone; z = -y is the usual dual
  double objective = 0.0;
  double dual_objective = 0.0;
  double primal_residual = 0.0;  // ||A x + s - b||_inf
  double dual_residual = 0.0;    // ||c - A^T y||_inf
  int iterations = 0;
};

/// ADMM operator splitting on the conic form above. `start` may be empty
/// (cold start) or a primal point of size num_vars.
SolveResult solve(const ConicProblem& p, const RealVector& start = {},
                  const SolveOptions& opts = {});

struct BlockResidual {
  std::string name;
  ConeKind kind;
  /// Zero: max |b - A x|. NonNeg: min entry of b - A x. Psd: min eigenvalue.
  double value = 0.0;
  bool satisfied = false;
};

struct ResidualReport {
  std::vector<BlockResidual> blocks;
  double objective = 0.0;
  double max_equality = 0.0;
  double min_margin = 0.0;  // over NonNeg and Psd blocks
};

ResidualReport residuals(const ConicProblem& p, const RealVector& x,
                         double tol = 1e-9);

struct FeasibilityResult {
  bool feasible = false;
  RealVector x;
  double margin = 0.0;  // achieved uniform cone margin t
  SolveResult solve;
  ResidualReport certificate;  // per-constraint violations at the final point
};

/// Maximizes t (capped at 1) such that every non-equality cone holds with
/// margin t. Feasible iff t > min_margin.
FeasibilityResult feasibility_phase(const ConicProblem& p, double min_margin = 1e-9,
                                    const SolveOptions& opts = {});

/// Keyed text dump of the problem (and optionally a point).
std::string dump(const ConicProblem& p, const RealVector* x = nullptr);

/// svec of a symmetric matrix and its inverse.
RealVector svec(const RealMatrix& m);
RealMatrix smat(const RealVector& v, Index n);

}  // namespace nmq::sdp
