#include "nmq/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nmq/analysis.hpp"
#include "nmq/errors.hpp"
#include "nmq/io.hpp"
#include "nmq/model.hpp"
#include "nmq/realizability.hpp"
#include "nmq/reduction.hpp"

namespace nmq::cli {

namespace {

std::string g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class UsageError : public Error {
 public:
  using Error::Error;
};

QuadratureModel builtin_model(const std::string& name) {
  if (name == "paper-example") return build_example();
  if (name == "paper-reduced") return reduced_example();
  throw UsageError("unknown builtin '" + name + "' (expected paper-example or paper-reduced)");
}

/// Path or builtin:NAME.
QuadratureModel resolve_model(const std::string& spec) {
  const std::string prefix = "builtin:";
  if (spec.rfind(prefix, 0) == 0) return builtin_model(spec.substr(prefix.size()));
  return io::load_model(spec);
}

QuadratureModel primary_model(const std::string& model, const std::string& builtin) {
  if (!model.empty() && !builtin.empty()) throw UsageError("give either --model or --builtin");
  if (!builtin.empty()) return builtin_model(builtin);
  if (model.empty()) throw UsageError("a model is required (--model PATH|builtin:NAME or --builtin NAME)");
  return resolve_model(model);
}

std::vector<double> parse_grid(const std::string& text) {
  if (text.empty()) return default_grid();
  double lo = 0.0, hi = 0.0;
  long long points = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lld%c", &lo, &hi, &points, &tail) != 3) {
    throw UsageError("--grid expects lo:hi:points");
  }
  try {
    return log_grid(lo, hi, static_cast<Index>(points));
  } catch (const DimensionError& e) {
    throw UsageError(std::string("--grid: ") + e.what());
  }
}

std::string out_path(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

bool hurwitz_safe(const RealMatrix& a) {
  try {
    return linalg::is_hurwitz(a);
  } catch (const Error&) {
    return false;
  }
}

struct Options {
  std::string params, builtin, model, reduced, out = ".", method = "gradient",
                                                 alignment = "zero-pad", grid, sign = "positive";
  Index r = 0;
  std::uint64_t seed = 7;
  std::optional<double> tol;
};

int cmd_build(const Options& o, std::ostream& out) {
  PhysicalParams p;
  if (!o.params.empty() && !o.builtin.empty()) throw UsageError("give either --params or --builtin");
  if (!o.params.empty()) {
    p = io::load_params(o.params);
  } else if (o.builtin == "paper-example") {
    p = example_params();
  } else if (!o.builtin.empty()) {
    throw UsageError("build: unknown builtin '" + o.builtin + "' (expected paper-example)");
  } else {
    throw UsageError("build needs --params FILE or --builtin paper-example");
  }
  QuadratureModel q = to_quadrature(build_complex(p), input_sign_from_string(o.sign));
  q.source = "build";
  const RealizabilityReport rep = check_quadrature(q, o.tol.value_or(kRealizabilityTol));
  io::write_atomic(out_path(o.out, "model.json"), io::dump(io::model_to_json(q)));
  io::write_atomic(out_path(o.out, "realizability.json"), io::dump(io::report_to_json(rep)));
  out << "built m=" << q.m << " n=" << q.k << " states=" << q.states()
      << " realizable=" << yes_no(rep.pass) << " hurwitz=" << yes_no(hurwitz_safe(q.A)) << "\n";
  for (const auto& s : q.synthesized) out << "  synthesized " << s << "\n";
  return kExitOk;
}

int cmd_check(const Options& o, std::ostream& out) {
  const QuadratureModel q = primary_model(o.model, o.builtin);
  const double tol = o.tol.value_or(kRealizabilityTol);
  const RealizabilityReport rep = check_quadrature(q, tol);
  for (const auto& c : rep.conditions) {
    out << c.name << " residual=" << g6(c.residual) << " " << (c.pass ? "pass" : "FAIL") << "\n";
  }
  const bool hurwitz = hurwitz_safe(q.A);
  out << "tol=" << g6(tol) << " realizable=" << yes_no(rep.pass) << " hurwitz=" << yes_no(hurwitz)
      << " spectral_abscissa=" << g6(linalg::spectral_abscissa(q.A)) << "\n";
  if (o.out != ".") {
    io::write_atomic(out_path(o.out, "realizability.json"), io::dump(io::report_to_json(rep)));
  }
  return rep.pass ? kExitOk : kExitCheckFail;
}

std::uint64_t effective_seed(const Options& o) {
  if (const char* env = std::getenv("NMQ_SEED"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') throw UsageError("NMQ_SEED must be a non-negative integer");
    return v;
  }
  return o.seed;
}

InputAlignment alignment_of(const std::string& s) {
  if (s == "zero-pad") return InputAlignment::ZeroPad;
  if (s == "truncate") return InputAlignment::Truncate;
  throw UsageError("--alignment expects zero-pad or truncate");
}

int cmd_reduce(const Options& o, std::ostream& out) {
  const QuadratureModel q = primary_model(o.model, o.builtin);
  ReductionSpec spec;
  spec.r = o.r;
  try {
    spec.method = method_from_string(o.method);
  } catch (const ParseError& e) {
    throw UsageError(e.what());
  }
  spec.seed = effective_seed(o);
  spec.alignment = alignment_of(o.alignment);
  if (o.tol) spec.grad_tol = *o.tol;
  if (spec.r < 1 || spec.r >= q.k) {
    throw UsageError("r must be < n (got r=" + std::to_string(spec.r) +
                     ", n=" + std::to_string(q.k) + ") and at least 1");
  }
  const ReductionResult res = reduce(q, spec);
  io::write_atomic(out_path(o.out, "reduced.json"), io::dump(io::model_to_json(res.reduced)));
  io::write_atomic(out_path(o.out, "reduction.json"), io::dump(io::result_to_json(res, spec)));
  out << "r=" << spec.r << " h2=" << g6(res.h2_error)
      << " realizable=" << yes_no(res.realizability.pass)
      << " hurwitz=" << yes_no(hurwitz_safe(res.reduced.A)) << "\n";
  return kExitOk;
}

void print_status(std::ostream& out, const char* label, const QuadratureModel& q) {
  const RealizabilityReport rep = check_quadrature(q, kTranscribedTol);
  const RealizabilityReport strict = check_quadrature(q, kRealizabilityTol);
  out << label << " states=" << q.states() << " inputs=" << q.inputs()
      << " hurwitz=" << yes_no(hurwitz_safe(q.A))
      << " realizable=" << yes_no(strict.pass)
      << " realizable_transcribed=" << yes_no(rep.pass)
      << " max_residual=" << g6(strict.max_residual()) << "\n";
}

int cmd_compare(const Options& o, std::ostream& out) {
  const QuadratureModel a = primary_model(o.model, o.builtin);
  if (o.reduced.empty()) throw UsageError("compare needs --reduced PATH|builtin:NAME");
  const QuadratureModel b = resolve_model(o.reduced);
  if (a.m != b.m || a.m_out != b.m_out) {
    throw DimensionError("compare: principal dimensions differ");
  }
  print_status(out, "original", a);
  print_status(out, "reduced", b);
  io::Json doc;
  doc["format"] = "nmq-compare";
  for (const InputAlignment al : {InputAlignment::ZeroPad, InputAlignment::Truncate}) {
    const H2Result h = h2_norm_sq(build_error_system(a, b, al));
    out << "alignment=" << to_string(al) << " h2=" << g6(h.norm()) << "\n";
    out << "  tr(C P C^T)=" << g17(h.ctrl_trace) << "\n";
    out << "  tr(B^T Q B)=" << g17(h.obs_trace) << "\n";
    out << "  relative_gap=" << g6(h.relative_gap()) << "\n";
    out << "  per_output";
    for (Index i = 0; i < h.per_output.size(); ++i) out << " " << g6(h.per_output(i));
    out << "\n  per_input";
    for (Index i = 0; i < h.per_input.size(); ++i) out << " " << g6(h.per_input(i));
    out << "\n";
    doc[to_string(al)] = io::h2_to_json(h);
  }
  if (o.out != ".") io::write_atomic(out_path(o.out, "compare.json"), io::dump(doc));
  return kExitOk;
}

int cmd_bode(const Options& o, std::ostream& out) {
  const QuadratureModel a = primary_model(o.model, o.builtin);
  const std::vector<double> grid = parse_grid(o.grid);
  const BodeTable ta = bode_data(a, grid);
  std::string csv;
  double max_low = 0.0;
  if (!o.reduced.empty()) {
    QuadratureModel b = resolve_model(o.reduced);
    if (b.m_out != a.m_out) throw DimensionError("bode: output counts differ");
    if (b.n_in < a.n_in) b = pad_inputs(b, a.n_in);
    if (b.n_in != a.n_in) throw DimensionError("bode: input counts differ");
    const BodeTable tb = bode_data(b, grid);
    csv = bode_csv(ta, &tb);
    const double cutoff = grid.front() * std::pow(grid.back() / grid.front(), 0.25);
    for (std::size_t k = 0; k < ta.rows.size(); ++k) {
      if (ta.rows[k].omega <= cutoff) {
        max_low = std::max(max_low, std::abs(tb.rows[k].mag_db - ta.rows[k].mag_db));
      }
    }
  } else {
    csv = bode_csv(ta);
  }
  const std::string path = out_path(o.out, "bode.csv");
  io::write_atomic(path, csv);
  out << "wrote " << ta.rows.size() << " rows to " << path << "\n";
  if (!o.reduced.empty()) out << "max_low_band_delta_mag_db=" << g6(max_low) << "\n";
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Structure-preserving H2 reduction of non-Markovian quantum models", "nmq-reduce"};
  app.require_subcommand(1);
  Options o;
  double tol = 0.0;

  auto* build = app.add_subcommand("build", "Build the quadrature model from physical parameters");
  build->add_option("--params", o.params, "Parameter file");
  build->add_option("--builtin", o.builtin, "Builtin parameter set (paper-example)");
  build->add_option("--sign", o.sign, "Input sign convention (positive|physical)");
  build->add_option("--out", o.out, "Output directory");
  build->add_option("--tol", tol, "Realizability tolerance");

  auto* check = app.add_subcommand("check", "Check physical realizability of a model");
  auto* reduce_cmd = app.add_subcommand("reduce", "Reduce the ancillary system");
  auto* compare = app.add_subcommand("compare", "H2 distance between two models");
  auto* bode = app.add_subcommand("bode", "Frequency response CSV");
  for (auto* sc : {check, reduce_cmd, compare, bode}) {
    sc->add_option("--model", o.model, "Model file or builtin:NAME");
    sc->add_option("--builtin", o.builtin, "Builtin model (paper-example|paper-reduced)");
    sc->add_option("--out", o.out, "Output directory");
  }
  check->add_option("--tol", tol, "Residual tolerance");
  reduce_cmd->add_option("--r", o.r, "Target ancillary mode count")->required();
  reduce_cmd->add_option("--method", o.method, "gradient|sdp-lift|sdp-then-gradient");
  reduce_cmd->add_option("--seed", o.seed, "Initialization seed (NMQ_SEED overrides)");
  reduce_cmd->add_option("--alignment", o.alignment, "zero-pad|truncate");
  reduce_cmd->add_option("--tol", tol, "Gradient tolerance");
  compare->add_option("--reduced", o.reduced, "Second model file or builtin:NAME");
  bode->add_option("--reduced", o.reduced, "Optional second model");
  bode->add_option("--grid", o.grid, "lo:hi:points (log spaced)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  for (auto* sc : {build, check, reduce_cmd}) {
    if (sc->parsed() && sc->count("--tol") > 0) {
      if (!(tol > 0.0)) {
        err << "error: --tol must be positive\n";
        return kExitUsage;
      }
      o.tol = tol;
    }
  }

  try {
    if (build->parsed()) return cmd_build(o, out);
    if (check->parsed()) return cmd_check(o, out);
    if (reduce_cmd->parsed()) return cmd_reduce(o, out);
    if (compare->parsed()) return cmd_compare(o, out);
    if (bode->parsed()) return cmd_bode(o, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace nmq::cli
