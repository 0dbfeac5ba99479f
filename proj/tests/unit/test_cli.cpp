#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <vector>

#include "nmq/cli.hpp"
#include "nmq/io.hpp"
#include "nmq/model.hpp"

using namespace nmq;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "nmq-reduce");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "nmq_cli_test" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("build from a parameter file matches the builtin") {
  const fs::path a = scratch("build_builtin");
  const fs::path b = scratch("build_file");
  io::write_atomic((b / "params.json").string(), io::dump(io::params_to_json(example_params())));
  const Run r1 = run({"build", "--builtin", "paper-example", "--out", a.string()});
  const Run r2 = run({"build", "--params", (b / "params.json").string(), "--out", b.string()});
  REQUIRE(r1.code == cli::kExitOk);
  REQUIRE(r2.code == cli::kExitOk);
  CHECK(r1.out == r2.out);
  CHECK(r1.out.find("realizable=yes hurwitz=yes") != std::string::npos);
  CHECK(io::read_file((a / "model.json").string()) == io::read_file((b / "model.json").string()));
  CHECK(fs::exists(a / "realizability.json"));
}

TEST_CASE("check passes transcribed matrices only at the rounding tolerance") {
  const Run loose = run({"check", "--model", "builtin:paper-reduced", "--tol", "1.5e-2"});
  CHECK(loose.code == cli::kExitOk);
  CHECK(loose.out.find("realizable=yes") != std::string::npos);
  const Run tight = run({"check", "--model", "builtin:paper-reduced", "--tol", "1e-6"});
  CHECK(tight.code == cli::kExitCheckFail);
  CHECK(tight.out.find("ancillary_dissipation") != std::string::npos);
  CHECK(run({"check", "--builtin", "paper-example"}).code == cli::kExitOk);
}

TEST_CASE("usage and input errors map to exit codes") {
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"reduce", "--builtin", "paper-example"}).code == cli::kExitUsage);
  CHECK(run({"reduce", "--builtin", "paper-example", "--r", "3"}).code == cli::kExitUsage);
  CHECK(run({"reduce", "--builtin", "paper-example", "--r", "1", "--method", "newton"}).code ==
        cli::kExitUsage);
  const fs::path d = scratch("bad_params");
  io::write_atomic((d / "p.json").string(), "{\"m\": 1,\n \"n\": }\n");
  const Run bad = run({"build", "--params", (d / "p.json").string(), "--out", d.string()});
  CHECK(bad.code == cli::kExitUsage);
  CHECK(bad.err.find(":2:") != std::string::npos);
  CHECK(run({"check", "--model", (d / "missing.json").string()}).code == cli::kExitUsage);
}

TEST_CASE("compare of a model with itself is zero") {
  const Run r = run({"compare", "--builtin", "paper-example", "--reduced", "builtin:paper-example"});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.out.find("alignment=zero-pad h2=") != std::string::npos);
  CHECK(r.out.find("alignment=truncate h2=") != std::string::npos);
  CHECK(r.out.find("relative_gap=") != std::string::npos);
}

TEST_CASE("bode writes one row per grid point and channel") {
  const fs::path d = scratch("bode");
  const Run r = run({"bode", "--builtin", "paper-example", "--reduced", "builtin:paper-reduced",
                     "--grid", "0.1:10:25", "--out", d.string()});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.out.find("max_low_band_delta_mag_db=") != std::string::npos);
  std::istringstream csv(io::read_file((d / "bode.csv").string()));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "omega,in_idx,out_idx,mag_db,phase_deg,delta_mag_db");
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 25 * 4 * 10);
  CHECK(run({"bode", "--builtin", "paper-example", "--grid", "1:2"}).code == cli::kExitUsage);
}

TEST_CASE("reduce output is reproducible and the seed variable overrides the flag") {
  const fs::path a = scratch("reduce_a");
  const fs::path b = scratch("reduce_b");
  const Run r1 = run({"reduce", "--builtin", "paper-example", "--r", "1", "--out", a.string()});
  ::setenv("NMQ_SEED", "7", 1);
  const Run r2 = run({"reduce", "--builtin", "paper-example", "--r", "1", "--seed", "99", "--out",
                      b.string()});
  ::unsetenv("NMQ_SEED");
  REQUIRE(r1.code == cli::kExitOk);
  REQUIRE(r2.code == cli::kExitOk);
  CHECK(r1.out.rfind("r=1 h2=", 0) == 0);
  CHECK(r1.out.find("realizable=yes hurwitz=yes") != std::string::npos);
  CHECK(io::read_file((a / "reduced.json").string()) == io::read_file((b / "reduced.json").string()));
  CHECK(io::read_file((a / "reduction.json").string()) ==
        io::read_file((b / "reduction.json").string()));
  const Run chk = run({"check", "--model", (a / "reduced.json").string(), "--tol", "1e-10"});
  CHECK(chk.code == cli::kExitOk);
}
