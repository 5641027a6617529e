// Serialization round-trips and end-to-end runs of the experiment driver.
// CLI cases shell out to the built binary (path injected at compile time),
// write configs into a scratch directory, and assert on exit codes and
// output bytes.

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <graphop/io.hpp>

using namespace graphop;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "graphop-cli-tests";
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary);
  REQUIRE(out.good());
  out << body;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Exit code of the driver; stdout+stderr land in `capture` when given.
int run_cli(const std::string& args, const fs::path& capture = {}) {
  std::string cmd = std::string(GRAPHOP_CLI_PATH) + " " + args;
  cmd += capture.empty() ? " > /dev/null 2>&1" : " > " + capture.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("signal json round trip preserves representation and metadata") {
  const Signal pc = Signal::piecewise_constant({0.5, -1.0, 0.25});
  const json jc = signal_to_json(pc);
  CHECK(jc.at("repr") == "piecewise-constant");
  CHECK(jc.at("n") == 3);
  CHECK(jc.at("lipschitz_const").is_null());
  const Signal pc2 = signal_from_json(jc);
  CHECK(pc2.values() == pc.values());
  CHECK(pc2.range_bound() == pc.range_bound());
  CHECK_FALSE(pc2.lipschitz_const().has_value());

  const Signal pl = Signal::piecewise_linear({0.0, 1.0, 0.5});
  const json jl = signal_to_json(pl);
  CHECK(jl.at("repr") == "piecewise-linear");
  const Signal pl2 = signal_from_json(jl);
  CHECK(pl2.values() == pl.values());
  REQUIRE(pl2.lipschitz_const().has_value());
  CHECK(*pl2.lipschitz_const() == *pl.lipschitz_const());
  for (double x : {0.0, 0.3, 0.77, 1.0}) CHECK(pl2(x) == Catch::Approx(pl(x)).margin(1e-15));

  const Signal an = Signal::analytic([](double x) { return x; }, 1.0, 1.0);
  CHECK_THROWS_AS(signal_to_json(an), std::invalid_argument);
  CHECK_THROWS_AS(signal_from_json(json{{"repr", "fourier"}}), std::invalid_argument);
}

TEST_CASE("finite signal json round trip") {
  FiniteSignal x;
  x.values = {1.0, -0.5, 0.0};
  const json j = finite_signal_to_json(x);
  CHECK(j.at("repr") == "finite");
  const FiniteSignal y = finite_signal_from_json(j);
  CHECK(y.n() == x.n());
  CHECK(y.values == x.values);
}

TEST_CASE("network parameter json round trip rejects oversized taps") {
  const GnnParams p = random_gnn_params(2, {1, 2, 1}, 2, Activation::Clip, 4242);
  json j = gnn_params_to_json(p);
  const GnnParams q = gnn_params_from_json(j);
  CHECK(q.L == p.L);
  CHECK(q.widths == p.widths);
  CHECK(q.K == p.K);
  CHECK(q.activation == p.activation);
  CHECK(q.h == p.h);

  j["h"][0][0][0][0] = 1.5;
  CHECK_THROWS_AS(gnn_params_from_json(j), CoefficientBoundError);
  j["h"][0][0][0][0] = 0.5;
  j["widths"] = {1, 2, 2};
  CHECK_THROWS_AS(gnn_params_from_json(j), std::invalid_argument);
}

TEST_CASE("matrix csv loader checks the declared shape") {
  std::istringstream good("2\n0,1\n1,0\n");
  const auto M = load_matrix_csv(good);
  REQUIRE(M.size() == 2);
  CHECK(M[0][1] == 1.0);
  CHECK(M[1][1] == 0.0);

  std::istringstream short_rows("3\n0,1,0\n1,0,0\n");
  CHECK_THROWS_AS(load_matrix_csv(short_rows), std::invalid_argument);
  std::istringstream ragged("2\n0,1\n1\n");
  CHECK_THROWS_AS(load_matrix_csv(ragged), std::invalid_argument);
  std::istringstream junk("2\n0,x\n1,0\n");
  CHECK_THROWS_AS(load_matrix_csv(junk), std::invalid_argument);
}

TEST_CASE("bound report rows keep the column contract") {
  BoundReport r;
  r.theorem = Theorem::Thm41;
  r.constants.C_A = 1.0;
  r.constants.C_v = 1.0;
  r.constants.n = 64;
  r.bound_value = thm41_bound(1.0, 1.0, 64);
  r.num_tuples = 8;
  r.seed = 7;

  const std::string row = bound_report_csv_row(r);
  CHECK(std::count(row.begin(), row.end(), ',') == 15);
  CHECK(row.find("thm41,,64,") == 0);            // variant cell empty
  CHECK(row.find(",,,8,7,") != std::string::npos);  // measured and pass empty

  r.set_measured(0.1);
  REQUIRE(r.pass.has_value());
  CHECK(*r.pass);
  const std::string full = bound_reports_to_csv({r});
  CHECK(full.rfind(kBoundCsvHeader, 0) == 0);
  CHECK(count_lines(full) == 2);
  CHECK(full.find(",true,8,7,") != std::string::npos);

  const json arr = bound_reports_to_json({r});
  REQUIRE(arr.size() == 1);
  CHECK(arr[0].at("theorem") == "thm41");
  CHECK(arr[0].at("variant").is_null());
  CHECK(arr[0].at("bound") == Catch::Approx(0.28125));
  CHECK(arr[0].at("pass") == true);
}

TEST_CASE("bound subcommand prints the evaluated formula") {
  const fs::path dir = scratch_dir();
  write_text(dir / "bound.json",
             R"({"bound": {"theorem": "thm41", "C_A": 1.0, "C_v": 1.0, "n": 64}})");
  const fs::path log = dir / "bound.log";
  REQUIRE(run_cli("bound --config " + (dir / "bound.json").string(), log) == 0);
  CHECK(read_text(log).find("0.28125") != std::string::npos);

  write_text(dir / "bound43.json",
             R"({"bound": {"theorem": "thm43-approx", "C_A": 1.0, "C_v": 1.0,
                 "K": 2, "L": 2, "n_max": 2, "n": 64,
                 "variant": "lipschitz-to-lipschitz"}})");
  REQUIRE(run_cli("bound --config " + (dir / "bound43.json").string() + " --out " +
                      (dir / "bound43.csv").string(),
                  log) == 0);
  const std::string csv = read_text(dir / "bound43.csv");
  CHECK(csv.rfind(kBoundCsvHeader, 0) == 0);
  CHECK(csv.find("40.53125") != std::string::npos);
}

TEST_CASE("sweep subcommand writes matched rows and is byte deterministic") {
  const fs::path dir = scratch_dir();
  write_text(dir / "sweep.json", R"({
    "operator": {"kind": "hypercube", "N": 4},
    "resolutions": [4, 16],
    "theorem": "thm41",
    "profile": {"k_max": 2, "C_v": 1.0, "num_tuples": 8, "q_atoms": 128},
    "seed": 7
  })");
  const std::string base = "sweep --config " + (dir / "sweep.json").string();
  REQUIRE(run_cli(base + " --threads 1 --out " + (dir / "t1.csv").string()) == 0);
  REQUIRE(run_cli(base + " --threads 8 --out " + (dir / "t8.csv").string()) == 0);
  REQUIRE(run_cli(base + " --threads 1 --out " + (dir / "t1b.csv").string()) == 0);

  const std::string csv = read_text(dir / "t1.csv");
  CHECK(csv == read_text(dir / "t8.csv"));
  CHECK(csv == read_text(dir / "t1b.csv"));
  REQUIRE(csv.rfind(kBoundCsvHeader, 0) == 0);
  CHECK(count_lines(csv) == 3);
  CHECK(csv.find("thm41,,4,") != std::string::npos);
  CHECK(csv.find("thm41,,16,") != std::string::npos);
  CHECK(csv.find(",false,") == std::string::npos);

  REQUIRE(run_cli(base + " --format json --out " + (dir / "t1.json").string()) == 0);
  const json rows = json::parse(read_text(dir / "t1.json"));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].at("constants").at("n") == 4);
  CHECK(rows[0].at("bound") == Catch::Approx(1.5));
  CHECK(rows[0].at("hypothesis_ok") == true);
}

TEST_CASE("distance subcommand is zero for identical discretizations") {
  const fs::path dir = scratch_dir();
  write_text(dir / "dist.json", R"({
    "operator": {"kind": "hypercube", "N": 4, "resolution": 8},
    "operator_b": {"kind": "hypercube", "N": 4, "resolution": 8},
    "profile": {"k_max": 2, "num_tuples": 8, "q_atoms": 128},
    "seed": 7,
    "output": {"path": ")" + (dir / "dist.out.json").string() + R"("}
  })");
  REQUIRE(run_cli("distance --config " + (dir / "dist.json").string()) == 0);
  const json rep = json::parse(read_text(dir / "dist.out.json"));
  CHECK(rep.at("total") == 0.0);
  CHECK(rep.at("estimator") == "paired");
  CHECK(rep.at("per_k").size() == 2);
  CHECK(rep.at("remainder_bound").get<double>() > 0.0);
}

TEST_CASE("paired distance across different operators is refused") {
  const fs::path dir = scratch_dir();
  write_text(dir / "mismatch.json", R"({
    "operator": {"kind": "hypercube", "N": 4, "resolution": 8},
    "operator_b": {"kind": "hypercube", "N": 5, "resolution": 8},
    "profile": {"num_tuples": 4, "q_atoms": 64},
    "output": {"path": "unused.json"}
  })");
  CHECK(run_cli("distance --config " + (dir / "mismatch.json").string()) == 3);
}

TEST_CASE("strict sweep refuses undeclared resolutions") {
  const fs::path dir = scratch_dir();
  write_text(dir / "offgrid.json", R"({
    "operator": {"kind": "hypercube", "N": 4},
    "resolutions": [5],
    "theorem": "thm41",
    "profile": {"k_max": 1, "num_tuples": 2, "q_atoms": 32},
    "output": {"path": ")" + (dir / "offgrid.csv").string() + R"("}
  })");
  CHECK(run_cli("sweep --config " + (dir / "offgrid.json").string() + " --strict") == 3);
  // Without --strict the row is emitted but flagged.
  REQUIRE(run_cli("sweep --config " + (dir / "offgrid.json").string()) == 0);
  CHECK(read_text(dir / "offgrid.csv").find(",false\n") != std::string::npos);
}

TEST_CASE("coefficient bounds surface as their own exit code") {
  const fs::path dir = scratch_dir();
  write_text(dir / "hot.json",
             R"({"L": 1, "widths": [1, 1], "K": 1, "activation": "clip", "h": [[[[1.5]]]]})");
  write_text(dir / "gc_bad.json", R"({
    "operator": {"kind": "hypercube", "N": 4},
    "resolutions": [8],
    "gnn": "hot.json",
    "profile": {"k_max": 1, "num_tuples": 2, "q_atoms": 32},
    "output": {"path": "unused.csv"}
  })");
  CHECK(run_cli("gnn-compare --config " + (dir / "gc_bad.json").string()) == 4);
}

TEST_CASE("config errors surface as exit code 2") {
  const fs::path dir = scratch_dir();
  CHECK(run_cli("sweep --config " + (dir / "no-such-file.json").string()) == 2);

  write_text(dir / "not_object.json", R"({"operator": 3})");
  CHECK(run_cli("sweep --config " + (dir / "not_object.json").string()) == 2);

  write_text(dir / "bad_theorem.json", R"({
    "operator": {"kind": "hypercube", "N": 4},
    "resolutions": [4],
    "theorem": "thm99",
    "output": {"path": "unused.csv"}
  })");
  const fs::path log = dir / "bad_theorem.log";
  CHECK(run_cli("sweep --config " + (dir / "bad_theorem.json").string(), log) == 2);
  CHECK(read_text(log).find("thm99") != std::string::npos);

  CHECK(run_cli("sweep") == 2);           // --config is required
  CHECK(run_cli("frobnicate") == 2);      // unknown subcommand
  CHECK(run_cli("--help") == 0);
}

TEST_CASE("check subcommand reports assumption rows") {
  const fs::path dir = scratch_dir();
  write_text(dir / "check.json", R"({
    "operator": {"kind": "hypercube", "N": 4},
    "resolutions": [8],
    "profile": {"num_tuples": 8, "q_atoms": 128},
    "seed": 11,
    "output": {"path": ")" + (dir / "check.csv").string() + R"("}
  })");
  REQUIRE(run_cli("check --config " + (dir / "check.json").string()) == 0);
  const std::string csv = read_text(dir / "check.csv");
  CHECK(csv.rfind("check,resolution,pass,measured,threshold,trials,witness", 0) == 0);
  CHECK(csv.find("lipschitz-map,0,true,") != std::string::npos);
  CHECK(csv.find("self-adjoint,0,true,") != std::string::npos);
  CHECK(csv.find("constant-to-constant,8,true,") != std::string::npos);
  CHECK(csv.find(",false,") == std::string::npos);

  // A union-of-intervals operator keeps cell structure only at resolutions
  // dividing N; probing at 4 exposes the tear, and strict mode turns the
  // failing row into an error exit.
  write_text(dir / "check_tear.json", R"({
    "operator": {"kind": "copies", "N": 6, "a": 0.3},
    "resolutions": [4],
    "profile": {"num_tuples": 6, "q_atoms": 128},
    "seed": 11,
    "output": {"path": ")" + (dir / "check_tear.csv").string() + R"("}
  })");
  REQUIRE(run_cli("check --config " + (dir / "check_tear.json").string()) == 0);
  CHECK(read_text(dir / "check_tear.csv").find("constant-to-constant,4,false,") !=
        std::string::npos);
  CHECK(run_cli("check --config " + (dir / "check_tear.json").string() + " --strict") == 3);
}

TEST_CASE("gnn comparison emits gap rows and network rows") {
  const fs::path dir = scratch_dir();
  write_text(dir / "net.json",
             R"({"L": 1, "widths": [1, 1], "K": 2, "activation": "clip", "h": [[[[0.5, 0.25]]]]})");
  write_text(dir / "gc.json", R"({
    "operator": {"kind": "hypercube", "N": 4},
    "resolutions": [8],
    "gnn": "net.json",
    "profile": {"k_max": 2, "num_tuples": 4, "q_atoms": 128},
    "seed": 3,
    "output": {"path": ")" + (dir / "gc.csv").string() + R"("}
  })");
  REQUIRE(run_cli("gnn-compare --config " + (dir / "gc.json").string() + " --threads 1") == 0);
  const std::string csv = read_text(dir / "gc.csv");
  CHECK(count_lines(csv) == 3);
  CHECK(csv.find("lemma-E3,lipschitz-to-lipschitz,8,") != std::string::npos);
  CHECK(csv.find("thm43-approx,lipschitz-to-lipschitz,8,") != std::string::npos);
  CHECK(csv.find(",false,") == std::string::npos);
}

TEST_CASE("matrix operators load from csv files next to the config") {
  const fs::path dir = scratch_dir();
  write_text(dir / "perm.csv", "2\n0,1\n1,0\n");
  write_text(dir / "mat.json", R"({
    "operator": {"kind": "matrix", "file": "perm.csv"},
    "profile": {"num_tuples": 8},
    "seed": 5,
    "output": {"path": ")" + (dir / "mat_check.csv").string() + R"("}
  })");
  REQUIRE(run_cli("check --config " + (dir / "mat.json").string()) == 0);
  const std::string csv = read_text(dir / "mat_check.csv");
  CHECK(csv.find("lipschitz-map,0,true,") != std::string::npos);
  CHECK(csv.find("self-adjoint,0,true,") != std::string::npos);
}
