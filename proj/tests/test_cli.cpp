#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string cli = ODEIG_CLI_PATH;

struct RunResult {
  int exit_code;
  std::string out;
  std::string err;
};

fs::path work_dir() {
  fs::path p = fs::temp_directory_path() / "odeig_cli_tests";
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run(const std::string& args, const std::string& env_prefix = "") {
  fs::path out = work_dir() / "stdout.txt";
  fs::path err = work_dir() / "stderr.txt";
  std::string cmd = env_prefix + "'" + cli + "' " + args + " >'" + out.string() + "' 2>'" +
                    err.string() + "'";
  int st = std::system(cmd.c_str());
  int code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return {code, slurp(out), slurp(err)};
}

json parse_file(const fs::path& p) { return json::parse(slurp(p)); }

} // namespace

TEST_CASE("gen writes a valid decomposition file", "[cli]") {
  fs::path f = work_dir() / "gen_basic.json";
  RunResult r = run("gen --m 3 --n 4 --r 2 --seed 7 -o '" + f.string() + "'");
  REQUIRE(r.exit_code == 0);
  json j = parse_file(f);
  REQUIRE(j["schema"] == 1);
  REQUIRE(j["order"] == 3);
  REQUIRE(j["dim"] == 4);
  REQUIRE(j["rank"] == 2);
  REQUIRE(j["lambdas"].size() == 2);
  REQUIRE(j["u_columns"].size() == 2);
  REQUIRE(j["u_columns"][0].size() == 4);
}

TEST_CASE("gen rejects order two by name", "[cli]") {
  RunResult r = run("gen --m 2 --n 2 --r 1");
  REQUIRE(r.exit_code == 1);
  REQUIRE(r.err.find("at least 3") != std::string::npos);
}

TEST_CASE("gen rejects rank above dimension and bad weights", "[cli]") {
  REQUIRE(run("gen --m 3 --n 2 --r 3").exit_code == 1);
  RunResult r = run("gen --m 3 --n 2 --r 2 --lambda 1");
  REQUIRE(r.exit_code == 1);
  REQUIRE(r.err.find("lambda") != std::string::npos);
  REQUIRE(run("gen --m 3 --n 2 --r 1 --lambda -2").exit_code == 1);
}

TEST_CASE("gen is deterministic in the seed", "[cli]") {
  fs::path a = work_dir() / "det_a.json";
  fs::path b = work_dir() / "det_b.json";
  fs::path c = work_dir() / "det_c.json";
  REQUIRE(run("gen --m 4 --n 3 --r 3 --seed 11 -o '" + a.string() + "'").exit_code == 0);
  REQUIRE(run("gen --m 4 --n 3 --r 3 --seed 11 -o '" + b.string() + "'").exit_code == 0);
  REQUIRE(run("gen --m 4 --n 3 --r 3 --seed 12 -o '" + c.string() + "'").exit_code == 0);
  REQUIRE(slurp(a) == slurp(b));
  REQUIRE(slurp(a) != slurp(c));
}

TEST_CASE("ODEIG_SEED env variable stands in for --seed", "[cli]") {
  fs::path a = work_dir() / "env_a.json";
  fs::path b = work_dir() / "env_b.json";
  REQUIRE(run("gen --m 3 --n 3 --r 2 --seed 123 -o '" + a.string() + "'").exit_code == 0);
  REQUIRE(run("gen --m 3 --n 3 --r 2 -o '" + b.string() + "'", "ODEIG_SEED=123 ").exit_code == 0);
  REQUIRE(slurp(a) == slurp(b));

  RunResult bad = run("gen --m 3 --n 3 --r 2", "ODEIG_SEED=abc ");
  REQUIRE(bad.exit_code == 1);
  REQUIRE(bad.err.find("ODEIG_SEED") != std::string::npos);
}

TEST_CASE("enumerate reports the axis cubic classes", "[cli]") {
  fs::path f = work_dir() / "axis.json";
  REQUIRE(run("gen --m 3 --n 2 --r 2 --seed 7 --lambda 2 8 -o '" + f.string() + "'").exit_code ==
          0);
  RunResult r = run("enumerate --in '" + f.string() + "' --no-timestamp");
  REQUIRE(r.exit_code == 0);
  json j = json::parse(r.out);
  REQUIRE(j["kind"] == "enumeration");
  REQUIRE(j["counts"]["real"] == 3);
  REQUIRE(j["counts"]["complex"] == 3);
  REQUIRE(j["counts"]["bound"] == 3);
  REQUIRE(j["pairs"].size() == 3);
  REQUIRE(j["max_residual"].get<double>() <= 1e-10);
  REQUIRE_FALSE(j.contains("generated_at"));

  bool found = false;
  for (const auto& row : j["pairs"])
    if (row["k"] == 2) {
      found = true;
      REQUIRE(std::abs(row["lambda"].get<double>() - 1.9402850002906638) < 1e-12);
    }
  REQUIRE(found);
}

TEST_CASE("enumerate output is reproducible without the timestamp", "[cli]") {
  fs::path f = work_dir() / "repro.json";
  REQUIRE(run("gen --m 4 --n 3 --r 2 --seed 5 -o '" + f.string() + "'").exit_code == 0);
  RunResult a = run("enumerate --in '" + f.string() + "' --no-timestamp");
  RunResult b = run("enumerate --in '" + f.string() + "' --no-timestamp");
  REQUIRE(a.exit_code == 0);
  REQUIRE(a.out == b.out);

  RunResult stamped = run("enumerate --in '" + f.string() + "'");
  REQUIRE(stamped.exit_code == 0);
  REQUIRE(json::parse(stamped.out).contains("generated_at"));
}

TEST_CASE("enumerate emits csv with one row per class", "[cli]") {
  fs::path f = work_dir() / "csv.json";
  REQUIRE(run("gen --m 3 --n 2 --r 2 --seed 7 --lambda 2 8 -o '" + f.string() + "'").exit_code ==
          0);
  RunResult r = run("enumerate --in '" + f.string() + "' --format csv --no-timestamp");
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.out.rfind("k,indices,signs,lambda,u_1,u_2,residual\n", 0) == 0);
  REQUIRE(std::count(r.out.begin(), r.out.end(), '\n') == 4);
}

TEST_CASE("classify labels the flat even-order instance", "[cli]") {
  fs::path f = work_dir() / "flat4.json";
  REQUIRE(run("gen --m 4 --n 2 --r 2 --seed 3 --lambda 1 1 -o '" + f.string() + "'").exit_code ==
          0);
  RunResult r = run("classify --in '" + f.string() + "' --no-timestamp");
  REQUIRE(r.exit_code == 0);
  json j = json::parse(r.out);
  REQUIRE(j["kind"] == "classification");
  REQUIRE(j["classification_counts"]["isolated-local-max"] == 2);
  REQUIRE(j["classification_counts"]["isolated-local-min"] == 2);
  REQUIRE_FALSE(j["classification_counts"].contains("saddle"));
  for (const auto& row : j["pairs"]) {
    REQUIRE(row.contains("spectrum_predicted"));
    REQUIRE(row["spectrum_error"].get<double>() <= 1e-8);
  }
}

TEST_CASE("verify succeeds on a small instance", "[cli]") {
  fs::path f = work_dir() / "verify_ok.json";
  REQUIRE(run("gen --m 3 --n 2 --r 2 --seed 7 --lambda 2 8 -o '" + f.string() + "'").exit_code ==
          0);
  RunResult r = run("verify --in '" + f.string() + "' --restarts 60 --seed 9 --no-timestamp");
  REQUIRE(r.exit_code == 0);
  json j = json::parse(r.out);
  REQUIRE(j["kind"] == "verification");
  REQUIRE(j["coverage"] == 1.0);
  REQUIRE(j["unmatched_discovered"].empty());
}

TEST_CASE("verify honors the match tolerance override", "[cli]") {
  fs::path f = work_dir() / "verify_tol.json";
  REQUIRE(run("gen --m 3 --n 2 --r 2 --seed 7 --lambda 2 8 -o '" + f.string() + "'").exit_code ==
          0);
  // Absurdly tight matching leaves every discovery unmatched.
  fs::path dump = work_dir() / "tol_traces.csv";
  RunResult tight = run("verify --in '" + f.string() +
                        "' --restarts 60 --seed 9 --match-tol 1e-15 --no-timestamp" +
                        " --dump-traces '" + dump.string() + "'");
  REQUIRE(tight.exit_code == 3);
  json jt = json::parse(tight.out);
  REQUIRE_FALSE(jt["unmatched_discovered"].empty());

  RunResult bad = run("verify --in '" + f.string() + "' --match-tol -1");
  REQUIRE(bad.exit_code == 1);
  REQUIRE(bad.err.find("match-tol") != std::string::npos);
}

TEST_CASE("verify exits 3 on a coverage shortfall and dumps traces", "[cli]") {
  fs::path f = work_dir() / "verify_short.json";
  fs::path dump = work_dir() / "short_traces.csv";
  fs::path out = work_dir() / "short_report.json";
  REQUIRE(run("gen --m 4 --n 3 --r 3 --seed 9 -o '" + f.string() + "'").exit_code == 0);
  RunResult r = run("verify --in '" + f.string() + "' --restarts 1 --seed 5 --out '" +
                    out.string() + "' --dump-traces '" + dump.string() + "'");
  REQUIRE(r.exit_code == 3);
  REQUIRE(r.err.find("shortfall") != std::string::npos);
  REQUIRE(fs::exists(dump));
  std::string traces = slurp(dump);
  REQUIRE(traces.rfind("trace,converged,", 0) == 0);
  json j = parse_file(out);
  REQUIRE(j["coverage"].get<double>() < 1.0);
}

TEST_CASE("count prints the formulas", "[cli]") {
  RunResult r = run("count --m 4 --n 2 --format json");
  REQUIRE(r.exit_code == 0);
  json j = json::parse(r.out);
  REQUIRE(j["bound"] == 4);
  REQUIRE(j["complex"] == 4);
  REQUIRE(j["real"] == 4);

  RunResult t = run("count --m 3 --n 3");
  REQUIRE(t.exit_code == 0);
  REQUIRE(t.out.find("7") != std::string::npos);

  REQUIRE(run("count --m 3").exit_code == 1);
  REQUIRE(run("count --m 2 --n 2").exit_code == 1);
  REQUIRE(run("count --m 6 --n 40 --format json").exit_code == 1);
}

TEST_CASE("broken input files fail with a named cause", "[cli]") {
  fs::path bad = work_dir() / "bad.json";
  std::ofstream(bad) << "{ \"schema\": 1, \"order\": 3 }";
  RunResult r = run("enumerate --in '" + bad.string() + "'");
  REQUIRE(r.exit_code == 1);
  REQUIRE(r.err.find("dim") != std::string::npos);

  fs::path invalid = work_dir() / "invalid.json";
  std::ofstream(invalid) << R"({"schema":1,"order":3,"dim":2,"rank":2,
    "lambdas":[2.0,-8.0],
    "u_columns":[[1.0,0.0],[0.0,1.0]]})";
  RunResult v = run("enumerate --in '" + invalid.string() + "'");
  REQUIRE(v.exit_code == 1);
  REQUIRE(v.err.find("lambda") != std::string::npos);

  RunResult missing = run("enumerate --in '/no/such/file.json'");
  REQUIRE(missing.exit_code == 1);
  REQUIRE(missing.err.find("/no/such/file.json") != std::string::npos);
}
