#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
  json report() const { return json::parse(out); }
};

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::current_path() / "cli_scratch";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void put(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

// Runs the CLI through the shell; `env` is prepended verbatim (e.g. "LHK_SEED=3").
Result lhk(const std::string& args, const std::string& env = "env -u LHK_SEED") {
  const fs::path out = scratch() / "stdout.txt", err = scratch() / "stderr.txt";
  const std::string cmd = env + " '" LHK_CLI_PATH "' " + args + " > '" + out.string() + "' 2> '" +
                          err.string() + "'";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

}  // namespace

TEST_CASE("casimir check") {
  auto r = lhk("casimir check --algebra sl2 --poly 'v1*v3 - v2^2'");
  CHECK(r.code == 0);
  CHECK(r.report()["casimir"] == true);
  CHECK(r.report()["status"] == "pass");
  r = lhk("casimir check --algebra su2 --poly 'v1^2 + v2^2 + v3^2'");
  CHECK(r.code == 0);
  r = lhk("casimir check --algebra sl2 --poly 'v1*v2'");
  CHECK(r.code == 1);
  CHECK(r.report()["casimir"] == false);
  r = lhk("casimir check --algebra sl2 --poly 'v1*'");
  CHECK(r.code == 2);
  CHECK(r.report()["error"]["type"] == "ParseError");
  r = lhk("casimir find --algebra sl2 --dmax 2");
  CHECK(r.code == 0);
  CHECK(r.report()["dimension"] == 2);
}

TEST_CASE("algebra commands") {
  CHECK(lhk("algebra list").code == 0);
  CHECK(lhk("algebra validate h6").code == 0);
  put(scratch() / "bad.json", R"({"r": 3, "c": [[1, 2, 3, "1"], [1, 3, 1, "1"]]})");
  auto r = lhk("algebra validate '" + (scratch() / "bad.json").string() + "'");
  CHECK(r.code == 1);
  CHECK(r.report()["valid"] == false);
  put(scratch() / "broken.json", "{");
  CHECK(lhk("algebra validate '" + (scratch() / "broken.json").string() + "'").code == 2);
  CHECK(lhk("algebra validate so9").code == 2);
}

TEST_CASE("system commands and usage errors") {
  auto r = lhk("system list");
  CHECK(r.code == 0);
  CHECK(r.out.find("kummer-schwarz") != std::string::npos);
  CHECK(lhk("system show trig-su2").code == 0);
  CHECK(lhk("system show lorenz").code == 2);
  CHECK(lhk("simulate --system kummer-schwarz --bogus 1").code == 2);
  CHECK(lhk("simulate --system kummer-schwarz --zeta 1").code == 2);
  CHECK(lhk("simulate --system kummer-schwarz --param zeta=1").code == 2);
  CHECK(lhk("simulate --system kummer-schwarz --tmax -1").code == 2);
  CHECK(lhk("").code == 2);
}

TEST_CASE("domain error at the trig-su2 boundary") {
  const auto r = lhk("simulate --system trig-su2 --x0 0.999999");
  CHECK(r.code == 3);
  const auto j = r.report();
  CHECK(j["status"] == "error");
  CHECK(j["error"]["type"] == "DomainError");
  CHECK(j["error"]["coordinate"] == "x");
  CHECK(r.err.find("DomainError") != std::string::npos);
}

TEST_CASE("simulate writes CSV") {
  const fs::path csv = scratch() / "traj.csv";
  const auto r = lhk("simulate --system kummer-schwarz --m 2 --x0 1 0.2 0.8 -0.1 --tmax 1 --csv '" +
                     csv.string() + "'");
  CHECK(r.code == 0);
  const std::string text = slurp(csv);
  CHECK(text.rfind("t,x_1,p_1,x_2,p_2\n", 0) == 0);
  CHECK(lhk("simulate --system kummer-schwarz --m 2 --x0 1 0.2 0.8 -0.1 0.3").code == 2);
}

TEST_CASE("verify-constants and lie-integral") {
  auto r = lhk("verify-constants --system smorodinsky-winternitz --n 1 --b 1 --omega '1+0.3*cos' --m 3 --tmax 5");
  CHECK(r.code == 0);
  for (const auto& [name, e] : r.report()["drift"].items()) {
    INFO(name);
    CHECK(e["max_drift"].get<double>() < 1e-6);
  }
  r = lhk("verify-constants --system kummer-schwarz --b0 1 --b1 cos --m 3 --tmax 5");
  CHECK(r.code == 0);
  CHECK(r.report()["drift"].size() == 4);
  // An unreachable tolerance is a verification failure, not an error.
  r = lhk("verify-constants --system kummer-schwarz --m 2 --tmax 5 --method rk4 --step 0.1 --tol 1e-14");
  CHECK(r.code == 1);
  CHECK(r.report()["status"] == "fail");

  r = lhk("lie-integral --system smorodinsky-winternitz --b 1 --tmax 5");
  CHECK(r.code == 0);
  CHECK(lhk("lie-integral --system riccati").code == 2);
}

TEST_CASE("superpose verify") {
  auto r = lhk("superpose verify --system kummer-schwarz --b0 1 --b1 cos --tmax 5 --tol 1e-5");
  CHECK(r.code == 0);
  const auto j = r.report();
  CHECK(j["rule"] == "kummer-schwarz");
  CHECK(j["n_particular"] == 2);
  CHECK(j["max_error"].get<double>() < 1e-5);
  const fs::path csv = scratch() / "errors.csv";
  r = lhk("superpose verify --system trig-su2 --tmax 2 --grid 51 --errors-csv '" + csv.string() + "'");
  CHECK(r.code == 0);
  CHECK(r.report()["per_time_errors_csv_path"] == csv.string());
  CHECK(slurp(csv).rfind("t,error,branch\n", 0) == 0);
  CHECK(lhk("superpose verify --system second-order-riccati").code == 2);
}

TEST_CASE("determinism, seeds and atomic reports") {
  const fs::path a = scratch() / "a.json", b = scratch() / "b.json", c = scratch() / "c.json",
                 d = scratch() / "d.json";
  const std::string cmd = "verify-constants --system trig-su2 --m 3 --tmax 2 --report ";
  REQUIRE(lhk("--seed 7 " + cmd + "'" + a.string() + "'").code == 0);
  REQUIRE(lhk("--seed 7 " + cmd + "'" + b.string() + "'").code == 0);
  REQUIRE(lhk(cmd + "'" + c.string() + "'", "LHK_SEED=7").code == 0);
  REQUIRE(lhk("--seed 8 " + cmd + "'" + d.string() + "'").code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a) == slurp(c));
  CHECK(slurp(a) != slurp(d));
  CHECK(json::parse(slurp(a))["seed"] == 7);
  CHECK(json::parse(lhk(cmd + "'" + d.string() + "'").out)["seed"] == 42);

  for (const auto& entry : fs::directory_iterator(scratch())) {
    const std::string name = entry.path().filename().string();
    CHECK(name.find(".tmp") == std::string::npos);
  }
}

TEST_CASE("config files") {
  const fs::path cfg = scratch() / "cfg.json";
  put(cfg, R"({"tmax": 1.5, "m": 2, "seed": 3})");
  auto r = lhk("verify-constants --system kummer-schwarz --tmax 5 --config '" + cfg.string() + "'");
  CHECK(r.code == 0);
  CHECK(r.report()["t1"] == 1.5);
  CHECK(r.report()["m"] == 2);
  CHECK(r.report()["seed"] == 3);

  const fs::path run = scratch() / "run.json";
  put(run, R"({"command": "verify-superposition", "system": {"name": "riccati",
      "coefficients": ["sin", "0.5", "cos"]}, "tmax": 2, "tol": 1e-6})");
  r = lhk("run '" + run.string() + "'");
  CHECK(r.code == 0);
  CHECK(r.report()["command"] == "verify-superposition");
  CHECK(r.report()["rule"] == "riccati");

  put(cfg, R"({"command": "simulate"})");
  CHECK(lhk("verify-constants --system kummer-schwarz --config '" + cfg.string() + "'").code == 2);
  put(cfg, R"({"frobnicate": 1})");
  CHECK(lhk("verify-constants --system kummer-schwarz --config '" + cfg.string() + "'").code == 2);
  CHECK(lhk("run '" + (scratch() / "missing.json").string() + "'").code == 2);
}
