// lhk command-line front end. Talks to the library exclusively through the
// C interface in lhk/lhk.h.

#include <CLI11.hpp>
#include <algorithm>
#include <cstring>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "lhk/lhk.h"

using json = nlohmann::ordered_json;

namespace {

enum Exit { kPass = 0, kFail = 1, kUsage = 2, kNumeric = 3 };

// Raised for bad command lines and configs that CLI11 itself cannot detect.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A failed C call, captured with the library's typed error.
struct LibraryError : std::runtime_error {
  lhk_status status;
  std::string kind;
  std::string coordinate;
  LibraryError(lhk_status s, std::string msg, std::string k, std::string c)
      : std::runtime_error(std::move(msg)), status(s), kind(std::move(k)), coordinate(std::move(c)) {}
};

void check(lhk_status s) {
  if (s != LHK_OK) throw LibraryError(s, lhk_last_error(), lhk_last_error_kind(), lhk_last_error_coordinate());
}

std::string take(char* s) {
  std::string out = s ? s : "";
  lhk_string_free(s);
  return out;
}

struct AlgebraDel {
  void operator()(lhk_algebra* a) const { lhk_algebra_free(a); }
};
struct PolyDel {
  void operator()(lhk_poly* p) const { lhk_poly_free(p); }
};
struct SystemDel {
  void operator()(lhk_system* s) const { lhk_system_free(s); }
};
struct TrajDel {
  void operator()(lhk_trajectory* t) const { lhk_trajectory_free(t); }
};
using Algebra = std::unique_ptr<lhk_algebra, AlgebraDel>;
using Poly = std::unique_ptr<lhk_poly, PolyDel>;
using System = std::unique_ptr<lhk_system, SystemDel>;
using Traj = std::unique_ptr<lhk_trajectory, TrajDel>;

const std::vector<std::string> kSystemParams = {"b0", "b1", "b", "n", "omega", "a0",
                                                "a1", "a2", "Bx", "By", "Bz"};

struct Options {
  std::string command;
  std::uint64_t seed = 42;
  std::string report;

  std::string algebra = "sl2";
  std::string file;
  std::string poly;
  int dmax = 2;

  std::string system;
  json system_descriptor;  // set from --config
  std::map<std::string, std::string> params;
  std::vector<std::string> param_kv;

  int m = 1;
  double t0 = 0.0;
  double tmax = 5.0;
  std::string method = "rkf45";
  double h = 1e-3;
  double atol = 1e-10;
  double rtol = 1e-10;
  std::optional<double> tol;
  int samples = 100;
  int grid = 501;
  std::vector<double> x0;
  std::vector<double> f0;
  std::string csv;
  std::string errors_csv;
};

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw UsageError("cannot write " + path);
    os << content;
    os.flush();
    if (!os) throw UsageError("cannot write " + path);
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw UsageError("cannot write " + path + ": " + ec.message());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// "1.5" -> number, "1,2" -> array of numbers, anything else -> curve text.
json param_value(const std::string& text) {
  auto number = [](const std::string& s, double& out) {
    try {
      std::size_t pos = 0;
      out = std::stod(s, &pos);
      return pos == s.size();
    } catch (const std::exception&) {
      return false;
    }
  };
  double v = 0.0;
  if (number(text, v)) return v;
  if (text.find(',') != std::string::npos) {
    json arr = json::array();
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!number(item, v)) return text;
      arr.push_back(v);
    }
    return arr;
  }
  return text;
}

lhk_method method_of(const Options& o) {
  lhk_method m = lhk_method_default();
  if (o.method == "rk4") {
    m.kind = LHK_RK4;
    m.h = o.h;
  } else if (o.method == "rkf45") {
    m.atol = o.atol;
    m.rtol = o.rtol;
  } else {
    throw UsageError("unknown method '" + o.method + "' (expected rk4 or rkf45)");
  }
  return m;
}

Algebra load_algebra(const std::string& spec) {
  lhk_algebra* a = nullptr;
  if (std::filesystem::exists(spec) && std::filesystem::is_regular_file(spec)) {
    check(lhk_algebra_from_json(read_file(spec).c_str(), &a));
  } else {
    check(lhk_algebra_builtin(spec.c_str(), &a));
  }
  return Algebra(a);
}

json descriptor_of(const Options& o) {
  json d;
  if (!o.system_descriptor.is_null()) {
    d = o.system_descriptor;
  } else if (o.system.empty()) {
    throw UsageError("--system is required");
  } else if (o.system.size() > 5 && o.system.ends_with(".json")) {
    d = json::parse(read_file(o.system));
  } else {
    d["name"] = o.system;
  }
  if (!d.contains("params")) d["params"] = json::object();
  for (const auto& [k, v] : o.params) d["params"][k] = param_value(v);
  for (const auto& kv : o.param_kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--param expects key=value, got '" + kv + "'");
    d["params"][kv.substr(0, eq)] = param_value(kv.substr(eq + 1));
  }
  return d;
}

System load_system(const Options& o) {
  lhk_system* s = nullptr;
  check(lhk_system_from_json(descriptor_of(o).dump().c_str(), &s));
  return System(s);
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0)) throw UsageError(std::string(what) + " must be positive");
}

void require_span(const Options& o) {
  if (!(o.tmax > o.t0)) throw UsageError("--tmax must exceed --t0");
}

// ---- commands; each returns (exit code, report) ----

struct Outcome {
  int code = kPass;
  json report;
};

json parsed(char* s) { return json::parse(take(s)); }

Outcome algebra_list(const Options&) {
  char* s = nullptr;
  check(lhk_algebra_list(&s));
  return {kPass, json{{"algebras", parsed(s)}}};
}

Outcome algebra_validate(const Options& o) {
  const Algebra a = load_algebra(o.file.empty() ? o.algebra : o.file);
  char* s = nullptr;
  check(lhk_algebra_validate(a.get(), &s));
  json r = parsed(s);
  return {r.at("valid").get<bool>() ? kPass : kFail, r};
}

Outcome algebra_show(const Options& o) {
  const Algebra a = load_algebra(o.file.empty() ? o.algebra : o.file);
  char* s = nullptr;
  check(lhk_algebra_to_json(a.get(), &s));
  json r = parsed(s);
  check(lhk_algebra_center(a.get(), &s));
  r["center"] = parsed(s);
  return {kPass, r};
}

Outcome casimir_check(const Options& o) {
  if (o.poly.empty()) throw UsageError("--poly is required");
  const Algebra a = load_algebra(o.algebra);
  lhk_poly* raw = nullptr;
  check(lhk_poly_parse(a.get(), o.poly.c_str(), 1, &raw));
  const Poly p(raw);
  int is_cas = 0;
  check(lhk_casimir_check(a.get(), p.get(), &is_cas));
  json brackets = json::array();
  const int r = lhk_algebra_dim(a.get());
  for (int alpha = 1; alpha <= r; ++alpha) {
    lhk_poly* g = nullptr;
    check(lhk_poly_parse(a.get(), ("v" + std::to_string(alpha)).c_str(), 1, &g));
    const Poly gen(g);
    lhk_poly* b = nullptr;
    check(lhk_poly_bracket(a.get(), p.get(), gen.get(), &b));
    const Poly br(b);
    char* text = nullptr;
    check(lhk_poly_to_string(br.get(), &text));
    brackets.push_back(take(text));
  }
  char* text = nullptr;
  check(lhk_poly_to_string(p.get(), &text));
  json rep;
  rep["algebra"] = o.algebra;
  rep["poly"] = take(text);
  rep["casimir"] = is_cas != 0;
  rep["brackets"] = brackets;
  return {is_cas ? kPass : kFail, rep};
}

Outcome casimir_find(const Options& o) {
  if (o.dmax < 0) throw UsageError("--dmax must be non-negative");
  const Algebra a = load_algebra(o.algebra);
  char* s = nullptr;
  check(lhk_casimir_find(a.get(), o.dmax, &s));
  json r;
  r["algebra"] = o.algebra;
  const json found = parsed(s);
  for (const auto& [k, v] : found.items()) r[k] = v;
  return {kPass, r};
}

Outcome system_list(const Options&) {
  char* s = nullptr;
  check(lhk_system_list(&s));
  return {kPass, json{{"systems", parsed(s)}}};
}

Outcome system_show(const Options& o) {
  const System sys = load_system(o);
  char* s = nullptr;
  check(lhk_system_describe(sys.get(), &s));
  return {kPass, parsed(s)};
}

Outcome homomorphism(const Options& o) {
  const double tol = o.tol.value_or(1e-8);
  require_positive(tol, "--tol");
  if (o.samples < 1) throw UsageError("--samples must be positive");
  const System sys = load_system(o);
  char* s = nullptr;
  check(lhk_system_homomorphism(sys.get(), o.samples, tol, o.seed, &s));
  json r = parsed(s);
  return {r.at("pass").get<bool>() ? kPass : kFail, r};
}

// Initial state of m copies: given values first, the rest sampled from the
// system's box with the run seed.
std::vector<double> initial_state(const Options& o, int n) {
  const std::size_t total = static_cast<std::size_t>(n) * o.m;
  if (o.x0.size() > total) {
    throw UsageError("--x0 has " + std::to_string(o.x0.size()) + " values, expected at most " +
                     std::to_string(total));
  }
  return o.x0;
}

Outcome simulate(const Options& o) {
  require_span(o);
  if (o.m < 1) throw UsageError("--m must be at least 1");
  const lhk_method meth = method_of(o);
  const System sys = load_system(o);
  const int n = lhk_system_dim(sys.get());
  std::vector<double> x = initial_state(o, n);
  if (x.size() < static_cast<std::size_t>(n) * o.m) {
    std::vector<double> sampled(static_cast<std::size_t>(n) * o.m);
    check(lhk_system_sample(sys.get(), o.m, o.seed, sampled.data(), sampled.size()));
    for (std::size_t i = x.size(); i < sampled.size(); ++i) x.push_back(sampled[i]);
  }
  lhk_trajectory* raw = nullptr;
  check(lhk_integrate(sys.get(), o.m, x.data(), x.size(), o.t0, o.tmax, meth, &raw));
  const Traj traj(raw);
  const std::size_t size = lhk_trajectory_size(traj.get());
  std::vector<double> last(lhk_trajectory_dim(traj.get()));
  check(lhk_trajectory_state(traj.get(), size - 1, last.data(), last.size()));
  double t_end = 0.0;
  check(lhk_trajectory_time(traj.get(), size - 1, &t_end));
  if (!o.csv.empty()) {
    char* csv = nullptr;
    check(lhk_trajectory_csv(traj.get(), &csv));
    write_atomic(o.csv, take(csv));
  }
  json r;
  r["system"] = descriptor_of(o);
  r["m"] = o.m;
  r["method"] = o.method;
  r["t0"] = o.t0;
  r["t1"] = t_end;
  r["seed"] = o.seed;
  r["initial"] = x;
  r["final"] = last;
  r["samples"] = size;
  r["csv_path"] = o.csv.empty() ? json(nullptr) : json(o.csv);
  return {kPass, r};
}

Outcome verify_constants(const Options& o) {
  require_span(o);
  const double tol = o.tol.value_or(1e-6);
  require_positive(tol, "--tol");
  if (o.m < 1) throw UsageError("--m must be at least 1");
  const lhk_method meth = method_of(o);
  const System sys = load_system(o);
  const int n = lhk_system_dim(sys.get());
  if (!o.x0.empty() && o.x0.size() != static_cast<std::size_t>(n) * o.m) {
    throw UsageError("--x0 needs " + std::to_string(n * o.m) + " values");
  }
  char* s = nullptr;
  check(lhk_verify_constants(sys.get(), o.m, o.x0.empty() ? nullptr : o.x0.data(), o.x0.size(), o.t0,
                             o.tmax, meth, tol, o.seed, &s));
  json r = parsed(s);
  return {r.at("pass").get<bool>() ? kPass : kFail, r};
}

Outcome superpose_verify(const Options& o) {
  require_span(o);
  const double tol = o.tol.value_or(1e-5);
  require_positive(tol, "--tol");
  if (o.grid < 3) throw UsageError("--grid must be at least 3");
  const System sys = load_system(o);
  json opts;
  opts["t0"] = o.t0;
  opts["t1"] = o.tmax;
  opts["grid"] = o.grid;
  opts["seed"] = o.seed;
  opts["tol"] = tol;
  const lhk_method meth = method_of(o);
  opts["method"] = meth.kind == LHK_RK4 ? json{{"kind", "rk4"}, {"h", meth.h}}
                                         : json{{"kind", "rkf45"}, {"atol", meth.atol}, {"rtol", meth.rtol}};
  if (!o.errors_csv.empty()) opts["errors_csv_path"] = o.errors_csv;
  char* rep = nullptr;
  char* csv = nullptr;
  check(lhk_verify_superposition(sys.get(), opts.dump().c_str(), &rep, &csv));
  const std::string table = take(csv);
  json r = parsed(rep);
  if (!o.errors_csv.empty()) write_atomic(o.errors_csv, table);
  return {r.at("pass").get<bool>() ? kPass : kFail, r};
}

Outcome lie_integral(const Options& o) {
  require_span(o);
  const double tol = o.tol.value_or(1e-6);
  require_positive(tol, "--tol");
  const lhk_method meth = method_of(o);
  const System sys = load_system(o);
  char* s = nullptr;
  check(lhk_lie_integral(sys.get(), o.f0.empty() ? nullptr : o.f0.data(), o.f0.size(),
                         o.x0.empty() ? nullptr : o.x0.data(), o.x0.size(), o.t0, o.tmax, meth, tol,
                         o.seed, &s));
  json r = parsed(s);
  return {r.at("pass").get<bool>() ? kPass : kFail, r};
}

using Handler = Outcome (*)(const Options&);

// Config-file command kinds mapped to handlers.
const std::map<std::string, Handler>& command_table() {
  static const std::map<std::string, Handler> t = {
      {"algebra-list", algebra_list},       {"algebra-validate", algebra_validate},
      {"algebra-show", algebra_show},       {"casimir-check", casimir_check},
      {"casimir-find", casimir_find},       {"system-list", system_list},
      {"system-show", system_show},         {"homomorphism", homomorphism},
      {"simulate", simulate},               {"verify-constants", verify_constants},
      {"verify-superposition", superpose_verify}, {"lie-integral", lie_integral},
  };
  return t;
}

// Overrides options with the keys of a JSON config. Keys use the long flag
// names without dashes ("tmax", "x0", "errors-csv" or "errors_csv").
void apply_config(const json& cfg, Options& o) {
  if (!cfg.is_object()) throw UsageError("config must be a JSON object");
  for (const auto& [raw_key, v] : cfg.items()) {
    std::string key = raw_key;
    std::replace(key.begin(), key.end(), '_', '-');
    try {
      if (key == "command") {
        const auto c = v.get<std::string>();
        if (!command_table().count(c)) throw UsageError("unknown command '" + c + "' in config");
        if (!o.command.empty() && o.command != c) {
          throw UsageError("config command '" + c + "' does not match '" + o.command + "'");
        }
        o.command = c;
      } else if (key == "seed") {
        o.seed = v.get<std::uint64_t>();
      } else if (key == "report") {
        o.report = v.get<std::string>();
      } else if (key == "algebra") {
        o.algebra = v.get<std::string>();
      } else if (key == "file") {
        o.file = v.get<std::string>();
      } else if (key == "poly") {
        o.poly = v.get<std::string>();
      } else if (key == "dmax") {
        o.dmax = v.get<int>();
      } else if (key == "system") {
        if (v.is_object()) {
          o.system_descriptor = v;
        } else {
          o.system = v.get<std::string>();
          o.system_descriptor = nullptr;
        }
      } else if (key == "params") {
        for (const auto& [k, pv] : v.items()) o.params[k] = pv.is_string() ? pv.get<std::string>() : pv.dump();
      } else if (std::find(kSystemParams.begin(), kSystemParams.end(), raw_key) != kSystemParams.end()) {
        o.params[raw_key] = v.is_string() ? v.get<std::string>() : v.dump();
      } else if (key == "m") {
        o.m = v.get<int>();
      } else if (key == "t0") {
        o.t0 = v.get<double>();
      } else if (key == "tmax" || key == "t1") {
        o.tmax = v.get<double>();
      } else if (key == "method") {
        o.method = v.get<std::string>();
      } else if (key == "step" || key == "h") {
        o.h = v.get<double>();
      } else if (key == "atol") {
        o.atol = v.get<double>();
      } else if (key == "rtol") {
        o.rtol = v.get<double>();
      } else if (key == "tol") {
        o.tol = v.get<double>();
      } else if (key == "samples") {
        o.samples = v.get<int>();
      } else if (key == "grid") {
        o.grid = v.get<int>();
      } else if (key == "x0") {
        o.x0 = v.get<std::vector<double>>();
      } else if (key == "f0") {
        o.f0 = v.get<std::vector<double>>();
      } else if (key == "csv") {
        o.csv = v.get<std::string>();
      } else if (key == "errors-csv") {
        o.errors_csv = v.get<std::string>();
      } else {
        throw UsageError("unknown config key '" + raw_key + "'");
      }
    } catch (const json::exception& e) {
      throw UsageError("config key '" + raw_key + "': " + e.what());
    }
  }
}

int exit_code_for(lhk_status s) {
  switch (s) {
    case LHK_ERR_INVALID_ARGUMENT:
    case LHK_ERR_PARSE:
    case LHK_ERR_CATALOG:
      return kUsage;
    default:
      return kNumeric;
  }
}

void emit(const Options& o, const json& report) {
  const std::string text = report.dump(2) + "\n";
  if (!o.report.empty()) write_atomic(o.report, text);
  std::cout << text;
}

int run(Options& o, const std::string& config_path) {
  json report;
  report["command"] = o.command;
  try {
    if (!config_path.empty()) apply_config(json::parse(read_file(config_path)), o);
    report["command"] = o.command;
    const auto it = command_table().find(o.command);
    if (it == command_table().end()) throw UsageError("no command given");
    Outcome out = it->second(o);
    report["status"] = out.code == kPass ? "pass" : "fail";
    for (auto& [k, v] : out.report.items()) report[k] = v;
    emit(o, report);
    return out.code;
  } catch (const LibraryError& e) {
    std::cerr << "error: " << e.kind << ": " << e.what();
    const std::string msg = e.what();
    if (!e.coordinate.empty() && msg.find("coordinate " + e.coordinate) == std::string::npos) {
      std::cerr << " (coordinate " << e.coordinate << ")";
    }
    std::cerr << "\n";
    report["status"] = "error";
    json err = {{"type", e.kind}, {"message", e.what()}};
    if (!e.coordinate.empty()) err["coordinate"] = e.coordinate;
    report["error"] = err;
    try {
      emit(o, report);
    } catch (const std::exception&) {
    }
    return exit_code_for(e.status);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    report["status"] = "error";
    report["error"] = {{"type", "UsageError"}, {"message", e.what()}};
    try {
      emit(o, report);
    } catch (const std::exception&) {
    }
    return kUsage;
  } catch (const json::exception& e) {
    std::cerr << "error: malformed JSON: " << e.what() << "\n";
    return kUsage;
  }
}

void add_system_options(CLI::App* cmd, Options& o, bool positional = false) {
  if (positional) {
    cmd->add_option("system", o.system, "Catalog name or descriptor JSON file");
  } else {
    cmd->add_option("--system", o.system, "Catalog name or descriptor JSON file");
  }
  for (const auto& p : kSystemParams) {
    cmd->add_option_function<std::string>(
        "--" + p, [&o, p](const std::string& v) { o.params[p] = v; },
        "System parameter " + p + " (number, list a,b,... or curve text)");
  }
  cmd->add_option("--param", o.param_kv, "Extra system parameter key=value")->take_all();
}

void add_span_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--t0", o.t0, "Start time")->capture_default_str();
  cmd->add_option("--tmax", o.tmax, "End time")->capture_default_str();
  cmd->add_option("--method", o.method, "Integrator: rk4 or rkf45")->capture_default_str();
  cmd->add_option("--step", o.h, "RK4 step")->capture_default_str();
  cmd->add_option("--atol", o.atol, "RKF45 absolute tolerance")->capture_default_str();
  cmd->add_option("--rtol", o.rtol, "RKF45 relative tolerance")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Poisson-coalgebra toolkit for Lie-Hamilton systems"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  std::string config;
  std::optional<std::uint64_t> seed;
  app.add_option("--seed", seed, "RNG seed (default: $LHK_SEED or 42)");
  app.add_option("--config", config, "JSON config overriding flags");
  app.add_option("--report", o.report, "Write the JSON report to this path");
  app.set_version_flag("--version", lhk_version());

  auto set = [&o](const char* name) { return [&o, name] { o.command = name; }; };

  auto* alg = app.add_subcommand("algebra", "Lie algebras by structure constants");
  alg->require_subcommand(1);
  alg->add_subcommand("list", "List built-in algebras")->callback(set("algebra-list"));
  auto* av = alg->add_subcommand("validate", "Check antisymmetry and Jacobi exactly");
  av->add_option("algebra", o.file, "Built-in name or JSON file")->required();
  av->callback(set("algebra-validate"));
  auto* as = alg->add_subcommand("show", "Structure constants and centre");
  as->add_option("algebra", o.file, "Built-in name or JSON file")->required();
  as->callback(set("algebra-show"));

  auto* cas = app.add_subcommand("casimir", "Casimir elements of S(g)");
  cas->require_subcommand(1);
  auto* cc = cas->add_subcommand("check", "Test whether a polynomial is a Casimir");
  cc->add_option("--algebra", o.algebra, "Built-in name or JSON file")->capture_default_str();
  cc->add_option("--poly", o.poly, "Polynomial, e.g. \"v1*v3 - v2^2\"");
  cc->callback(set("casimir-check"));
  auto* cf = cas->add_subcommand("find", "Basis of Casimirs up to a degree");
  cf->add_option("--algebra", o.algebra, "Built-in name or JSON file")->capture_default_str();
  cf->add_option("--dmax", o.dmax, "Maximal degree")->capture_default_str();
  cf->callback(set("casimir-find"));

  auto* sys = app.add_subcommand("system", "Catalog of Lie systems");
  sys->require_subcommand(1);
  sys->add_subcommand("list", "List catalog systems")->callback(set("system-list"));
  auto* ss = sys->add_subcommand("show", "Describe a catalog system");
  add_system_options(ss, o, true);
  ss->callback(set("system-show"));

  auto* hom = app.add_subcommand("homomorphism", "Check the Lie-Hamiltonian realization numerically");
  add_system_options(hom, o);
  hom->add_option("--samples", o.samples, "Sample points")->capture_default_str();
  hom->add_option("--tol", o.tol, "Tolerance (default 1e-8)");
  hom->callback(set("homomorphism"));

  auto* sim = app.add_subcommand("simulate", "Integrate a system or its prolongation");
  add_system_options(sim, o);
  add_span_options(sim, o);
  sim->add_option("--m", o.m, "Copies of the diagonal prolongation")->capture_default_str();
  sim->add_option("--x0", o.x0, "Initial state (missing coordinates are sampled)")->delimiter(',');
  sim->add_option("--csv", o.csv, "Write the trajectory CSV here");
  sim->callback(set("simulate"));

  auto* vc = app.add_subcommand("verify-constants", "Drift of Casimir-derived constants of motion");
  add_system_options(vc, o);
  add_span_options(vc, o);
  vc->add_option("--m", o.m, "Copies of the diagonal prolongation")->capture_default_str();
  vc->add_option("--x0", o.x0, "Initial state of all copies (sampled if omitted)")->delimiter(',');
  vc->add_option("--tol", o.tol, "Relative drift bound (default 1e-6)");
  vc->callback(set("verify-constants"));

  auto* sup = app.add_subcommand("superpose", "Superposition rules");
  sup->require_subcommand(1);
  auto* sv = sup->add_subcommand("verify", "Reconstruct a solution from particular solutions");
  add_system_options(sv, o);
  add_span_options(sv, o);
  sv->add_option("--grid", o.grid, "Grid points")->capture_default_str();
  sv->add_option("--tol", o.tol, "Pointwise error bound (default 1e-5)");
  sv->add_option("--errors-csv", o.errors_csv, "Write per-time errors here");
  sv->callback(set("verify-superposition"));

  auto* li = app.add_subcommand("lie-integral", "Lie-integral flow checked along a trajectory");
  add_system_options(li, o);
  add_span_options(li, o);
  li->add_option("--f0", o.f0, "Initial Lie-integral coefficients")->delimiter(',');
  li->add_option("--x0", o.x0, "Initial state")->delimiter(',');
  li->add_option("--tol", o.tol, "Relative drift bound (default 1e-6)");
  li->callback(set("lie-integral"));

  auto* runc = app.add_subcommand("run", "Run an experiment described by a JSON config");
  runc->add_option("config", config, "Config file with a \"command\" key")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (seed) {
    o.seed = *seed;
  } else if (const char* env = std::getenv("LHK_SEED"); env && *env) {
    try {
      std::size_t pos = 0;
      o.seed = std::stoull(env, &pos);
      if (pos != std::strlen(env)) throw std::invalid_argument(env);
    } catch (const std::exception&) {
      std::cerr << "error: LHK_SEED must be a non-negative integer\n";
      return kUsage;
    }
  }
  return run(o, config);
}
