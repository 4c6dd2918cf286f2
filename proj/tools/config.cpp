#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <set>

#include "cli.hpp"
#include "kerrkit/errors.hpp"
#include "kerrkit/params.hpp"
#include "kerrkit/thermal.hpp"

namespace kerrkit::cli {

namespace {

const char* kDefaults = R"({
  "params": {"M": 1.0, "a": 0.0},
  "seed": 1,
  "charts": {
    "spins": [],
    "pairs": [],
    "samples": 1000,
    "dump_points": 0,
    "tolerances": {"isometry": 1e-6, "determinant": 1e-10}
  },
  "geodesic": {
    "geodesics": [],
    "sample": {"block": "I", "count": 20},
    "integrate": {"max_affine": 1000.0, "r_max": 1000.0, "continue_through_horizon": false},
    "write_paths": false,
    "tolerances": {"drift": 1e-8, "radial_residual": 1e-8}
  },
  "orbits": {
    "spins": [],
    "n_r0": 41,
    "require_timelike": true,
    "tolerances": {"locus_residual": 1e-9}
  },
  "cauchy": {
    "spins": [],
    "surfaces": [
      {"family": "SigmaT", "T": 3.0},
      {"family": "SigmaBar", "T": -5.0, "n": 10.0},
      {"family": "SigmaTilde", "T": -5.0, "n": 5.0},
      {"family": "ZT", "T": 12.0},
      {"family": "SigmaM"}
    ],
    "gradient_points": 10000,
    "crossing_per_type": 20,
    "crossing_max_draws": 2000,
    "tolerances": {"bound_slack": 1e-10, "crossing_fraction": 0.95}
  },
  "thermal": {
    "kappas": [1.0, 0.25, 2.0],
    "functions": [
      {"name": "log-gaussian", "p1": 0.0, "p2": 1.0},
      {"name": "gaussian", "p1": 4.0, "p2": 0.15},
      {"name": "bump", "p1": 2.0, "p2": 1.0}
    ],
    "N": 16384,
    "doublings": 2,
    "X": 80.0,
    "L": 60.0,
    "pad": 4,
    "profile_points": 0,
    "unruh": {"N": 16384, "U_max": 40.0, "u_half_width": 60.0, "width": 0.4},
    "tolerances": {"residual": 1e-4, "fermi": 1e-15}
  },
  "sweep": {
    "timelike": {"lo": 0.01, "hi": 0.999, "tol": 1e-4, "n_r0": 21},
    "separation": {"tol": 1e-6},
    "expect": {"a1_min": 0.0, "a1_max": 1.0, "a0_min": 0.0, "a0_max": 1.0}
  }
})";

const json kGeodesicEntry = {{"id", ""},       {"chart", "BL_I"}, {"t", 0.0},      {"r", 10.0},
                             {"theta", std::numbers::pi / 2}, {"phi", 0.0},   {"sign_r", -1},  {"sign_theta", 1},
                             {"E", 1.0},      {"L", 0.0},        {"Q", 0.0},      {"expect", ""}};

const json kFunctionEntry = {{"name", ""}, {"p1", 0.0}, {"p2", 1.0}};

[[noreturn]] void schema(const std::string& msg) { throw SchemaError(msg); }

std::string kind(const json& j) {
  if (j.is_number_integer()) return "integer";
  if (j.is_number()) return "number";
  return j.type_name();
}

// def's shape with user's values. Floats in def accept integers and are
// stored as floats, so 1 and 1.0 resolve (and hash) the same.
json merge(const json& def, const json& user, const std::string& path) {
  if (def.is_object()) {
    if (!user.is_object()) schema(path + ": expected an object, got " + kind(user));
    json out = def;
    for (const auto& [key, value] : user.items()) {
      const std::string p = path.empty() ? key : path + "." + key;
      if (!def.contains(key)) schema("unknown key " + p);
      out[key] = merge(def[key], value, p);
    }
    return out;
  }
  if (def.is_array()) {
    if (!user.is_array()) schema(path + ": expected an array, got " + kind(user));
    return user;
  }
  if (def.is_boolean()) {
    if (!user.is_boolean()) schema(path + ": expected a boolean, got " + kind(user));
    return user;
  }
  if (def.is_string()) {
    if (!user.is_string()) schema(path + ": expected a string, got " + kind(user));
    return user;
  }
  if (def.is_number_integer()) {
    if (!user.is_number_integer()) schema(path + ": expected an integer, got " + kind(user));
    return user;
  }
  if (def.is_number()) {
    if (!user.is_number()) schema(path + ": expected a number, got " + kind(user));
    return user.get<double>();
  }
  return user;
}

std::vector<double> numbers(const json& arr, const std::string& path) {
  std::vector<double> v;
  for (const auto& x : arr) {
    if (!x.is_number()) schema(path + ": expected numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

void positive_tolerances(const json& j, const std::string& path) {
  if (!j.is_object()) return;
  for (const auto& [key, value] : j.items()) {
    const std::string p = path + "." + key;
    if (key == "tolerances") {
      for (const auto& [name, tol] : value.items())
        if (!(tol.get<double>() > 0)) schema(p + "." + name + ": tolerances must be positive");
    } else {
      positive_tolerances(value, p);
    }
  }
}

long integer(const json& s, const char* key) { return s[key].get<long>(); }

void at_least(const json& s, const char* key, long lo, const std::string& path) {
  if (integer(s, key) < lo) schema(path + "." + key + " must be at least " + std::to_string(lo));
}

bool power_of_two(long n) { return n > 0 && (n & (n - 1)) == 0; }

void spins(json& section, const KerrParams& p, bool nonzero, const std::string& path) {
  auto a = numbers(section["spins"], path + ".spins");
  if (a.empty()) a.push_back(p.a);
  for (double x : a) {
    if (!(std::abs(x) < p.M)) schema(path + ".spins: need |a| < M, got " + std::to_string(x));
    if (nonzero && x == 0) schema(path + ".spins: the critical locus needs a != 0");
  }
  section["spins"] = a;
}

void check_section(const std::string& command, json& s, const KerrParams& p) {
  const std::string path = command;
  if (command == "charts") {
    spins(s, p, false, path);
    at_least(s, "samples", 1, path);
    at_least(s, "dump_points", 0, path);
    for (const auto& pr : s["pairs"])
      if (!pr.is_string() || pr.get<std::string>().find("->") == std::string::npos)
        schema("charts.pairs: entries look like \"BL_I->KBL\"");
  } else if (command == "geodesic") {
    json list = json::array();
    int i = 0;
    for (const auto& g : s["geodesics"]) {
      const std::string gp = "geodesic.geodesics[" + std::to_string(i++) + "]";
      json e = merge(kGeodesicEntry, g, gp);
      const std::string chart = e["chart"];
      if (chart != "BL_I" && chart != "BL_II") schema(gp + ".chart: BL_I or BL_II");
      for (const char* sg : {"sign_r", "sign_theta"})
        if (std::abs(e[sg].get<long>()) != 1) schema(gp + "." + sg + ": +1 or -1");
      list.push_back(e);
    }
    s["geodesics"] = list;
    const std::string block = s["sample"]["block"];
    if (block != "I" && block != "II" && block != "zero-energy")
      schema("geodesic.sample.block: \"I\", \"II\" or \"zero-energy\"");
    at_least(s["sample"], "count", 0, path + ".sample");
    if (block == "zero-energy" && p.a == 0 && integer(s["sample"], "count") > 0)
      schema("geodesic.sample: zero-energy geodesics need a != 0");
    for (const char* k : {"max_affine", "r_max"})
      if (!(s["integrate"][k].get<double>() > 0)) schema(std::string("geodesic.integrate.") + k + " must be positive");
  } else if (command == "orbits") {
    spins(s, p, true, path);
    at_least(s, "n_r0", 2, path);
  } else if (command == "cauchy") {
    spins(s, p, false, path);
    at_least(s, "gradient_points", 1, path);
    at_least(s, "crossing_per_type", 0, path);
    at_least(s, "crossing_max_draws", 1, path);
    const std::map<std::string, std::set<std::string>> keys{{"SigmaT", {"T"}},
                                                            {"SigmaBar", {"T", "n"}},
                                                            {"SigmaTilde", {"T", "n"}},
                                                            {"ZT", {"T"}},
                                                            {"SigmaM", {}}};
    int i = 0;
    for (auto& sf : s["surfaces"]) {
      const std::string sp = "cauchy.surfaces[" + std::to_string(i++) + "]";
      if (!sf.is_object() || !sf.contains("family") || !sf["family"].is_string()) schema(sp + ": needs a family");
      const auto it = keys.find(sf["family"].get<std::string>());
      if (it == keys.end()) schema(sp + ".family: one of SigmaT, SigmaBar, SigmaTilde, ZT, SigmaM");
      for (const auto& [k, v] : sf.items()) {
        if (k == "family") continue;
        if (!it->second.count(k)) schema("unknown key " + sp + "." + k);
        if (!v.is_number()) schema(sp + "." + k + ": expected a number");
        sf[k] = v.get<double>();
      }
      if (sf.contains("n") && !(sf["n"].get<double>() > 0)) schema(sp + ".n must be positive");
    }
    if (!(s["tolerances"]["crossing_fraction"].get<double>() <= 1)) schema("cauchy.tolerances.crossing_fraction must be at most 1");
  } else if (command == "thermal") {
    for (double k : numbers(s["kappas"], "thermal.kappas"))
      if (!(k > 0)) schema("thermal.kappas must be positive");
    json list = json::array();
    int i = 0;
    for (const auto& f : s["functions"]) {
      const std::string fp = "thermal.functions[" + std::to_string(i++) + "]";
      json e = merge(kFunctionEntry, f, fp);
      make_test_function(e["name"], e["p1"], e["p2"]);  // throws SchemaError for unknown names
      if (!(e["p2"].get<double>() > 0)) schema(fp + ".p2 (width) must be positive");
      list.push_back(e);
    }
    s["functions"] = list;
    at_least(s, "doublings", 0, path);
    at_least(s, "pad", 2, path);
    at_least(s, "profile_points", 0, path);
    const long N = integer(s, "N");
    if (!power_of_two(N) || (N >> integer(s, "doublings")) < 64)
      schema("thermal.N must be a power of two with N/2^doublings >= 64");
    if (!power_of_two(integer(s["unruh"], "N")) || integer(s["unruh"], "N") < 64)
      schema("thermal.unruh.N must be a power of two >= 64");
    for (const char* k : {"X", "L"})
      if (!(s[k].get<double>() > 0)) schema(std::string("thermal.") + k + " must be positive");
    for (const char* k : {"U_max", "u_half_width", "width"})
      if (!(s["unruh"][k].get<double>() > 0)) schema(std::string("thermal.unruh.") + k + " must be positive");
  } else if (command == "sweep") {
    const auto& t = s["timelike"];
    if (!(t["lo"].get<double>() > 0 && t["lo"].get<double>() < t["hi"].get<double>() && t["hi"].get<double>() < 1))
      schema("sweep.timelike: need 0 < lo < hi < 1");
    at_least(s["timelike"], "n_r0", 2, path + ".timelike");
    if (!(t["tol"].get<double>() > 0) || !(s["separation"]["tol"].get<double>() > 0))
      schema("sweep: tolerances must be positive");
  }
}

void apply_overrides(const std::string& command, json& cfg, const Overrides& o) {
  if (o.M) cfg["params"]["M"] = *o.M;
  if (o.a) cfg["params"]["a"] = *o.a;
  if (o.seed) cfg["seed"] = *o.seed;
  json& s = cfg[command];
  if (o.a && s.contains("spins")) s["spins"] = json::array({*o.a});
  if (o.T) {
    if (command != "cauchy") schema("--T applies to cauchy only");
    for (auto& sf : s["surfaces"])
      if (sf.is_object() && sf.contains("family") && sf["family"] != "SigmaM") sf["T"] = *o.T;
  }
  if (o.kappa && command != "thermal") schema("--kappa applies to thermal only");
  if (command == "thermal") {
    if (o.kappa) {
      s["kappas"] = json::array({*o.kappa});
    } else if (o.a || o.M) {
      const KerrParams p{cfg["params"]["M"], cfg["params"]["a"]};
      validate(p);
      s["kappas"] = json::array({horizon_quantities(p).kappa_plus});
    }
  }
  if (o.n) {
    const long n = *o.n;
    if (command == "charts") s["samples"] = n;
    else if (command == "geodesic") s["sample"]["count"] = n;
    else if (command == "orbits") s["n_r0"] = n;
    else if (command == "cauchy") s["gradient_points"] = n;
    else if (command == "thermal") s["N"] = n;
    else if (command == "sweep") s["timelike"]["n_r0"] = n;
  }
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> c{"charts", "geodesic", "orbits", "cauchy", "thermal", "sweep"};
  return c;
}

const json& default_config() {
  static const json d = json::parse(kDefaults);
  return d;
}

json resolve_config(const std::string& command, const json& user, const Overrides& o) {
  if (std::find(commands().begin(), commands().end(), command) == commands().end())
    schema("unknown command " + command);
  json cfg = merge(default_config(), user.is_null() ? json::object() : user, "");
  apply_overrides(command, cfg, o);
  if (!cfg["seed"].is_number_unsigned()) schema("seed must be a non-negative integer");
  const KerrParams p{cfg["params"]["M"], cfg["params"]["a"]};
  try {
    validate(p);
  } catch (const InvalidParams& e) {
    schema(std::string("params: ") + e.what());
  }
  json section = cfg[command];
  check_section(command, section, p);
  positive_tolerances(section, command);
  return {{"command", command}, {"params", cfg["params"]}, {"seed", cfg["seed"]}, {command, section}};
}

std::string config_hash(const json& resolved) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : resolved.dump()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace kerrkit::cli
