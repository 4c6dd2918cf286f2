#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"

using namespace kerrkit::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("kerrkit-cli-" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json summary(const fs::path& dir, const std::string& command) {
  return json::parse(slurp(dir / (command + "_summary.json")));
}

// Simple RFC-4180 reader for the checks below.
std::vector<std::vector<std::string>> read_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows(1);
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') field += '"', ++i;
      else if (c == '"') quoted = false;
      else field += c;
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      rows.back().push_back(field);
      field.clear();
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      rows.back().push_back(field);
      field.clear();
      rows.emplace_back();
      ++i;
    } else {
      field += c;
    }
  }
  rows.pop_back();  // after the final CRLF
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  REQUIRE(it != header.end());
  return std::size_t(it - header.begin());
}

}  // namespace

TEST_CASE("Schwarzschild radial ray is classified as infinity to the horizon") {
  const auto dir = scratch("radial");
  const json cfg = json::parse(R"({"params": {"M": 1, "a": 0},
    "geodesic": {"geodesics": [{"id": "radial", "r": 10, "sign_r": -1, "E": 1, "L": 0, "Q": 0}],
                 "sample": {"count": 0}}})");
  const auto r = run_with_config("geodesic", cfg, {}, dir.string(), 1);
  CHECK(r.exit_code == 0);
  const json s = summary(dir, "geodesic");
  CHECK(s["results"]["classification"] == "]∞→r+]");
  CHECK(s["status"] == "pass");
  CHECK(s["config_hash"].get<std::string>().size() == 16);
  CHECK(s["version"] == KERRKIT_VERSION);
  CHECK(s["tolerances"]["drift"] == 1e-8);
}

TEST_CASE("thermal with kappa = 1/4 records a residual below 1e-4") {
  const auto dir = scratch("thermal");
  Overrides o;
  o.kappa = 0.25;
  const auto r = run_with_config("thermal", json::object(), o, dir.string(), 2);
  CHECK(r.exit_code == 0);
  const json s = summary(dir, "thermal");
  REQUIRE(s["results"]["unruh"].size() == 1);
  CHECK(s["results"]["unruh"][0]["kappa"] == 0.25);
  CHECK(s["results"]["unruh"][0]["residual"].get<double>() < 1e-4);
  for (const auto& p : s["results"]["projectors"]) CHECK(p["residual"].back().get<double>() < 1e-4);
}

TEST_CASE("orbits at a = 0.1 have T away from zero and both Killing fields timelike") {
  const auto dir = scratch("orbits");
  Overrides o;
  o.a = 0.1;
  const auto r = run_with_config("orbits", json::object(), o, dir.string(), 1);
  CHECK(r.exit_code == 0);
  const auto rows = read_csv(slurp(dir / "orbits.csv"));
  REQUIRE(rows.size() == 42);
  const auto minT = column(rows[0], "min_abs_T"), vI = column(rows[0], "max_norm_vI"), vH = column(rows[0], "max_norm_vH");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(std::stod(rows[i][minT]) > 0);
    CHECK(std::stod(rows[i][vI]) < 0);
    CHECK(std::stod(rows[i][vH]) < 0);
  }
}

TEST_CASE("identical config and seed give byte-identical artifacts for any job count") {
  const auto d1 = scratch("det1"), d2 = scratch("det2");
  Overrides o;
  o.a = 0.4;
  o.n = 40;
  for (const char* c : {"charts", "geodesic", "orbits", "cauchy"}) {
    run_with_config(c, json::object(), o, d1.string(), 1);
    run_with_config(c, json::object(), o, d2.string(), 3);
  }
  int files = 0;
  for (const auto& e : fs::directory_iterator(d1)) {
    CAPTURE(e.path().filename().string());
    CHECK(slurp(e.path()) == slurp(d2 / e.path().filename()));
    ++files;
  }
  CHECK(files >= 9);
  SUBCASE("a different seed changes the sampled artifacts and the hash") {
    const auto d3 = scratch("det3");
    Overrides o2 = o;
    o2.seed = 99;
    run_with_config("geodesic", json::object(), o2, d3.string(), 1);
    CHECK(slurp(d3 / "geodesic.csv") != slurp(d1 / "geodesic.csv"));
    CHECK(summary(d3, "geodesic")["config_hash"] != summary(d1, "geodesic")["config_hash"]);
  }
}

TEST_CASE("config hash ignores integer versus float spelling") {
  const json a = resolve_config("orbits", json::parse(R"({"params": {"M": 1, "a": 0.2}})"), {});
  const json b = resolve_config("orbits", json::parse(R"({"params": {"M": 1.0, "a": 0.2}})"), {});
  CHECK(config_hash(a) == config_hash(b));
  const json c = resolve_config("orbits", json::parse(R"({"params": {"M": 1.0, "a": 0.3}})"), {});
  CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("schema violations exit with 2") {
  const auto dir = scratch("schema");
  auto code = [&](const std::string& command, const std::string& cfg, Overrides o = {}) {
    return run_with_config(command, json::parse(cfg), o, dir.string(), 1).exit_code;
  };
  CHECK(code("orbits", R"({"orbits": {"n_r0s": 3}})") == 2);
  CHECK(code("orbits", R"({"orbits": {"tolerances": {"locus_residual": -1}}})") == 2);
  CHECK(code("orbits", R"({"orbits": {"n_r0": "many"}})") == 2);
  CHECK(code("orbits", R"({"orbits": {"n_r0": 4.5}})") == 2);
  CHECK(code("orbits", R"({"params": {"M": 1, "a": 1.2}})") == 2);
  CHECK(code("orbits", R"({"params": {"a": 0}})") == 2);  // the locus needs a != 0
  CHECK(code("thermal", R"({"thermal": {"N": 1000}})") == 2);
  CHECK(code("thermal", R"({"thermal": {"functions": [{"name": "sinc"}]}})") == 2);
  CHECK(code("cauchy", R"({"cauchy": {"surfaces": [{"family": "SigmaT", "n": 3}]}})") == 2);
  CHECK(code("geodesic", R"({"geodesic": {"geodesics": [{"chart": "KBL"}]}})") == 2);
  CHECK(code("charts", R"({"charts": {"pairs": ["BL_I->BL_II"]}})") == 2);
  Overrides T;
  T.T = 4;
  CHECK(code("thermal", "{}", T) == 2);
  const json s = summary(dir, "thermal");
  CHECK(s["status"] == "schema_error");
  CHECK(s["exit_code"] == 2);
}

TEST_CASE("a failed assertion exits with 1 and names the first failing record") {
  const auto dir = scratch("fail");
  const json cfg = json::parse(R"({"geodesic": {"sample": {"count": 0}, "geodesics": [
      {"id": "fine", "r": 10, "sign_r": -1, "E": 1, "expect": "]∞→r+]"},
      {"id": "wrong", "r": 10, "sign_r": 1, "E": 1, "expect": "]∞→r+]"},
      {"id": "also wrong", "r": 10, "sign_r": 1, "E": 1, "expect": "[r+→r+]"}]}})");
  const auto r = run_with_config("geodesic", cfg, {}, dir.string(), 1);
  CHECK(r.exit_code == 1);
  const json s = summary(dir, "geodesic");
  CHECK(s["status"] == "fail");
  CHECK(s["first_failure"]["record"] == "wrong");
  CHECK(s["assertions"]["failed"] == 2);
}

TEST_CASE("CSV output follows RFC 4180") {
  const auto dir = scratch("csv");
  const json cfg = json::parse(R"({"geodesic": {"sample": {"count": 0}, "geodesics": [
      {"id": "quote \" and, comma", "r": 10, "sign_r": -1, "E": 1}]}})");
  run_with_config("geodesic", cfg, {}, dir.string(), 1);
  const std::string text = slurp(dir / "geodesic.csv");
  CHECK(text.find("\"quote \"\" and, comma\"") != std::string::npos);
  CHECK(text.substr(text.size() - 2) == "\r\n");
  const auto rows = read_csv(text);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1][0] == "quote \" and, comma");
  CHECK(rows[1].size() == rows[0].size());
}
