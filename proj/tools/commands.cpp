#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <thread>
#include <variant>

#include "cli.hpp"
#include "kerrkit/causal.hpp"
#include "kerrkit/classify.hpp"
#include "kerrkit/errors.hpp"
#include "kerrkit/geodesic_sampling.hpp"
#include "kerrkit/geometry_checks.hpp"
#include "kerrkit/metric.hpp"
#include "kerrkit/photon_orbits.hpp"
#include "kerrkit/sampling.hpp"
#include "kerrkit/thermal.hpp"

namespace kerrkit::cli {

namespace {

namespace fs = std::filesystem;

// Shortest round-trip text, so equal doubles always print the same.
std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

struct Cell {
  std::string text;
  Cell(double x) : text(num(x)) {}
  Cell(int x) : text(std::to_string(x)) {}
  Cell(long x) : text(std::to_string(x)) {}
  Cell(bool x) : text(x ? "true" : "false") {}
  Cell(const char* s) : text(s) {}
  Cell(std::string s) : text(std::move(s)) {}
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

struct Table {
  std::string file;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  Table(std::string f, std::vector<std::string> h) : file(std::move(f)), header(std::move(h)) {}

  void add(std::initializer_list<Cell> cells) {
    std::vector<std::string> r;
    for (const auto& c : cells) r.push_back(c.text);
    rows.push_back(std::move(r));
  }

  // RFC 4180: CRLF line ends, quotes doubled inside quoted fields.
  void write(const fs::path& dir) const {
    std::ofstream out(dir / file, std::ios::binary);
    auto line = [&](const std::vector<std::string>& r) {
      for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << csv_field(r[i]);
      out << "\r\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
    if (!out) throw std::runtime_error("cannot write " + (dir / file).string());
  }
};

struct Check {
  std::string record;
  bool pass = true;
  std::string detail;
};

struct Report {
  std::vector<Table> tables;
  std::vector<Check> checks;
  json results = json::object();

  void check(const std::string& record, bool ok, const std::string& detail) { checks.push_back({record, ok, detail}); }
};

// Runs f(0..n-1) on `jobs` threads. Items are independent and write only to
// their own slot, so the output does not depend on the schedule.
template <class F>
void parallel_for(std::size_t n, int jobs, F&& f) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < n;) {
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int w = int(std::clamp<std::size_t>(std::size_t(std::max(jobs, 1)), 1, std::max<std::size_t>(n, 1)));
  std::vector<std::thread> pool;
  for (int t = 1; t < w; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::string label_a(double a) { return "a=" + num(a); }

double M_of(const json& cfg) { return cfg["params"]["M"]; }
std::uint64_t seed_of(const json& cfg) { return cfg["seed"]; }

// ---------------------------------------------------------------- charts

Report run_charts(const json& cfg, int jobs) {
  const json& s = cfg["charts"];
  const double M = M_of(cfg);
  const std::uint64_t seed = seed_of(cfg);
  const int samples = s["samples"];
  const double tol_iso = s["tolerances"]["isometry"], tol_det = s["tolerances"]["determinant"];
  std::vector<ChartPair> pairs;
  if (s["pairs"].empty()) {
    pairs = overlapping_chart_pairs();
  } else {
    for (const auto& name : s["pairs"]) {
      const std::string n = name;
      auto it = std::find_if(overlapping_chart_pairs().begin(), overlapping_chart_pairs().end(), [&](const ChartPair& p) {
        return n == std::string(chart_name(p.from)) + "->" + chart_name(p.to);
      });
      if (it == overlapping_chart_pairs().end()) throw SchemaError("charts.pairs: no overlapping pair " + n);
      pairs.push_back(*it);
    }
  }
  const std::vector<double> spins = s["spins"];

  struct Item {
    double a;
    int pair;  // -1: determinant check
    double residual = 0;
    int samples = 0;
    std::string error;
  };
  std::vector<Item> items;
  for (double a : spins) {
    for (int p = 0; p < int(pairs.size()); ++p) items.push_back({a, p, 0, 0, ""});
    items.push_back({a, -1, 0, 0, ""});
  }
  parallel_for(items.size(), jobs, [&](std::size_t i) {
    Item& it = items[i];
    const Kerr k(M, it.a);
    try {
      if (it.pair >= 0) {
        const auto rep = isometry_check(k, pairs[it.pair], samples, seed);
        it.residual = rep.max_residual;
        it.samples = rep.samples;
        return;
      }
      // det g against -rho^4 sin^2 theta in the Boyer-Lindquist blocks and Kerr-star
      Halton h(4, seed);
      for (int j = 0; j < samples; ++j) {
        const auto u = h.next();
        for (Region reg : {Region::I, Region::II, Region::IPrime, Region::IIPrime}) {
          const auto bl = sample_bl_point(k, reg, u);
          std::vector<SpacetimePoint> pts{bl};
          if (reg == Region::I || reg == Region::II) pts.push_back(chart_map(k, bl, Chart::KerrStar));
          for (const auto& p : pts) {
            const double r = p.x[1], th = p.x[2];
            const double rr = r * r + it.a * it.a * std::cos(th) * std::cos(th);
            const double exact = -rr * rr * std::sin(th) * std::sin(th);
            it.residual = std::max(it.residual, std::abs(metric(k, p).det / exact - 1));
            ++it.samples;
          }
        }
      }
    } catch (const Error& e) {
      it.error = e.what();
    }
  });

  Report rep;
  Table t{"charts.csv", {"a", "check", "from", "to", "samples", "max_residual", "tolerance", "pass", "error"}};
  double worst_iso = 0, worst_det = 0;
  for (const auto& it : items) {
    const bool iso = it.pair >= 0;
    const double tol = iso ? tol_iso : tol_det;
    const bool ok = it.error.empty() && it.residual < tol;
    const std::string from = iso ? chart_name(pairs[it.pair].from) : "BL+KerrStar";
    const std::string to = iso ? chart_name(pairs[it.pair].to) : "";
    t.add({it.a, iso ? "isometry" : "determinant", from, to, it.samples, it.residual, tol, ok, it.error});
    const std::string rec = label_a(it.a) + (iso ? " isometry " + from + "->" + to : " determinant");
    rep.check(rec, ok, it.error.empty() ? "max residual " + num(it.residual) + " vs " + num(tol) : it.error);
    (iso ? worst_iso : worst_det) = std::max(iso ? worst_iso : worst_det, it.residual);
  }
  rep.tables.push_back(std::move(t));
  rep.results = {{"worst_isometry_residual", worst_iso}, {"worst_determinant_residual", worst_det},
                 {"pairs", int(pairs.size())}, {"spins", spins}};

  const int dump = s["dump_points"];
  if (dump > 0) {
    Table d{"charts_points.csv",
            {"a", "from", "to", "index", "x0", "x1", "x2", "x3", "y0", "y1", "y2", "y3", "residual"}};
    for (double a : spins) {
      const Kerr k(M, a);
      for (const auto& pair : pairs) {
        // the same points as isometry_check
        Halton h(5, seed);
        for (int j = 0; j < std::min(dump, samples); ++j) {
          const auto u = h.next();
          const Region reg = pair.regions[std::size_t(u[4] * pair.regions.size())];
          ChartMapOptions o;
          o.reduce_azimuth = false;
          const SpacetimePoint src = chart_map(k, sample_bl_point(k, reg, u), pair.from, o);
          const SpacetimePoint dst = chart_map(k, src, pair.to, o);
          d.add({a, chart_name(pair.from), chart_name(pair.to), j, src.x[0], src.x[1], src.x[2], src.x[3], dst.x[0],
                 dst.x[1], dst.x[2], dst.x[3], pullback_residual(k, src, pair.to)});
        }
      }
    }
    rep.tables.push_back(std::move(d));
  }
  return rep;
}

// ---------------------------------------------------------------- geodesic

std::string unicode_label(std::string s) {
  auto replace = [&](const std::string& from, const std::string& to) {
    for (std::size_t p = 0; (p = s.find(from, p)) != std::string::npos; p += to.size()) s.replace(p, from.size(), to);
  };
  replace("->", "→");
  replace("inf", "∞");
  return s;
}

Report run_geodesic(const json& cfg, int jobs) {
  const json& s = cfg["geodesic"];
  const Kerr k(M_of(cfg), cfg["params"]["a"].get<double>());
  IntegrateConfig ic;
  ic.max_affine = s["integrate"]["max_affine"];
  ic.r_max = s["integrate"]["r_max"];
  ic.continue_through_horizon = s["integrate"]["continue_through_horizon"];
  const bool paths = s["write_paths"];
  ic.store_samples = true;
  const double tol_drift = s["tolerances"]["drift"], tol_res = s["tolerances"]["radial_residual"];

  struct Item {
    std::string id, family, expect;
    SampledGeodesic g;
    GeodesicType root, integ;
    GeodesicPath path;
    std::string error;
  };
  std::vector<Item> items;
  int i = 0;
  for (const auto& e : s["geodesics"]) {
    Item it;
    it.id = e["id"].get<std::string>().empty() ? "geodesic[" + std::to_string(i) + "]" : e["id"].get<std::string>();
    it.family = "config";
    it.expect = e["expect"];
    it.g.state.point = SpacetimePoint(e["chart"] == "BL_I" ? Chart::BL_I : Chart::BL_II, e["t"], e["r"], e["theta"], e["phi"]);
    it.g.state.sign_r = e["sign_r"];
    it.g.state.sign_theta = e["sign_theta"];
    it.g.integrals = {e["E"], e["L"], e["Q"]};
    items.push_back(std::move(it));
    ++i;
  }
  const std::string block = s["sample"]["block"];
  const int count = s["sample"]["count"];
  Halton h(6, seed_of(cfg));
  for (int j = 0; j < count; ++j) {
    const auto u = h.next();
    Item it;
    it.id = "sample[" + std::to_string(j) + "]";
    it.g = block == "zero-energy" ? sample_zero_energy_geodesic(k, u)
                                  : sample_null_geodesic(k, block == "I" ? Region::I : Region::II, u);
    it.family = it.g.family;
    items.push_back(std::move(it));
  }
  parallel_for(items.size(), jobs, [&](std::size_t n) {
    Item& it = items[n];
    try {
      it.root = classify(k, it.g.integrals, it.g.state);
      it.integ = classify_by_integration(k, it.g.integrals, it.g.state, ic);
      it.path = integrate(k, it.g.state, it.g.integrals, ic);
      if (!paths) it.path.samples.clear();
    } catch (const Error& e) {
      it.error = e.what();
    }
  });

  Report rep;
  Table t{"geodesic.csv",
          {"id", "family", "E", "L", "Q", "K", "chart", "t", "r", "theta", "phi", "sign_r", "sign_theta",
           "classification", "classification_integration", "ambiguous", "agree", "termination", "end_radius",
           "max_E_drift", "max_L_drift", "max_K_drift", "max_null_drift", "max_radial_residual", "pass", "error"}};
  Table pt{"geodesic_paths.csv", {"id", "affine", "block", "t", "r", "theta", "phi", "tstar", "phistar"}};
  json list = json::array();
  for (const auto& it : items) {
    const auto& I = it.g.integrals;
    const auto& x = it.g.state.point.x;
    if (!it.error.empty()) {
      rep.check(it.id, false, it.error);
      t.add({it.id, it.family, I.E, I.L, I.Q, carter_K(k, I), chart_name(it.g.state.point.chart), x[0], x[1], x[2], x[3],
             it.g.state.sign_r, it.g.state.sign_theta, "", "", false, false, "", 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, false,
             it.error});
      list.push_back({{"id", it.id}, {"error", it.error}});
      continue;
    }
    const auto& p = it.path;
    const double drift = std::max({p.max_E_drift, p.max_L_drift, p.max_K_drift, p.max_null_drift});
    const bool ambiguous = it.root.ambiguous || it.integ.ambiguous;
    const bool agree = same_type(it.root, it.integ);
    const std::string lab = unicode_label(it.root.label());
    bool ok = true;
    auto require = [&](bool c, const std::string& what) {
      if (!c) rep.check(it.id, false, what);
      ok = ok && c;
    };
    require(drift < tol_drift, "drift " + num(drift) + " vs " + num(tol_drift));
    require(p.max_radial_residual < tol_res, "radial residual " + num(p.max_radial_residual) + " vs " + num(tol_res));
    require(ambiguous || agree, "root classification " + lab + " but integration gives " + unicode_label(it.integ.label()));
    if (!it.expect.empty())
      require(it.expect == lab || it.expect == it.root.label(), "expected " + it.expect + ", classified " + lab);
    if (ok) rep.check(it.id, true, lab);
    t.add({it.id, it.family, I.E, I.L, I.Q, carter_K(k, I), chart_name(it.g.state.point.chart), x[0], x[1], x[2], x[3],
           it.g.state.sign_r, it.g.state.sign_theta, lab, unicode_label(it.integ.label()), ambiguous, agree,
           event_name(p.termination), p.end_radius, p.max_E_drift, p.max_L_drift, p.max_K_drift, p.max_null_drift,
           p.max_radial_residual, ok, ""});
    list.push_back({{"id", it.id},
                    {"classification", lab},
                    {"classification_integration", unicode_label(it.integ.label())},
                    {"ambiguous", ambiguous},
                    {"termination", event_name(p.termination)},
                    {"max_drift", drift}});
    for (const auto& smp : p.samples)
      pt.add({it.id, smp.affine, smp.block == Region::I ? "I" : "II", smp.x[0], smp.x[1], smp.x[2], smp.x[3], smp.tstar,
              smp.phistar});
  }
  rep.tables.push_back(std::move(t));
  if (paths) rep.tables.push_back(std::move(pt));
  rep.results["geodesics"] = list;
  if (items.size() == 1 && list[0].contains("classification")) rep.results["classification"] = list[0]["classification"];
  return rep;
}

// ---------------------------------------------------------------- orbits

Report run_orbits(const json& cfg, int jobs) {
  const json& s = cfg["orbits"];
  const double M = M_of(cfg);
  const int n = s["n_r0"];
  const bool need_timelike = s["require_timelike"];
  const double tol = s["tolerances"]["locus_residual"];
  const std::vector<double> spins = s["spins"];
  std::vector<std::vector<LocusSweepRow>> rows(spins.size());
  std::vector<std::string> errors(spins.size());
  parallel_for(spins.size(), jobs, [&](std::size_t i) {
    try {
      rows[i] = locus_sweep(M, spins[i], n);
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });

  Report rep;
  Table t{"orbits.csv",
          {"a", "r0", "xi", "eta", "R_residual", "Rprime_residual", "min_abs_T", "theta_min_T", "max_norm_vI",
           "theta_max_vI", "max_norm_vH", "theta_max_vH", "timelike", "pass"}};
  json per_a = json::array();
  for (std::size_t i = 0; i < spins.size(); ++i) {
    const double a = spins[i];
    if (!errors[i].empty()) {
      rep.check(label_a(a), false, errors[i]);
      continue;
    }
    const Kerr k(M, a);
    double minT = std::numeric_limits<double>::infinity();
    double maxI = -std::numeric_limits<double>::infinity(), maxH = maxI, worst = 0;
    for (const auto& row : rows[i]) {
      const auto& r = row.report;
      const auto I = r.locus.integrals();
      const RadialQuartic q = radial_quartic(k, I);
      const double sc = q.scale(r.locus.r0);
      const double Rres = std::abs(potential_R(k, I, r.locus.r0)) / sc;
      const double Rpres = std::abs(potential_R_prime(k, I, r.locus.r0)) * r.locus.r0 / sc;
      bool ok = Rres < tol && Rpres < tol && r.min_abs_T > 0;
      if (need_timelike) ok = ok && r.max_norm_vI < 0 && r.max_norm_vH < 0;
      t.add({a, r.locus.r0, r.locus.xi, r.locus.eta, Rres, Rpres, r.min_abs_T, r.theta_min_T, r.max_norm_vI,
             r.theta_max_vI, r.max_norm_vH, r.theta_max_vH, r.timelike_everywhere, ok});
      rep.check(label_a(a) + " r0=" + num(r.locus.r0), ok,
                "min|T| " + num(r.min_abs_T) + ", max g(vI,vI) " + num(r.max_norm_vI) + ", max g(vH,vH) " +
                    num(r.max_norm_vH) + ", |R|/scale " + num(Rres) + ", |R'| r0/scale " + num(Rpres));
      minT = std::min(minT, r.min_abs_T);
      maxI = std::max(maxI, r.max_norm_vI);
      maxH = std::max(maxH, r.max_norm_vH);
      worst = std::max({worst, Rres, Rpres});
    }
    per_a.push_back({{"a", a},
                     {"orbits", int(rows[i].size())},
                     {"minT", minT},
                     {"max_norm_vI", maxI},
                     {"max_norm_vH", maxH},
                     {"worst_locus_residual", worst},
                     {"locus_constant", fitted_locus_constant(rows[i], M)}});
  }
  rep.tables.push_back(std::move(t));
  rep.results["spins"] = per_a;
  return rep;
}

// ---------------------------------------------------------------- cauchy

SurfaceSpec surface_from(const json& j) {
  const std::string f = j["family"];
  auto get = [&](const char* k, double d) { return j.contains(k) ? j[k].get<double>() : d; };
  if (f == "SigmaT") return SigmaT{get("T", SigmaT{}.T)};
  if (f == "SigmaBar") return SigmaBar{get("T", SigmaBar{}.T), get("n", SigmaBar{}.n)};
  if (f == "SigmaTilde") return SigmaTilde{get("T", SigmaTilde{}.T), get("n", SigmaTilde{}.n)};
  if (f == "ZT") return ZT{get("T", ZT{}.T)};
  return SigmaM{};
}

std::string surface_label(const json& j) {
  std::string s = j["family"];
  for (const char* k : {"T", "n"})
    if (j.contains(k)) s += std::string(" ") + k + "=" + num(j[k].get<double>());
  return s;
}

Report run_cauchy(const json& cfg, int jobs) {
  const json& s = cfg["cauchy"];
  const double M = M_of(cfg);
  const std::uint64_t seed = seed_of(cfg);
  const int points = s["gradient_points"], per_type = s["crossing_per_type"], draws = s["crossing_max_draws"];
  const double slack = s["tolerances"]["bound_slack"], fraction = s["tolerances"]["crossing_fraction"];
  struct Item {
    double a;
    json surface;
    GradientSurvey grad;
    CrossingSurvey cross;
    std::string error;
  };
  std::vector<Item> items;
  for (double a : s["spins"].get<std::vector<double>>())
    for (const auto& sf : s["surfaces"]) items.push_back({a, sf, {}, {}, ""});
  parallel_for(items.size(), jobs, [&](std::size_t i) {
    Item& it = items[i];
    try {
      const RadialProfiles prof{Kerr(M, it.a)};
      const SurfaceSpec spec = surface_from(it.surface);
      it.grad = gradient_survey(prof, spec, points, seed, slack);
      if (per_type > 0) it.cross = crossing_survey(prof, spec, per_type, seed, draws);
    } catch (const Error& e) {
      it.error = e.what();
    }
  });

  Report rep;
  Table t{"cauchy.csv",
          {"a", "surface", "gradient_samples", "timelike", "worst_norm", "bound_samples", "bound_violations",
           "worst_bound_margin", "paths", "crossed_once", "flagged_incomplete", "failures", "pass_fraction", "pass",
           "error"}};
  Table types{"cauchy_types.csv", {"a", "surface", "type", "count"}};
  json list = json::array();
  for (const auto& it : items) {
    const std::string name = surface_label(it.surface);
    const std::string rec = label_a(it.a) + " " + name;
    if (!it.error.empty()) {
      rep.check(rec, false, it.error);
      t.add({it.a, name, 0, 0, 0.0, 0, 0, 0.0, 0, 0, 0, 0, 0.0, false, it.error});
      continue;
    }
    const auto& g = it.grad;
    const auto& c = it.cross;
    bool ok = true;
    auto require = [&](bool cond, const std::string& what) {
      if (!cond) rep.check(rec, false, what);
      ok = ok && cond;
    };
    require(g.timelike == g.samples, std::to_string(g.samples - g.timelike) + " of " + std::to_string(g.samples) +
                                         " gradients not timelike (largest du.du " + num(g.worst_norm) + ")");
    require(g.bound_violations == 0, std::to_string(g.bound_violations) + " explicit-bound violations");
    if (per_type > 0) {
      require(c.pass_fraction() >= fraction, "single-crossing fraction " + num(c.pass_fraction()) + " below " + num(fraction));
      require(c.failures == 0 && c.crossed_once + c.flagged_incomplete == c.paths,
              std::to_string(c.failures) + " paths neither cross once nor ran out of budget");
    }
    if (ok)
      rep.check(rec, true, "timelike on " + std::to_string(g.samples) + " points, " + std::to_string(c.crossed_once) +
                               "/" + std::to_string(c.paths) + " paths cross once");
    const double margin = g.bound_samples ? g.worst_bound_margin : std::numeric_limits<double>::quiet_NaN();
    t.add({it.a, name, g.samples, g.timelike, g.worst_norm, g.bound_samples, g.bound_violations, margin, c.paths,
           c.crossed_once, c.flagged_incomplete, c.failures, c.pass_fraction(), ok, ""});
    for (const auto& [type, n] : c.types) types.add({it.a, name, unicode_label(type), n});
    list.push_back({{"a", it.a},
                    {"surface", name},
                    {"worst_norm", g.worst_norm},
                    {"bound_violations", g.bound_violations},
                    {"paths", c.paths},
                    {"pass_fraction", c.pass_fraction()}});
  }
  rep.tables.push_back(std::move(t));
  if (per_type > 0) rep.tables.push_back(std::move(types));
  rep.results["surveys"] = list;
  return rep;
}

// ---------------------------------------------------------------- thermal

Report run_thermal(const json& cfg, int jobs) {
  const json& s = cfg["thermal"];
  const double tol = s["tolerances"]["residual"], tol_fermi = s["tolerances"]["fermi"];
  const int N = s["N"], doublings = s["doublings"], profile = s["profile_points"];
  const std::vector<double> kappas = s["kappas"];
  const json& un = s["unruh"];

  struct Item {
    int function = -1;  // -1: Unruh item
    int N = 0;
    double kappa = 0;
    ProjectorComparison cmp;
    double residual = 0;
    std::string error;
  };
  std::vector<TestFunction> fns;
  for (const auto& f : s["functions"]) fns.push_back(make_test_function(f["name"], f["p1"], f["p2"]));
  std::vector<Item> items;
  for (int f = 0; f < int(fns.size()); ++f)
    for (int d = doublings; d >= 0; --d) items.push_back({f, N >> d, 0, {}, 0, ""});
  for (double k : kappas) items.push_back({-1, int(un["N"]), k, {}, 0, ""});
  parallel_for(items.size(), jobs, [&](std::size_t i) {
    Item& it = items[i];
    try {
      if (it.function >= 0) {
        ProjectorGrids g;
        g.N = it.N;
        g.X = s["X"];
        g.L = s["L"];
        g.pad = s["pad"];
        // coarse levels of the refinement study are allowed to be under-resolved
        if (it.N != N) g.resolution_tol = std::numeric_limits<double>::infinity();
        it.cmp = compare_projectors(fns[it.function], g);
        it.residual = it.cmp.residual;
        if (it.N != N || profile == 0) it.cmp.x.resize(0), it.cmp.fourier.resize(0), it.cmp.mellin.resize(0);
      } else {
        const double w = un["width"];
        const SampledFunction f = sample(LineGrid{un["u_half_width"].get<double>() / it.kappa, it.N},
                                         [w](double u) { return std::complex<double>(std::exp(-u * u / (w * w))); });
        UnruhOptions o;
        o.U = LineGrid{un["U_max"], it.N};
        o.pad = s["pad"];
        it.residual = unruh_identity_residual(it.kappa, f, o);
      }
    } catch (const Error& e) {
      it.error = e.what();
    }
  });

  Report rep;
  Table t{"thermal.csv", {"check", "function", "kappa", "beta", "N", "residual", "aliasing", "tolerance", "pass", "error"}};
  json projectors = json::array(), unruh = json::array();
  for (int f = 0; f < int(fns.size()); ++f) {
    std::vector<const Item*> levels;
    for (const auto& it : items)
      if (it.function == f) levels.push_back(&it);
    json ns = json::array(), res = json::array();
    bool ok = true;
    std::string why;
    for (std::size_t l = 0; l < levels.size(); ++l) {
      const Item& it = *levels[l];
      const bool finest = l + 1 == levels.size();
      const bool decreasing = l == 0 || (levels[l - 1]->error.empty() && it.residual < levels[l - 1]->residual);
      const bool row_ok = it.error.empty() && decreasing && (!finest || it.residual < tol);
      t.add({"projector", fns[f].name, "", "", it.N, it.residual, it.cmp.aliasing, finest ? Cell(tol) : Cell(""), row_ok,
             it.error});
      if (!it.error.empty()) why = it.error;
      else if (!decreasing) why = "residual does not decrease from N=" + std::to_string(levels[l - 1]->N) + " to N=" + std::to_string(it.N);
      else if (!row_ok) why = "residual " + num(it.residual) + " at N=" + std::to_string(it.N) + " vs " + num(tol);
      ok = ok && row_ok;
      ns.push_back(it.N);
      res.push_back(it.residual);
    }
    rep.check("projector " + fns[f].name, ok, ok ? "residual " + num(levels.back()->residual) : why);
    projectors.push_back({{"function", fns[f].name}, {"N", ns}, {"residual", res}});
  }
  for (const auto& it : items) {
    if (it.function >= 0) continue;
    const double beta = 2 * std::numbers::pi / it.kappa;
    const bool ok = it.error.empty() && it.residual < tol;
    t.add({"unruh", "gaussian", it.kappa, beta, it.N, it.residual, "", tol, ok, it.error});
    rep.check("unruh kappa=" + num(it.kappa), ok, it.error.empty() ? "residual " + num(it.residual) : it.error);
    unruh.push_back({{"kappa", it.kappa}, {"beta", beta}, {"residual", it.residual}});
  }
  double fermi = 0;
  for (double k : kappas)
    for (int i = -4000; i <= 4000; ++i) {
      const double beta = 2 * std::numbers::pi / k, lambda = i * 0.01;
      fermi = std::max(fermi, std::abs(fermi_factor(beta, 1, lambda) + fermi_factor(beta, -1, lambda) - 1));
    }
  t.add({"fermi", "", "", "", "", fermi, "", tol_fermi, fermi <= tol_fermi, ""});
  rep.check("fermi", fermi <= tol_fermi, "max |chi+ + chi- - 1| = " + num(fermi));
  rep.tables.push_back(std::move(t));

  if (profile > 0) {
    Table p{"thermal_profile.csv", {"function", "x", "f", "fourier_re", "fourier_im", "mellin_re", "mellin_im"}};
    for (const auto& it : items) {
      if (it.function < 0 || it.N != N || !it.error.empty()) continue;
      const auto& c = it.cmp;
      const int stride = std::max<int>(1, int((c.x.size() + profile - 1) / profile));
      for (Eigen::Index j = 0; j < c.x.size(); j += stride)
        p.add({fns[it.function].name, c.x[j], fns[it.function](c.x[j]), c.fourier[j].real(), c.fourier[j].imag(),
               c.mellin[j].real(), c.mellin[j].imag()});
    }
    rep.tables.push_back(std::move(p));
  }
  rep.results = {{"projectors", projectors}, {"unruh", unruh}, {"fermi_max_defect", fermi}};
  return rep;
}

// ---------------------------------------------------------------- sweep

Report run_sweep(const json& cfg, int jobs) {
  const json& s = cfg["sweep"];
  const json& tl = s["timelike"];
  const json& ex = s["expect"];
  const double lo = tl["lo"], hi = tl["hi"], ttol = tl["tol"], stol = s["separation"]["tol"];
  const int n = tl["n_r0"];
  double a1 = 0, a0 = 0;
  parallel_for(2, jobs, [&](std::size_t i) {
    if (i == 0) a1 = timelike_threshold(lo, hi, ttol, n);
    else a0 = locus_separation_threshold(stol);
  });
  Report rep;
  Table t{"sweep.csv", {"quantity", "value", "lo", "hi", "tol", "n_r0", "expect_min", "expect_max", "pass"}};
  const bool ok1 = a1 > lo && a1 < hi && a1 >= ex["a1_min"].get<double>() && a1 <= ex["a1_max"].get<double>();
  const bool ok0 = a0 > 0 && a0 >= ex["a0_min"].get<double>() && a0 <= ex["a0_max"].get<double>();
  t.add({"a1_timelike", a1, lo, hi, ttol, n, ex["a1_min"].get<double>(), ex["a1_max"].get<double>(), ok1});
  t.add({"a0_separation", a0, "", "", stol, "", ex["a0_min"].get<double>(), ex["a0_max"].get<double>(), ok0});
  rep.check("a1_timelike", ok1, "largest a with both Killing fields timelike on the locus: " + num(a1));
  rep.check("a0_separation", ok0, "largest a with a single band of double zeros: " + num(a0));
  rep.tables.push_back(std::move(t));
  rep.results = {{"a1_timelike", a1}, {"a0_separation", a0}};
  return rep;
}

json tolerances_of(const std::string& command, const json& resolved) {
  const json& s = resolved[command];
  if (s.contains("tolerances")) return s["tolerances"];
  return {{"timelike_tol", s["timelike"]["tol"]}, {"separation_tol", s["separation"]["tol"]}};
}

void write_json(const fs::path& file, const json& j) {
  std::ofstream out(file, std::ios::binary);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("cannot write " + file.string());
}

}  // namespace

RunResult run(const std::string& command, const json& resolved, const std::string& out_dir, int jobs) {
  Report rep;
  if (command == "charts") rep = run_charts(resolved, jobs);
  else if (command == "geodesic") rep = run_geodesic(resolved, jobs);
  else if (command == "orbits") rep = run_orbits(resolved, jobs);
  else if (command == "cauchy") rep = run_cauchy(resolved, jobs);
  else if (command == "thermal") rep = run_thermal(resolved, jobs);
  else if (command == "sweep") rep = run_sweep(resolved, jobs);
  else throw SchemaError("unknown command " + command);

  const fs::path dir(out_dir);
  fs::create_directories(dir);
  json artifacts = json::array();
  for (const auto& t : rep.tables) {
    t.write(dir);
    artifacts.push_back(t.file);
  }
  const std::string summary_file = command + "_summary.json";
  artifacts.push_back(summary_file);

  int failed = 0;
  json first = nullptr;
  for (const auto& c : rep.checks) {
    if (c.pass) continue;
    if (!failed) first = {{"record", c.record}, {"detail", c.detail}};
    ++failed;
  }
  RunResult r;
  r.exit_code = failed ? 1 : 0;
  r.summary = {{"command", command},
               {"version", KERRKIT_VERSION},
               {"config_hash", config_hash(resolved)},
               {"config", resolved},
               {"tolerances", tolerances_of(command, resolved)},
               {"status", failed ? "fail" : "pass"},
               {"exit_code", r.exit_code},
               {"assertions", {{"total", int(rep.checks.size())}, {"failed", failed}}},
               {"first_failure", first},
               {"artifacts", artifacts},
               {"results", rep.results}};
  write_json(dir / summary_file, r.summary);
  return r;
}

RunResult run_with_config(const std::string& command, const json& user, const Overrides& o, const std::string& out_dir,
                          int jobs) {
  try {
    return run(command, resolve_config(command, user, o), out_dir, jobs);
  } catch (const SchemaError& e) {
    RunResult r;
    r.exit_code = 2;
    r.summary = {{"command", command},   {"version", KERRKIT_VERSION}, {"status", "schema_error"},
                 {"exit_code", 2},       {"error", e.what()},          {"config_hash", nullptr}};
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (!ec) {
      std::ofstream out(fs::path(out_dir) / (command + "_summary.json"), std::ios::binary);
      out << r.summary.dump(2) << "\n";
    }
    return r;
  }
}

}  // namespace kerrkit::cli
