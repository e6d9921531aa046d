#pragma once

// Scenario files: a JSON description of a crossed module, base groupoid,
// connector bundle, optional twist, connection data, gauge data, and named
// Haefliger paths. Scenarios drive both the command-line tool and the
// higher-level test suites.

#include "h2t/transport.hpp"

#include "json.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>

namespace h2t {

using json = nlohmann::json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Circle generator of L(G) for the catalog groups used on the circle base.
inline Mat circle_generator(const GroupDescriptor& G) {
  if (G.name == "SO(2)") {
    Mat J(2, 2);
    J << 0, -1, 1, 0;
    return J;
  }
  if (G.name == "R+") {
    Mat m(1, 1);
    m << 1.0;
    return m;
  }
  if (G.name == "SO(3)") {
    Mat L(3, 3);
    L << 0, -1, 0, 1, 0, 0, 0, 0, 0;
    return L;
  }
  throw ConfigError("no circle generator for group " + G.name);
}

// Canonical embedding of L(G) scalars into L(H) for the twistable entries.
inline Mat lambda_embed(const CrossedModule& cm, const Mat& X) {
  if (cm.H->name == cm.G->name) return X;
  if (cm.name == "rplus-r") {
    Mat m = Mat::Zero(2, 2);
    m(0, 1) = X(0, 0);
    return m;
  }
  throw ConfigError("no lambda embedding for crossed module " + cm.name);
}

struct Scenario {
  std::string name;
  const CrossedModule* cm = nullptr;
  std::shared_ptr<BaseGroupoid> base;
  std::shared_ptr<DecoratedBundle> db;
  QuasiConnection C;                    // categorical or twisted
  bool twisted = false;
  std::function<Mat(const BaseArrow&, const E0Point&)> Htwist;  // if twisted
  LocalForm lf;
  std::optional<LambdaForm> lambda;
  std::optional<GaugeTransform> sigma;
  std::map<std::string, LazyHaefligerPath> paths;
  IntegratorConfig cfg;
  std::uint64_t seed = 1;
  std::optional<Mat> loop_oracle;       // expected g_rep of the "loop" path
  json raw;
};

namespace detail {

inline const json& at_path(const json& j, const std::string& key,
                           const std::string& ctx) {
  if (!j.contains(key)) throw ConfigError("missing field: " + ctx + "." + key);
  return j.at(key);
}

inline LazyHaefligerPath build_circle_loop(const BaseGroupoid& base,
                                           double break0, double break1,
                                           double start_angle) {
  auto v1 = [](double x) {
    Vec v(1);
    v << x;
    return v;
  };
  double s0 = base.chart_coord(0, start_angle);
  double b0 = base.chart_coord(0, break0);
  double b1 = base.chart_coord(1, break1);
  double b0c1 = base.chart_coord(1, break0);
  // Representative of break1 in chart 0, one positive turn past the start.
  double b1c0 = base.chart_coord(0, break1);
  if (b1c0 > s0) b1c0 -= base.period;
  LazyHaefligerPath g;
  BasePoint p0 = base.point_on_circle(0, start_angle);
  g.arrows = {base_unit(base, p0), cech_arrow(base, break0, 0, 1),
              cech_arrow(base, break1, 1, 0), base_unit(base, p0)};
  g.paths = {line_path(0, v1(s0), v1(b0)), line_path(1, v1(b0c1), v1(b1)),
             line_path(0, v1(b1c0), v1(s0))};
  validate_haefliger(g);
  return g;
}

inline LazyHaefligerPath build_unit_path(const BaseGroupoid& base, double angle) {
  BasePoint p = base.point_on_circle(0, angle);
  LazyHaefligerPath g;
  g.arrows = {base_unit(base, p), base_unit(base, p)};
  g.paths = {constant_path(0, p.x)};
  return g;
}

inline LazyHaefligerPath build_arc_path(const BaseGroupoid& base, int chart,
                                        double from, double to) {
  auto v1 = [](double x) {
    Vec v(1);
    v << x;
    return v;
  };
  double a = base.chart_coord(chart, from);
  double b = base.chart_coord(chart, to);
  LazyHaefligerPath g;
  g.arrows = {base_unit(base, BasePoint{chart, v1(a)}),
              base_unit(base, BasePoint{chart, v1(b)})};
  g.paths = {line_path(chart, v1(a), v1(b))};
  return g;
}

}  // namespace detail

inline Scenario scenario_from_json(const json& j) {
  Scenario sc;
  sc.raw = j;
  sc.name = j.value("name", "unnamed");
  sc.seed = j.value("seed", 1);

  // crossed module
  sc.cm = &crossed_module_catalog(
      detail::at_path(j, "crossed_module", "scenario").get<std::string>());
  const CrossedModule& cm = *sc.cm;

  // base groupoid
  {
    const json& jb = detail::at_path(j, "base", "scenario");
    std::string kind = detail::at_path(jb, "kind", "base").get<std::string>();
    if (kind != "cech-circle")
      throw ConfigError("base.kind: only cech-circle is scenario-buildable");
    std::vector<std::pair<double, double>> arcs;
    for (const auto& a : detail::at_path(jb, "arcs", "base"))
      arcs.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
    sc.base = std::make_shared<BaseGroupoid>(cech_circle(arcs));
  }

  // connector bundle
  Mat gen = circle_generator(*cm.G);
  {
    const json& jc = detail::at_path(detail::at_path(j, "bundle", "scenario"),
                                     "connector", "bundle");
    std::string type = detail::at_path(jc, "type", "connector").get<std::string>();
    ConnectorBundle cb;
    cb.base = sc.base.get();
    cb.cm = sc.cm;
    if (type == "identity") {
      const CrossedModule* cmp = sc.cm;
      cb.connector = [cmp](const BaseArrow&) { return cmp->eG(); };
    } else if (type == "angle-jump") {
      double jump = detail::at_path(jc, "jump", "connector").get<double>();
      const CrossedModule* cmp = sc.cm;
      cb.connector = [jump, gen, cmp](const BaseArrow& a) -> Mat {
        if (a.i == a.j) return cmp->eG();
        double s = (a.i < a.j) ? jump : -jump;
        return mat_exp(s * gen);
      };
    } else {
      throw ConfigError("connector.type: unknown type " + type);
    }
    sc.db = std::make_shared<DecoratedBundle>(build_decorated(cb));
  }

  // twist / quasi connection
  {
    const json& jt = j.at("bundle").value("twist", json{{"type", "none"}});
    std::string type = jt.value("type", "none");
    if (type == "none") {
      sc.C = canonical_categorical_connection(*sc.db);
    } else if (type == "constant-angle" || type == "constant-shift") {
      Mat h;
      if (type == "constant-angle") {
        double angle = detail::at_path(jt, "angle", "twist").get<double>();
        h = mat_exp(angle * circle_generator(*cm.H));
      } else {
        double v = detail::at_path(jt, "value", "twist").get<double>();
        h = Mat::Identity(2, 2);
        h(0, 1) = v;
      }
      sc.twisted = true;
      sc.Htwist = [h](const BaseArrow&, const E0Point&) { return h; };
      sc.C = quasi_from_twist(*sc.db, canonical_categorical_connection(*sc.db),
                              sc.Htwist);
    } else {
      throw ConfigError("twist.type: unknown type " + type);
    }
  }

  // connection: local form
  {
    const json& jn = detail::at_path(j, "connection", "scenario");
    const json& jl = detail::at_path(jn, "local_form", "connection");
    std::string type = detail::at_path(jl, "type", "local_form").get<std::string>();
    std::shared_ptr<BaseGroupoid> basep = sc.base;
    if (type == "kappa-dtheta") {
      double kappa = detail::at_path(jl, "kappa", "local_form").get<double>();
      double bump = jl.value("bump", 0.0);
      sc.lf.A = [kappa, bump, gen, basep](int chart, const Vec& x,
                                          const Vec& v) -> Mat {
        double theta = basep->canonical_angle(x(0));
        (void)chart;
        return (kappa + bump * std::sin(theta)) * v(0) * gen;
      };
      sc.loop_oracle = mat_exp(-basep->period * kappa * gen);
    } else {
      throw ConfigError("local_form.type: unknown type " + type);
    }
    sc.cfg.step = j.value("integrator", json::object()).value("step", 1e-3);

    // optional lambda
    if (jn.contains("lambda") && jn.at("lambda").value("type", "none") != "none") {
      const json& jlam = jn.at("lambda");
      std::string ltype = jlam.at("type").get<std::string>();
      if (ltype != "fiber-scale")
        throw ConfigError("lambda.type: unknown type " + ltype);
      double coef = detail::at_path(jlam, "coef", "lambda").get<double>();
      const CrossedModule* cmp = sc.cm;
      sc.lambda = [coef, cmp](const E0Curve& c) {
        Mat g0 = c(0.0).g;
        Mat xi = fd_mat([&c](double t) { return c(t).g; });
        return lambda_embed(*cmp, Mat(coef * (g0.inverse() * xi)));
      };
    }

    // optional sigma (gauge transformation)
    if (jn.contains("sigma") && jn.at("sigma").value("type", "none") != "none") {
      const json& js = jn.at("sigma");
      std::string stype = js.at("type").get<std::string>();
      if (stype != "angle-sin")
        throw ConfigError("sigma.type: unknown type " + stype);
      double amp = detail::at_path(js, "amp", "sigma").get<double>();
      GaugeTransform gt;
      gt.db = sc.db.get();
      const CrossedModule* cmp = sc.cm;
      gt.sigma0 = [amp, gen, basep](const E0Point& p) -> Mat {
        double theta = basep->canonical_angle(p.x.x(0));
        Mat s = mat_exp(amp * std::sin(theta) * gen);
        return Ad(Mat(p.g.inverse()), s);
      };
      auto s0 = gt.sigma0;
      gt.sigma_bar1 = [s0, cmp](const BaseArrow&, const E0Point& p) {
        return std::make_pair(cmp->eH(), s0(p));
      };
      sc.sigma = gt;
    }
  }

  // named paths
  if (j.contains("paths")) {
    for (const auto& [pname, jp] : j.at("paths").items()) {
      std::string type = detail::at_path(jp, "type", "paths").get<std::string>();
      if (type == "circle-loop") {
        double b0 = jp.value("break0", 0.0), b1 = jp.value("break1", 0.0);
        double sa = jp.value("start_angle", 0.0);
        sc.paths.emplace(pname,
                         detail::build_circle_loop(*sc.base, b0, b1, sa));
      } else if (type == "unit") {
        sc.paths.emplace(pname,
                         detail::build_unit_path(*sc.base, jp.value("angle", 0.0)));
      } else if (type == "arc") {
        sc.paths.emplace(pname, detail::build_arc_path(*sc.base,
                                                       jp.value("chart", 0),
                                                       jp.at("from").get<double>(),
                                                       jp.at("to").get<double>()));
      } else {
        throw ConfigError("paths." + pname + ".type: unknown type " + type);
      }
    }
  }

  // A constant twist adds tau(h) at every connector jump of the loop; fold
  // that into the transport oracle (the scenario groups are abelian, so the
  // insertion order does not matter).
  if (sc.loop_oracle && sc.twisted && sc.paths.count("loop")) {
    Mat o = *sc.loop_oracle;
    for (const BaseArrow& a : sc.paths.at("loop").arrows) {
      E0Point p0 = sc.db->data.basepoint(base_source(a));
      o = cm.tau(sc.Htwist(a, p0)) * o;
    }
    sc.loop_oracle = o;
  }
  return sc;
}

// Resolve a scenario argument: an existing file path, or a name looked up in
// H2T_CATALOG_DIR.
inline Scenario load_scenario(const std::string& file_or_name) {
  namespace fs = std::filesystem;
  fs::path p(file_or_name);
  if (!fs::exists(p)) {
    const char* dir = std::getenv("H2T_CATALOG_DIR");
    if (dir) {
      fs::path q = fs::path(dir) / (file_or_name + ".json");
      if (fs::exists(q)) p = q;
      else {
        q = fs::path(dir) / file_or_name;
        if (fs::exists(q)) p = q;
      }
    }
  }
  if (!fs::exists(p))
    throw ConfigError("scenario not found: " + file_or_name);
  std::ifstream in(p);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("scenario parse error: ") + e.what());
  }
  return scenario_from_json(j);
}

// ---------------------------------------------------------------------------
// Reports

struct ReportLine {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct Report {
  std::string command;
  std::string scenario;
  std::vector<ReportLine> lines;

  void add(const std::string& name, double residual, double tol) {
    lines.push_back({name, residual, tol, residual <= tol});
  }
  void add_report(const CheckReport& cr, double tol,
                  const std::string& prefix = "") {
    for (const auto& [k, r] : cr.residuals)
      add(prefix.empty() ? cr.name + "." + k : prefix + "." + k, r, tol);
  }
  bool all_pass() const {
    for (const auto& l : lines)
      if (!l.pass) return false;
    return true;
  }
  json to_json() const {
    json out;
    out["command"] = command;
    out["scenario"] = scenario;
    out["pass"] = all_pass();
    out["checks"] = json::array();
    for (const auto& l : lines) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.6e", l.residual);
      out["checks"].push_back({{"name", l.name},
                               {"residual", std::string(buf)},
                               {"tolerance", l.tolerance},
                               {"pass", l.pass}});
    }
    return out;
  }
  void print_table(std::ostream& os) const {
    os << "== " << command << " [" << scenario << "] ==\n";
    for (const auto& l : lines) {
      char buf[128];
      std::snprintf(buf, sizeof(buf), "  %-40s %12.4e  (tol %.1e)  %s\n",
                    l.name.c_str(), l.residual, l.tolerance,
                    l.pass ? "pass" : "FAIL");
      os << buf;
    }
    os << (all_pass() ? "all checks passed" : "FAILURES present") << "\n";
  }
};

}  // namespace h2t
