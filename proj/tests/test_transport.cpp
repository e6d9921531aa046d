#include "h2t/transport.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace h2t;

namespace {

Mat J2() {
  Mat J(2, 2);
  J << 0, -1, 1, 0;
  return J;
}

Vec v1(double x) {
  Vec v(1);
  v << x;
  return v;
}

BaseGroupoid circle() { return cech_circle({{-2.0, 2.0}, {1.2, 5.1}}); }

DecoratedBundle u1_bundle(const BaseGroupoid& base, const CrossedModule& cm,
                          double jump = 0.7) {
  ConnectorBundle cb;
  cb.base = &base;
  cb.cm = &cm;
  cb.connector = [jump, &cm](const BaseArrow& a) {
    if (a.i == a.j || cm.G->ambient_dim != 2) return cm.eG();
    return mat_exp(((a.i == 0) ? jump : -jump) * J2());
  };
  return build_decorated(cb);
}

DecoratedBundle trivial_bundle(const BaseGroupoid& base, const CrossedModule& cm) {
  ConnectorBundle cb;
  cb.base = &base;
  cb.cm = &cm;
  cb.connector = [&cm](const BaseArrow&) { return cm.eG(); };
  return build_decorated(cb);
}

// The standard two-chart loop around the circle, with connector jumps at
// angles 1.6 and 4.6.
LazyHaefligerPath circle_loop(const BaseGroupoid& base) {
  LazyHaefligerPath loop;
  loop.arrows = {base_unit(base, base.point_on_circle(0, 0.0)),
                 cech_arrow(base, 1.6, 0, 1), cech_arrow(base, 4.6, 1, 0),
                 base_unit(base, base.point_on_circle(0, 0.0))};
  loop.paths = {line_path(0, v1(0.0), v1(1.6)), line_path(1, v1(1.6), v1(4.6)),
                line_path(0, v1(4.6 - 2 * M_PI), v1(0.0))};
  validate_haefliger(loop);
  return loop;
}

// A one-segment Haefliger path inside a single chart.
LazyHaefligerPath segment(const BaseGroupoid& base, int chart, double a, double b) {
  LazyHaefligerPath g;
  g.arrows = {base_unit(base, BasePoint{chart, v1(a)}),
              base_unit(base, BasePoint{chart, v1(b)})};
  g.paths = {line_path(chart, v1(a), v1(b))};
  return g;
}

LocalForm kappa_form(double kappa) {
  LocalForm lf;
  lf.A = [kappa](int, const Vec&, const Vec& v) {
    return Mat(kappa * v(0) * J2());
  };
  return lf;
}

// Nonabelian so(3)-valued local form, periodic in the angle so it is
// well defined on both charts.
LocalForm so3_form() {
  Mat L1(3, 3), L2(3, 3);
  L1 << 0, 0, 0, 0, 0, -1, 0, 1, 0;
  L2 << 0, 0, 1, 0, 0, 0, -1, 0, 0;
  LocalForm lf;
  lf.A = [L1, L2](int, const Vec& x, const Vec& v) {
    return Mat(v(0) * (0.3 * L1 + 0.25 * std::sin(x(0)) * L2));
  };
  return lf;
}

}  // namespace

TEST_CASE("circle holonomy matches the quadrature oracle") {
  BaseGroupoid base = circle();
  const CrossedModule& cm = crossed_module_catalog("so2-conj");
  DecoratedBundle db = u1_bundle(base, cm);
  QuasiConnection C = canonical_categorical_connection(db);
  LazyHaefligerPath loop = circle_loop(base);

  for (double kappa : {0.25, 1.0 / 3.0, 0.7}) {
    LocalForm lf = kappa_form(kappa);
    Mat expect = mat_exp(-2 * M_PI * kappa * J2());
    IntegratorConfig cfg;
    cfg.step = 1e-3;
    TorsorMap T = haefliger_transport(db, C, lf, loop, cfg);
    double e1 = (T.g_rep - expect).norm();
    CHECK(e1 < 1e-8);
    CHECK(points_close(T.src, T.dst));
    // halving the step improves the residual by the RK4 factor
    cfg.step = 5e-4;
    double e2 = (haefliger_transport(db, C, lf, loop, cfg).g_rep - expect).norm();
    CHECK(e1 / e2 > 8.0);
  }
}

TEST_CASE("transport class is invariant under thin homotopy") {
  BaseGroupoid base = circle();
  IntegratorConfig cfg;
  cfg.step = 1e-3;

  // nonabelian fibers with a trivial tau, so the class distance is the full
  // distance between representatives
  const CrossedModule& cm = crossed_module_catalog("discrete");
  DecoratedBundle db = trivial_bundle(base, cm);
  QuasiConnection C = canonical_categorical_connection(db);
  LocalForm lf = so3_form();
  LazyHaefligerPath loop = circle_loop(base);
  TorsorMap T = haefliger_transport(db, C, lf, loop, cfg);
  // the holonomy is genuinely nonabelian: it is not a rotation about the
  // generator appearing in either term alone
  CHECK((T.g_rep - Mat(Mat::Identity(3, 3))).norm() > 1e-3);

  SECTION("reparametrizations") {
    std::vector<std::function<double(double)>> phis = {
        [](double t) { return t * t * (3 - 2 * t); },
        [](double t) { return t * t * t * (10 - 15 * t + 6 * t * t); },
        [](double t) { return 0.5 * (1 - std::cos(M_PI * t)); },
        [](double t) { return t - 0.15 * std::sin(2 * M_PI * t); },
        [](double t) {
          double u = t * t * (3 - 2 * t);
          return u * u * (3 - 2 * u);
        }};
    for (std::size_t i = 0; i < phis.size(); ++i) {
      LazyHaefligerPath g = loop;
      g.paths[i % g.paths.size()] =
          reparametrize(g.paths[i % g.paths.size()], phis[i]);
      TorsorMap T2 = haefliger_transport(db, C, lf, g, cfg);
      CHECK(torsor_class_distance(cm, T2, T) < 1e-6);
    }
  }

  SECTION("backtracks") {
    struct Case {
      std::size_t site;
      double from, to;
      int chart;
    };
    for (const Case& bc : {Case{0, 1.6, 0.4, 0}, Case{1, 4.6, 2.5, 1},
                           Case{2, 0.0, -1.5, 0}}) {
      LazyHaefligerPath g = loop;
      ChartPath beta = line_path(bc.chart, v1(bc.from), v1(bc.to));
      g.paths[bc.site] = concat_paths(
          g.paths[bc.site], concat_paths(beta, reverse_path(beta)));
      TorsorMap T2 = haefliger_transport(db, C, lf, g, cfg);
      CHECK(torsor_class_distance(cm, T2, T) < 1e-6);
    }
  }

  SECTION("equivalence moves") {
    // insert a constant path, then undo it
    LazyHaefligerPath g1 = equivalence_move(loop, HaefligerMove::add_constant, 1);
    CHECK(torsor_class_distance(cm, haefliger_transport(db, C, lf, g1, cfg), T) <
          1e-6);
    LazyHaefligerPath g2 = equivalence_move(g1, HaefligerMove::remove_constant, 1);
    CHECK(torsor_class_distance(cm, haefliger_transport(db, C, lf, g2, cfg), T) <
          1e-6);

    // split a path at an identity arrow, then merge it back
    LazyHaefligerPath g3 = equivalence_move(loop, HaefligerMove::add_identity, 1);
    CHECK(torsor_class_distance(cm, haefliger_transport(db, C, lf, g3, cfg), T) <
          1e-6);
    LazyHaefligerPath g4 = equivalence_move(g3, HaefligerMove::remove_identity, 2);
    CHECK(torsor_class_distance(cm, haefliger_transport(db, C, lf, g4, cfg), T) <
          1e-6);

    // push a segment through the overlap into the other chart
    LazyHaefligerPath seg = segment(base, 0, 1.3, 1.9);
    TorsorMap Ts = haefliger_transport(db, C, lf, seg, cfg);
    auto pos = seg.paths[0].position;
    const BaseGroupoid* bp = &base;
    auto zeta = [bp, pos](double t) {
      return cech_arrow(*bp, pos(t)(0), 0, 1);
    };
    LazyHaefligerPath g5 =
        equivalence_move(seg, HaefligerMove::conjugate_by_zeta, 0, zeta);
    CHECK(g5.paths[0].chart == 1);
    CHECK(torsor_class_distance(cm, haefliger_transport(db, C, lf, g5, cfg), Ts) <
          1e-6);
  }

  SECTION("the same moves with nontrivial connector jumps") {
    const CrossedModule& u1 = crossed_module_catalog("so2-conj");
    DecoratedBundle dbu = u1_bundle(base, u1);
    QuasiConnection Cu = canonical_categorical_connection(dbu);
    LocalForm lfu = kappa_form(0.7);
    LazyHaefligerPath seg = segment(base, 0, 1.3, 1.9);
    TorsorMap Ts = haefliger_transport(dbu, Cu, lfu, seg, cfg);
    auto pos = seg.paths[0].position;
    const BaseGroupoid* bp = &base;
    auto zeta = [bp, pos](double t) {
      return cech_arrow(*bp, pos(t)(0), 0, 1);
    };
    LazyHaefligerPath g =
        equivalence_move(seg, HaefligerMove::conjugate_by_zeta, 0, zeta);
    CHECK((haefliger_transport(dbu, Cu, lfu, g, cfg).g_rep - Ts.g_rep).norm() <
          1e-6);
  }
}

TEST_CASE("transport is functorial and respects inversion") {
  BaseGroupoid base = circle();
  const CrossedModule& cm = crossed_module_catalog("discrete");
  DecoratedBundle db = trivial_bundle(base, cm);
  QuasiConnection C = canonical_categorical_connection(db);
  LocalForm lf = so3_form();
  IntegratorConfig cfg;
  cfg.step = 1e-3;

  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> u(-1.9, 1.9);
  for (int i = 0; i < 20; ++i) {
    double a = u(rng), b = u(rng), c = u(rng);
    LazyHaefligerPath g = segment(base, 0, a, b);
    LazyHaefligerPath gp = segment(base, 0, b, c);
    TorsorMap Tg = haefliger_transport(db, C, lf, g, cfg);
    TorsorMap Tgp = haefliger_transport(db, C, lf, gp, cfg);
    TorsorMap Tc = haefliger_transport(db, C, lf, haefliger_compose(gp, g), cfg);
    CHECK(torsor_class_distance(cm, Tc, torsor_compose(Tgp, Tg)) < 1e-6);
    TorsorMap Ti = haefliger_transport(db, C, lf, haefliger_invert(g), cfg);
    CHECK(torsor_class_distance(cm, Ti, torsor_invert(Tg)) < 1e-6);
  }

  // a chart-crossing composite behaves the same way
  LazyHaefligerPath loop = circle_loop(base);
  TorsorMap Tl = haefliger_transport(db, C, lf, loop, cfg);
  TorsorMap T2 = haefliger_transport(db, C, lf, haefliger_compose(loop, loop), cfg);
  CHECK(torsor_class_distance(cm, T2, torsor_compose(Tl, Tl)) < 1e-6);

  // mismatched endpoints are refused
  CHECK_THROWS_AS(haefliger_compose(segment(base, 0, 1.0, 1.5),
                                    segment(base, 0, -1.0, 0.0)),
                  NotComposable);
  CHECK_THROWS_AS(
      torsor_class_distance(
          cm, haefliger_transport(db, C, lf, segment(base, 0, 0.0, 1.0), cfg), Tl),
      ClassNotComparable);
}

TEST_CASE("transport is natural for bundle morphisms and base pullbacks") {
  IntegratorConfig cfg;
  cfg.step = 1e-3;

  SECTION("central shift of the fiber") {
    BaseGroupoid base = circle();
    const CrossedModule& cm = crossed_module_catalog("so2-conj");
    DecoratedBundle db = u1_bundle(base, cm);
    QuasiConnection C = canonical_categorical_connection(db);
    Mat z = mat_exp(0.9 * J2());
    auto f = [z](const E0Point& p) { return E0Point{p.x, Mat(z * p.g)}; };
    bundle_morphism_from_base(db, C, db, C, f);  // throws if not a morphism

    LocalForm lf = kappa_form(0.25);
    TorsorMap T = haefliger_transport(db, C, lf, circle_loop(base), cfg);
    E0Point p = db.data.basepoint(base.point_on_circle(0, 0.0));
    E0Point lhs = torsor_apply(T, f(p));
    E0Point rhs = f(torsor_apply(T, p));
    CHECK(e0_distance(lhs, rhs) < 1e-6);
  }

  SECTION("pullback along a base functor") {
    // refine the two-arc cover of the circle to a three-arc cover
    BaseGroupoid dom = cech_circle({{-2.0, 2.0}, {1.2, 3.6}, {3.0, 5.1}});
    BaseGroupoid cod = circle();
    auto chart_map = [](int c) { return c == 0 ? 0 : 1; };
    BaseFunctor F;
    F.dom = &dom;
    F.cod = &cod;
    F.F0 = [&cod, chart_map](const BasePoint& p) {
      int c = chart_map(p.chart);
      return cod.point_on_circle(c, p.x(0));
    };
    F.F1 = [&cod, chart_map](const BaseArrow& a) {
      return cech_arrow(cod, a.theta, chart_map(a.i), chart_map(a.j));
    };

    const CrossedModule& cm = crossed_module_catalog("so2-conj");
    DecoratedBundle db_cod = u1_bundle(cod, cm);
    ConnectorBundle cb;
    cb.base = &dom;
    cb.cm = &cm;
    auto cod_conn = db_cod.data.connector;
    cb.connector = [&F, cod_conn](const BaseArrow& a) { return cod_conn(F.F1(a)); };
    DecoratedBundle db_dom = build_decorated(cb);
    QuasiConnection C_dom = canonical_categorical_connection(db_dom);
    QuasiConnection C_cod = canonical_categorical_connection(db_cod);
    LocalForm lf = kappa_form(0.25);  // angle-periodic: its own pullback

    // a loop visiting all three charts of the refined cover
    LazyHaefligerPath g;
    g.arrows = {base_unit(dom, dom.point_on_circle(0, 0.0)),
                cech_arrow(dom, 1.6, 0, 1), cech_arrow(dom, 3.3, 1, 2),
                cech_arrow(dom, 4.8, 2, 0),
                base_unit(dom, dom.point_on_circle(0, 0.0))};
    g.paths = {line_path(0, v1(0.0), v1(1.6)), line_path(1, v1(1.6), v1(3.3)),
               line_path(2, v1(3.3), v1(4.8)),
               line_path(0, v1(4.8 - 2 * M_PI), v1(0.0))};
    validate_haefliger(g);

    TorsorMap Td = haefliger_transport(db_dom, C_dom, lf, g, cfg);
    TorsorMap Tc = haefliger_transport(db_cod, C_cod, lf, map_haefliger(F, g), cfg);
    CHECK((Td.g_rep - Tc.g_rep).norm() < 1e-6);
    CHECK(points_close(F.F0(Td.src), Tc.src));
    CHECK(points_close(F.F0(Td.dst), Tc.dst));
  }
}

TEST_CASE("horizontal lifts have horizontal source and target") {
  BaseGroupoid base = circle();
  const CrossedModule& cm = crossed_module_catalog("so2-conj");
  DecoratedBundle db = u1_bundle(base, cm);
  LocalForm lf = kappa_form(0.7);
  ConnectionForm form = build_omega_dec(db, lf);
  IntegratorConfig cfg;
  cfg.step = 1e-3;

  auto zeta = [&base](double t) { return cech_arrow(base, 1.5 + 0.2 * t, 0, 1); };
  CheckReport rep =
      source_target_consistency_check(db, form, lf, zeta, mat_exp(0.3 * J2()), cfg);
  CHECK(rep.pass(1e-6));
}

TEST_CASE("associated 2-vector bundle transport is a rotation") {
  BaseGroupoid base = circle();
  const CrossedModule& cm = crossed_module_catalog("so2-conj");
  DecoratedBundle db = u1_bundle(base, cm);
  QuasiConnection C = canonical_categorical_connection(db);
  double kappa = 0.25;
  IntegratorConfig cfg;
  cfg.step = 1e-3;
  TorsorMap T = haefliger_transport(db, C, kappa_form(kappa), circle_loop(base), cfg);

  TwoVectorRep rep;
  rep.dim0 = 2;
  rep.rep0 = [](const Mat& g) { return g; };
  rep.rep1 = [](const Mat&, const Mat& g) { return g; };

  Mat expect = mat_exp(-2 * M_PI * kappa * J2());
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    Vec w(2);
    w << u(rng), u(rng);
    CHECK((vb_transport(rep, T, w) - Vec(expect * w)).norm() < 1e-7);
  }
  // the map is exactly linear: matrix action carries no truncation of its own
  CHECK(vb_linearity_check(rep, T, 20).max_residual() == 0.0);

  // applying the transport to a point in the wrong fiber is refused
  CHECK_THROWS_AS(
      torsor_apply(T, db.data.basepoint(base.point_on_circle(0, 1.0))),
      FiberMismatch);
}
