#include "h2t/base_groupoid.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace h2t;

namespace {

Vec v1(double x) {
  Vec v(1);
  v << x;
  return v;
}

BaseGroupoid circle() { return cech_circle({{-2.0, 2.0}, {1.2, 5.1}}); }

}  // namespace

TEST_CASE("Cech circle charts and canonical angles") {
  BaseGroupoid g = circle();
  CHECK(g.canonical_angle(7.0) == Catch::Approx(7.0 - 2.0 * M_PI));
  CHECK(g.chart_coord(0, 4.6) == Catch::Approx(4.6 - 2.0 * M_PI));
  CHECK(g.chart_coord(1, 1.6) == Catch::Approx(1.6));
  CHECK_THROWS_AS(g.chart_coord(1, 0.0), ChartMismatch);

  BaseArrow a = cech_arrow(g, 1.6, 0, 1);
  CHECK(base_source(a).chart == 0);
  CHECK(base_target(a).chart == 1);
  CHECK(base_source(a).x(0) == Catch::Approx(1.6));

  // groupoid axioms on overlap arrows
  BaseArrow b = cech_arrow(g, 1.6, 1, 0);
  BaseArrow c = base_compose(b, a);
  CHECK(is_unit_arrow(c));
  CHECK(arrows_equal(base_invert(a), b));
  CHECK_THROWS_AS(base_compose(a, a), NotComposable);
}

TEST_CASE("smootherstep has sitting ends and a matching derivative") {
  CHECK(smoothstep_clamped(0.05, 0.1) == 0.0);
  CHECK(smoothstep_clamped(0.95, 0.1) == 1.0);
  CHECK(smoothstep_clamped(0.5, 0.1) == Catch::Approx(0.5));
  for (double t : {0.15, 0.3, 0.5, 0.77}) {
    double h = 1e-6;
    double fd = (smoothstep_clamped(t + h, 0.1) - smoothstep_clamped(t - h, 0.1)) /
                (2.0 * h);
    CHECK(smoothstep_clamped_deriv(t, 0.1) == Catch::Approx(fd).margin(1e-7));
  }
  CHECK(smoothstep_clamped_deriv(0.02, 0.1) == 0.0);
}

TEST_CASE("chart paths: laziness, endpoints, reparametrization, concatenation") {
  ChartPath p = line_path(0, v1(0.0), v1(1.5));
  CHECK(has_sitting_instants(p));
  CHECK((p.at(0.0) - v1(0.0)).norm() < 1e-15);
  CHECK((p.at(1.0) - v1(1.5)).norm() < 1e-15);
  // analytic velocity agrees with finite differences in the interior
  for (double t : {0.2, 0.5, 0.8}) {
    Vec fd = (p.at(t + 1e-6) - p.at(t - 1e-6)) / 2e-6;
    CHECK((p.velocity(t) - fd).norm() < 1e-6);
  }
  // a raw (non-lazified) path has no sitting instants
  ChartPath raw = make_chart_path(0, [](double t) { return Vec::Constant(1, t); });
  CHECK_FALSE(has_sitting_instants(raw));

  CHECK(is_constant_path(constant_path(0, v1(0.3))));
  CHECK_FALSE(is_constant_path(p));

  CHECK_THROWS_AS(reparametrize(p, [](double t) { return 0.5 * t; }),
                  std::invalid_argument);
  ChartPath q = reparametrize(p, [](double t) { return t * t * (3.0 - 2.0 * t); });
  CHECK((q.at(1.0) - p.at(1.0)).norm() < 1e-15);

  ChartPath r = reverse_path(p);
  CHECK((r.at(0.0) - p.at(1.0)).norm() < 1e-15);
  CHECK((r.velocity(0.5) + p.velocity(0.5)).norm() < 1e-12);

  ChartPath s = concat_paths(p, reverse_path(p));
  CHECK((s.at(0.0) - v1(0.0)).norm() < 1e-15);
  CHECK((s.at(1.0) - v1(0.0)).norm() < 1e-15);
  CHECK(has_sitting_instants(s));
  CHECK_THROWS_AS(concat_paths(p, p), NotComposable);
}

TEST_CASE("Haefliger paths: validation, composition, inversion") {
  BaseGroupoid g = circle();
  LazyHaefligerPath loop;
  loop.arrows = {base_unit(g, g.point_on_circle(0, 0.0)),
                 cech_arrow(g, 1.6, 0, 1), cech_arrow(g, 4.6, 1, 0),
                 base_unit(g, g.point_on_circle(0, 0.0))};
  loop.paths = {line_path(0, v1(0.0), v1(1.6)), line_path(1, v1(1.6), v1(4.6)),
                line_path(0, v1(4.6 - 2 * M_PI), v1(0.0))};
  CHECK_NOTHROW(validate_haefliger(loop));
  CHECK(loop.order() == 3);
  CHECK(points_close(loop.start(), loop.end()));

  LazyHaefligerPath two = haefliger_compose(loop, loop);
  CHECK_NOTHROW(validate_haefliger(two));
  CHECK(two.order() == 6);

  LazyHaefligerPath inv = haefliger_invert(loop);
  CHECK_NOTHROW(validate_haefliger(inv));
  CHECK(points_close(inv.start(), loop.end()));
  CHECK(points_close(inv.end(), loop.start()));

  LazyHaefligerPath broken = loop;
  broken.paths[0] = line_path(0, v1(0.1), v1(1.6));
  CHECK_THROWS_AS(validate_haefliger(broken), NotComposable);
}

TEST_CASE("equivalence moves preserve endpoints and validity") {
  BaseGroupoid g = circle();
  LazyHaefligerPath loop;
  loop.arrows = {base_unit(g, g.point_on_circle(0, 0.0)),
                 cech_arrow(g, 1.6, 0, 1), cech_arrow(g, 4.6, 1, 0),
                 base_unit(g, g.point_on_circle(0, 0.0))};
  loop.paths = {line_path(0, v1(0.0), v1(1.6)), line_path(1, v1(1.6), v1(4.6)),
                line_path(0, v1(4.6 - 2 * M_PI), v1(0.0))};

  for (HaefligerMove mv : {HaefligerMove::add_constant, HaefligerMove::add_identity}) {
    LazyHaefligerPath out = equivalence_move(loop, mv, 0);
    CHECK_NOTHROW(validate_haefliger(out));
    CHECK(points_close(out.start(), loop.start()));
    CHECK(points_close(out.end(), loop.end()));
    CHECK(out.order() == loop.order() + 1);
  }
  // add then remove a constant plateau restores the order
  LazyHaefligerPath padded = equivalence_move(loop, HaefligerMove::add_constant, 1);
  LazyHaefligerPath back =
      equivalence_move(padded, HaefligerMove::remove_constant, 1);
  CHECK(back.order() == loop.order());
  CHECK_NOTHROW(validate_haefliger(back));
  CHECK_THROWS_AS(equivalence_move(loop, HaefligerMove::remove_constant, 0),
                  MoveNotApplicable);

  // conjugation by an arrow curve zeta over paths[0]
  LazyHaefligerPath conj = equivalence_move(
      loop, HaefligerMove::conjugate_by_zeta, 0,
      [&g, &loop](double t) {
        return cech_arrow(g, loop.paths[0].at(t)(0), 0, 0);
      });
  CHECK_NOTHROW(validate_haefliger(conj));
  CHECK(points_close(conj.start(), loop.start()));
}

TEST_CASE("base functors map Haefliger paths") {
  BaseGroupoid fine = cech_circle({{-2.0, 2.0}, {1.2, 3.6}, {3.0, 5.1}});
  BaseGroupoid coarse = circle();
  BaseFunctor F;
  F.dom = &fine;
  F.cod = &coarse;
  auto chart_map = [](int c) { return c == 0 ? 0 : 1; };
  F.F0 = [&coarse, &fine, chart_map](const BasePoint& p) {
    double theta = fine.canonical_angle(p.x(0));
    return coarse.point_on_circle(chart_map(p.chart), theta);
  };
  F.F1 = [&coarse, chart_map](const BaseArrow& a) -> BaseArrow {
    if (is_unit_arrow(a))
      return base_unit(coarse, coarse.point_on_circle(chart_map(a.src.chart),
                                                      a.gpd->canonical_angle(
                                                          a.src.x(0))));
    return cech_arrow(coarse, a.theta, chart_map(a.i), chart_map(a.j));
  };

  LazyHaefligerPath gamma;
  gamma.arrows = {base_unit(fine, fine.point_on_circle(0, 0.0)),
                  cech_arrow(fine, 1.5, 0, 1), cech_arrow(fine, 3.2, 1, 2),
                  cech_arrow(fine, 4.6, 2, 0),
                  base_unit(fine, fine.point_on_circle(0, 0.0))};
  gamma.paths = {line_path(0, v1(0.0), v1(1.5)), line_path(1, v1(1.5), v1(3.2)),
                 line_path(2, v1(3.2), v1(4.6)),
                 line_path(0, v1(4.6 - 2 * M_PI), v1(0.0))};
  CHECK_NOTHROW(validate_haefliger(gamma));

  LazyHaefligerPath mapped = map_haefliger(F, gamma);
  CHECK_NOTHROW(validate_haefliger(mapped));
  CHECK(mapped.order() == gamma.order());
  CHECK(points_close(mapped.start(), coarse.point_on_circle(0, 0.0)));
}
