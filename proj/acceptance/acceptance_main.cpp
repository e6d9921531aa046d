// Acceptance gate: one pass/fail line per criterion, exit code 0 iff all pass.
// Tolerances are pinned in the code below.

#include "h2t/scenario.hpp"

#include <chrono>
#include <cstdio>
#include <string>

using namespace h2t;

namespace {

int g_failures = 0;

template <class F>
void criterion(int n, const std::string& desc, F&& f) {
  bool ok = false;
  try {
    ok = f();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "criterion-%02d exception: %s\n", n, e.what());
  }
  std::printf("%s criterion-%02d %s\n", ok ? "PASS" : "FAIL", n, desc.c_str());
  if (!ok) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

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

double tg_diff(const TwoGroupArrow& a, const TwoGroupArrow& b) {
  return std::max((a.h - b.h).norm(), (a.g - b.g).norm());
}

BaseGroupoid circle() { return cech_circle({{-2.0, 2.0}, {1.2, 5.1}}); }

ConnectorBundle u1_connector(const BaseGroupoid& base, const CrossedModule& cm,
                             double jump = 0.7) {
  ConnectorBundle cb;
  cb.base = &base;
  cb.cm = &cm;
  cb.connector = [jump, &cm](const BaseArrow& a) {
    if (a.i == a.j || cm.G->ambient_dim != 2) return cm.eG();
    return mat_exp(((a.i == 0) ? jump : -jump) * J2());
  };
  return cb;
}

LocalForm kappa_form(double kappa) {
  LocalForm lf;
  lf.A = [kappa](int, const Vec&, const Vec& v) {
    return Mat(kappa * v(0) * J2());
  };
  return lf;
}

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

LazyHaefligerPath segment(const BaseGroupoid& base, int chart, double a, double b) {
  LazyHaefligerPath g;
  g.arrows = {base_unit(base, BasePoint{chart, v1(a)}),
              base_unit(base, BasePoint{chart, v1(b)})};
  g.paths = {line_path(chart, v1(a), v1(b))};
  return g;
}

GaugeTransform pure_sigma(const DecoratedBundle& db,
                          const std::function<Mat(const E0Point&)>& s0) {
  GaugeTransform gt;
  gt.db = &db;
  gt.sigma0 = s0;
  const CrossedModule* cmp = &db.cm();
  gt.sigma_bar1 = [s0, cmp](const BaseArrow&, const E0Point& q) {
    return std::make_pair(cmp->eH(), s0(q));
  };
  return gt;
}

}  // namespace

int main() {
  criterion(1, "Peiffer identities on the full catalog (200 samples, <= 1e-9, < 5 s)",
            [] {
              auto t0 = std::chrono::steady_clock::now();
              bool ok = true;
              for (const std::string& name : crossed_module_core_catalog_names())
                ok = ok && peiffer_check(crossed_module_catalog(name), 200, 0.5)
                               .pass(1e-9);
              return ok && seconds_since(t0) < 5.0;
            });

  criterion(2, "2-group interchange and groupoid axioms (<= 1e-10); adjoints (<= 1e-5)",
            [] {
              bool ok = true;
              for (const std::string& name : crossed_module_core_catalog_names()) {
                const CrossedModule& cm = crossed_module_catalog(name);
                ok = ok && interchange_check(cm, 200).pass(1e-10);
                std::mt19937_64 rng(5);
                double worst = 0.0;
                for (int i = 0; i < 200; ++i) {
                  TwoGroupArrow k1{&cm, random_group(*cm.H, rng, 0.4),
                                   random_group(*cm.G, rng, 0.4)};
                  TwoGroupArrow k2{&cm, random_group(*cm.H, rng, 0.4),
                                   tg_target(k1)};
                  TwoGroupArrow k3{&cm, random_group(*cm.H, rng, 0.4),
                                   tg_target(k2)};
                  TwoGroupArrow c = tg_compose(k2, k1);
                  worst = std::max(worst, (tg_source(c) - tg_source(k1)).norm());
                  worst = std::max(worst, (tg_target(c) - tg_target(k2)).norm());
                  worst = std::max(
                      worst, tg_diff(tg_compose(k3, c),
                                     tg_compose(tg_compose(k3, k2), k1)));
                  worst = std::max(
                      worst, tg_diff(tg_compose(tg_unit(cm, tg_target(k1)), k1), k1));
                  worst = std::max(
                      worst, tg_diff(tg_compose(k1, tg_unit(cm, tg_source(k1))), k1));
                  worst = std::max(worst,
                                   tg_diff(tg_compose(tg_invert(k1), k1),
                                           tg_unit(cm, tg_source(k1))));
                }
                ok = ok && worst <= 1e-10;
              }
              // adjoint_algebra against a finite difference of adjoint_group
              for (const std::string& name : {"conj", "so3-conj", "rplus-r"}) {
                const CrossedModule& cm = crossed_module_catalog(name);
                std::mt19937_64 rng(6);
                for (int i = 0; i < 25; ++i) {
                  TwoGroupArrow a{&cm, random_group(*cm.H, rng, 0.5),
                                  random_group(*cm.G, rng, 0.5)};
                  Mat A = random_algebra(*cm.H, rng, 0.5);
                  Mat B = random_algebra(*cm.G, rng, 0.5);
                  TwoAlgebraArrow got =
                      adjoint_algebra(a, TwoAlgebraArrow{&cm, A, B});
                  auto curve = [&](double t) {
                    return adjoint_group(
                        a, TwoGroupArrow{&cm, mat_exp(t * A), mat_exp(t * B)});
                  };
                  Mat dh = fd_mat([&](double t) { return curve(t).h; });
                  Mat dg = fd_mat([&](double t) { return curve(t).g; });
                  ok = ok && (got.A - dh).norm() <= 1e-5 &&
                       (got.B - dg).norm() <= 1e-5;
                }
              }
              return ok;
            });

  criterion(3, "decorated bundle over the 2-chart circle with U(1) transitions (<= 1e-10)",
            [] {
              BaseGroupoid base = circle();
              const CrossedModule& cm = crossed_module_catalog("so2-conj");
              DecoratedBundle db = build_decorated(u1_connector(base, cm));
              QuasiConnection C = canonical_categorical_connection(db);
              return connector_cocycle_check(db.data, 200).pass(1e-10) &&
                     decorated_axioms_check(db, 200).pass(1e-10) &&
                     quasi_connection_check(db, C, 200).pass(1e-10) &&
                     categorical_connection_check(db, C, 200).pass(1e-10);
            });

  criterion(4, "Grothendieck round trip, categorical and twisted (<= 1e-9 / 1e-10)",
            [] {
              BaseGroupoid base = circle();
              const CrossedModule& cm = crossed_module_catalog("so2-conj");
              DecoratedBundle db = build_decorated(u1_connector(base, cm));
              QuasiConnection cat = canonical_categorical_connection(db);
              bool ok = true;
              std::vector<QuasiConnection> conns = {cat};
              for (double angle : {0.3, -0.55}) {
                Mat h = mat_exp(angle * J2());
                conns.push_back(quasi_from_twist(
                    db, cat,
                    [h](const BaseArrow&, const E0Point&) { return h; }));
              }
              for (const QuasiConnection& C : conns) {
                PseudoBundle pb = extract_pseudo(db, C);
                ok = ok && coherence_check(pb, 100).pass(1e-9);
                grothendieck(pb);  // throws on failure
                ok = ok && theta_roundtrip_check(db, C, 100).pass(1e-10);
                ok = ok && roundtrip_idempotence_check(db, C, 100).pass(1e-10);
              }
              return ok;
            });

  criterion(5, "strict connection form (<= 1e-5, vertical <= 1e-8); kappa matches lambda (<= 1e-7)",
            [] {
              BaseGroupoid base = circle();
              const CrossedModule& cm = crossed_module_catalog("so2-conj");
              DecoratedBundle db = build_decorated(u1_connector(base, cm));
              ConnectionForm form = build_omega_dec(db, kappa_form(0.7));
              CheckReport rep = strict_form_check(form, 40);
              bool ok = rep.pass(1e-5);
              for (const auto& [k, r] : rep.residuals)
                if (k == "vertical-0") ok = ok && r <= 1e-8;

              LambdaForm lam = [](const E0Curve& c) {
                Mat g0 = c(0.0).g;
                Mat xi = fd_mat([&c](double t) { return c(t).g; });
                return Mat(0.17 * (g0.inverse() * xi));
              };
              ConnectionForm ss = semi_strict_from_lambda(form, lam);
              std::mt19937_64 rng(7);
              BaseSampler bs = make_sampler(base);
              for (int i = 0; i < 20; ++i) {
                E0Point p{bs.point(rng), random_group(*cm.G, rng, 0.5)};
                Mat B = random_algebra(*cm.G, rng, 0.5);
                Mat kap = kappa_deviation(ss, p, B);
                ok = ok && (kap + lam(vertical_curve(p, B))).norm() <= 1e-7;
              }
              return ok;
            });

  criterion(6, "circle holonomy oracle, kappa in {0.25, 1/3, 0.7} (<= 1e-8, halving >= 8x, < 2 s/loop)",
            [] {
              BaseGroupoid base = circle();
              const CrossedModule& cm = crossed_module_catalog("so2-conj");
              DecoratedBundle db = build_decorated(u1_connector(base, cm));
              QuasiConnection C = canonical_categorical_connection(db);
              LazyHaefligerPath loop = circle_loop(base);
              bool ok = true;
              for (double kappa : {0.25, 1.0 / 3.0, 0.7}) {
                LocalForm lf = kappa_form(kappa);
                Mat expect = mat_exp(-2 * M_PI * kappa * J2());
                IntegratorConfig cfg;
                cfg.step = 1e-3;
                auto t0 = std::chrono::steady_clock::now();
                TorsorMap T = haefliger_transport(db, C, lf, loop, cfg);
                double secs = seconds_since(t0);
                double e1 = (T.g_rep - expect).norm();
                cfg.step = 5e-4;
                double e2 =
                    (haefliger_transport(db, C, lf, loop, cfg).g_rep - expect)
                        .norm();
                ok = ok && e1 <= 1e-8 && e1 / e2 >= 8.0 && secs < 2.0;
              }
              return ok;
            });

  criterion(7, "thin homotopy invariance of the transport class (<= 1e-6)",
            [] {
              bool ok = true;
              for (const std::string& file :
                   {"scenarios/circle-u1.json", "scenarios/circle-so3.json"}) {
                Scenario sc = load_scenario(file);
                const CrossedModule& cm = *sc.cm;
                for (const auto& [pname, path] : sc.paths) {
                  TorsorMap T =
                      haefliger_transport(*sc.db, sc.C, sc.lf, path, sc.cfg);
                  auto same = [&](const LazyHaefligerPath& g) {
                    return torsor_class_distance(
                               cm, haefliger_transport(*sc.db, sc.C, sc.lf, g,
                                                       sc.cfg),
                               T) <= 1e-6;
                  };
                  // five reparametrizations
                  std::vector<std::function<double(double)>> phis = {
                      [](double t) { return t * t * (3 - 2 * t); },
                      [](double t) {
                        return t * t * t * (10 - 15 * t + 6 * t * t);
                      },
                      [](double t) { return 0.5 * (1 - std::cos(M_PI * t)); },
                      [](double t) { return t - 0.15 * std::sin(2 * M_PI * t); },
                      [](double t) {
                        double u = t * t * (3 - 2 * t);
                        return u * u * (3 - 2 * u);
                      }};
                  for (std::size_t i = 0; i < phis.size(); ++i) {
                    LazyHaefligerPath g = path;
                    std::size_t site = i % g.paths.size();
                    g.paths[site] = reparametrize(g.paths[site], phis[i]);
                    ok = ok && same(g);
                  }
                  // three backtrack insertions
                  for (int i = 0; i < 3; ++i) {
                    LazyHaefligerPath g = path;
                    std::size_t site = i % g.paths.size();
                    const ChartPath& a = g.paths[site];
                    ChartPath beta = line_path(
                        a.chart, a.at(1.0),
                        Vec(0.5 * (a.at(0.0) + a.at(1.0))));
                    g.paths[site] = concat_paths(
                        a, concat_paths(beta, reverse_path(beta)));
                    ok = ok && same(g);
                  }
                  // equivalence moves (constant paths, identity arrows)
                  LazyHaefligerPath g1 =
                      equivalence_move(path, HaefligerMove::add_constant, 0);
                  ok = ok && same(g1);
                  ok = ok && same(equivalence_move(
                                 g1, HaefligerMove::remove_constant, 0));
                  LazyHaefligerPath g3 =
                      equivalence_move(path, HaefligerMove::add_identity, 0);
                  ok = ok && same(g3);
                  ok = ok && same(equivalence_move(
                                 g3, HaefligerMove::remove_identity, 1));
                }
                // zeta-conjugation on an overlap segment
                LazyHaefligerPath seg = segment(*sc.base, 0, 1.3, 1.9);
                TorsorMap Ts =
                    haefliger_transport(*sc.db, sc.C, sc.lf, seg, sc.cfg);
                auto pos = seg.paths[0].position;
                const BaseGroupoid* bp = sc.base.get();
                LazyHaefligerPath g5 = equivalence_move(
                    seg, HaefligerMove::conjugate_by_zeta, 0,
                    [bp, pos](double t) {
                      return cech_arrow(*bp, pos(t)(0), 0, 1);
                    });
                ok = ok &&
                     torsor_class_distance(
                         cm, haefliger_transport(*sc.db, sc.C, sc.lf, g5, sc.cfg),
                         Ts) <= 1e-6;
              }
              return ok;
            });

  criterion(8, "transport functoriality and inversion over 20 composable pairs (<= 1e-6)",
            [] {
              BaseGroupoid base = circle();
              const CrossedModule& cm = crossed_module_catalog("discrete");
              ConnectorBundle cb;
              cb.base = &base;
              cb.cm = &cm;
              cb.connector = [&cm](const BaseArrow&) { return cm.eG(); };
              DecoratedBundle db = build_decorated(cb);
              QuasiConnection C = canonical_categorical_connection(db);
              Mat L1(3, 3), L2(3, 3);
              L1 << 0, 0, 0, 0, 0, -1, 0, 1, 0;
              L2 << 0, 0, 1, 0, 0, 0, -1, 0, 0;
              LocalForm lf;
              lf.A = [L1, L2](int, const Vec& x, const Vec& v) {
                return Mat(v(0) * (0.3 * L1 + 0.25 * std::sin(x(0)) * L2));
              };
              IntegratorConfig cfg;
              cfg.step = 1e-3;
              std::mt19937_64 rng(8);
              std::uniform_real_distribution<double> u(-1.9, 1.9);
              bool ok = true;
              for (int i = 0; i < 20; ++i) {
                double a = u(rng), b = u(rng), c = u(rng);
                LazyHaefligerPath g = segment(base, 0, a, b);
                LazyHaefligerPath gp = segment(base, 0, b, c);
                TorsorMap Tg = haefliger_transport(db, C, lf, g, cfg);
                TorsorMap Tgp = haefliger_transport(db, C, lf, gp, cfg);
                TorsorMap Tc = haefliger_transport(
                    db, C, lf, haefliger_compose(gp, g), cfg);
                ok = ok && torsor_class_distance(
                               cm, Tc, torsor_compose(Tgp, Tg)) <= 1e-6;
                TorsorMap Ti =
                    haefliger_transport(db, C, lf, haefliger_invert(g), cfg);
                ok = ok &&
                     torsor_class_distance(cm, Ti, torsor_invert(Tg)) <= 1e-6;
              }
              return ok;
            });

  criterion(9, "naturality: central shift morphism and base-functor pullback (<= 1e-6)",
            [] {
              IntegratorConfig cfg;
              cfg.step = 1e-3;
              bool ok = true;
              {
                BaseGroupoid base = circle();
                const CrossedModule& cm = crossed_module_catalog("so2-conj");
                DecoratedBundle db = build_decorated(u1_connector(base, cm));
                QuasiConnection C = canonical_categorical_connection(db);
                Mat z = mat_exp(0.9 * J2());
                auto f = [z](const E0Point& p) {
                  return E0Point{p.x, Mat(z * p.g)};
                };
                bundle_morphism_from_base(db, C, db, C, f);
                TorsorMap T = haefliger_transport(db, C, kappa_form(0.25),
                                                  circle_loop(base), cfg);
                E0Point p = db.data.basepoint(base.point_on_circle(0, 0.0));
                ok = ok && e0_distance(torsor_apply(T, f(p)),
                                       f(torsor_apply(T, p))) <= 1e-6;
              }
              {
                BaseGroupoid dom =
                    cech_circle({{-2.0, 2.0}, {1.2, 3.6}, {3.0, 5.1}});
                BaseGroupoid cod = circle();
                auto chart_map = [](int c) { return c == 0 ? 0 : 1; };
                BaseFunctor F;
                F.dom = &dom;
                F.cod = &cod;
                F.F0 = [&cod, chart_map](const BasePoint& p) {
                  return cod.point_on_circle(chart_map(p.chart), p.x(0));
                };
                F.F1 = [&cod, chart_map](const BaseArrow& a) {
                  return cech_arrow(cod, a.theta, chart_map(a.i),
                                    chart_map(a.j));
                };
                const CrossedModule& cm = crossed_module_catalog("so2-conj");
                DecoratedBundle db_cod = build_decorated(u1_connector(cod, cm));
                ConnectorBundle cb;
                cb.base = &dom;
                cb.cm = &cm;
                auto cod_conn = db_cod.data.connector;
                cb.connector = [&F, cod_conn](const BaseArrow& a) {
                  return cod_conn(F.F1(a));
                };
                DecoratedBundle db_dom = build_decorated(cb);
                LocalForm lf = kappa_form(0.25);
                LazyHaefligerPath g;
                g.arrows = {base_unit(dom, dom.point_on_circle(0, 0.0)),
                            cech_arrow(dom, 1.6, 0, 1),
                            cech_arrow(dom, 3.3, 1, 2),
                            cech_arrow(dom, 4.8, 2, 0),
                            base_unit(dom, dom.point_on_circle(0, 0.0))};
                g.paths = {line_path(0, v1(0.0), v1(1.6)),
                           line_path(1, v1(1.6), v1(3.3)),
                           line_path(2, v1(3.3), v1(4.8)),
                           line_path(0, v1(4.8 - 2 * M_PI), v1(0.0))};
                validate_haefliger(g);
                TorsorMap Td = haefliger_transport(
                    db_dom, canonical_categorical_connection(db_dom), lf, g,
                    cfg);
                TorsorMap Tc = haefliger_transport(
                    db_cod, canonical_categorical_connection(db_cod), lf,
                    map_haefliger(F, g), cfg);
                ok = ok && (Td.g_rep - Tc.g_rep).norm() <= 1e-6 &&
                     points_close(F.F0(Td.src), Tc.src) &&
                     points_close(F.F0(Td.dst), Tc.dst);
              }
              return ok;
            });

  criterion(10, "gauge left action (<= 1e-5), 2-BF pattern (<= 1e-6), strictness preserved",
            [] {
              bool ok = true;
              BaseGroupoid base = circle();
              const CrossedModule& cm = crossed_module_catalog("so2-conj");
              DecoratedBundle db = build_decorated(u1_connector(base, cm));
              ConnectionForm form = build_omega_dec(db, kappa_form(0.7));
              const BaseGroupoid* bp = &base;
              auto mk = [&](double amp) {
                return pure_sigma(db, [bp, amp](const E0Point& q) {
                  return mat_exp(
                      amp * std::sin(bp->canonical_angle(q.x.x(0))) * J2());
                });
              };
              GaugeTransform ga = mk(0.3), gb = mk(-0.45);
              ConnectionForm lhs = gauge_action(gauge_product(gb, ga), form);
              ConnectionForm rhs = gauge_action(gb, gauge_action(ga, form));
              std::mt19937_64 rng(9);
              for (int i = 0; i < 10; ++i) {
                DecCurve dc = sample_dec_curve(db, rng);
                auto [lh, lg] = lhs.omega1(dc);
                auto [rh, rg] = rhs.omega1(dc);
                ok = ok && (lh - rh).norm() <= 1e-5 && (lg - rg).norm() <= 1e-5;
              }
              // strictness is preserved under the pure-sigma action
              ok = ok && strict_form_check(gauge_action(ga, form), 30, 99)
                             .pass(1e-5);

              // 2-BF pattern over the discrete one-chart base
              BaseGroupoid pt = discrete_groupoid({Chart{"U0", 1, {{-3.0, 3.0}}}});
              ConnectorBundle cb;
              cb.base = &pt;
              cb.cm = &cm;
              cb.connector = [&cm](const BaseArrow&) { return cm.eG(); };
              DecoratedBundle dbp = build_decorated(cb);
              LocalForm lf;
              lf.A = [](int, const Vec& x, const Vec& v) {
                return Mat(0.4 * std::cos(x(0)) * v(0) * J2());
              };
              ConnectionForm fp = build_omega_dec(dbp, lf);
              GaugeTransform gt = pure_sigma(dbp, [](const E0Point& q) {
                return mat_exp(0.3 * q.x.x(0) * J2());
              });
              auto s0 = gt.sigma0;
              LambdaForm lam = [](const E0Curve& c) {
                Vec v = fd_vec([&c](double t) { return c(t).x.x; });
                return Mat(0.25 * std::sin(c(0.0).x.x(0)) * v(0) * J2());
              };
              ConnectionForm out = extended_gauge_action(gt, lam, fp);
              std::mt19937_64 rng2(10);
              for (int i = 0; i < 15; ++i) {
                DecCurve dc = sample_dec_curve(dbp, rng2);
                E0Curve pc = [&dc](double t) { return dc(t).p; };
                Mat sig = s0(pc(0.0));
                Mat dsig = fd_mat(
                    [&](double t) { return Mat(s0(pc(t)) * sig.inverse()); });
                Mat lp = lam(pc);
                Mat pattern0 =
                    Ad(sig, fp.omega0(pc)) - dsig + cm.tau_diff(lp);
                ok = ok && (out.omega0(pc) - pattern0).norm() <= 1e-6;
                TwoGroupArrow S{&cm, cm.eH(), sig};
                auto [H1, G1] = fp.omega1(dc);
                TwoAlgebraArrow ad =
                    adjoint_algebra(S, TwoAlgebraArrow{&cm, H1, G1});
                TwoGroupArrow Sinv = tg_tensor_inverse(S);
                auto S_of = [&](double t) {
                  return TwoGroupArrow{&cm, cm.eH(), s0(dc(t).p)};
                };
                Mat dH = fd_mat(
                    [&](double t) { return tg_tensor(S_of(t), Sinv).h; });
                Mat dG = fd_mat(
                    [&](double t) { return tg_tensor(S_of(t), Sinv).g; });
                Mat d0h = dc(0.0).h;
                Mat patternH = ad.A - dH + Ad(d0h, lp) - lp;
                Mat patternG = ad.B - dG + cm.tau_diff(lp);
                auto [oH, oG] = out.omega1(dc);
                ok = ok && (oH - patternH).norm() <= 1e-6 &&
                     (oG - patternG).norm() <= 1e-6;
              }
              return ok;
            });

  criterion(11, "2-vector transport rotates by -2 pi kappa (<= 1e-7); source-target (<= 1e-6)",
            [] {
              BaseGroupoid base = circle();
              const CrossedModule& cm = crossed_module_catalog("so2-conj");
              DecoratedBundle db = build_decorated(u1_connector(base, cm));
              QuasiConnection C = canonical_categorical_connection(db);
              double kappa = 0.25;
              IntegratorConfig cfg;
              cfg.step = 1e-3;
              TorsorMap T = haefliger_transport(db, C, kappa_form(kappa),
                                                circle_loop(base), cfg);
              TwoVectorRep rep;
              rep.dim0 = 2;
              rep.rep0 = [](const Mat& g) { return g; };
              rep.rep1 = [](const Mat&, const Mat& g) { return g; };
              Mat expect = mat_exp(-2 * M_PI * kappa * J2());
              bool ok = true;
              std::mt19937_64 rng(11);
              std::uniform_real_distribution<double> u(-1.0, 1.0);
              for (int i = 0; i < 10; ++i) {
                Vec w(2);
                w << u(rng), u(rng);
                ok = ok &&
                     (vb_transport(rep, T, w) - Vec(expect * w)).norm() <= 1e-7;
              }
              ok = ok && vb_linearity_check(rep, T, 20).max_residual() == 0.0;

              LocalForm lf = kappa_form(0.7);
              ConnectionForm form = build_omega_dec(db, lf);
              auto zeta = [&base](double t) {
                return cech_arrow(base, 1.5 + 0.2 * t, 0, 1);
              };
              ok = ok && source_target_consistency_check(
                             db, form, lf, zeta, mat_exp(0.3 * J2()), cfg)
                             .pass(1e-6);
              return ok;
            });

  return g_failures == 0 ? 0 : 1;
}
