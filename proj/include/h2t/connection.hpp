#pragma once

// Strict and semi-strict connection 1-forms on decorated bundles. Tangent
// vectors are represented uniformly as curves through t = 0; all pushforwards
// of structure maps are computed by differentiating the mapped curve, so
// every multiplicativity/equivariance identity can be checked numerically.

#include "h2t/two_bundle.hpp"

namespace h2t {

struct NotBaseInvariant : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotEquivariantLambda : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TauNotInjective : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotGauge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using E0Curve = std::function<E0Point(double)>;
using DecCurve = std::function<DecoratedArrow(double)>;
using ArrowCurve = std::function<BaseArrow(double)>;

// Central difference with one Richardson step.
inline Mat fd_mat(const std::function<Mat(double)>& f, double h = 1e-5) {
  auto central = [&](double s) { return Mat((f(s) - f(-s)) / (2.0 * s)); };
  return (4.0 * central(h / 2.0) - central(h)) / 3.0;
}

inline Vec fd_vec(const std::function<Vec(double)>& f, double h = 1e-5) {
  auto central = [&](double s) { return Vec((f(s) - f(-s)) / (2.0 * s)); };
  return (4.0 * central(h / 2.0) - central(h)) / 3.0;
}

// ---------------------------------------------------------------------------
// Local forms and the assembled connection forms

// Per-chart L(G)-valued 1-form on X0, linear in the velocity argument.
struct LocalForm {
  std::function<Mat(int chart, const Vec& x, const Vec& v)> A;
};

// A connection 1-form evaluated on tangent curves. omega1 returns the
// (H-part, G-part) pair in L(H) (+) L(G).
struct ConnectionForm {
  const DecoratedBundle* db = nullptr;
  std::function<Mat(const E0Curve&)> omega0;
  std::function<std::pair<Mat, Mat>(const DecCurve&)> omega1;
};

// Fundamental vertical curves.
inline E0Curve vertical_curve(const E0Point& p, const Mat& B) {
  return [p, B](double t) { return E0Point{p.x, Mat(p.g * mat_exp(t * B))}; };
}

inline DecCurve vertical_dec_curve(const DecoratedBundle& db, const DecoratedArrow& d,
                                   const Mat& A, const Mat& B) {
  const DecoratedBundle* dbp = &db;
  return [dbp, d, A, B](double t) {
    TwoGroupArrow a{dbp->data.cm, mat_exp(t * A), mat_exp(t * B)};
    return dbp->act(d, a);
  };
}

// omega0 of the model connection: at p = (x, g), on (v, xi) with xi = g X,
// omega0 = Ad_{g^{-1}} A(x, v) + X.
inline Mat eval_omega0_local(const LocalForm& lf, const E0Curve& c) {
  const E0Point p0 = c(0.0);
  Vec v = fd_vec([&](double t) { return c(t).x.x; });
  Mat xi = fd_mat([&](double t) { return c(t).g; });
  Mat ginv = p0.g.inverse();
  return ginv * lf.A(p0.x.chart, p0.x.x, v) * p0.g + ginv * xi;
}

// ---------------------------------------------------------------------------
// Arrow-curve samplers (per base kind)

inline ArrowCurve sample_arrow_curve(const BaseGroupoid& base, std::mt19937_64& rng,
                                     double drift_scale = 0.05) {
  BaseSampler s = make_sampler(base);
  std::uniform_real_distribution<double> u(-drift_scale, drift_scale);
  switch (base.kind) {
    case BaseKind::discrete: {
      BasePoint p = s.point(rng);
      const BaseGroupoid* b = &base;
      return [b, p](double) { return base_unit(*b, p); };
    }
    case BaseKind::pair: {
      BasePoint p = s.point(rng), q = s.point(rng);
      Vec vp(p.x.size()), vq(q.x.size());
      for (int d = 0; d < vp.size(); ++d) vp(d) = u(rng);
      for (int d = 0; d < vq.size(); ++d) vq(d) = u(rng);
      const BaseGroupoid* b = &base;
      return [b, p, q, vp, vq](double t) {
        return pair_arrow(*b, Vec(p.x + t * vp), Vec(q.x + t * vq));
      };
    }
    case BaseKind::cech: {
      // Draw an arrow, then drift the angle keeping it inside both arcs.
      BaseArrow a = s.arrow(rng);
      double w = u(rng);
      double theta = a.theta;
      const BaseGroupoid* b = &base;
      int i = a.i, j = a.j;
      return [b, theta, w, i, j](double t) {
        return cech_arrow(*b, theta + t * w, i, j);
      };
    }
    case BaseKind::action: {
      BasePoint p = s.point(rng);
      Vec vp(p.x.size());
      for (int d = 0; d < vp.size(); ++d) vp(d) = u(rng);
      Mat k = random_group(*base.K, rng, 0.5);
      Mat Y = random_algebra(*base.K, rng, drift_scale);
      const BaseGroupoid* b = &base;
      return [b, p, vp, k, Y](double t) {
        return action_arrow(*b, Mat(k * mat_exp(t * Y)), Vec(p.x + t * vp));
      };
    }
  }
  throw std::logic_error("unreachable");
}

// Arrow curve whose source tracks a prescribed moving base point.
inline ArrowCurve arrow_curve_from(const BaseGroupoid& base,
                                   const std::function<BasePoint(double)>& pt,
                                   std::mt19937_64& rng) {
  switch (base.kind) {
    case BaseKind::discrete: {
      const BaseGroupoid* b = &base;
      return [b, pt](double t) { return base_unit(*b, pt(t)); };
    }
    case BaseKind::pair: {
      BaseSampler s = make_sampler(base);
      BasePoint q = s.point(rng);
      const BaseGroupoid* b = &base;
      return [b, pt, q](double t) { return pair_arrow(*b, pt(t).x, q.x); };
    }
    case BaseKind::cech: {
      BasePoint p0 = pt(0.0);
      double theta0 = base.canonical_angle(p0.x(0));
      std::vector<int> cs;
      for (int c = 0; c < static_cast<int>(base.charts.size()); ++c) {
        try {
          base.chart_coord(c, theta0);
          cs.push_back(c);
        } catch (const ChartMismatch&) {
        }
      }
      std::uniform_int_distribution<int> pick(0, static_cast<int>(cs.size()) - 1);
      int j = cs[pick(rng)];
      const BaseGroupoid* b = &base;
      int i = p0.chart;
      return [b, pt, i, j](double t) {
        BasePoint p = pt(t);
        return cech_arrow(*b, b->canonical_angle(p.x(0)), i, j);
      };
    }
    case BaseKind::action: {
      Mat k = random_group(*base.K, rng, 0.5);
      const BaseGroupoid* b = &base;
      return [b, pt, k](double t) { return action_arrow(*b, k, pt(t).x); };
    }
  }
  throw std::logic_error("unreachable");
}

// Random decorated-arrow curve.
inline DecCurve sample_dec_curve(const DecoratedBundle& db, std::mt19937_64& rng,
                                 double drift_scale = 0.05) {
  const CrossedModule& cm = db.cm();
  ArrowCurve gc = sample_arrow_curve(db.base(), rng, drift_scale);
  Mat g0 = random_group(*cm.G, rng, 0.5);
  Mat Xg = random_algebra(*cm.G, rng, drift_scale);
  Mat h0 = random_group(*cm.H, rng, 0.5);
  Mat Xh = random_algebra(*cm.H, rng, drift_scale);
  return [gc, g0, Xg, h0, Xh](double t) {
    BaseArrow gamma = gc(t);
    E0Point p{base_source(gamma), Mat(g0 * mat_exp(t * Xg))};
    return DecoratedArrow{gamma, p, Mat(h0 * mat_exp(t * Xh))};
  };
}

// ---------------------------------------------------------------------------
// Base invariance and the omega^dec builder

// Residual of omega_p(v) = omega_{mu(gamma,p)}(mu_*(X, v)) on random samples.
inline CheckReport base_invariance_check(const DecoratedBundle& db,
                                         const LocalForm& lf, int n_samples,
                                         std::uint64_t seed = 14) {
  std::mt19937_64 rng(seed);
  const CrossedModule& cm = db.cm();
  CheckReport rep{"base-invariance"};
  rep.record("pullback", 0.0);
  for (int i = 0; i < n_samples; ++i) {
    ArrowCurve gc = sample_arrow_curve(db.base(), rng);
    Mat g0 = random_group(*cm.G, rng, 0.5);
    Mat Xg = random_algebra(*cm.G, rng, 0.05);
    E0Curve pc = [gc, g0, Xg](double t) {
      return E0Point{base_source(gc(t)), Mat(g0 * mat_exp(t * Xg))};
    };
    const ConnectorBundle* cb = &db.data;
    E0Curve qc = [cb, gc, pc](double t) { return cb->mu(gc(t), pc(t)); };
    rep.record("pullback",
               (eval_omega0_local(lf, pc) - eval_omega0_local(lf, qc)).norm());
  }
  return rep;
}

inline ConnectionForm build_omega_dec(const DecoratedBundle& db, const LocalForm& lf,
                                      int check_samples = 30,
                                      double inv_tol = 1e-6) {
  if (!base_invariance_check(db, lf, check_samples).pass(inv_tol))
    throw NotBaseInvariant("build_omega_dec: local form not connector-invariant");
  ConnectionForm form;
  form.db = &db;
  form.omega0 = [lf](const E0Curve& c) { return eval_omega0_local(lf, c); };
  const CrossedModule* cm = db.data.cm;
  form.omega1 = [lf, cm](const DecCurve& dc) {
    const DecoratedArrow d0 = dc(0.0);
    Mat B = eval_omega0_local(lf, [&dc](double t) { return dc(t).p; });
    Mat K = fd_mat([&dc](double t) { return dc(t).h; });
    Mat hinv = d0.h.inverse();
    Mat Hpart = d0.h * cm->alpha_bar_h_diff(hinv, B) - K * hinv;
    return std::make_pair(Hpart, B);
  };
  return form;
}

// ---------------------------------------------------------------------------
// Strict-form verification

inline CheckReport strict_form_check(const ConnectionForm& form, int n_samples,
                                     std::uint64_t seed = 15,
                                     double vertical_scale = 0.5) {
  const DecoratedBundle& db = *form.db;
  const CrossedModule& cm = db.cm();
  std::mt19937_64 rng(seed);
  CheckReport rep{"strict-form"};
  for (const char* k : {"source", "target", "multiplicativity", "vertical-0",
                        "vertical-1", "equivariance"})
    rep.record(k, 0.0);
  for (int i = 0; i < n_samples; ++i) {
    DecCurve dc = sample_dec_curve(db, rng);
    auto [H1, G1] = form.omega1(dc);
    // source condition: omega_{1G} = s^* omega_0
    const DecoratedBundle* dbp = &db;
    rep.record("source",
               (G1 - form.omega0([&dc, dbp](double t) { return dbp->source(dc(t)); }))
                   .norm());
    // target condition: t^* omega_0 = s^* omega_0 + tau(omega_{1H})
    rep.record(
        "target",
        (form.omega0([&dc, dbp](double t) { return dbp->target(dc(t)); }) -
         (G1 + cm.tau_diff(H1)))
            .norm());
    // multiplicativity of the H component across composition
    {
      std::function<BasePoint(double)> tgt_pt = [&dc, dbp](double t) {
        return dbp->target(dc(t)).x;
      };
      ArrowCurve g2c = arrow_curve_from(db.base(), tgt_pt, rng);
      Mat h20 = random_group(*cm.H, rng, 0.5);
      Mat Xh2 = random_algebra(*cm.H, rng, 0.05);
      DecCurve dc2 = [g2c, dbp, &dc, h20, Xh2](double t) {
        return DecoratedArrow{g2c(t), dbp->target(dc(t)),
                              Mat(h20 * mat_exp(t * Xh2))};
      };
      DecCurve mc = [dbp, &dc, dc2](double t) {
        return dbp->compose(dc2(t), dc(t));
      };
      auto [H2, G2] = form.omega1(dc2);
      auto [Hm, Gm] = form.omega1(mc);
      rep.record("multiplicativity", (Hm - (H1 + H2)).norm());
    }
    // vertical reproduction at both levels
    {
      E0Point p{make_sampler(db.base()).point(rng), random_group(*cm.G, rng, 0.5)};
      Mat B = random_algebra(*cm.G, rng, vertical_scale);
      rep.record("vertical-0", (form.omega0(vertical_curve(p, B)) - B).norm());
      Mat A = random_algebra(*cm.H, rng, vertical_scale);
      DecoratedArrow d0 = dc(0.0);
      auto [Hv, Gv] = form.omega1(vertical_dec_curve(db, d0, A, B));
      rep.record("vertical-1", std::max((Hv - A).norm(), (Gv - B).norm()));
    }
    // 2-group equivariance: omega1(dc . a) = ad_{a^{-1}}(omega1(dc))
    {
      TwoGroupArrow a{&cm, random_group(*cm.H, rng, 0.5),
                      random_group(*cm.G, rng, 0.5)};
      DecCurve ac = [dbp, &dc, a](double t) { return dbp->act(dc(t), a); };
      auto [Ha, Ga] = form.omega1(ac);
      TwoAlgebraArrow expect =
          adjoint_algebra(tg_tensor_inverse(a), TwoAlgebraArrow{&cm, H1, G1});
      rep.record("equivariance",
                 std::max((Ha - expect.A).norm(), (Ga - expect.B).norm()));
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Semi-strict forms from a lambda twist

// G-equivariant L(H)-valued 1-form on E0, evaluated on tangent curves.
using LambdaForm = std::function<Mat(const E0Curve&)>;

inline void check_lambda_equivariance(const DecoratedBundle& db,
                                      const LambdaForm& lambda, int n_samples = 20,
                                      std::uint64_t seed = 16, double tol = 1e-8) {
  const CrossedModule& cm = db.cm();
  std::mt19937_64 rng(seed);
  BaseSampler s = make_sampler(db.base());
  for (int i = 0; i < n_samples; ++i) {
    BasePoint x = s.point(rng);
    Vec v(x.x.size());
    std::uniform_real_distribution<double> u(-0.05, 0.05);
    for (int d = 0; d < v.size(); ++d) v(d) = u(rng);
    Mat g0 = random_group(*cm.G, rng, 0.5);
    Mat Xg = random_algebra(*cm.G, rng, 0.05);
    E0Curve c = [x, v, g0, Xg](double t) {
      return E0Point{BasePoint{x.chart, Vec(x.x + t * v)}, Mat(g0 * mat_exp(t * Xg))};
    };
    Mat g = random_group(*cm.G, rng, 0.5);
    E0Curve cg = [c, g](double t) { return e0_act(c(t), g); };
    if ((lambda(cg) - cm.alpha_g_diff(Mat(g.inverse()), lambda(c))).norm() > tol)
      throw NotEquivariantLambda("lambda form is not alpha-equivariant");
  }
}

inline ConnectionForm semi_strict_from_lambda(const ConnectionForm& form,
                                              const LambdaForm& lambda,
                                              bool check = true) {
  if (check) check_lambda_equivariance(*form.db, lambda);
  const CrossedModule* cm = form.db->data.cm;
  ConnectionForm out;
  out.db = form.db;
  out.omega0 = [form, lambda, cm](const E0Curve& c) {
    return Mat(form.omega0(c) + cm->tau_diff(lambda(c)));
  };
  const DecoratedBundle* dbp = form.db;
  out.omega1 = [form, lambda, cm, dbp](const DecCurve& dc) {
    auto [H1, G1] = form.omega1(dc);
    Mat ls = lambda([&dc, dbp](double t) { return dbp->source(dc(t)); });
    Mat lt = lambda([&dc, dbp](double t) { return dbp->target(dc(t)); });
    return std::make_pair(Mat(H1 + lt - ls), Mat(G1 + cm->tau_diff(ls)));
  };
  return out;
}

// Solve omega0(delta_p(B)) - B = -tau(kappa(p, B)) for kappa in L(H).
inline Mat kappa_deviation(const ConnectionForm& form, const E0Point& p, const Mat& B) {
  const CrossedModule& cm = *form.db->data.cm;
  std::vector<Mat> img;
  for (const Mat& a : cm.H->basis) img.push_back(cm.tau_diff(a));
  const int k = static_cast<int>(img.size());
  Mat r = B - form.omega0(vertical_curve(p, B));  // = tau(kappa)
  if (k == 0) {
    if (r.norm() > 1e-7) throw TauNotInjective("kappa: tau has trivial image");
    return Mat::Zero(cm.H->ambient_dim, cm.H->ambient_dim);
  }
  Eigen::MatrixXd M(r.size(), k);
  for (int i = 0; i < k; ++i)
    M.col(i) = Eigen::Map<const Vec>(img[i].data(), img[i].size());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.rank() < k)
    throw TauNotInjective("kappa: tau differential not injective");
  Vec c = svd.solve(Eigen::Map<const Vec>(r.data(), r.size()));
  Mat kappa = Mat::Zero(cm.H->ambient_dim, cm.H->ambient_dim);
  for (int i = 0; i < k; ++i) kappa += c(i) * cm.H->basis[i];
  if ((M * c - Eigen::Map<const Vec>(r.data(), r.size())).norm() > 1e-6)
    throw TauNotInjective("kappa: residual not in tau(L(H))");
  return kappa;
}

// ---------------------------------------------------------------------------
// Gauge transformations

struct GaugeTransform {
  const DecoratedBundle* db = nullptr;
  std::function<Mat(const E0Point&)> sigma0;  // E0 -> G
  // (gamma, p) -> (H-part, G-part) of sigma-bar on s^*E0.
  std::function<std::pair<Mat, Mat>(const BaseArrow&, const E0Point&)> sigma_bar1;

  // sigma on a decorated arrow: (h, e) sigma_bar1(gamma, p) (h^{-1}, e).
  TwoGroupArrow sigma1(const DecoratedArrow& d) const {
    const CrossedModule& cm = db->cm();
    auto [sh, sg] = sigma_bar1(d.gamma, d.p);
    TwoGroupArrow mid{&cm, sh, sg};
    TwoGroupArrow left{&cm, d.h, cm.eG()};
    TwoGroupArrow right{&cm, Mat(d.h.inverse()), cm.eG()};
    return tg_tensor(left, tg_tensor(mid, right));
  }
};

// Pointwise product of gauge transformations.
inline GaugeTransform gauge_product(const GaugeTransform& a, const GaugeTransform& b) {
  GaugeTransform out;
  out.db = a.db;
  auto a0 = a.sigma0, b0 = b.sigma0;
  out.sigma0 = [a0, b0](const E0Point& p) { return Mat(a0(p) * b0(p)); };
  auto a1 = a.sigma_bar1, b1 = b.sigma_bar1;
  const CrossedModule* cm = a.db->data.cm;
  out.sigma_bar1 = [a1, b1, cm](const BaseArrow& g, const E0Point& p) {
    auto [ah, ag] = a1(g, p);
    auto [bh, bg] = b1(g, p);
    TwoGroupArrow prod = tg_tensor(TwoGroupArrow{cm, ah, ag}, TwoGroupArrow{cm, bh, bg});
    return std::make_pair(prod.h, prod.g);
  };
  return out;
}

// Equivariance and functoriality invariants of a gauge transformation.
inline CheckReport gauge_check(const GaugeTransform& s, int n_samples,
                               std::uint64_t seed = 17) {
  const DecoratedBundle& db = *s.db;
  const CrossedModule& cm = db.cm();
  std::mt19937_64 rng(seed);
  BaseSampler bs = make_sampler(db.base());
  CheckReport rep{"gauge"};
  for (const char* k : {"equivariance-0", "equivariance-1", "source", "target",
                        "composition"})
    rep.record(k, 0.0);
  for (int i = 0; i < n_samples; ++i) {
    E0Point p{bs.point(rng), random_group(*cm.G, rng, 0.5)};
    Mat g = random_group(*cm.G, rng, 0.5);
    rep.record("equivariance-0",
               (s.sigma0(e0_act(p, g)) - Ad(Mat(g.inverse()), s.sigma0(p))).norm());
    BaseArrow gamma = bs.arrow_from(rng, p.x);
    DecoratedArrow d{gamma, p, random_group(*cm.H, rng, 0.5)};
    // sigma_{gamma (h,g)} = alpha_{g^{-1}}(Ad_{h^{-1}} sigma_gamma), realized
    // through the arrow-level action.
    {
      TwoGroupArrow a{&cm, random_group(*cm.H, rng, 0.5), g};
      TwoGroupArrow lhs = s.sigma1(db.act(d, a));
      TwoGroupArrow rhs = adjoint_group(tg_tensor_inverse(a), s.sigma1(d));
      rep.record("equivariance-1",
                 std::max((lhs.h - rhs.h).norm(), (lhs.g - rhs.g).norm()));
    }
    // functoriality: source/target/composition conditions
    TwoGroupArrow sd = s.sigma1(d);
    rep.record("source", (tg_source(sd) - s.sigma0(db.source(d))).norm());
    rep.record("target", (tg_target(sd) - s.sigma0(db.target(d))).norm());
    {
      BaseArrow g2 = bs.arrow_from(rng, db.target(d).x);
      DecoratedArrow d2{g2, db.target(d), random_group(*cm.H, rng, 0.5)};
      TwoGroupArrow lhs = s.sigma1(db.compose(d2, d));
      TwoGroupArrow rhs = tg_compose(s.sigma1(d2), s.sigma1(d));
      rep.record("composition",
                 std::max((lhs.h - rhs.h).norm(), (lhs.g - rhs.g).norm()));
    }
  }
  return rep;
}

// Gauge action on connection forms: Ad_sigma(omega) - (d sigma) sigma^{-1}.
inline ConnectionForm gauge_action(const GaugeTransform& s, const ConnectionForm& form,
                                   bool check = true, int check_samples = 20) {
  if (check && !gauge_check(s, check_samples).pass(1e-9))
    throw NotGauge("gauge_action: sigma fails gauge invariants");
  const CrossedModule* cm = form.db->data.cm;
  ConnectionForm out;
  out.db = form.db;
  GaugeTransform sg = s;
  out.omega0 = [sg, form](const E0Curve& c) {
    Mat s0 = sg.sigma0(c(0.0));
    Mat ad = Ad(s0, form.omega0(c));
    Mat ds = fd_mat([&](double t) { return Mat(sg.sigma0(c(t)) * s0.inverse()); });
    return Mat(ad - ds);
  };
  out.omega1 = [sg, form, cm](const DecCurve& dc) {
    TwoGroupArrow s1 = sg.sigma1(dc(0.0));
    auto [H1, G1] = form.omega1(dc);
    TwoAlgebraArrow ad = adjoint_algebra(s1, TwoAlgebraArrow{cm, H1, G1});
    TwoGroupArrow s1inv = tg_tensor_inverse(s1);
    Mat dH = fd_mat([&](double t) {
      return tg_tensor(sg.sigma1(dc(t)), s1inv).h;
    });
    Mat dG = fd_mat([&](double t) {
      return tg_tensor(sg.sigma1(dc(t)), s1inv).g;
    });
    return std::make_pair(Mat(ad.A - dH), Mat(ad.B - dG));
  };
  return out;
}

// Extended gauge action: gauge part then the lambda-bar shift.
inline ConnectionForm extended_gauge_action(const GaugeTransform& s,
                                            const LambdaForm& lambda,
                                            const ConnectionForm& form,
                                            bool check = true) {
  ConnectionForm gauged = gauge_action(s, form, check);
  return semi_strict_from_lambda(gauged, lambda, check);
}

}  // namespace h2t
