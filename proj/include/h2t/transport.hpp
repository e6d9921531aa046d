#pragma once

// Parallel transport along lazy Haefliger paths: connector jumps, horizontal
// lifts of chart paths, torsor maps between fibers, transport classes modulo
// the image of tau, and linear transport on associated 2-vector bundles.

#include "h2t/connection.hpp"

namespace h2t {

struct FiberMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ClassNotComparable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Torsor maps between fibers of E0

// A G-equivariant map between fibers, p = (x, g) |-> (dst, g_rep * g).
struct TorsorMap {
  BasePoint src;
  BasePoint dst;
  Mat g_rep;
};

inline E0Point torsor_apply(const TorsorMap& T, const E0Point& p,
                            double tol = 1e-8) {
  if (!points_close(T.src, p.x, tol))
    throw FiberMismatch("torsor_apply: point not in source fiber");
  return E0Point{T.dst, Mat(T.g_rep * p.g)};
}

inline TorsorMap torsor_compose(const TorsorMap& t2, const TorsorMap& t1,
                                double tol = 1e-8) {
  if (!points_close(t2.src, t1.dst, tol))
    throw FiberMismatch("torsor_compose: fibers do not match");
  return TorsorMap{t1.src, t2.dst, Mat(t2.g_rep * t1.g_rep)};
}

inline TorsorMap torsor_invert(const TorsorMap& t) {
  return TorsorMap{t.dst, t.src, Mat(t.g_rep.inverse())};
}

// Distance between the classes of two torsor maps modulo the tau(H)-action:
// the log of g_a * g_b^{-1} is projected onto tau_*(L(H)); the returned value
// is the norm of the component orthogonal to that image.
inline double torsor_class_distance(const CrossedModule& cm, const TorsorMap& a,
                                    const TorsorMap& b, double tol = 1e-8) {
  if (!points_close(a.src, b.src, tol) || !points_close(a.dst, b.dst, tol))
    throw ClassNotComparable("torsor_class_distance: endpoints differ");
  Mat d = mat_log(Mat(a.g_rep * b.g_rep.inverse()));
  std::vector<Mat> img = cm.tau_image_basis();
  if (img.empty()) return d.norm();
  Eigen::MatrixXd M(d.size(), static_cast<int>(img.size()));
  for (int i = 0; i < static_cast<int>(img.size()); ++i)
    M.col(i) = Eigen::Map<const Vec>(img[i].data(), img[i].size());
  Vec r = Eigen::Map<const Vec>(d.data(), d.size());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return (M * svd.solve(r) - r).norm();
}

// ---------------------------------------------------------------------------
// Elementary transports

// Transport across a base arrow via the quasi connection: the forward map
// fiber(s(gamma)) -> fiber(t(gamma)) induced by p |-> mu_C(gamma, p).
inline TorsorMap connector_transport(const DecoratedBundle& db,
                                     const QuasiConnection& C,
                                     const BaseArrow& gamma) {
  E0Point p0 = db.data.basepoint(base_source(gamma));
  E0Point q = db.target(C(gamma, p0));
  return TorsorMap{base_source(gamma), base_target(gamma), q.g};
}

// Horizontal transport along a chart path: solves a' = -A(x(t), x'(t)) a.
inline TorsorMap path_transport(const LocalForm& lf, const GroupDescriptor& G,
                                const ChartPath& alpha,
                                const IntegratorConfig& cfg = {}) {
  auto A_of_t = [&lf, &alpha](double t) {
    return Mat(-lf.A(alpha.chart, alpha.at(t), alpha.velocity(t)));
  };
  Mat a = solve_left_ode_raw(A_of_t, G.identity(), 0.0, 1.0, cfg, G.project);
  return TorsorMap{BasePoint{alpha.chart, alpha.at(0.0)},
                   BasePoint{alpha.chart, alpha.at(1.0)}, a};
}

// Full transport along a lazy Haefliger path: alternate connector jumps and
// horizontal lifts, from start() to end().
inline TorsorMap haefliger_transport(const DecoratedBundle& db,
                                     const QuasiConnection& C, const LocalForm& lf,
                                     const LazyHaefligerPath& g,
                                     const IntegratorConfig& cfg = {}) {
  validate_haefliger(g);
  TorsorMap T = connector_transport(db, C, g.arrows[0]);
  for (int i = 0; i < g.order(); ++i) {
    T = torsor_compose(path_transport(lf, *db.cm().G, g.paths[i], cfg), T);
    T = torsor_compose(connector_transport(db, C, g.arrows[i + 1]), T);
  }
  return T;
}

// ---------------------------------------------------------------------------
// Source/target consistency of horizontal lifts of arrow curves

// Given a curve of base arrows zeta on [0,1], lift it by transporting the
// source point horizontally and keeping the decoration h0 constant. Such a
// lift is omega_1-horizontal exactly when (a) its source path is
// omega_0-horizontal and (b) its target path is omega_0-horizontal as well.
// Both are checked: (a) by evaluating omega_0 along the lift at interior
// times, (b) by comparing the target's fiber value at time 1 against an
// independent horizontal integration along t(zeta(.)) seeded at time 0.
inline CheckReport source_target_consistency_check(
    const DecoratedBundle& db, const ConnectionForm& form, const LocalForm& lf,
    const std::function<BaseArrow(double)>& zeta, const Mat& h0,
    const IntegratorConfig& cfg = {}) {
  const CrossedModule& cm = db.cm();
  CheckReport rep{"source-target"};

  auto lift_along = [&](const std::function<BasePoint(double)>& x, const Mat& seed,
                        double t_end) {
    auto A_of_t = [&lf, &x](double t) {
      auto pos = [&x](double s) { return x(s).x; };
      double lo = t - 1e-6, hi = t + 1e-6;
      Vec v = (pos(hi) - pos(lo)) / (hi - lo);
      return Mat(-lf.A(x(t).chart, x(t).x, v));
    };
    if (t_end <= 0.0) return seed;
    return solve_left_ode_raw(A_of_t, seed, 0.0, t_end, cfg, cm.G->project);
  };

  auto src_pt = [&zeta](double t) { return base_source(zeta(t)); };
  auto tgt_pt = [&zeta](double t) { return base_target(zeta(t)); };

  // (a) omega_0 vanishes along the source lift at interior times.
  auto a_of = [&](double t) { return lift_along(src_pt, cm.G->identity(), t); };
  rep.record("source-horizontal", 0.0);
  for (double t0 : {0.3, 0.5, 0.7}) {
    E0Curve c = [&](double s) { return E0Point{src_pt(t0 + s), a_of(t0 + s)}; };
    rep.record("source-horizontal", form.omega0(c).norm());
  }

  // (b) the target path of the lift is itself horizontal: compare its fiber
  // value at time 1 against an independent integration along t(zeta(.)).
  auto target_fiber = [&](double t, const Mat& a_t) {
    DecoratedArrow d{zeta(t), E0Point{src_pt(t), a_t}, h0};
    return db.target(d).g;
  };
  Mat q1 = target_fiber(1.0, a_of(1.0));
  Mat b1 = lift_along(tgt_pt, target_fiber(0.0, cm.G->identity()), 1.0);
  rep.record("target-horizontal", (q1 - b1).norm());
  return rep;
}

// ---------------------------------------------------------------------------
// Associated 2-vector bundle transport

// A linear representation of the 2-group on a pair of vector spaces: rep0 acts
// on V0 through G and rep1 assigns to (h, g) a linear map commuting with the
// composition structure.
struct TwoVectorRep {
  int dim0 = 0;
  std::function<Mat(const Mat& g)> rep0;
  std::function<Mat(const Mat& h, const Mat& g)> rep1;
};

// Transport of a vector w in the fiber V0 over T.src to the fiber over T.dst.
inline Vec vb_transport(const TwoVectorRep& rep, const TorsorMap& T, const Vec& w) {
  return rep.rep0(T.g_rep) * w;
}

inline CheckReport vb_linearity_check(const TwoVectorRep& rep, const TorsorMap& T,
                                      int n_samples, std::uint64_t seed = 18) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CheckReport rep_out{"vb-linearity"};
  rep_out.record("additivity", 0.0);
  rep_out.record("homogeneity", 0.0);
  for (int i = 0; i < n_samples; ++i) {
    Vec w1(rep.dim0), w2(rep.dim0);
    for (int d = 0; d < rep.dim0; ++d) {
      w1(d) = u(rng);
      w2(d) = u(rng);
    }
    double c = u(rng);
    rep_out.record("additivity",
                   (vb_transport(rep, T, Vec(w1 + w2)) -
                    (vb_transport(rep, T, w1) + vb_transport(rep, T, w2)))
                       .norm());
    rep_out.record("homogeneity", (vb_transport(rep, T, Vec(c * w1)) -
                                   c * vb_transport(rep, T, w1))
                                      .norm());
  }
  return rep_out;
}

}  // namespace h2t
