#pragma once

// Desk-scale base Lie groupoids (discrete, pair-over-a-chart, Cech cover of
// a circle, action groupoid), arrows as explicit payloads, sitting-instant
// chart paths, and lazy Haefliger paths with equivalence-move rewriting.

#include "h2t/lie_core.hpp"

#include <numbers>
#include <optional>

namespace h2t {

struct MoveNotApplicable : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ChartMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Charts and base points

struct Chart {
  std::string id;
  int dim = 1;
  // Product of real intervals in chart coordinates. For arcs of a circle the
  // coordinate is the unrolled angle; the owning groupoid knows the period.
  std::vector<std::pair<double, double>> box;

  bool contains(const Vec& x, double slack = 1e-12) const {
    if (x.size() != dim) return false;
    for (int d = 0; d < dim; ++d)
      if (x(d) < box[d].first - slack || x(d) > box[d].second + slack) return false;
    return true;
  }
};

struct BasePoint {
  int chart = 0;
  Vec x;
};

inline bool points_close(const BasePoint& a, const BasePoint& b, double tol = 1e-9) {
  return a.chart == b.chart && (a.x - b.x).norm() <= tol;
}

// ---------------------------------------------------------------------------
// Base groupoids

enum class BaseKind { discrete, pair, cech, action };

struct BaseGroupoid;

struct BaseArrow {
  const BaseGroupoid* gpd = nullptr;
  BasePoint src, dst;
  // kind-specific payload
  double theta = 0.0;  // cech: global angle, canonical representative
  int i = 0, j = 0;    // cech: source/target chart indices
  Mat k;               // action: acting group element
};

struct BaseGroupoid {
  BaseKind kind = BaseKind::discrete;
  std::vector<Chart> charts;
  double period = 0.0;  // cech over a circle: ambient period (> 0)
  const GroupDescriptor* K = nullptr;                  // action groupoid
  std::function<Vec(const Mat&, const Vec&)> action;   // action groupoid

  double canonical_angle(double theta) const {
    double t = std::fmod(theta, period);
    if (t < 0) t += period;
    return t;
  }

  // Representative of the global angle inside chart c's arc.
  double chart_coord(int c, double theta) const {
    const auto [lo, hi] = charts[c].box[0];
    double t = theta;
    while (t < lo - 1e-12) t += period;
    while (t > hi + 1e-12) t -= period;
    if (t < lo - 1e-12)
      throw ChartMismatch("angle not in chart " + charts[c].id);
    return t;
  }

  BasePoint point_on_circle(int c, double theta) const {
    Vec x(1);
    x(0) = chart_coord(c, theta);
    return BasePoint{c, x};
  }
};

// Constructors -------------------------------------------------------------

inline BaseGroupoid discrete_groupoid(std::vector<Chart> charts) {
  BaseGroupoid g;
  g.kind = BaseKind::discrete;
  g.charts = std::move(charts);
  return g;
}

inline BaseGroupoid pair_groupoid(Chart chart) {
  BaseGroupoid g;
  g.kind = BaseKind::pair;
  g.charts = {std::move(chart)};
  return g;
}

// Cech groupoid of a cover of the circle (period 2*pi by default) by open
// arcs given in unrolled angular coordinates.
inline BaseGroupoid cech_circle(std::vector<std::pair<double, double>> arcs,
                                double period = 2.0 * std::numbers::pi) {
  BaseGroupoid g;
  g.kind = BaseKind::cech;
  g.period = period;
  for (std::size_t i = 0; i < arcs.size(); ++i)
    g.charts.push_back(Chart{"arc" + std::to_string(i), 1, {arcs[i]}});
  return g;
}

inline BaseGroupoid action_groupoid(const GroupDescriptor& K, Chart chart,
                                    std::function<Vec(const Mat&, const Vec&)> act) {
  BaseGroupoid g;
  g.kind = BaseKind::action;
  g.K = &K;
  g.charts = {std::move(chart)};
  g.action = std::move(act);
  return g;
}

// Arrow constructors / structure maps ---------------------------------------

inline BaseArrow base_unit(const BaseGroupoid& g, const BasePoint& p) {
  BaseArrow a;
  a.gpd = &g;
  a.src = a.dst = p;
  switch (g.kind) {
    case BaseKind::cech:
      a.theta = g.canonical_angle(p.x(0));
      a.i = a.j = p.chart;
      break;
    case BaseKind::action:
      a.k = g.K->identity();
      break;
    default:
      break;
  }
  return a;
}

inline BaseArrow cech_arrow(const BaseGroupoid& g, double theta, int i, int j) {
  BaseArrow a;
  a.gpd = &g;
  a.theta = g.canonical_angle(theta);
  a.i = i;
  a.j = j;
  a.src = g.point_on_circle(i, theta);
  a.dst = g.point_on_circle(j, theta);
  return a;
}

inline BaseArrow pair_arrow(const BaseGroupoid& g, const Vec& x, const Vec& y) {
  BaseArrow a;
  a.gpd = &g;
  a.src = BasePoint{0, x};
  a.dst = BasePoint{0, y};
  return a;
}

inline BaseArrow action_arrow(const BaseGroupoid& g, const Mat& k, const Vec& x) {
  BaseArrow a;
  a.gpd = &g;
  a.k = k;
  a.src = BasePoint{0, x};
  a.dst = BasePoint{0, g.action(k, x)};
  return a;
}

inline const BasePoint& base_source(const BaseArrow& a) { return a.src; }
inline const BasePoint& base_target(const BaseArrow& a) { return a.dst; }

inline bool arrows_equal(const BaseArrow& a, const BaseArrow& b, double tol = 1e-9) {
  if (a.gpd != b.gpd) return false;
  if (!points_close(a.src, b.src, tol) || !points_close(a.dst, b.dst, tol))
    return false;
  if (a.gpd->kind == BaseKind::action) return (a.k - b.k).norm() <= tol;
  return true;
}

inline BaseArrow base_compose(const BaseArrow& a2, const BaseArrow& a1,
                              double tol = 1e-9) {
  if (a1.gpd != a2.gpd || !points_close(a2.src, a1.dst, tol))
    throw NotComposable("base arrows not composable");
  const BaseGroupoid& g = *a1.gpd;
  switch (g.kind) {
    case BaseKind::discrete:
      return a1;  // only units exist
    case BaseKind::pair:
      return pair_arrow(g, a1.src.x, a2.dst.x);
    case BaseKind::cech:
      return cech_arrow(g, a1.theta, a1.i, a2.j);
    case BaseKind::action:
      return action_arrow(g, Mat(a2.k * a1.k), a1.src.x);
  }
  throw std::logic_error("unreachable");
}

inline BaseArrow base_invert(const BaseArrow& a) {
  const BaseGroupoid& g = *a.gpd;
  switch (g.kind) {
    case BaseKind::discrete:
      return a;
    case BaseKind::pair:
      return pair_arrow(g, a.dst.x, a.src.x);
    case BaseKind::cech:
      return cech_arrow(g, a.theta, a.j, a.i);
    case BaseKind::action:
      return action_arrow(g, Mat(a.k.inverse()), a.dst.x);
  }
  throw std::logic_error("unreachable");
}

inline bool is_unit_arrow(const BaseArrow& a, double tol = 1e-9) {
  return arrows_equal(a, base_unit(*a.gpd, a.src), tol);
}

// ---------------------------------------------------------------------------
// Chart paths with sitting instants

// C^2 "smootherstep" clamped to [0,1]; constant outside the margins.
inline double smoothstep_clamped(double t, double margin) {
  double u = (t - margin) / (1.0 - 2.0 * margin);
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

inline double smoothstep_clamped_deriv(double t, double margin) {
  double u = (t - margin) / (1.0 - 2.0 * margin);
  if (u <= 0.0 || u >= 1.0) return 0.0;
  return 30.0 * u * u * (1.0 - u) * (1.0 - u) / (1.0 - 2.0 * margin);
}

struct ChartPath {
  int chart = 0;
  std::function<Vec(double)> position;
  std::function<Vec(double)> velocity;  // defaulted to central differences
  double sitting_margin = 0.1;

  Vec at(double t) const { return position(t); }
};

inline ChartPath make_chart_path(int chart, std::function<Vec(double)> pos,
                                 double margin = 0.1,
                                 std::function<Vec(double)> vel = {}) {
  ChartPath p;
  p.chart = chart;
  p.position = std::move(pos);
  p.sitting_margin = margin;
  if (vel) {
    p.velocity = std::move(vel);
  } else {
    auto pp = p.position;
    p.velocity = [pp](double t) -> Vec {
      const double h = 1e-6;
      double a = std::max(0.0, t - h), b = std::min(1.0, t + h);
      return (pp(b) - pp(a)) / (b - a);
    };
  }
  return p;
}

// Pre/post-compose an arbitrary smooth path with the clamped smootherstep so
// that the result has sitting instants of the requested margin.
inline ChartPath lazify(int chart, const std::function<Vec(double)>& pos,
                        double margin = 0.1,
                        const std::function<Vec(double)>& vel = {}) {
  std::function<Vec(double)> v;
  if (vel)
    v = [pos, vel, margin](double t) -> Vec {
      return vel(smoothstep_clamped(t, margin)) *
             smoothstep_clamped_deriv(t, margin);
    };
  return make_chart_path(
      chart, [pos, margin](double t) { return pos(smoothstep_clamped(t, margin)); },
      margin, v);
}

inline ChartPath constant_path(int chart, const Vec& x, double margin = 0.1) {
  return make_chart_path(chart, [x](double) { return x; }, margin);
}

// Straight line in chart coordinates, lazified.
inline ChartPath line_path(int chart, const Vec& from, const Vec& to,
                           double margin = 0.1) {
  return lazify(
      chart, [from, to](double u) -> Vec { return from + u * (to - from); },
      margin, [from, to](double) -> Vec { return to - from; });
}

inline ChartPath reverse_path(const ChartPath& p) {
  auto pos = p.position;
  auto vel = p.velocity;
  return make_chart_path(
      p.chart, [pos](double t) { return pos(1.0 - t); }, p.sitting_margin,
      [vel](double t) -> Vec { return -vel(1.0 - t); });
}

// Reparametrize by a monotone phi with phi(0)=0, phi(1)=1. The caller is
// responsible for phi preserving sitting instants (all built-in phis do).
inline ChartPath reparametrize(const ChartPath& p, std::function<double(double)> phi) {
  if (std::abs(phi(0.0)) > 1e-12 || std::abs(phi(1.0) - 1.0) > 1e-12)
    throw std::invalid_argument("reparametrize: phi must fix 0 and 1");
  auto pos = p.position;
  return make_chart_path(p.chart, [pos, phi](double t) { return pos(phi(t)); },
                         p.sitting_margin);
}

// Concatenation with time rescaled to halves; each piece is re-lazified so
// the junction sits.
inline ChartPath concat_paths(const ChartPath& a, const ChartPath& b,
                              double tol = 1e-9) {
  if (a.chart != b.chart) throw ChartMismatch("concat_paths: different charts");
  if ((a.at(1.0) - b.at(0.0)).norm() > tol)
    throw NotComposable("concat_paths: endpoint mismatch");
  auto pa = a.position;
  auto pb = b.position;
  auto va = a.velocity;
  auto vb = b.velocity;
  double m = std::min(a.sitting_margin, b.sitting_margin);
  return make_chart_path(
      a.chart,
      [pa, pb, m](double t) {
        double u = smoothstep_clamped(t, m / 2.0);
        return u <= 0.5 ? pa(2.0 * u) : pb(2.0 * u - 1.0);
      },
      m / 2.0,
      [va, vb, m](double t) -> Vec {
        double u = smoothstep_clamped(t, m / 2.0);
        double du = smoothstep_clamped_deriv(t, m / 2.0);
        return (u <= 0.5 ? va(2.0 * u) : vb(2.0 * u - 1.0)) * (2.0 * du);
      });
}

inline bool is_constant_path(const ChartPath& p, double tol = 1e-10) {
  Vec x0 = p.at(0.0);
  for (int i = 1; i <= 16; ++i)
    if ((p.at(i / 16.0) - x0).norm() > tol) return false;
  return true;
}

// Validate the sitting-instant property by sampling 8 points per margin.
inline bool has_sitting_instants(const ChartPath& p, double tol = 1e-10) {
  Vec x0 = p.at(0.0), x1 = p.at(1.0);
  for (int i = 0; i < 8; ++i) {
    double t = p.sitting_margin * i / 7.0;
    if ((p.at(t) - x0).norm() > tol) return false;
    if ((p.at(1.0 - t) - x1).norm() > tol) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Lazy Haefliger paths

struct LazyHaefligerPath {
  // arrows.size() == paths.size() + 1; traversal gamma_0, alpha_1, gamma_1,
  // ..., alpha_n, gamma_n with s(gamma_i) = alpha_i(1), t(gamma_i) =
  // alpha_{i+1}(0); runs from s(gamma_0) to t(gamma_n).
  std::vector<BaseArrow> arrows;
  std::vector<ChartPath> paths;

  int order() const { return static_cast<int>(paths.size()); }
  const BasePoint& start() const { return base_source(arrows.front()); }
  const BasePoint& end() const { return base_target(arrows.back()); }
};

inline void validate_haefliger(const LazyHaefligerPath& g, double tol = 1e-9) {
  if (g.arrows.size() != g.paths.size() + 1)
    throw std::invalid_argument("haefliger: arrows/paths length mismatch");
  for (std::size_t i = 0; i < g.paths.size(); ++i) {
    const BasePoint a_end{g.paths[i].chart, g.paths[i].at(1.0)};
    const BasePoint a_start{g.paths[i].chart, g.paths[i].at(0.0)};
    if (!points_close(base_target(g.arrows[i]), a_start, tol))
      throw NotComposable("haefliger: t(gamma_i) != alpha_{i+1}(0)");
    if (!points_close(base_source(g.arrows[i + 1]), a_end, tol))
      throw NotComposable("haefliger: s(gamma_{i+1}) != alpha_{i+1}(1)");
    if (!has_sitting_instants(g.paths[i]))
      throw std::invalid_argument("haefliger: path without sitting instants");
  }
}

inline LazyHaefligerPath haefliger_unit(const BaseGroupoid& g, const BasePoint& p) {
  LazyHaefligerPath out;
  out.arrows = {base_unit(g, p), base_unit(g, p)};
  out.paths = {constant_path(p.chart, p.x)};
  return out;
}

inline LazyHaefligerPath haefliger_compose(const LazyHaefligerPath& gp,
                                           const LazyHaefligerPath& g,
                                           double tol = 1e-9) {
  if (!points_close(gp.start(), g.end(), tol))
    throw NotComposable("haefliger_compose: endpoint mismatch");
  LazyHaefligerPath out;
  out.arrows.assign(g.arrows.begin(), g.arrows.end() - 1);
  out.arrows.push_back(base_compose(gp.arrows.front(), g.arrows.back(), tol));
  out.arrows.insert(out.arrows.end(), gp.arrows.begin() + 1, gp.arrows.end());
  out.paths = g.paths;
  out.paths.insert(out.paths.end(), gp.paths.begin(), gp.paths.end());
  validate_haefliger(out, tol);
  return out;
}

inline LazyHaefligerPath haefliger_invert(const LazyHaefligerPath& g) {
  LazyHaefligerPath out;
  for (auto it = g.arrows.rbegin(); it != g.arrows.rend(); ++it)
    out.arrows.push_back(base_invert(*it));
  for (auto it = g.paths.rbegin(); it != g.paths.rend(); ++it)
    out.paths.push_back(reverse_path(*it));
  validate_haefliger(out);
  return out;
}

enum class HaefligerMove {
  add_constant,
  remove_constant,
  add_identity,
  remove_identity,
  conjugate_by_zeta
};

// Equivalence moves. Site indexing: for path moves (remove_constant,
// add_identity, conjugate_by_zeta) `site` indexes paths[]; for arrow moves
// (add_constant, remove_identity) it indexes arrows[].
inline LazyHaefligerPath equivalence_move(
    const LazyHaefligerPath& g, HaefligerMove move, std::size_t site,
    const std::function<BaseArrow(double)>& zeta = {}) {
  LazyHaefligerPath out = g;
  switch (move) {
    case HaefligerMove::remove_constant: {
      if (site >= g.paths.size() || !is_constant_path(g.paths[site]))
        throw MoveNotApplicable("remove_constant: path not constant");
      out.paths.erase(out.paths.begin() + site);
      BaseArrow merged = base_compose(g.arrows[site + 1], g.arrows[site]);
      out.arrows.erase(out.arrows.begin() + site);
      out.arrows[site] = merged;
      break;
    }
    case HaefligerMove::add_constant: {
      if (site >= g.arrows.size()) throw MoveNotApplicable("add_constant: bad site");
      const BasePoint p = base_target(g.arrows[site]);
      out.arrows.insert(out.arrows.begin() + site + 1,
                        base_unit(*g.arrows[site].gpd, p));
      out.paths.insert(out.paths.begin() + site, constant_path(p.chart, p.x));
      break;
    }
    case HaefligerMove::remove_identity: {
      if (site == 0 || site + 1 >= g.arrows.size() || !is_unit_arrow(g.arrows[site]))
        throw MoveNotApplicable("remove_identity: not an interior identity arrow");
      ChartPath merged = concat_paths(g.paths[site - 1], g.paths[site]);
      out.arrows.erase(out.arrows.begin() + site);
      out.paths.erase(out.paths.begin() + site);
      out.paths[site - 1] = merged;
      break;
    }
    case HaefligerMove::add_identity: {
      if (site >= g.paths.size()) throw MoveNotApplicable("add_identity: bad site");
      const ChartPath& a = g.paths[site];
      auto pos = a.position;
      double m = a.sitting_margin;
      ChartPath first = lazify(
          a.chart, [pos](double u) { return pos(u / 2.0); }, m);
      ChartPath second = lazify(
          a.chart, [pos](double u) { return pos(0.5 + u / 2.0); }, m);
      const BasePoint mid{a.chart, a.at(0.5)};
      out.paths[site] = first;
      out.paths.insert(out.paths.begin() + site + 1, second);
      out.arrows.insert(out.arrows.begin() + site + 1,
                        base_unit(*g.arrows.front().gpd, mid));
      break;
    }
    case HaefligerMove::conjugate_by_zeta: {
      if (site >= g.paths.size() || !zeta)
        throw MoveNotApplicable("conjugate_by_zeta: bad site or missing zeta");
      // Precondition: s(zeta(t)) = alpha_site(t).
      for (int s = 0; s <= 8; ++s) {
        double t = s / 8.0;
        if (!points_close(base_source(zeta(t)),
                          BasePoint{g.paths[site].chart, g.paths[site].at(t)}, 1e-9))
          throw MoveNotApplicable("conjugate_by_zeta: s(zeta) != alpha");
      }
      BaseArrow z0 = zeta(0.0), z1 = zeta(1.0);
      const int tgt_chart = base_target(z0).chart;
      out.paths[site] = make_chart_path(
          tgt_chart, [zeta](double t) { return base_target(zeta(t)).x; },
          g.paths[site].sitting_margin);
      out.arrows[site] = base_compose(z0, g.arrows[site]);
      out.arrows[site + 1] = base_compose(g.arrows[site + 1], base_invert(z1));
      break;
    }
  }
  validate_haefliger(out);
  return out;
}

// ---------------------------------------------------------------------------
// Base functors (used for pullback naturality)

struct BaseFunctor {
  const BaseGroupoid* dom = nullptr;
  const BaseGroupoid* cod = nullptr;
  std::function<BasePoint(const BasePoint&)> F0;
  std::function<BaseArrow(const BaseArrow&)> F1;
};

inline LazyHaefligerPath map_haefliger(const BaseFunctor& F,
                                       const LazyHaefligerPath& g) {
  LazyHaefligerPath out;
  for (const BaseArrow& a : g.arrows) out.arrows.push_back(F.F1(a));
  for (const ChartPath& p : g.paths) {
    auto pos = p.position;
    auto F0 = F.F0;
    int chart = F0(BasePoint{p.chart, p.at(0.0)}).chart;
    out.paths.push_back(make_chart_path(
        chart,
        [pos, F0, pchart = p.chart](double t) {
          return F0(BasePoint{pchart, pos(t)}).x;
        },
        p.sitting_margin));
  }
  validate_haefliger(out);
  return out;
}

}  // namespace h2t
