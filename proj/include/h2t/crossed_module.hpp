#pragma once

// Lie crossed modules (G, H, tau, alpha), the associated 2-group on H x| G
// with its five structure maps and monoidal product, the associated
// 2-algebra on L(H) (+) L(G), adjoint actions at both levels, and check
// routines for the defining identities.

#include "h2t/lie_core.hpp"

#include <algorithm>
#include <map>

namespace h2t {

struct CrossedModule {
  std::string name;
  const GroupDescriptor* G = nullptr;
  const GroupDescriptor* H = nullptr;
  std::function<Mat(const Mat&)> tau;               // H -> G
  std::function<Mat(const Mat&, const Mat&)> alpha;  // (g, h) -> h'
  // Differentials. Defaults are installed by finalize() as finite
  // differences; catalog entries override them with closed forms.
  std::function<Mat(const Mat&)> tau_diff;                  // L(H) -> L(G)
  std::function<Mat(const Mat&, const Mat&)> alpha_g_diff;  // (g, A) -> L(H)
  // (h, B) -> tangent at h to the curve t |-> alpha(exp(tB), h), as an
  // ambient matrix.
  std::function<Mat(const Mat&, const Mat&)> alpha_bar_h_diff;
  bool tau_diff_injective = false;

  Mat eG() const { return G->identity(); }
  Mat eH() const { return H->identity(); }

  void finalize() {
    if (!tau_diff) {
      auto t = tau;
      tau_diff = [t](const Mat& a) {
        Mat e = Mat::Identity(a.rows(), a.cols());
        return finite_diff_differential_raw([&](const Mat& h) { return t(h); }, e, a);
      };
    }
    if (!alpha_g_diff) {
      auto al = alpha;
      alpha_g_diff = [al](const Mat& g, const Mat& a) {
        Mat e = Mat::Identity(a.rows(), a.cols());
        return finite_diff_differential_raw(
            [&](const Mat& h) { return al(g, h); }, e, a);
      };
    }
    if (!alpha_bar_h_diff) {
      auto al = alpha;
      alpha_bar_h_diff = [al](const Mat& h, const Mat& b) {
        // Ambient central difference of t |-> alpha(exp(tB), h) at t = 0.
        const double hh = 1e-5;
        Mat gp = mat_exp(hh * b);
        Mat gm = mat_exp(-hh * b);
        Mat d1 = (al(gp, h) - al(gm, h)) / (2.0 * hh);
        Mat gp2 = mat_exp((hh / 2.0) * b);
        Mat gm2 = mat_exp((-hh / 2.0) * b);
        Mat d2 = (al(gp2, h) - al(gm2, h)) / hh;
        return (4.0 * d2 - d1) / 3.0;
      };
    }
  }

  // Projection of an L(G) matrix onto the image tau_*(L(H)), together with
  // the coefficient vector; used for the G/tau(H) membership test.
  std::vector<Mat> tau_image_basis() const {
    std::vector<Mat> out;
    for (const Mat& a : H->basis) {
      Mat m = tau_diff(a);
      if (m.norm() > 1e-14) out.push_back(m);
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// Check report

struct CheckReport {
  std::string name;
  std::vector<std::pair<std::string, double>> residuals;

  void record(const std::string& what, double r) {
    auto it = std::find_if(residuals.begin(), residuals.end(),
                           [&](const auto& p) { return p.first == what; });
    if (it == residuals.end())
      residuals.emplace_back(what, r);
    else
      it->second = std::max(it->second, r);
  }
  double max_residual() const {
    double m = 0.0;
    for (const auto& [_, r] : residuals) m = std::max(m, r);
    return m;
  }
  bool pass(double tol) const { return max_residual() <= tol; }
};

// ---------------------------------------------------------------------------
// Catalog

namespace detail {

inline CrossedModule make_discrete() {
  CrossedModule cm;
  cm.name = "discrete";
  cm.G = &group_SO3();
  cm.H = &group_trivial();
  cm.tau = [](const Mat&) { return Mat::Identity(3, 3); };
  cm.alpha = [](const Mat&, const Mat& h) { return h; };
  cm.tau_diff = [](const Mat&) { return Mat::Zero(3, 3); };
  cm.alpha_g_diff = [](const Mat&, const Mat& a) { return a; };
  cm.alpha_bar_h_diff = [](const Mat&, const Mat&) { return Mat::Zero(1, 1); };
  cm.tau_diff_injective = true;  // vacuously, L(H) = 0
  return cm;
}

inline CrossedModule make_abelian() {
  CrossedModule cm;
  cm.name = "abelian";
  cm.G = &group_trivial();
  cm.H = &group_SO2();
  cm.tau = [](const Mat&) { return Mat::Identity(1, 1); };
  cm.alpha = [](const Mat&, const Mat& h) { return h; };
  cm.tau_diff = [](const Mat&) { return Mat::Zero(1, 1); };
  cm.alpha_g_diff = [](const Mat&, const Mat& a) { return a; };
  cm.alpha_bar_h_diff = [](const Mat&, const Mat&) { return Mat::Zero(2, 2); };
  cm.tau_diff_injective = false;
  return cm;
}

inline CrossedModule make_conjugation(const GroupDescriptor& g, std::string name) {
  CrossedModule cm;
  cm.name = std::move(name);
  cm.G = &g;
  cm.H = &g;
  cm.tau = [](const Mat& h) { return h; };
  cm.alpha = [](const Mat& gg, const Mat& h) -> Mat { return gg * h * gg.inverse(); };
  cm.tau_diff = [](const Mat& a) { return a; };
  cm.alpha_g_diff = [](const Mat& gg, const Mat& a) -> Mat {
    return gg * a * gg.inverse();
  };
  cm.alpha_bar_h_diff = [](const Mat& h, const Mat& b) -> Mat {
    return b * h - h * b;
  };
  cm.tau_diff_injective = true;
  return cm;
}

inline CrossedModule make_rplus_r() {
  CrossedModule cm;
  cm.name = "rplus-r";
  cm.G = &group_Rplus();
  cm.H = &group_Radd();
  cm.tau = [](const Mat& h) {
    Mat m(1, 1);
    m(0, 0) = std::exp(h(0, 1));
    return m;
  };
  cm.alpha = [](const Mat&, const Mat& h) { return h; };
  cm.tau_diff = [](const Mat& a) {
    Mat m(1, 1);
    m(0, 0) = a(0, 1);
    return m;
  };
  cm.alpha_g_diff = [](const Mat&, const Mat& a) { return a; };
  cm.alpha_bar_h_diff = [](const Mat&, const Mat&) { return Mat::Zero(2, 2); };
  cm.tau_diff_injective = true;
  return cm;
}

}  // namespace detail

inline const CrossedModule& crossed_module_catalog(const std::string& name) {
  static const std::map<std::string, CrossedModule> catalog = [] {
    std::map<std::string, CrossedModule> m;
    auto add = [&m](CrossedModule cm) {
      cm.finalize();
      m.emplace(cm.name, std::move(cm));
    };
    add(detail::make_discrete());
    add(detail::make_abelian());
    add(detail::make_conjugation(group_GL2(), "conj"));
    add(detail::make_rplus_r());
    add(detail::make_conjugation(group_SO3(), "so3-conj"));
    // Extra scenario entry: SO(2) acting on itself by (trivial) conjugation,
    // used by the circle scenarios. Not part of the five-entry core catalog.
    add(detail::make_conjugation(group_SO2(), "so2-conj"));
    return m;
  }();
  auto it = catalog.find(name);
  if (it == catalog.end())
    throw std::invalid_argument("unknown crossed module: " + name);
  return it->second;
}

inline std::vector<std::string> crossed_module_core_catalog_names() {
  return {"discrete", "abelian", "conj", "rplus-r", "so3-conj"};
}

// ---------------------------------------------------------------------------
// 2-group arrows

struct TwoGroupArrow {
  const CrossedModule* cm = nullptr;
  Mat h;  // in H
  Mat g;  // in G
};

inline TwoGroupArrow tg_make(const CrossedModule& cm, Mat h, Mat g) {
  if (!cm.H->is_member(h)) throw NotInGroup("TwoGroupArrow: h not in H");
  if (!cm.G->is_member(g)) throw NotInGroup("TwoGroupArrow: g not in G");
  return TwoGroupArrow{&cm, std::move(h), std::move(g)};
}

inline Mat tg_source(const TwoGroupArrow& a) { return a.g; }
inline Mat tg_target(const TwoGroupArrow& a) { return a.cm->tau(a.h) * a.g; }
inline TwoGroupArrow tg_unit(const CrossedModule& cm, const Mat& g) {
  return TwoGroupArrow{&cm, cm.eH(), g};
}
inline TwoGroupArrow tg_compose(const TwoGroupArrow& a2, const TwoGroupArrow& a1,
                                double tol = 1e-8) {
  if ((tg_source(a2) - tg_target(a1)).norm() > tol)
    throw NotComposable("2-group arrows not composable");
  return TwoGroupArrow{a1.cm, a2.h * a1.h, a1.g};
}
inline TwoGroupArrow tg_invert(const TwoGroupArrow& a) {
  return TwoGroupArrow{a.cm, Mat(a.h.inverse()), tg_target(a)};
}
// Monoidal product (group multiplication of H x| G).
inline TwoGroupArrow tg_tensor(const TwoGroupArrow& a2, const TwoGroupArrow& a1) {
  return TwoGroupArrow{a1.cm, a2.h * a1.cm->alpha(a2.g, a1.h), a2.g * a1.g};
}
inline TwoGroupArrow tg_tensor_inverse(const TwoGroupArrow& a) {
  Mat ginv = a.g.inverse();
  return TwoGroupArrow{a.cm, a.cm->alpha(ginv, Mat(a.h.inverse())), ginv};
}

// Adjoint action of the 2-group on itself, assembled from the two
// closed-form factors Ad_{(h,g)}(h',e) and Ad_{(h,g)}(e,g').
inline TwoGroupArrow adjoint_group(const TwoGroupArrow& by, const TwoGroupArrow& on) {
  const CrossedModule& cm = *by.cm;
  const Mat adg_g = by.g * on.g * by.g.inverse();
  TwoGroupArrow f1{&cm, by.h * cm.alpha(by.g, on.h) * by.h.inverse(), cm.eG()};
  TwoGroupArrow f2{&cm, by.h * cm.alpha(adg_g, Mat(by.h.inverse())), adg_g};
  return tg_tensor(f1, f2);
}

// ---------------------------------------------------------------------------
// 2-algebra arrows

struct TwoAlgebraArrow {
  const CrossedModule* cm = nullptr;
  Mat A;  // in L(H)
  Mat B;  // in L(G)
};

inline TwoAlgebraArrow ta_make(const CrossedModule& cm, Mat A, Mat B) {
  if (!cm.H->in_algebra(A, 1e-8)) throw NotInAlgebra("TwoAlgebraArrow: A not in L(H)");
  if (!cm.G->in_algebra(B, 1e-8)) throw NotInAlgebra("TwoAlgebraArrow: B not in L(G)");
  return TwoAlgebraArrow{&cm, std::move(A), std::move(B)};
}

inline Mat ta_source(const TwoAlgebraArrow& a) { return a.B; }
inline Mat ta_target(const TwoAlgebraArrow& a) { return a.cm->tau_diff(a.A) + a.B; }
inline TwoAlgebraArrow ta_unit(const CrossedModule& cm, const Mat& B) {
  return TwoAlgebraArrow{&cm, Mat::Zero(cm.H->ambient_dim, cm.H->ambient_dim), B};
}
inline TwoAlgebraArrow ta_compose(const TwoAlgebraArrow& a2, const TwoAlgebraArrow& a1,
                                  double tol = 1e-8) {
  if ((ta_source(a2) - ta_target(a1)).norm() > tol)
    throw NotComposable("2-algebra arrows not composable");
  return TwoAlgebraArrow{a1.cm, a2.A + a1.A, a1.B};
}

// Mixed differential of alpha: the action of B in L(G) on A in L(H),
// computed as d/dt|0 of alpha(exp(tB))_* (A).
inline Mat alpha_mixed_diff(const CrossedModule& cm, const Mat& A, const Mat& B) {
  const double h = 1e-5;
  Mat d1 = (cm.alpha_g_diff(mat_exp(h * B), A) - cm.alpha_g_diff(mat_exp(-h * B), A)) /
           (2.0 * h);
  Mat d2 = (cm.alpha_g_diff(mat_exp(h / 2.0 * B), A) -
            cm.alpha_g_diff(mat_exp(-h / 2.0 * B), A)) /
           h;
  return (4.0 * d2 - d1) / 3.0;
}

inline TwoAlgebraArrow ta_bracket(const TwoAlgebraArrow& a1, const TwoAlgebraArrow& a2) {
  const CrossedModule& cm = *a1.cm;
  Mat A = commutator(a1.A, a2.A) + alpha_mixed_diff(cm, a1.A, a2.B) -
          alpha_mixed_diff(cm, a2.A, a1.B);
  Mat B = commutator(a1.B, a2.B);
  return TwoAlgebraArrow{&cm, A, B};
}

// Adjoint action of 2-group arrows on 2-algebra arrows, as the sum of the
// (A,0) and (0,B) closed-form components.
inline TwoAlgebraArrow adjoint_algebra(const TwoGroupArrow& by,
                                       const TwoAlgebraArrow& on) {
  const CrossedModule& cm = *by.cm;
  const Mat hinv = by.h.inverse();
  Mat partA1 = by.h * cm.alpha_g_diff(by.g, on.A) * hinv;
  Mat adgB = Ad(by.g, on.B);
  Mat partA2 = by.h * cm.alpha_bar_h_diff(hinv, adgB);
  return TwoAlgebraArrow{&cm, partA1 + partA2, adgB};
}

// ---------------------------------------------------------------------------
// Identity checks

// Both Peiffer identities on random samples.
inline CheckReport peiffer_check(const CrossedModule& cm, int n_samples,
                                 double scale, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  CheckReport rep{"peiffer"};
  rep.record("peiffer-1", 0.0);
  rep.record("peiffer-2", 0.0);
  for (int i = 0; i < n_samples; ++i) {
    Mat g = random_group(*cm.G, rng, scale);
    Mat h = random_group(*cm.H, rng, scale);
    Mat hp = random_group(*cm.H, rng, scale);
    // tau(alpha(g,h)) = g tau(h) g^{-1}
    rep.record("peiffer-1",
               (cm.tau(cm.alpha(g, h)) - g * cm.tau(h) * g.inverse()).norm());
    // alpha(tau(h), h') = h h' h^{-1}
    rep.record("peiffer-2",
               (cm.alpha(cm.tau(h), hp) - h * hp * h.inverse()).norm());
  }
  return rep;
}

// Interchange law on random composable-and-tensorable quadruples.
inline CheckReport interchange_check(const CrossedModule& cm, int n_samples,
                                     double scale = 0.4, std::uint64_t seed = 2) {
  std::mt19937_64 rng(seed);
  CheckReport rep{"interchange"};
  rep.record("interchange", 0.0);
  for (int i = 0; i < n_samples; ++i) {
    // k2' : g2 -> ..., k2 : t(k2') -> ...; same on the 1 side; then
    // (k2 (x) k1) o (k2' (x) k1') = (k2 o k2') (x) (k1 o k1').
    TwoGroupArrow k2p{&cm, random_group(*cm.H, rng, scale),
                      random_group(*cm.G, rng, scale)};
    TwoGroupArrow k1p{&cm, random_group(*cm.H, rng, scale),
                      random_group(*cm.G, rng, scale)};
    TwoGroupArrow k2{&cm, random_group(*cm.H, rng, scale), tg_target(k2p)};
    TwoGroupArrow k1{&cm, random_group(*cm.H, rng, scale), tg_target(k1p)};
    TwoGroupArrow lhs = tg_compose(tg_tensor(k2, k1), tg_tensor(k2p, k1p));
    TwoGroupArrow rhs = tg_tensor(tg_compose(k2, k2p), tg_compose(k1, k1p));
    rep.record("interchange",
               std::max((lhs.h - rhs.h).norm(), (lhs.g - rhs.g).norm()));
  }
  return rep;
}

// The four differentiated Peiffer identities.
inline CheckReport peiffer_diff_check(const CrossedModule& cm, int n_samples,
                                      double scale = 0.5, std::uint64_t seed = 3) {
  std::mt19937_64 rng(seed);
  CheckReport rep{"peiffer-diff"};
  for (const char* k :
       {"tau-alpha-g", "tau-alphabar-h", "alpha-tau-h", "alphabar-tau-A"})
    rep.record(k, 0.0);
  for (int i = 0; i < n_samples; ++i) {
    Mat g = random_group(*cm.G, rng, scale);
    Mat h = random_group(*cm.H, rng, scale);
    Mat A = random_algebra(*cm.H, rng, scale);
    Mat B = random_algebra(*cm.G, rng, scale);
    // tau(alpha(g)(A)) = Ad_g tau(A)
    rep.record("tau-alpha-g",
               (cm.tau_diff(cm.alpha_g_diff(g, A)) - Ad(g, cm.tau_diff(A))).norm());
    // tau(alphabar(h)(B)) = B tau(h) - tau(h) B
    {
      // tau o (curve t |-> alpha(exp(tB), h)) has ambient derivative
      // tau_{*,h}(alphabar_h(B)); compute it by finite differences of tau
      // along the curve.
      const double hh = 1e-5;
      Mat d1 = (cm.tau(cm.alpha(mat_exp(hh * B), h)) -
                cm.tau(cm.alpha(mat_exp(-hh * B), h))) /
               (2.0 * hh);
      Mat d2 = (cm.tau(cm.alpha(mat_exp(hh / 2.0 * B), h)) -
                cm.tau(cm.alpha(mat_exp(-hh / 2.0 * B), h))) /
               hh;
      Mat lhs = (4.0 * d2 - d1) / 3.0;
      rep.record("tau-alphabar-h",
                 (lhs - (B * cm.tau(h) - cm.tau(h) * B)).norm());
    }
    // alpha(tau(h))(A) = Ad_h A
    rep.record("alpha-tau-h", (cm.alpha_g_diff(cm.tau(h), A) - Ad(h, A)).norm());
    // alphabar(h')(tau(A)) = h' A - A h'
    rep.record("alphabar-tau-A",
               (cm.alpha_bar_h_diff(h, cm.tau_diff(A)) - (h * A - A * h)).norm());
  }
  return rep;
}

// Homomorphism properties of tau and alpha(g, .) on random samples.
inline CheckReport homomorphism_check(const CrossedModule& cm, int n_samples,
                                      double scale = 0.5, std::uint64_t seed = 4) {
  std::mt19937_64 rng(seed);
  CheckReport rep{"homomorphism"};
  rep.record("tau-hom", 0.0);
  rep.record("alpha-hom", 0.0);
  for (int i = 0; i < n_samples; ++i) {
    Mat g = random_group(*cm.G, rng, scale);
    Mat h1 = random_group(*cm.H, rng, scale);
    Mat h2 = random_group(*cm.H, rng, scale);
    rep.record("tau-hom", (cm.tau(h1 * h2) - cm.tau(h1) * cm.tau(h2)).norm());
    rep.record("alpha-hom",
               (cm.alpha(g, h1 * h2) - cm.alpha(g, h1) * cm.alpha(g, h2)).norm());
  }
  return rep;
}

}  // namespace h2t
