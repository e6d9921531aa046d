#pragma once

// Matrix Lie group / Lie algebra arithmetic: group descriptors for the
// built-in catalog, exp/log with a principal-branch guard, finite-difference
// differentials with one Richardson step, and an RK4 integrator for
// left-invariant linear ODEs a'(t) = A(t) a(t) with optional projection back
// onto the group manifold.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <functional>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace h2t {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

struct NotInGroup : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotInAlgebra : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonConvergent : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct StepTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotComposable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double spectral_norm(const Mat& m) {
  return m.jacobiSvd().singularValues()(0);
}

// ---------------------------------------------------------------------------
// Group descriptors

struct GroupDescriptor {
  std::string name;
  int ambient_dim = 1;  // elements are ambient_dim x ambient_dim real matrices
  double membership_tol = 1e-8;
  std::function<bool(const Mat&, double tol)> member;
  // Projection to the nearest group element; empty for groups (like GL)
  // where no canonical projection exists.
  std::function<Mat(const Mat&)> project;
  std::vector<Mat> basis;  // basis of the Lie algebra
  bool orthogonal_type = false;

  Mat identity() const { return Mat::Identity(ambient_dim, ambient_dim); }

  bool is_member(const Mat& m) const {
    return m.rows() == ambient_dim && m.cols() == ambient_dim &&
           member(m, membership_tol);
  }

  // Least-squares coordinates of m in the algebra basis plus the residual of
  // the projection onto the basis span.
  std::pair<Vec, double> algebra_coords(const Mat& m) const {
    const int k = static_cast<int>(basis.size());
    if (k == 0) return {Vec::Zero(0), m.norm()};
    Eigen::MatrixXd b(ambient_dim * ambient_dim, k);
    for (int i = 0; i < k; ++i)
      b.col(i) = Eigen::Map<const Vec>(basis[i].data(), basis[i].size());
    Vec target = Eigen::Map<const Vec>(m.data(), m.size());
    Vec c = b.colPivHouseholderQr().solve(target);
    double residual = (b * c - target).norm();
    return {c, residual};
  }

  bool in_algebra(const Mat& m, double tol = 1e-8) const {
    if (m.rows() != ambient_dim || m.cols() != ambient_dim) return false;
    return algebra_coords(m).second <= tol * (1.0 + m.norm());
  }

  Mat from_coords(const Vec& c) const {
    Mat m = Mat::Zero(ambient_dim, ambient_dim);
    for (int i = 0; i < static_cast<int>(basis.size()); ++i) m += c(i) * basis[i];
    return m;
  }
};

// Polar projection onto the special orthogonal group.
inline Mat polar_project_special_orthogonal(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat u = svd.matrixU();
  Mat v = svd.matrixV();
  Mat r = u * v.transpose();
  if (r.determinant() < 0) {
    u.col(u.cols() - 1) *= -1.0;
    r = u * v.transpose();
  }
  return r;
}

namespace detail {

inline Mat e_ij(int n, int i, int j) {
  Mat m = Mat::Zero(n, n);
  m(i, j) = 1.0;
  return m;
}

inline GroupDescriptor make_so(int n) {
  GroupDescriptor d;
  d.name = "SO(" + std::to_string(n) + ")";
  d.ambient_dim = n;
  d.orthogonal_type = true;
  d.member = [n](const Mat& m, double tol) {
    return (m.transpose() * m - Mat::Identity(n, n)).norm() <= tol * 10 &&
           m.determinant() > 0;
  };
  d.project = polar_project_special_orthogonal;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      d.basis.push_back(e_ij(n, i, j) - e_ij(n, j, i));
  return d;
}

}  // namespace detail

// The catalog of ambient groups. Descriptors are singletons so that pointer
// identity can be used for "same group" checks.
inline const GroupDescriptor& group_SO2() {
  static const GroupDescriptor d = detail::make_so(2);
  return d;
}

inline const GroupDescriptor& group_SO3() {
  static const GroupDescriptor d = detail::make_so(3);
  return d;
}

inline const GroupDescriptor& group_GL2() {
  static const GroupDescriptor d = [] {
    GroupDescriptor g;
    g.name = "GL(2)";
    g.ambient_dim = 2;
    g.member = [](const Mat& m, double) {
      return std::abs(m.determinant()) > 1e-12;
    };
    g.basis = {detail::e_ij(2, 0, 0), detail::e_ij(2, 0, 1),
               detail::e_ij(2, 1, 0), detail::e_ij(2, 1, 1)};
    return g;
  }();
  return d;
}

// Multiplicative positive reals as 1x1 positive matrices.
inline const GroupDescriptor& group_Rplus() {
  static const GroupDescriptor d = [] {
    GroupDescriptor g;
    g.name = "R+";
    g.ambient_dim = 1;
    g.member = [](const Mat& m, double) { return m(0, 0) > 0.0; };
    g.basis = {Mat::Identity(1, 1)};
    return g;
  }();
  return d;
}

// Additive reals, embedded as 2x2 unipotent upper-triangular matrices.
inline const GroupDescriptor& group_Radd() {
  static const GroupDescriptor d = [] {
    GroupDescriptor g;
    g.name = "(R,+)";
    g.ambient_dim = 2;
    g.member = [](const Mat& m, double tol) {
      return std::abs(m(0, 0) - 1.0) <= tol && std::abs(m(1, 1) - 1.0) <= tol &&
             std::abs(m(1, 0)) <= tol;
    };
    g.project = [](const Mat& m) {
      Mat r = Mat::Identity(2, 2);
      r(0, 1) = m(0, 1);
      return r;
    };
    g.basis = {detail::e_ij(2, 0, 1)};
    return g;
  }();
  return d;
}

// The trivial group {e} as 1x1 identity matrices; its algebra is {0}.
inline const GroupDescriptor& group_trivial() {
  static const GroupDescriptor d = [] {
    GroupDescriptor g;
    g.name = "{e}";
    g.ambient_dim = 1;
    g.member = [](const Mat& m, double tol) {
      return std::abs(m(0, 0) - 1.0) <= tol;
    };
    g.project = [](const Mat&) { return Mat::Identity(1, 1); };
    return g;
  }();
  return d;
}

inline const GroupDescriptor* ambient_group_by_name(const std::string& name) {
  if (name == "SO2" || name == "SO(2)") return &group_SO2();
  if (name == "SO3" || name == "SO(3)") return &group_SO3();
  if (name == "GL2" || name == "GL(2)") return &group_GL2();
  if (name == "R+" || name == "Rplus") return &group_Rplus();
  if (name == "R" || name == "Radd") return &group_Radd();
  if (name == "trivial" || name == "{e}") return &group_trivial();
  throw std::invalid_argument("unknown group name: " + name);
}

// ---------------------------------------------------------------------------
// Elements

struct GroupElement {
  const GroupDescriptor* group = nullptr;
  Mat matrix;

  GroupElement() = default;
  GroupElement(const GroupDescriptor& g, Mat m) : group(&g), matrix(std::move(m)) {
    if (!group->is_member(matrix))
      throw NotInGroup("matrix fails membership in " + group->name);
  }
};

struct AlgebraElement {
  const GroupDescriptor* group = nullptr;
  Mat matrix;

  AlgebraElement() = default;
  AlgebraElement(const GroupDescriptor& g, Mat m) : group(&g), matrix(std::move(m)) {
    if (!group->in_algebra(matrix, std::max(group->membership_tol, 1e-8)))
      throw NotInAlgebra("matrix fails tangent-space check for " + group->name);
  }
};

// ---------------------------------------------------------------------------
// exp / log

inline Mat mat_exp(const Mat& x) { return x.exp(); }

// Principal-branch logarithm, defined only near the identity.
inline Mat mat_log(const Mat& g) {
  const Mat i = Mat::Identity(g.rows(), g.cols());
  if (spectral_norm(g - i) >= 1.9)
    throw NotInGroup("log: element too far from identity for principal branch");
  return g.log();
}

inline GroupElement group_exp(const AlgebraElement& x) {
  Mat m = mat_exp(x.matrix);
  if (x.group->project) m = x.group->project(m);
  return GroupElement(*x.group, m);
}

inline AlgebraElement group_log(const GroupElement& g) {
  return AlgebraElement(*g.group, mat_log(g.matrix));
}

inline Mat commutator(const Mat& a, const Mat& b) { return a * b - b * a; }

inline Mat Ad(const Mat& g, const Mat& x) { return g * x * g.inverse(); }

// ---------------------------------------------------------------------------
// Finite-difference differentials

// Pushforward of f at the point `at` in the direction `dir` (an element of the
// domain's Lie algebra acting by right translation: the curve is
// at*exp(t dir)). The result is expressed in the codomain's Lie algebra via
// the right logarithmic derivative, with one Richardson extrapolation step.
inline Mat finite_diff_differential_raw(const std::function<Mat(const Mat&)>& f,
                                        const Mat& at, const Mat& dir,
                                        double h = 1e-5) {
  if (!(h > 0.0 && h <= 1e-3))
    throw std::invalid_argument("finite_diff_differential: h out of (0, 1e-3]");
  const Mat f0_inv = f(at).inverse();
  auto central = [&](double hh) -> Mat {
    Mat gp = f(at * mat_exp(hh * dir)) * f0_inv;
    Mat gm = f(at * mat_exp(-hh * dir)) * f0_inv;
    return (mat_log(gp) - mat_log(gm)) / (2.0 * hh);
  };
  const Mat d1 = central(h);
  const Mat d2 = central(h / 2.0);
  if ((d2 - d1).norm() > 1e-4 * (1.0 + d2.norm()))
    throw NonConvergent("finite_diff_differential: no convergence at h, h/2");
  return (4.0 * d2 - d1) / 3.0;
}

inline AlgebraElement finite_diff_differential(
    const std::function<GroupElement(const GroupElement&)>& f,
    const GroupElement& at, const AlgebraElement& dir, double h = 1e-5) {
  const GroupDescriptor* codomain = f(at).group;
  auto raw = [&](const Mat& m) {
    return f(GroupElement(*at.group, at.group->project ? at.group->project(m) : m))
        .matrix;
  };
  return AlgebraElement(*codomain,
                        finite_diff_differential_raw(raw, at.matrix, dir.matrix, h));
}

// ---------------------------------------------------------------------------
// ODE integration on the group: a'(t) = A(t) a(t)

struct IntegratorConfig {
  double step = 1e-3;
  std::string scheme = "rk4-projected";
  double projection_tol = 1e-6;
};

inline Mat solve_left_ode_raw(const std::function<Mat(double)>& A_of_t,
                              const Mat& g0, double t0, double t1,
                              const IntegratorConfig& cfg,
                              const std::function<Mat(const Mat&)>& project = {}) {
  if (!(cfg.step > 0.0 && cfg.step <= 0.1))
    throw std::invalid_argument("IntegratorConfig.step must lie in (0, 0.1]");
  const double span = t1 - t0;
  if (span == 0.0) return g0;
  const int n = std::max(1, static_cast<int>(std::ceil(std::abs(span) / cfg.step)));
  const double h = span / n;
  Mat y = g0;
  double t = t0;
  for (int i = 0; i < n; ++i) {
    const Mat k1 = A_of_t(t) * y;
    const Mat k2 = A_of_t(t + h / 2.0) * (y + (h / 2.0) * k1);
    const Mat k3 = A_of_t(t + h / 2.0) * (y + (h / 2.0) * k2);
    const Mat k4 = A_of_t(t + h) * (y + h * k3);
    y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (project) {
      Mat yp = project(y);
      if ((yp - y).norm() > cfg.projection_tol)
        throw StepTooLarge("solve_left_ode: projection correction exceeds tol");
      y = yp;
    }
    t = t0 + (i + 1) * h;
  }
  return y;
}

inline GroupElement solve_left_ode(
    const std::function<AlgebraElement(double)>& A_of_t, const GroupElement& g0,
    double t0, double t1, const IntegratorConfig& cfg = {}) {
  auto raw_a = [&](double t) { return A_of_t(t).matrix; };
  Mat y = solve_left_ode_raw(raw_a, g0.matrix, t0, t1, cfg, g0.group->project);
  return GroupElement(*g0.group, y);
}

// ---------------------------------------------------------------------------
// Random sampling

inline Mat random_algebra(const GroupDescriptor& g, std::mt19937_64& rng,
                          double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Mat m = Mat::Zero(g.ambient_dim, g.ambient_dim);
  for (const Mat& b : g.basis) m += u(rng) * b;
  return m;
}

inline Mat random_group(const GroupDescriptor& g, std::mt19937_64& rng,
                        double scale) {
  Mat m = mat_exp(random_algebra(g, rng, scale));
  if (g.project) m = g.project(m);
  return m;
}

}  // namespace h2t
