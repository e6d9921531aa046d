#include "h2t/crossed_module.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <chrono>

using namespace h2t;

TEST_CASE("catalog entries satisfy the defining identities") {
  for (const std::string& name : crossed_module_core_catalog_names()) {
    const CrossedModule& cm = crossed_module_catalog(name);
    INFO(name);
    CHECK(peiffer_check(cm, 200, 0.5).pass(1e-9));
    CHECK(homomorphism_check(cm, 100, 0.5).pass(1e-9));
    CHECK(peiffer_diff_check(cm, 50, 0.5).pass(1e-5));
  }
  CHECK(peiffer_check(crossed_module_catalog("so2-conj"), 100, 0.5).pass(1e-12));
  CHECK_THROWS_AS(crossed_module_catalog("nope"), std::invalid_argument);
}

TEST_CASE("broken action is flagged by the Peiffer suite") {
  // Trivial action with tau = id on a nonabelian group violates
  // alpha(tau(h)) = Ad_h; the residual must be far above tolerance.
  CrossedModule bad;
  bad.name = "bad";
  bad.G = &group_SO3();
  bad.H = &group_SO3();
  bad.tau = [](const Mat& h) { return h; };
  bad.alpha = [](const Mat&, const Mat& h) { return h; };
  bad.finalize();
  CHECK(peiffer_check(bad, 50, 0.5).max_residual() > 1e-3);
}

TEST_CASE("2-group structure maps and groupoid axioms") {
  const CrossedModule& cm = crossed_module_catalog("conj");
  std::mt19937_64 rng(21);
  CHECK(interchange_check(cm, 200, 0.4).pass(1e-10));

  for (int i = 0; i < 50; ++i) {
    TwoGroupArrow a = tg_make(cm, random_group(*cm.H, rng, 0.4),
                              random_group(*cm.G, rng, 0.4));
    // closed-form source/target
    CHECK((tg_source(a) - a.g).norm() < 1e-14);
    CHECK((tg_target(a) - Mat(cm.tau(a.h) * a.g)).norm() < 1e-14);
    // inverse composes to a unit in both orders
    TwoGroupArrow inv = tg_invert(a);
    TwoGroupArrow u1 = tg_compose(inv, a);
    CHECK((u1.h - cm.eH()).norm() < 1e-10);
    CHECK((u1.g - tg_source(a)).norm() < 1e-10);
    TwoGroupArrow u2 = tg_compose(a, inv);
    CHECK((u2.h - cm.eH()).norm() < 1e-10);
    // unit laws
    TwoGroupArrow lu = tg_compose(tg_unit(cm, tg_target(a)), a);
    CHECK((lu.h - a.h).norm() < 1e-12);
    CHECK((lu.g - a.g).norm() < 1e-12);
    // monoidal inverse
    TwoGroupArrow ti = tg_tensor(a, tg_tensor_inverse(a));
    CHECK((ti.h - cm.eH()).norm() < 1e-10);
    CHECK((ti.g - cm.eG()).norm() < 1e-10);
  }

  // composing arrows with mismatched endpoints must throw
  TwoGroupArrow a = tg_make(cm, random_group(*cm.H, rng, 0.4),
                            random_group(*cm.G, rng, 0.4));
  TwoGroupArrow b = tg_make(cm, random_group(*cm.H, rng, 0.4),
                            Mat(2.345 * cm.eG()));
  CHECK_THROWS_AS(tg_compose(a, b), NotComposable);
  CHECK_THROWS_AS(tg_make(cm, Mat(Mat::Zero(2, 2)), cm.eG()), NotInGroup);
}

TEST_CASE("group-level adjoint against a direct semidirect conjugation oracle") {
  const CrossedModule& cm = crossed_module_catalog("so3-conj");
  std::mt19937_64 rng(22);
  for (int i = 0; i < 30; ++i) {
    TwoGroupArrow x = tg_make(cm, random_group(*cm.H, rng, 0.5),
                              random_group(*cm.G, rng, 0.5));
    TwoGroupArrow y = tg_make(cm, random_group(*cm.H, rng, 0.5),
                              random_group(*cm.G, rng, 0.5));
    // oracle: conjugation computed directly through tensor products
    TwoGroupArrow direct = tg_tensor(x, tg_tensor(y, tg_tensor_inverse(x)));
    TwoGroupArrow got = adjoint_group(x, y);
    CHECK((direct.h - got.h).norm() < 1e-12);
    CHECK((direct.g - got.g).norm() < 1e-12);
  }
}

TEST_CASE("algebra-level adjoint matches finite differences of the group level") {
  for (const std::string& name : {std::string("conj"), std::string("so3-conj"),
                                  std::string("rplus-r")}) {
    const CrossedModule& cm = crossed_module_catalog(name);
    std::mt19937_64 rng(23);
    INFO(name);
    for (int i = 0; i < 20; ++i) {
      TwoGroupArrow by = tg_make(cm, random_group(*cm.H, rng, 0.5),
                                 random_group(*cm.G, rng, 0.5));
      Mat A = random_algebra(*cm.H, rng, 0.5);
      Mat B = random_algebra(*cm.G, rng, 0.5);
      TwoAlgebraArrow got = adjoint_algebra(by, TwoAlgebraArrow{&cm, A, B});
      // finite difference of t |-> Ad_by (exp(tA), exp(tB))
      const double h = 1e-5;
      auto curve = [&](double t) {
        return adjoint_group(
            by, TwoGroupArrow{&cm, mat_exp(t * A), mat_exp(t * B)});
      };
      Mat dh = (curve(h).h - curve(-h).h) / (2.0 * h);
      Mat dg = (curve(h).g - curve(-h).g) / (2.0 * h);
      Mat dh2 = (curve(h / 2).h - curve(-h / 2).h) / h;
      Mat dg2 = (curve(h / 2).g - curve(-h / 2).g) / h;
      CHECK((got.A - (4.0 * dh2 - dh) / 3.0).norm() < 1e-5);
      CHECK((got.B - (4.0 * dg2 - dg) / 3.0).norm() < 1e-5);
    }
  }
}

TEST_CASE("2-algebra bracket: antisymmetry, Jacobi, and compatibility with t") {
  const CrossedModule& cm = crossed_module_catalog("so3-conj");
  std::mt19937_64 rng(24);
  auto t_map = [&cm](const TwoAlgebraArrow& a) {
    return Mat(cm.tau_diff(a.A) + a.B);
  };
  for (int i = 0; i < 20; ++i) {
    TwoAlgebraArrow x{&cm, random_algebra(*cm.H, rng, 0.5),
                      random_algebra(*cm.G, rng, 0.5)};
    TwoAlgebraArrow y{&cm, random_algebra(*cm.H, rng, 0.5),
                      random_algebra(*cm.G, rng, 0.5)};
    TwoAlgebraArrow z{&cm, random_algebra(*cm.H, rng, 0.5),
                      random_algebra(*cm.G, rng, 0.5)};
    TwoAlgebraArrow xy = ta_bracket(x, y);
    TwoAlgebraArrow yx = ta_bracket(y, x);
    CHECK((xy.A + yx.A).norm() < 1e-9);
    CHECK((xy.B + yx.B).norm() < 1e-9);
    // Jacobi
    TwoAlgebraArrow j1 = ta_bracket(x, ta_bracket(y, z));
    TwoAlgebraArrow j2 = ta_bracket(y, ta_bracket(z, x));
    TwoAlgebraArrow j3 = ta_bracket(z, ta_bracket(x, y));
    CHECK((j1.A + j2.A + j3.A).norm() < 1e-8);
    CHECK((j1.B + j2.B + j3.B).norm() < 1e-8);
    // t is a homomorphism onto the matrix commutator
    CHECK((t_map(xy) - commutator(t_map(x), t_map(y))).norm() < 1e-8);
  }
}

TEST_CASE("performance: Peiffer suite is fast enough for the gate") {
  auto start = std::chrono::steady_clock::now();
  for (const std::string& name : crossed_module_core_catalog_names())
    CHECK(peiffer_check(crossed_module_catalog(name), 200, 0.5).pass(1e-9));
  auto elapsed = std::chrono::duration<double>(
                     std::chrono::steady_clock::now() - start)
                     .count();
  CHECK(elapsed < 5.0);
}
