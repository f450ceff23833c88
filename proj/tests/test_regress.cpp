#include <doctest.h>

#include <enorm/regress.hpp>
#include <enorm/rng.hpp>

#include "oracles.hpp"

#include <cmath>
#include <string>
#include <vector>

using namespace enorm;

TEST_CASE("ols recovers an exact line") {
  Eigen::MatrixXd X(3, 1);
  X << 0.0, 1.0, 2.0;
  Eigen::VectorXd y(3);
  y << 1.0, 3.0, 5.0;
  const FittedModel m = fit_ols(X, y);
  CHECK(m.weights(0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(m.intercept == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.solver.stop_reason == "closed_form");
  CHECK(m.solver.objective == doctest::Approx(0.0).epsilon(1e-20));
}

TEST_CASE("ols on a symmetric bump gives slope zero intercept one third") {
  Eigen::MatrixXd X(3, 1);
  X << 0.0, 1.0, 2.0;
  Eigen::VectorXd y(3);
  y << 0.0, 1.0, 0.0;
  const FittedModel m = fit_ols(X, y);
  CHECK(std::abs(m.weights(0)) < 1e-14);
  CHECK(m.intercept == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("ols flags rank deficiency") {
  SUBCASE("duplicated column") {
    Eigen::MatrixXd X(4, 2);
    X << 1, 1, 2, 2, 3, 3, 4, 4;
    Eigen::VectorXd y(4);
    y << 1, 2, 3, 4;
    CHECK_THROWS_AS((void)fit_ols(X, y), ValidationError);
  }
  SUBCASE("constant column collides with the intercept") {
    Eigen::MatrixXd X(3, 1);
    X << 5, 5, 5;
    Eigen::VectorXd y(3);
    y << 1, 2, 3;
    CHECK_THROWS_AS((void)fit_ols(X, y), ValidationError);
  }
  SUBCASE("fewer rows than coefficients") {
    Eigen::MatrixXd X(2, 2);
    X << 1, 2, 3, 4;
    Eigen::VectorXd y(2);
    y << 1, 2;
    CHECK_THROWS_AS((void)fit_ols(X, y), ValidationError);
  }
}

TEST_CASE("ols handles wildly mismatched column scales") {
  // Energies near 0.1 against flop counts near 1e10; a naive relative rank
  // threshold on the unequilibrated matrix rejects this well-posed system.
  Eigen::MatrixXd X(5, 2);
  X << 0.11, 1.1e10, 0.25, 2.3e10, 0.42, 3.9e10, 0.58, 5.5e10, 0.93, 8.7e10;
  Eigen::VectorXd y(5);
  for (int i = 0; i < 5; ++i) y(i) = 0.03 + 2.0 * X(i, 0) + 1.5e-11 * X(i, 1);
  const FittedModel m = fit_ols(X, y);
  CHECK(m.weights(0) == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(m.weights(1) == doctest::Approx(1.5e-11).epsilon(1e-7));
  CHECK(m.intercept == doctest::Approx(0.03).epsilon(1e-6));
}

TEST_CASE("ols is exactly equivariant under power-of-two target scaling") {
  Eigen::MatrixXd X(6, 2);
  X << 0.3, 1.2, 0.7, 0.4, 1.9, 2.2, 2.6, 0.1, 3.3, 1.7, 4.1, 2.9;
  Eigen::VectorXd y(6);
  y << 0.2, 1.4, 2.7, 3.1, 4.9, 5.3;
  const FittedModel a = fit_ols(X, y);
  const FittedModel b = fit_ols(X, (4.0 * y).eval());
  CHECK(b.weights(0) == 4.0 * a.weights(0));
  CHECK(b.weights(1) == 4.0 * a.weights(1));
  CHECK(b.intercept == 4.0 * a.intercept);
}

TEST_CASE("ols beats a blind random search on random instances") {
  Rng rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 1 + static_cast<int>(rng.uniform_below(3));
    const int n = d + 2 + static_cast<int>(rng.uniform_below(4));
    Eigen::MatrixXd X(n, d);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) X(i, j) = -10.0 + 20.0 * rng.uniform01();
      y(i) = -10.0 + 20.0 * rng.uniform01();
    }
    FittedModel m;
    try {
      m = fit_ols(X, y);
    } catch (const ValidationError&) {
      continue;  // randomly degenerate draw
    }
    const oracle::SearchResult search =
        oracle::ols_random_search(X, y, 10000, -50.0, 50.0, 1000 + trial);
    const double fitted = oracle::sse(X, y, m.weights, m.intercept);
    CHECK(fitted <= search.objective + 1e-9 * (1.0 + search.objective));
    CHECK(m.solver.objective == doctest::Approx(fitted).epsilon(1e-9));
  }
}

TEST_CASE("poly2 expansion enumerates monomials in declared order") {
  CHECK(poly2_dim(1) == 2);
  CHECK(poly2_dim(2) == 5);
  CHECK(poly2_dim(3) == 9);
  CHECK(expanded_dim(Expansion::identity, 3) == 3);
  CHECK(expanded_dim(Expansion::poly2, 2) == 5);

  Eigen::MatrixXd X(1, 2);
  X << 2.0, 3.0;
  const Eigen::MatrixXd E = expand_poly2(X);
  REQUIRE(E.cols() == 5);
  CHECK(E(0, 0) == 2.0);
  CHECK(E(0, 1) == 3.0);
  CHECK(E(0, 2) == 4.0);   // x1*x1
  CHECK(E(0, 3) == 6.0);   // x1*x2
  CHECK(E(0, 4) == 9.0);   // x2*x2

  const std::vector<std::string> terms = expansion_terms(Expansion::poly2, 2);
  REQUIRE(terms.size() == 5);
  CHECK(terms[0] == "x1");
  CHECK(terms[2] == "x1*x1");
  CHECK(terms[3] == "x1*x2");
}

TEST_CASE("poly2 fit recovers a pure quadratic") {
  Eigen::MatrixXd X(4, 1);
  X << -1.0, 0.0, 1.0, 2.0;
  Eigen::VectorXd y(4);
  for (int i = 0; i < 4; ++i) y(i) = 3.0 * X(i, 0) * X(i, 0) - 2.0 * X(i, 0) + 1.0;
  RegressionSpec spec;
  spec.kind = RegKind::poly2;
  const FittedModel m = fit(X, y, spec);
  CHECK(m.kind == RegKind::poly2);
  CHECK(m.expansion == Expansion::poly2);
  CHECK(m.input_dim == 1);
  REQUIRE(m.weights.size() == 2);
  const Eigen::VectorXd pred = predict(m, X);
  for (int i = 0; i < 4; ++i) CHECK(pred(i) == doctest::Approx(y(i)).epsilon(1e-10));
  CHECK(m.weights(1) == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("svr matches the frozen two-point oracle") {
  Eigen::MatrixXd X(2, 1);
  X << 0.0, 1.0;
  Eigen::VectorXd y(2);
  y << 0.0, 1.0;
  RegressionSpec spec;
  spec.kind = RegKind::svr;
  spec.svr_c = 0.1;
  spec.svr_epsilon = 0.1;
  const FittedModel m = fit_svr_linear(X, y, spec);
  CHECK(m.solver.converged);
  CHECK(m.solver.stop_reason == "tol");
  CHECK(m.weights(0) == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(m.intercept == doctest::Approx(0.45).epsilon(1e-9));
  CHECK(m.solver.objective == doctest::Approx(0.075).epsilon(1e-9));
  CHECK(svr_objective(m.weights, m.intercept, X, y, 0.1, 0.1) ==
        doctest::Approx(0.075).epsilon(1e-9));
}

TEST_CASE("svr never loses to a brute-force grid on random 1-d instances") {
  Rng rng(77);
  const double cs[] = {0.1, 1.0, 10.0};
  const double epss[] = {1e-4, 0.05, 0.1};
  for (int trial = 0; trial < 24; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_below(4));
    Eigen::MatrixXd X(n, 1);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
      X(i, 0) = -1.0 + 2.0 * rng.uniform01();
      y(i) = -1.0 + 2.0 * rng.uniform01();
    }
    const double c = cs[trial % 3];
    const double eps = epss[(trial / 3) % 3];
    RegressionSpec spec;
    spec.kind = RegKind::svr;
    spec.svr_c = c;
    spec.svr_epsilon = eps;
    const FittedModel m = fit_svr_linear(X, y, spec);
    const double solver_obj = svr_objective(m.weights, m.intercept, X, y, c, eps);
    CHECK(solver_obj == doctest::Approx(m.solver.objective).epsilon(1e-9));
    const oracle::GridResult grid = oracle::svr_grid_1d(
        X.col(0), y, c, eps, -15.0, 15.0, -2.0, 2.0, 2e-2, 1e-4, 0.06);
    // The exact solver may only improve on any grid point; the reverse
    // direction is a loose sanity bound on the grid itself.
    CHECK(solver_obj <= grid.objective + 1e-9 * (1.0 + grid.objective));
    CHECK(grid.objective <= solver_obj + 2e-2 * (1.0 + solver_obj));
  }
}

TEST_CASE("svr objective trace never increases") {
  Rng rng(5150);
  Eigen::MatrixXd X(12, 2);
  Eigen::VectorXd y(12);
  for (int i = 0; i < 12; ++i) {
    X(i, 0) = rng.uniform01();
    X(i, 1) = rng.uniform01();
    y(i) = 0.7 * X(i, 0) - 0.2 * X(i, 1) + 0.1 + 0.05 * rng.gauss();
  }
  RegressionSpec spec;
  spec.kind = RegKind::svr;
  spec.svr_c = 5.0;
  spec.svr_epsilon = 0.01;
  const FittedModel m = fit_svr_linear(X, y, spec);
  REQUIRE(m.solver.objective_trace.size() >= 1);
  for (std::size_t i = 1; i < m.solver.objective_trace.size(); ++i) {
    CHECK(m.solver.objective_trace[i] <= m.solver.objective_trace[i - 1] + 1e-12);
  }
  CHECK(m.solver.objective ==
        doctest::Approx(m.solver.objective_trace.back()).epsilon(1e-9));
}

TEST_CASE("svr with zero epsilon degrades to absolute loss and still runs") {
  Eigen::MatrixXd X(4, 1);
  X << 0.0, 1.0, 2.0, 3.0;
  Eigen::VectorXd y(4);
  y << 0.1, 1.0, 2.1, 2.9;
  RegressionSpec spec;
  spec.kind = RegKind::svr;
  spec.svr_c = 10.0;
  spec.svr_epsilon = 0.0;
  const FittedModel m = fit_svr_linear(X, y, spec);
  const oracle::GridResult grid = oracle::svr_grid_1d(
      X.col(0), y, 10.0, 0.0, -5.0, 5.0, -2.0, 2.0, 1e-2, 1e-4, 0.03);
  const double solver_obj =
      svr_objective(m.weights, m.intercept, X, y, 10.0, 0.0);
  CHECK(solver_obj <= grid.objective + 1e-9 * (1.0 + grid.objective));
}

TEST_CASE("standardization leaves ols predictions unchanged") {
  Rng rng(31);
  Eigen::MatrixXd X(10, 2);
  Eigen::VectorXd y(10);
  for (int i = 0; i < 10; ++i) {
    X(i, 0) = 100.0 + 5.0 * rng.uniform01();
    X(i, 1) = 1e-3 * rng.uniform01();
    y(i) = 2.0 * X(i, 0) - 40.0 * X(i, 1) + rng.gauss();
  }
  RegressionSpec plain;
  RegressionSpec scaled;
  scaled.standardize = true;
  const FittedModel a = fit(X, y, plain);
  const FittedModel b = fit(X, y, scaled);
  CHECK_FALSE(a.scaler.has_value());
  REQUIRE(b.scaler.has_value());
  const Eigen::VectorXd pa = predict(a, X);
  const Eigen::VectorXd pb = predict(b, X);
  for (int i = 0; i < 10; ++i) {
    CHECK(pb(i) == doctest::Approx(pa(i)).epsilon(1e-8));
  }
}

TEST_CASE("fit validates its spec and inputs") {
  Eigen::MatrixXd X(3, 1);
  X << 1, 2, 3;
  Eigen::VectorXd y(3);
  y << 1, 2, 3;
  SUBCASE("negative svr_c") {
    RegressionSpec spec;
    spec.kind = RegKind::svr;
    spec.svr_c = -1.0;
    CHECK_THROWS_AS((void)fit(X, y, spec), ValidationError);
  }
  SUBCASE("negative epsilon") {
    RegressionSpec spec;
    spec.kind = RegKind::svr;
    spec.svr_epsilon = -0.1;
    CHECK_THROWS_AS((void)fit(X, y, spec), ValidationError);
  }
  SUBCASE("row count mismatch") {
    Eigen::VectorXd bad(2);
    bad << 1, 2;
    CHECK_THROWS_AS((void)fit(X, bad, RegressionSpec{}), ValidationError);
  }
  SUBCASE("predict dimension mismatch") {
    const FittedModel m = fit(X, y, RegressionSpec{});
    Eigen::MatrixXd wide(2, 2);
    wide << 1, 2, 3, 4;
    CHECK_THROWS_AS((void)predict(m, wide), ValidationError);
  }
}
