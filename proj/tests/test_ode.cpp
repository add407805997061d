#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "gkdv/errors.hpp"
#include "gkdv/ode.hpp"

using namespace gkdv;

TEST_CASE("exponential decay matches the closed form everywhere") {
  OdeRhs rhs = [](double, std::span<const double> y, std::span<double> dy) {
    dy[0] = -y[0];
  };
  std::vector<double> y0 = {1.0};
  DenseSolution sol = integrate_dense(rhs, 0.0, y0, 10.0);
  for (double t = 0.0; t <= 10.0; t += 0.0137) {
    double got = sol.eval(t)[0];
    CHECK(std::abs(got - std::exp(-t)) <= 1e-9 * (1.0 + std::exp(-t)));
  }
}

TEST_CASE("harmonic oscillator holds its energy and phase") {
  OdeRhs rhs = [](double, std::span<const double> y, std::span<double> dy) {
    dy[0] = y[1];
    dy[1] = -y[0];
  };
  std::vector<double> y0 = {1.0, 0.0};
  DenseSolution sol = integrate_dense(rhs, 0.0, y0, 50.0);
  for (double t = 0.0; t <= 50.0; t += 0.73) {
    auto y = sol.eval(t);
    CHECK(std::abs(y[0] - std::cos(t)) <= 2e-8);
    CHECK(std::abs(y[1] + std::sin(t)) <= 2e-8);
  }
}

TEST_CASE("backward integration works") {
  OdeRhs rhs = [](double t, std::span<const double>, std::span<double> dy) {
    dy[0] = 2.0 * t;
  };
  std::vector<double> y0 = {25.0};  // y = t^2 at t = 5
  DenseSolution sol = integrate_dense(rhs, 5.0, y0, -3.0);
  for (double t = 5.0; t >= -3.0; t -= 0.41) {
    CHECK(sol.eval(t)[0] == doctest::Approx(t * t).epsilon(1e-11));
  }
  CHECK(sol.eval(-3.0)[0] == doctest::Approx(9.0).epsilon(1e-11));
}

TEST_CASE("self-convergence under tolerance refinement") {
  // nonlinear, non-stiff test problem with no closed form at hand
  OdeRhs rhs = [](double t, std::span<const double> y, std::span<double> dy) {
    dy[0] = y[1];
    dy[1] = -std::sin(y[0]) - 0.1 * y[1] + 0.3 * std::cos(t);
  };
  std::vector<double> y0 = {0.5, 0.0};
  OdeOptions loose;
  loose.rel_tol = 1e-8;
  loose.abs_tol = 1e-10;
  OdeOptions tight;
  tight.rel_tol = 1e-12;
  tight.abs_tol = 1e-14;
  auto a = integrate_dense(rhs, 0.0, y0, 20.0, loose);
  auto b = integrate_dense(rhs, 0.0, y0, 20.0, tight);
  double worst = 0.0;
  for (double t = 0.0; t <= 20.0; t += 0.1)
    worst = std::max(worst, std::abs(a.eval(t)[0] - b.eval(t)[0]));
  CHECK(worst <= 1e-6);
  CHECK(b.step_count() > a.step_count());
}

TEST_CASE("queries outside the span are rejected") {
  OdeRhs rhs = [](double, std::span<const double> y, std::span<double> dy) {
    dy[0] = y[0];
  };
  std::vector<double> y0 = {1.0};
  DenseSolution sol = integrate_dense(rhs, 0.0, y0, 1.0);
  CHECK_THROWS_AS(sol.eval(1.5), Error);
  CHECK_THROWS_AS(sol.eval(-0.5), Error);
}

TEST_CASE("persistent domain failures surface as domain errors") {
  // the solution runs into sqrt of a negative value in finite time
  OdeRhs rhs = [](double t, std::span<const double>, std::span<double> dy) {
    double v = 1.0 - t;
    if (v < 0.0) fail(Errc::domain_error, "argument left the domain");
    dy[0] = std::sqrt(v);
  };
  std::vector<double> y0 = {0.0};
  CHECK_THROWS_AS(integrate_dense(rhs, 0.0, y0, 2.0), Error);
  try {
    integrate_dense(rhs, 0.0, y0, 2.0);
  } catch (const Error& err) {
    CHECK(err.code() == Errc::domain_error);
  }
}

TEST_CASE("unresolvable stiffness reports step size underflow") {
  OdeRhs rhs = [](double t, std::span<const double>, std::span<double> dy) {
    // derivative blows up approaching t = 1
    dy[0] = 1.0 / std::max(1.0 - t, 1e-300) / std::max(1.0 - t, 1e-300);
  };
  std::vector<double> y0 = {0.0};
  try {
    integrate_dense(rhs, 0.0, y0, 2.0);
    FAIL("expected failure");
  } catch (const Error& err) {
    CHECK(err.code() == Errc::step_size_underflow);
  }
}
