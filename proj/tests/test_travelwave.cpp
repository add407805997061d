#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "gkdv/errors.hpp"
#include "gkdv/expr.hpp"
#include "gkdv/ode.hpp"
#include "gkdv/travelwave.hpp"

using gkdv::big_F;
using gkdv::decay_rate;
using gkdv::Errc;
using gkdv::Error;
using gkdv::eval;
using gkdv::Expr;
using gkdv::first_order_rhs;
using gkdv::h_fun;
using gkdv::homoclinic_profile;
using gkdv::parse;
using gkdv::potential;
using gkdv::wave_speed;
using gkdv::WaveContext;
using gkdv::WaveProfile;

namespace {

double sech(double x) { return 1.0 / std::cosh(x); }

}  // namespace

TEST_CASE("antiderivative quadrature reproduces closed forms") {
  CHECK(big_F(parse("u"), 2.0) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(big_F(parse("1"), -3.0) == doctest::Approx(-3.0).epsilon(1e-13));
  CHECK(big_F(parse("u^2"), 3.0) == doctest::Approx(9.0).epsilon(1e-13));
  CHECK(big_F(parse("sin(u)"), 1.7) ==
        doctest::Approx(1.0 - std::cos(1.7)).epsilon(1e-12));
  CHECK(big_F(parse("u"), 0.0) == 0.0);
  CHECK(big_F(parse("u^2"), -2.0) == doctest::Approx(-8.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("averaged potential kernel h") {
  Expr fu = parse("u");
  Expr fu2 = parse("u^2");
  CHECK(h_fun(fu, 3.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(h_fun(fu, -1.2) == doctest::Approx(-0.2).epsilon(1e-12));
  CHECK(h_fun(fu2, 2.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  // value at the origin is f(0)/2 for any f
  for (const char* text : {"1", "u", "2 + u^3", "sin(u)", "exp(u)"}) {
    Expr f = parse(text);
    CHECK(h_fun(f, 0.0) == doctest::Approx(0.5 * eval(f, 0.0)).epsilon(1e-14));
  }

  // series continuation joins the quadrature branch smoothly; the straddle
  // gap is 2e-12, so h itself drifts by under f'(0)/3 * 1e-12 between them
  for (const char* text : {"2 + u^3", "exp(u)", "sin(u)"}) {
    Expr f = parse(text);
    double inside = h_fun(f, 0.999999e-6);
    double outside = h_fun(f, 1.000001e-6);
    CHECK(std::abs(inside - outside) < 1e-12);
  }
}

TEST_CASE("potential and first-order energy relation") {
  WaveContext kdv{parse("u"), 1.0, 0.0, 0.0};
  CHECK(std::abs(potential(kdv, 3.0)) < 1e-12);  // root at w = 3c
  CHECK(potential(kdv, 1.5) == doctest::Approx(-0.5625).epsilon(1e-12));
  CHECK(potential(kdv, 0.0) == 0.0);
  CHECK(first_order_rhs(kdv, 1.5) == doctest::Approx(1.125).epsilon(1e-12));

  WaveContext lifted{parse("u"), 0.0, 1.0, 0.0};
  CHECK(potential(lifted, 1.0) == doctest::Approx(1.0 + 1.0 / 6.0).epsilon(1e-12));

  // at a turning point the first-order form vanishes
  WaveContext at_peak{parse("u"), wave_speed(parse("u"), 3.0), 0.0,
                      potential(kdv, 3.0)};
  CHECK(std::abs(first_order_rhs(at_peak, 3.0)) < 1e-12);
}

TEST_CASE("wave speed from the turning point") {
  CHECK(wave_speed(parse("u"), 3.0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(wave_speed(parse("1"), 2.0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(wave_speed(parse("1"), -7.5) == doctest::Approx(1.0).epsilon(1e-13));
  double w0 = std::sqrt(6.0);
  CHECK(wave_speed(parse("u^2"), w0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK_THROWS_AS(wave_speed(parse("u"), 0.0), Error);
}

TEST_CASE("quadratic nonlinearity gives the classical sech^2 pulse") {
  Expr f = parse("u");
  WaveProfile p = homoclinic_profile(f, 3.0, 15.0, 1001);
  CHECK(p.c == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(p.z_samples.size() == 1001);

  double sup = 0.0;
  for (size_t i = 0; i < p.z_samples.size(); ++i) {
    double want = 3.0 * sech(p.z_samples[i] / 2.0) * sech(p.z_samples[i] / 2.0);
    sup = std::max(sup, std::abs(p.w_samples[i] - want));
  }
  CHECK(sup <= 1e-6);

  // peak at z = 0 and monotone decay on each side
  int mid = (static_cast<int>(p.z_samples.size()) - 1) / 2;
  CHECK(p.z_samples[mid] == 0.0);
  CHECK(p.w_samples[mid] == 3.0);
  for (size_t i = mid; i + 1 < p.w_samples.size(); ++i)
    CHECK(p.w_samples[i + 1] < p.w_samples[i]);
  for (size_t i = 0; i < static_cast<size_t>(mid); ++i)
    CHECK(p.w_samples[i + 1] > p.w_samples[i]);

  CHECK(p.decay_rate == doctest::Approx(1.0).epsilon(0.02));
  CHECK(decay_rate(p) == doctest::Approx(p.decay_rate));
}

TEST_CASE("cubic nonlinearity gives the sech pulse") {
  const double A = 0.7;
  const double a = std::sqrt(6.0) * A;
  Expr f = parse("u^2");
  WaveProfile p = homoclinic_profile(f, a, 15.0, 1001);
  CHECK(p.c == doctest::Approx(A * A).epsilon(1e-12));

  double sup = 0.0;
  for (size_t i = 0; i < p.z_samples.size(); ++i) {
    double want = a * sech(A * p.z_samples[i]);
    sup = std::max(sup, std::abs(p.w_samples[i] - want));
  }
  CHECK(sup <= 1e-6);
  CHECK(p.decay_rate == doctest::Approx(A).epsilon(0.02));
}

TEST_CASE("depression pulse through a negative turning point") {
  Expr f = parse("-u");
  WaveProfile p = homoclinic_profile(f, -3.0, 15.0, 801);
  CHECK(p.c == doctest::Approx(1.0).epsilon(1e-12));
  double sup = 0.0;
  for (size_t i = 0; i < p.z_samples.size(); ++i) {
    double want = -3.0 * sech(p.z_samples[i] / 2.0) * sech(p.z_samples[i] / 2.0);
    sup = std::max(sup, std::abs(p.w_samples[i] - want));
  }
  CHECK(sup <= 1e-6);
  CHECK(p.decay_rate == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("profile conserves the orbit energy") {
  Expr f = parse("u");
  WaveProfile p = homoclinic_profile(f, 3.0, 15.0, 501);
  WaveContext ctx{f, p.c, 0.0, 0.0};
  double budget = 1e-10 * (1.0 + std::abs(potential(ctx, p.w0)));
  for (size_t i = 0; i < p.z_samples.size(); ++i) {
    double e = 0.5 * p.dw_samples[i] * p.dw_samples[i] +
               potential(ctx, p.w_samples[i]);
    CHECK(std::abs(e) <= budget);
  }
}

TEST_CASE("mirrored half matches an independent backward integration") {
  Expr f = parse("u");
  WaveProfile p = homoclinic_profile(f, 3.0, 10.0, 401);
  auto rhs = [&](double, std::span<const double> y, std::span<double> dy) {
    dy[0] = y[1];
    dy[1] = p.c * y[0] - big_F(f, y[0]);
  };
  std::vector<double> y0 = {3.0, 0.0};
  gkdv::OdeOptions opt;
  opt.rel_tol = 1e-12;
  opt.abs_tol = 1e-14;
  auto back = gkdv::integrate_dense(rhs, 0.0, y0, -10.0, opt);
  for (size_t i = 0; i < p.z_samples.size(); ++i) {
    if (p.z_samples[i] >= 0.0) continue;
    CHECK(std::abs(back.eval(p.z_samples[i])[0] - p.w_samples[i]) <=
          1e-8 * p.w0);
  }
}

TEST_CASE("second interior turning point violates the hypothesis") {
  Expr f = parse("u - u^2");
  try {
    homoclinic_profile(f, 1.8, 15.0, 401);
    FAIL("expected a hypothesis report");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::hypothesis_violated);
    CHECK(std::string(e.what()).find("nonnegative") != std::string::npos);
  }
}

TEST_CASE("turning points outside the well are rejected") {
  // elevation-only nonlinearity probed on the wrong side
  CHECK_THROWS_AS(homoclinic_profile(parse("u"), -3.0, 10.0, 401), Error);
  // constant f has V identically zero: no pulse at all
  try {
    homoclinic_profile(parse("1"), 2.0, 10.0, 401);
    FAIL("expected a hypothesis report");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::hypothesis_violated);
  }
}

TEST_CASE("short windows report an insufficient tail") {
  WaveProfile p = homoclinic_profile(parse("u"), 3.0, 2.0, 401);
  CHECK(std::isnan(p.decay_rate));
  try {
    decay_rate(p);
    FAIL("expected a tail report");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::insufficient_tail);
  }

  WaveProfile flat;
  flat.w0 = 1.0;
  flat.z_samples = {-1.0, 0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
  flat.w_samples.assign(8, 1.0);
  flat.dw_samples.assign(8, 0.0);
  CHECK_THROWS_AS(decay_rate(flat), Error);
}

TEST_CASE("argument guards") {
  CHECK_THROWS_AS(homoclinic_profile(parse("u"), 0.0, 10.0, 401), Error);
  CHECK_THROWS_AS(homoclinic_profile(parse("u"), 3.0, -1.0, 401), Error);
  CHECK_THROWS_AS(homoclinic_profile(parse("u"), 3.0, 10.0, 4), Error);
}
