#include "gkdv/travelwave.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdio>
#include <limits>

#include "gkdv/errors.hpp"
#include "gkdv/ode.hpp"

namespace gkdv {

namespace {

using Quad = boost::math::quadrature::gauss_kronrod<double, 15>;

constexpr double kSeriesWindow = 1e-6;  // |w| below which h uses its series

template <typename Fn>
double integrate_0_to(Fn&& fn, double w) {
  if (w == 0.0) return 0.0;
  // The adaptive rule stops once tol * |panel estimate| clears the 2 eps
  // roundoff floor of the unscaled panel sum, so a fixed 1e-13 can never
  // terminate on ranges narrower than ~1e-2 and recurses to full depth.
  // Keeping tol just above that floor leaves narrow tail ranges at a
  // single panel, where the truncation error is far below roundoff.
  double tol = std::max(1e-13,
                        8.0 * std::numeric_limits<double>::epsilon() / std::abs(w));
  double err = 0.0;
  if (w > 0.0) return Quad::integrate(fn, 0.0, w, 15, tol, &err);
  return -Quad::integrate(fn, w, 0.0, 15, tol, &err);
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

double big_F(const Expr& f, double w) {
  return integrate_0_to([&](double x) { return eval(f, x); }, w);
}

double h_fun(const Expr& f, double w) {
  if (std::abs(w) <= kSeriesWindow)
    return 0.5 * eval(f, 0.0) + eval(diff(f), 0.0) * w / 6.0;
  // Fubini collapses the double integral: F2(w) = int_0^w (w - s) f(s) ds
  double f2 = integrate_0_to([&](double s) { return (w - s) * eval(f, s); }, w);
  return f2 / (w * w);
}

double potential(const WaveContext& ctx, double w) {
  return ctx.k * w + (h_fun(ctx.f, w) - 0.5 * ctx.c) * w * w;
}

double first_order_rhs(const WaveContext& ctx, double w) {
  return 2.0 * (ctx.E - potential(ctx, w));
}

double wave_speed(const Expr& f, double w0) {
  if (w0 == 0.0) fail(Errc::invalid_argument, "turning point w0 must be nonzero");
  return 2.0 * h_fun(f, w0);
}

WaveProfile homoclinic_profile(const Expr& f, double w0, double z_max, int n) {
  if (w0 == 0.0) fail(Errc::invalid_argument, "turning point w0 must be nonzero");
  if (!(z_max > 0.0)) fail(Errc::invalid_argument, "z_max must be positive");
  if (n < 17) fail(Errc::invalid_argument, "need at least 17 samples");
  if (n % 2 == 0) ++n;

  const double c = wave_speed(f, w0);
  const WaveContext ctx{f, c, 0.0, 0.0};

  // The orbit through (w0, 0) is homoclinic to the origin only if the
  // potential is strictly negative between 0 and w0.
  const int scan = 2000;
  for (int j = 1; j < scan; ++j) {
    double w = w0 * j / scan;
    if (potential(ctx, w) >= 0.0)
      fail(Errc::hypothesis_violated,
           "potential is nonnegative at w = " + fmt(w) +
               " inside (0, " + fmt(w0) + "); no homoclinic orbit");
  }
  // simple turning point: V'(w0) = F(w0) - c w0 nonzero, directed inward
  double slope = big_F(f, w0) - c * w0;
  if (!(slope * (w0 > 0 ? 1.0 : -1.0) > 0.0))
    fail(Errc::hypothesis_violated,
         "turning point at w0 = " + fmt(w0) + " is not simple");

  // the orbit leaves the saddle's stable manifold at the rate of the local
  // truncation error amplified by exp(z), so the tail needs tight tolerances
  OdeOptions opt;
  opt.rel_tol = 1e-12;
  opt.abs_tol = 1e-14;
  auto rhs = [&](double, std::span<const double> y, std::span<double> dy) {
    dy[0] = y[1];
    dy[1] = c * y[0] - big_F(f, y[0]);
  };
  std::vector<double> y0 = {w0, 0.0};
  DenseSolution sol = integrate_dense(rhs, 0.0, y0, z_max, opt);

  // half grid on [0, z_max]; the orbit is even in z because it starts at a
  // turning point, so the left half is the mirror image
  const int half = (n + 1) / 2;
  WaveProfile p;
  p.c = c;
  p.w0 = w0;
  p.z_samples.resize(n);
  p.w_samples.resize(n);
  p.dw_samples.resize(n);
  for (int i = 0; i < half; ++i) {
    double z = z_max * i / (half - 1);
    auto y = sol.eval(z);
    int right = half - 1 + i;
    int left = half - 1 - i;
    p.z_samples[right] = z;
    p.w_samples[right] = y[0];
    p.dw_samples[right] = y[1];
    p.z_samples[left] = -z;
    p.w_samples[left] = y[0];
    p.dw_samples[left] = -y[1];
  }

  // cross-check against the inversion integral z(w) = int dw/(w sqrt(c-2h)).
  // The integrand blows up like an inverse square root at the turning point
  // and like 1/w at the origin; each end gets its own flattening
  // substitution (s^2 = |w0 - w| there, w = +-exp(-r) here) so the
  // quadrature sees only smooth integrands.
  // Within delta_safe of w0 the radicand c - 2h, which vanishes like
  // |w0 - xi|, drops below the absolute quadrature noise of h; that last
  // sliver is integrated with the leading square-root model instead, with
  // relative model error O(delta_safe/w0).
  const double sgn = w0 > 0 ? 1.0 : -1.0;
  const double delta_safe = 1e-6 * std::abs(w0);
  auto inversion_z = [&](double w) {
    double close = std::max(std::abs(w), 0.5 * std::abs(w0));
    double s_safe = std::sqrt(delta_safe);
    double rad_safe = c - 2.0 * h_fun(f, w0 - sgn * delta_safe);
    double z = 2.0 * delta_safe / (std::abs(w0) * std::sqrt(rad_safe));
    double smax = std::sqrt(std::abs(w0) - close);
    auto near_peak = [&](double s) {
      double xi = w0 - sgn * s * s;
      double rad = c - 2.0 * h_fun(f, xi);
      return 2.0 * s / (std::abs(xi) * std::sqrt(rad));
    };
    double err = 0.0;
    z += Quad::integrate(near_peak, s_safe, smax, 15, 1e-11, &err);
    if (std::abs(w) < close) {
      auto near_origin = [&](double r) {
        double rad = c - 2.0 * h_fun(f, sgn * std::exp(-r));
        return 1.0 / std::sqrt(rad);
      };
      z += Quad::integrate(near_origin, -std::log(close),
                           -std::log(std::abs(w)), 15, 1e-11, &err);
    }
    return z;
  };
  int checks = std::max(3, n / 8);
  for (int j = 1; j <= checks; ++j) {
    double z_target = 0.75 * z_max * j / checks;
    double w_here = sol.eval(z_target)[0];
    if (std::abs(w0 - w_here) < 10.0 * delta_safe) continue;  // inside sliver
    if (std::abs(w_here) < 1e-3 * std::abs(w0)) break;  // tail: see above
    double z_quad = inversion_z(w_here);
    if (std::abs(z_quad - z_target) > 1e-6)
      fail(Errc::hypothesis_violated,
           "profile disagrees with the inversion integral at z = " +
               fmt(z_target) + " by " + fmt(z_quad - z_target));
  }

  try {
    p.decay_rate = decay_rate(p);
  } catch (const Error& e) {
    if (e.code() != Errc::insufficient_tail) throw;
    p.decay_rate = std::numeric_limits<double>::quiet_NaN();
  }
  return p;
}

double decay_rate(const WaveProfile& profile) {
  const double peak = std::abs(profile.w0);
  std::vector<double> zs, ls;
  for (size_t i = 0; i < profile.z_samples.size(); ++i) {
    if (profile.z_samples[i] <= 0.0) continue;
    double wa = std::abs(profile.w_samples[i]);
    if (wa > 1e-9 * peak && wa < 1e-3 * peak) {
      zs.push_back(profile.z_samples[i]);
      ls.push_back(std::log(wa));
    }
  }
  if (zs.size() < 5)
    fail(Errc::insufficient_tail,
         "only " + std::to_string(zs.size()) +
             " samples between 1e-9 and 1e-3 of the peak; extend z_max");
  double n = static_cast<double>(zs.size());
  double sz = 0, sl = 0, szz = 0, szl = 0;
  for (size_t i = 0; i < zs.size(); ++i) {
    sz += zs[i];
    sl += ls[i];
    szz += zs[i] * zs[i];
    szl += zs[i] * ls[i];
  }
  double den = szz - sz * sz / n;
  if (den <= 0.0) fail(Errc::insufficient_tail, "tail window has no z spread");
  return -(szl - sz * sl / n) / den;
}

}  // namespace gkdv
