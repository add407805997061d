#include "gkdv/soliton.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "gkdv/errors.hpp"

namespace gkdv {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

double phase(const SolitonParams& p, double x, double t) {
  return p.A * (x - p.c3 * t) + p.b_phase;
}

}  // namespace

SolitonParams solve_params(double alpha, double A, double f0, double u0,
                           double b_phase) {
  if (alpha == 0.0 || alpha == -1.0 || alpha == -2.0)
    fail(Errc::forbidden_exponent,
         "alpha = " + fmt(alpha) + " is excluded; beta = 2/alpha must avoid "
         "{-1, -2} and alpha must be nonzero");
  if (!(A > 0.0))
    fail(Errc::invalid_argument, "inverse width A must be positive");

  SolitonParams p;
  p.alpha = alpha;
  p.A = A;
  p.beta = 2.0 / alpha;
  p.b_phase = b_phase;
  p.u0 = u0;
  p.f0 = f0;
  p.c3 = -f0 - A * A * p.beta * p.beta;

  // a^(2/beta) = A^2 (beta+1)(beta+2), solved for a; a real root needs a
  // nonnegative base unless beta/2 is an integer.
  double base = A * A * (p.beta + 1.0) * (p.beta + 2.0);
  double half = 0.5 * p.beta;
  if (base < 0.0 && half != std::nearbyint(half))
    fail(Errc::negative_base,
         "amplitude equation has negative base A^2(beta+1)(beta+2) = " +
             fmt(base) + " with beta = " + fmt(p.beta) + "; no real amplitude");
  p.a = std::pow(base, half);
  return p;
}

double eval_soliton(const SolitonParams& p, double x, double t) {
  double s = 1.0 / std::cosh(phase(p, x, t));
  return p.u0 + p.a * std::pow(s, p.beta);
}

SolitonDerivatives soliton_derivatives(const SolitonParams& p, double x,
                                       double t) {
  double th = phase(p, x, t);
  double s = 1.0 / std::cosh(th);
  double T = std::tanh(th);
  double sb = std::pow(s, p.beta);

  SolitonDerivatives d;
  d.u_x = -p.a * p.A * p.beta * sb * T;
  d.u_xxx = p.a * p.A * p.A * p.A * p.beta * sb * T *
            ((3.0 * p.beta + 2.0) -
             (p.beta + 1.0) * (p.beta + 2.0) * T * T);
  d.u_t = -p.c3 * d.u_x;
  return d;
}

double residual_closed_form(const SolitonParams& p) {
  const int n = 400;
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    double th = -10.0 + 20.0 * i / (n - 1);
    double x = (th - p.b_phase) / p.A;
    double u = eval_soliton(p, x, 0.0);
    SolitonDerivatives d = soliton_derivatives(p, x, 0.0);

    double shifted = u - p.u0;
    if (shifted < 0.0 && p.alpha != std::nearbyint(p.alpha))
      fail(Errc::domain_error,
           "f(u) = f0 + (u - u0)^alpha needs u >= u0 for non-integer alpha");
    double fu = p.f0 + std::pow(shifted, p.alpha);

    worst = std::max(worst, std::abs(d.u_t - fu * d.u_x - d.u_xxx));
  }
  return worst;
}

}  // namespace gkdv
