#pragma once

namespace gkdv {

// Hyperbolic-secant solitary wave u(x,t) = u0 + a sech^beta(A(x - c3 t) + b)
// for the nonlinearity f(u) = f0 + (u - u0)^alpha.  The ansatz solves
// u_t = f(u) u_x + u_xxx exactly when
//   beta = 2 / alpha,
//   a = (A^2 (beta+1)(beta+2))^(beta/2),
//   f0 + c3 + A^2 beta^2 = 0.
struct SolitonParams {
  double a = 0;        // amplitude
  double A = 0;        // inverse width, positive
  double beta = 0;     // secant exponent
  double b_phase = 0;  // phase shift inside the secant
  double c3 = 0;       // signed speed parameter, crest advances by c3 per unit t
  double u0 = 0;       // pedestal, also the offset inside f
  double f0 = 0;
  double alpha = 0;
};

struct SolitonDerivatives {
  double u_t = 0;
  double u_x = 0;
  double u_xxx = 0;
};

/// Parameters of the solitary wave with inverse width A > 0.
/// Throws Errc::forbidden_exponent for alpha in {0, -1, -2} and
/// Errc::negative_base when A^2(beta+1)(beta+2) < 0 with beta/2 not an
/// integer, so the amplitude equation has no real root.
SolitonParams solve_params(double alpha, double A, double f0 = 0.0,
                           double u0 = 0.0, double b_phase = 0.0);

/// u0 + a sech^beta(A(x - c3 t) + b_phase).
double eval_soliton(const SolitonParams& p, double x, double t);

/// Analytic partials of the ansatz.  u_t = -c3 u_x holds exactly and
/// u_x vanishes at the crest.
SolitonDerivatives soliton_derivatives(const SolitonParams& p, double x,
                                       double t);

/// Max of |u_t - f(u) u_x - u_xxx| over a 400-point grid spanning
/// phase values A(x - c3 t) + b in [-10, 10], all derivatives analytic.
/// Zero to round-off when p satisfies the defining equations; materially
/// nonzero once any one of them is broken.
double residual_closed_form(const SolitonParams& p);

}  // namespace gkdv
