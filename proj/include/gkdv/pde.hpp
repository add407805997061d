#pragma once

#include <vector>

#include "gkdv/classify.hpp"
#include "gkdv/expr.hpp"

namespace gkdv {

// Periodic sample of u(x, t) at x_j = j L / N, j = 0 .. N-1.
struct Field {
  double L = 0;
  int N = 0;
  std::vector<double> values;
  double t = 0;
};

// zero-filled field; N must be a power of two, at least 16
Field make_field(double L, int N, double t = 0.0);

// order-th spatial derivative by Fourier differentiation (order 1, 2 or 3);
// odd orders drop the Nyquist mode, whose odd derivative has no real
// representation on the grid
Field spectral_dx(const Field& field, int order);

// max_j |u_t_j - f(u_j) (u_x)_j - (u_xxx)_j| with spectral x-derivatives
double residual(const Field& field, const Field& u_t, const Expr& f);

// advective stability bound 0.5 / (max|f(u)| k_max + 0.05), k_max = pi N / L;
// the dispersive term does not constrain dt because step() advances it by
// the exact phase
double suggest_dt(const Field& field, const Expr& f);

// one integrating-factor step of u_t = f(u) u_x + u_xxx: the linear
// dispersion is applied as the exact Fourier phase, the dealiased (2/3 rule)
// nonlinear term by classical four-stage Runge-Kutta in the filtered
// variable; throws UnstableStep for dt above the advective bound or when
// the result stops being finite
Field step(const Field& field, const Expr& f, double dt);

struct RunReport {
  std::vector<double> times;
  std::vector<double> mass;      // (L/N) sum u
  std::vector<double> momentum;  // (L/N) sum u^2
  std::vector<double> peak_x;    // sub-grid peak position, unwrapped
  std::vector<double> peak_u;    // parabolic peak amplitude
  Field final_field;
  // traveling-wave speed c of u = w(x + ct): minus the least-squares
  // drift rate of the crest, so a soliton with parameter c3 reports -c3
  double speed_fit = 0;
};

RunReport evolve(const Field& field, const Expr& f, double T, double dt,
                 int sample_every = 1);

// Exact one-parameter flow of the affine generator g applied to the time
// slice carried by `field`.  tau is x-independent, so the slice maps to a
// single new time; x maps affinely and u maps affinely, so the image is
// resampled onto the original grid by trigonometric interpolation.  The
// classification result supplies the background level u0 used to locate
// the compact support for the window check; scaling flows (g.b != 0) of a
// field whose support would leave [0, L] raise WindowExceeded.
Field flow_transform(const Field& field, const SymmetryGenerator& g,
                     const ClassificationResult& f_params, double eps);

}  // namespace gkdv
