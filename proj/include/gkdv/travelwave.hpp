#pragma once

#include <vector>

#include "gkdv/expr.hpp"

namespace gkdv {

// Plane-wave ansatz u(x,t) = w(x + c t).  Profiles solve the Hamiltonian
// system  w'' = c w - F(w)  with F(w) the antiderivative of f vanishing at
// 0, i.e. motion in the potential V(w) = k w + (h(w) - c/2) w^2.
struct WaveContext {
  Expr f;
  double c = 0, k = 0, E = 0;
};

struct WaveProfile {
  std::vector<double> z_samples;   // strictly increasing, symmetric about 0
  std::vector<double> w_samples;
  std::vector<double> dw_samples;  // dw/dz
  double c = 0;
  double w0 = 0;          // w(0), the turning-point value
  double decay_rate = 0;  // NaN when the sampled window holds no tail
};

/// F(w) by adaptive quadrature, absolute accuracy ~1e-12 for moderate f.
double big_F(const Expr& f, double w);

/// h(w) = (1/w^2) * (second antiderivative of f vanishing to second order
/// at 0); continued through w = 0 by the series f(0)/2 + f'(0) w/6 for
/// |w| <= 1e-6.
double h_fun(const Expr& f, double w);

/// V(w) = k w + (h(w) - c/2) w^2.
double potential(const WaveContext& ctx, double w);

/// (dw/dz)^2 along the energy-E orbit: 2E - 2V(w).
double first_order_rhs(const WaveContext& ctx, double w);

/// Speed of the solitary wave whose turning point is w0: c = 2 h(w0).
double wave_speed(const Expr& f, double w0);

/// Solitary-wave profile with extremum w0 at z = 0, sampled on
/// [-z_max, z_max] (n is rounded up to an odd count so z = 0 is a sample).
/// The phase-plane system is integrated from the turning point, where the
/// orbit energy is zero by construction, and the result is cross-checked
/// against the inversion integral z(w) at ~n/8 points to 1e-6.
/// Throws Errc::hypothesis_violated when V(w) >= 0 somewhere strictly
/// between 0 and w0 or when the turning point is not simple.
WaveProfile homoclinic_profile(const Expr& f, double w0, double z_max = 15.0,
                               int n = 1001);

/// Exponential tail rate: minus the least-squares slope of log|w| against
/// z over the window 1e-9 < |w/w0| < 1e-3, z > 0.  Throws
/// Errc::insufficient_tail when fewer than five samples land there.
double decay_rate(const WaveProfile& profile);

}  // namespace gkdv
