#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gkdv/ode.hpp"

namespace gkdv {

// Similarity reductions of u_t = f(u)u_x + u_xxx for the three
// exceptional nonlinearities.  Gauge: the translation parameters of the
// symmetry are set to zero (any two generators of a family are conjugate
// under translations, so this loses no orbits).
//
//   power:        f = f0 + (u - u0)^alpha
//                 u = u0 + w(z) t^(-2/(3 alpha)),  z = (f0 t + x) / cbrt(t)
//                 w''' = -w^alpha w' - z w'/3 - 2w/(3 alpha)
//   exponential:  f = f0 + lambda e^(alpha u)
//                 u = -(2/3) ln(t)/alpha + w(z),   z = (f0 t + x) / cbrt(t)
//                 w''' = -((3 lambda e^(alpha w) + z) w' + 2/alpha) / 3
//   logarithmic:  f = f0 + alpha ln|u - u0|, trajectories keep w > 0
//                 u = u0 + w(z) e^(t/(c1 alpha)),  z = x + t^2/(2 c1)
//                 w''' = w/(c1 alpha) - (alpha ln w + f0) w'
//   log_y:        w = e^y removes the logarithm,
//                 y''' + y'^3 + (alpha y + f0) y' + 3 y' y'' = 1/(c1 alpha)
//   log_p:        y' = p(y), theta = y, drops the order by one,
//                 p^2 p'' + p p'^2 + 3 p^2 p' + p^3 + (alpha theta + f0) p
//                   = 1/(c1 alpha)
enum class ReducedCase { power, exponential, logarithmic, log_y, log_p };

const char* reduced_case_name(ReducedCase c);

struct ReducedODE {
  ReducedCase case_tag = ReducedCase::power;
  int order = 3;  // length of the state vector (w, w', ...) fed to rhs
  double alpha = 0;
  double lambda = 0;  // exponential case
  double f0 = 0;
  double c1 = 0;  // logarithmic family
  // highest derivative as a function of (z, state); throws
  // Errc::domain_error off its domain (w <= 0, exp overflow, p = 0)
  std::function<double(double, std::span<const double>)> rhs;
};

struct Trajectory {
  ReducedCase case_tag = ReducedCase::power;
  int order = 3;
  double alpha = 0, lambda = 0, f0 = 0, c1 = 0;
  std::vector<double> z_samples;            // increasing, at least 200
  std::vector<std::vector<double>> states;  // states[i].size() == order
  DenseSolution dense;                      // continuous extension
};

ReducedODE reduce_power(double alpha, double f0);
ReducedODE reduce_exp(double alpha, double lambda);
ReducedODE reduce_log(double alpha, double f0, double c1);
ReducedODE log_y_form(double alpha, double f0, double c1);
ReducedODE log_p_form(double alpha, double f0, double c1);

/// Adaptive integration of the companion first-order system from z0 to z1
/// (either direction); per-step relative tolerance rel_tol.  Samples are
/// stored increasing.  Throws Errc::step_size_underflow near
/// singularities and propagates rhs domain errors.
Trajectory integrate(const ReducedODE& ode, double z0,
                     const std::vector<double>& state0, double z1,
                     double rel_tol = 1e-10);

/// State at any z inside the integrated span (Errc::out_of_range outside).
std::vector<double> state_at(const Trajectory& traj, double z);

/// (k_mean, k_drift) of I(z) = 3 w'' + z w + w^3 along an alpha = 2 power
/// trajectory; I is a first integral there, so k_drift stays at the
/// integration tolerance.  Errc::wrong_case for any other trajectory.
std::pair<double, double> painleve_first_integral(const Trajectory& traj);

/// Lifted field value u(x, t) through the similarity map of traj's case.
/// t must be positive for the power and exponential cases.  Throws
/// Errc::out_of_range when (x, t) maps outside the trajectory's z-span.
double lift_eval(const Trajectory& traj, double u0, double x, double t);

struct LiftPatch {
  std::vector<double> t_grid;
  std::vector<double> x_grid;
  std::vector<std::vector<double>> u;    // u[i][j] at (t_grid[i], x_grid[j])
  std::vector<std::vector<double>> u_t;  // analytic t-derivative
  double residual_max = 0;
};

/// u and analytic u_t on t_grid x [x_lo, x_hi], with the equation residual
/// |u_t - f(u) u_x - u_xxx| probed over the patch.  u_x comes from the
/// trajectory state; the third derivative is reconstructed by finite
/// differences of w'' so the residual is an independent check of the
/// reduced equation, not an algebraic identity.
LiftPatch lift(const Trajectory& traj, double u0,
               const std::vector<double>& t_grid, double x_lo, double x_hi,
               int nx = 201);

struct ChainReport {
  double y_residual = 0;  // max residual of the y-equation at the probes
  bool p_checked = false;
  double p_residual = 0;  // max residual of the p-equation when checked
  std::string note;       // why the p-form was skipped (empty when checked)
};

/// Substitutes y = ln w along a logarithmic-case trajectory and evaluates
/// the y-equation residual; where y is monotone (w' of one sign) also
/// inverts to p(theta) and evaluates the p-equation residual.  A sign
/// change in w' marks the p-form undefined and is reported in `note`.
ChainReport verify_y_and_p_chain(double alpha, double f0, double c1,
                                 const Trajectory& traj_w);

}  // namespace gkdv
