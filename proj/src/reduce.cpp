#include "gkdv/reduce.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "gkdv/errors.hpp"

namespace gkdv {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// w^alpha; integer exponents keep their sign parity, fractional ones need
// a positive base
double power_term(double w, double alpha, bool integer_alpha) {
  if (!integer_alpha && w <= 0.0)
    fail(Errc::domain_error,
         "w^alpha needs w > 0 for non-integer alpha, got w = " + fmt(w));
  return std::pow(w, alpha);
}

double exp_guarded(double arg) {
  if (arg > 700.0)
    fail(Errc::domain_error,
         "exp(alpha w) overflows, alpha w = " + fmt(arg) + " exceeds 700");
  return std::exp(arg);
}

double log_guarded(double w) {
  if (w <= 0.0)
    fail(Errc::domain_error,
         "logarithmic case needs w > 0, got w = " + fmt(w));
  return std::log(w);
}

// d(state[top])/dz by a fourth-order stencil on the dense interpolant;
// reconstructs the highest derivative independently of the reduced rhs
double fd_highest(const DenseSolution& dense, double z, double h,
                  std::span<double> buf) {
  std::size_t top = buf.size() - 1;
  dense.eval(z - 2.0 * h, buf);
  double m2 = buf[top];
  dense.eval(z - h, buf);
  double m1 = buf[top];
  dense.eval(z + h, buf);
  double p1 = buf[top];
  dense.eval(z + 2.0 * h, buf);
  double p2 = buf[top];
  return (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
}

bool is_integer(double x) { return x == std::nearbyint(x); }

struct MapEval {
  double u = 0;
  double u_t = 0;
  double ux_scale = 0;    // u_x = ux_scale * w'
  double uxxx_scale = 0;  // u_xxx = uxxx_scale * w'''
  double f_u = 0;         // nonlinearity at u, via the similarity form
};

MapEval map_eval(const Trajectory& tr, double u0, double t, double z,
                 std::span<const double> s) {
  double w = s[0], w1 = s[1];
  double a = tr.alpha;
  MapEval m;
  switch (tr.case_tag) {
    case ReducedCase::power: {
      double tc = std::cbrt(t);
      double gamma = -2.0 / (3.0 * a);
      double su = std::pow(t, gamma);
      m.u = u0 + w * su;
      m.u_t = su / t * (gamma * w - z * w1 / 3.0) + tr.f0 * w1 * su / tc;
      m.ux_scale = su / tc;
      m.uxxx_scale = su / t;
      m.f_u = tr.f0 + power_term(w, a, is_integer(a)) / (tc * tc);
      break;
    }
    case ReducedCase::exponential: {
      double tc = std::cbrt(t);
      m.u = -(2.0 / 3.0) * std::log(t) / a + w;
      m.u_t = -2.0 / (3.0 * a * t) + w1 * (tr.f0 / tc - z / (3.0 * t));
      m.ux_scale = 1.0 / tc;
      m.uxxx_scale = 1.0 / t;
      m.f_u = tr.f0 + tr.lambda * exp_guarded(a * w) / (tc * tc);
      break;
    }
    case ReducedCase::logarithmic: {
      double e = std::exp(t / (tr.c1 * a));
      m.u = u0 + w * e;
      m.u_t = e * (w / (tr.c1 * a) + w1 * t / tr.c1);
      m.ux_scale = e;
      m.uxxx_scale = e;
      m.f_u = tr.f0 + a * log_guarded(w) + t / tr.c1;
      break;
    }
    default:
      fail(Errc::wrong_case,
           "lift is defined for the power, exponential and logarithmic "
           "similarity maps only");
  }
  return m;
}

double map_z(const Trajectory& tr, double x, double t) {
  if (tr.case_tag == ReducedCase::logarithmic)
    return x + 0.5 * t * t / tr.c1;
  if (tr.case_tag != ReducedCase::power &&
      tr.case_tag != ReducedCase::exponential)
    fail(Errc::wrong_case,
         "lift is defined for the power, exponential and logarithmic "
         "similarity maps only, got " +
             std::string(reduced_case_name(tr.case_tag)));
  if (t <= 0.0)
    fail(Errc::invalid_argument,
         "the power and exponential lifts need t > 0, got t = " + fmt(t));
  return (tr.f0 * t + x) / std::cbrt(t);
}

void check_z_span(const Trajectory& tr, double z, double x, double t) {
  double lo = std::min(tr.dense.t_begin(), tr.dense.t_end());
  double hi = std::max(tr.dense.t_begin(), tr.dense.t_end());
  double slack = 1e-12 * (hi - lo);
  if (z < lo - slack || z > hi + slack)
    fail(Errc::out_of_range, "lift point (x = " + fmt(x) + ", t = " + fmt(t) +
                                 ") maps to z = " + fmt(z) +
                                 " outside the trajectory span [" + fmt(lo) +
                                 ", " + fmt(hi) + "]");
}

}  // namespace

const char* reduced_case_name(ReducedCase c) {
  switch (c) {
    case ReducedCase::power: return "POWER";
    case ReducedCase::exponential: return "EXP";
    case ReducedCase::logarithmic: return "LOG";
    case ReducedCase::log_y: return "LOG_Y";
    case ReducedCase::log_p: return "LOG_P";
  }
  return "?";
}

ReducedODE reduce_power(double alpha, double f0) {
  if (alpha == 0.0) fail(Errc::invalid_argument, "alpha must be nonzero");
  ReducedODE ode;
  ode.case_tag = ReducedCase::power;
  ode.order = 3;
  ode.alpha = alpha;
  ode.f0 = f0;  // enters the lift map only, never the reduced equation
  bool ia = is_integer(alpha);
  ode.rhs = [alpha, ia](double z, std::span<const double> s) {
    return -power_term(s[0], alpha, ia) * s[1] - z * s[1] / 3.0 -
           2.0 * s[0] / (3.0 * alpha);
  };
  return ode;
}

ReducedODE reduce_exp(double alpha, double lambda) {
  if (alpha == 0.0) fail(Errc::invalid_argument, "alpha must be nonzero");
  ReducedODE ode;
  ode.case_tag = ReducedCase::exponential;
  ode.order = 3;
  ode.alpha = alpha;
  ode.lambda = lambda;
  ode.rhs = [alpha, lambda](double z, std::span<const double> s) {
    return -((3.0 * lambda * exp_guarded(alpha * s[0]) + z) * s[1] +
             2.0 / alpha) /
           3.0;
  };
  return ode;
}

ReducedODE reduce_log(double alpha, double f0, double c1) {
  if (alpha == 0.0) fail(Errc::invalid_argument, "alpha must be nonzero");
  if (c1 == 0.0) fail(Errc::invalid_argument, "c1 must be nonzero");
  ReducedODE ode;
  ode.case_tag = ReducedCase::logarithmic;
  ode.order = 3;
  ode.alpha = alpha;
  ode.f0 = f0;
  ode.c1 = c1;
  ode.rhs = [alpha, f0, c1](double, std::span<const double> s) {
    return s[0] / (c1 * alpha) - (alpha * log_guarded(s[0]) + f0) * s[1];
  };
  return ode;
}

ReducedODE log_y_form(double alpha, double f0, double c1) {
  if (alpha == 0.0) fail(Errc::invalid_argument, "alpha must be nonzero");
  if (c1 == 0.0) fail(Errc::invalid_argument, "c1 must be nonzero");
  ReducedODE ode;
  ode.case_tag = ReducedCase::log_y;
  ode.order = 3;
  ode.alpha = alpha;
  ode.f0 = f0;
  ode.c1 = c1;
  ode.rhs = [alpha, f0, c1](double, std::span<const double> s) {
    double y = s[0], y1 = s[1], y2 = s[2];
    return 1.0 / (c1 * alpha) - y1 * y1 * y1 - (alpha * y + f0) * y1 -
           3.0 * y1 * y2;
  };
  return ode;
}

ReducedODE log_p_form(double alpha, double f0, double c1) {
  if (alpha == 0.0) fail(Errc::invalid_argument, "alpha must be nonzero");
  if (c1 == 0.0) fail(Errc::invalid_argument, "c1 must be nonzero");
  ReducedODE ode;
  ode.case_tag = ReducedCase::log_p;
  ode.order = 2;
  ode.alpha = alpha;
  ode.f0 = f0;
  ode.c1 = c1;
  ode.rhs = [alpha, f0, c1](double theta, std::span<const double> s) {
    double p = s[0], p1 = s[1];
    if (p == 0.0)
      fail(Errc::domain_error, "the p-form is singular at p = 0");
    return (1.0 / (c1 * alpha) - p * p1 * p1 - 3.0 * p * p * p1 - p * p * p -
            (alpha * theta + f0) * p) /
           (p * p);
  };
  return ode;
}

Trajectory integrate(const ReducedODE& ode, double z0,
                     const std::vector<double>& state0, double z1,
                     double rel_tol) {
  if (static_cast<int>(state0.size()) != ode.order)
    fail(Errc::invalid_argument,
         "initial state needs " + std::to_string(ode.order) + " entries");
  if (z1 == z0) fail(Errc::invalid_argument, "empty integration span");
  if (!(rel_tol > 0.0)) fail(Errc::invalid_argument, "tolerance must be positive");

  OdeRhs sys = [&ode](double z, std::span<const double> y,
                      std::span<double> dy) {
    for (int i = 0; i + 1 < ode.order; ++i) dy[i] = y[i + 1];
    dy[ode.order - 1] = ode.rhs(z, y);
  };
  OdeOptions opts;
  opts.rel_tol = rel_tol;
  opts.abs_tol = rel_tol * 1e-2;

  Trajectory tr;
  tr.case_tag = ode.case_tag;
  tr.order = ode.order;
  tr.alpha = ode.alpha;
  tr.lambda = ode.lambda;
  tr.f0 = ode.f0;
  tr.c1 = ode.c1;
  tr.dense = integrate_dense(sys, z0, state0, z1, opts);

  const int n = 240;
  double lo = std::min(z0, z1), hi = std::max(z0, z1);
  tr.z_samples.resize(n);
  tr.states.resize(n);
  for (int i = 0; i < n; ++i) {
    double z = lo + (hi - lo) * i / (n - 1);
    tr.z_samples[i] = z;
    tr.states[i] = tr.dense.eval(z);
  }
  return tr;
}

std::vector<double> state_at(const Trajectory& traj, double z) {
  return traj.dense.eval(z);
}

std::pair<double, double> painleve_first_integral(const Trajectory& traj) {
  if (traj.case_tag != ReducedCase::power || traj.alpha != 2.0)
    fail(Errc::wrong_case,
         "the first integral 3w'' + zw + w^3 belongs to the alpha = 2 power "
         "reduction, not " +
             std::string(reduced_case_name(traj.case_tag)) + " with alpha = " +
             fmt(traj.alpha));
  double mean = 0.0;
  std::vector<double> k(traj.z_samples.size());
  for (std::size_t i = 0; i < k.size(); ++i) {
    double z = traj.z_samples[i];
    double w = traj.states[i][0], w2 = traj.states[i][2];
    k[i] = 3.0 * w2 + z * w + w * w * w;
    mean += k[i];
  }
  mean /= static_cast<double>(k.size());
  double drift = 0.0;
  for (double ki : k) drift = std::max(drift, std::abs(ki - mean));
  return {mean, drift};
}

double lift_eval(const Trajectory& traj, double u0, double x, double t) {
  double z = map_z(traj, x, t);
  check_z_span(traj, z, x, t);
  std::vector<double> s = traj.dense.eval(z);
  return map_eval(traj, u0, t, z, s).u;
}

LiftPatch lift(const Trajectory& traj, double u0,
               const std::vector<double>& t_grid, double x_lo, double x_hi,
               int nx) {
  if (t_grid.empty()) fail(Errc::invalid_argument, "empty t grid");
  if (!(x_hi > x_lo)) fail(Errc::invalid_argument, "empty x window");
  if (nx < 9) fail(Errc::invalid_argument, "need at least 9 x samples");

  LiftPatch patch;
  patch.t_grid = t_grid;
  patch.x_grid.resize(nx);
  for (int j = 0; j < nx; ++j)
    patch.x_grid[j] = x_lo + (x_hi - x_lo) * j / (nx - 1);

  double zlo = std::min(traj.dense.t_begin(), traj.dense.t_end());
  double zhi = std::max(traj.dense.t_begin(), traj.dense.t_end());
  double h = 0.0025 * (zhi - zlo);
  std::vector<double> s(traj.order), buf(traj.order);

  patch.u.assign(t_grid.size(), std::vector<double>(nx));
  patch.u_t.assign(t_grid.size(), std::vector<double>(nx));
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    double t = t_grid[i];
    for (int j = 0; j < nx; ++j) {
      double x = patch.x_grid[j];
      double z = map_z(traj, x, t);
      check_z_span(traj, z, x, t);
      traj.dense.eval(z, s);
      MapEval m = map_eval(traj, u0, t, z, s);
      patch.u[i][j] = m.u;
      patch.u_t[i][j] = m.u_t;
      // equation residual where the stencil fits inside the span
      if (z - zlo >= 2.5 * h && zhi - z >= 2.5 * h) {
        double w3 = fd_highest(traj.dense, z, h, buf);
        double r = m.u_t - m.f_u * m.ux_scale * s[1] - m.uxxx_scale * w3;
        patch.residual_max = std::max(patch.residual_max, std::abs(r));
      }
    }
  }
  return patch;
}

ChainReport verify_y_and_p_chain(double alpha, double f0, double c1,
                                 const Trajectory& traj_w) {
  if (traj_w.case_tag != ReducedCase::logarithmic)
    fail(Errc::wrong_case, "the y and p substitutions apply to logarithmic "
                           "trajectories, got " +
                               std::string(reduced_case_name(traj_w.case_tag)));
  if (alpha == 0.0) fail(Errc::invalid_argument, "alpha must be nonzero");
  if (c1 == 0.0) fail(Errc::invalid_argument, "c1 must be nonzero");
  double a = alpha;
  double zlo = std::min(traj_w.dense.t_begin(), traj_w.dense.t_end());
  double zhi = std::max(traj_w.dense.t_begin(), traj_w.dense.t_end());
  double h = 0.0025 * (zhi - zlo);

  ChainReport report;
  bool has_pos = false, has_neg = false, has_zero = false;
  for (const std::vector<double>& s : traj_w.states) {
    if (s[1] > 0.0) has_pos = true;
    else if (s[1] < 0.0) has_neg = true;
    else has_zero = true;
  }

  const int probes = 80;
  std::vector<double> s(traj_w.order), buf(traj_w.order);
  std::vector<double> y3s(probes), y2s(probes), y1s(probes), ys(probes);
  for (int i = 0; i < probes; ++i) {
    double z = (zlo + 2.5 * h) +
               (zhi - zlo - 5.0 * h) * i / (probes - 1);
    traj_w.dense.eval(z, s);
    double w = s[0], w1 = s[1], w2 = s[2];
    double w3 = fd_highest(traj_w.dense, z, h, buf);
    double y = log_guarded(w);
    double y1 = w1 / w;
    double y2 = w2 / w - y1 * y1;
    double y3 = w3 / w - 3.0 * w2 * w1 / (w * w) + 2.0 * y1 * y1 * y1;
    ys[i] = y;
    y1s[i] = y1;
    y2s[i] = y2;
    y3s[i] = y3;
    double ry = y3 + y1 * y1 * y1 + (a * y + f0) * y1 + 3.0 * y1 * y2 -
                1.0 / (c1 * a);
    report.y_residual = std::max(report.y_residual, std::abs(ry));
  }

  // p(theta) inverts theta = y(z), which needs y' = w'/w of one strict sign
  if ((has_pos && has_neg) || has_zero) {
    report.note = "NonMonotone: w' is not of one sign on the window, so "
                  "theta = y(z) is not invertible and p(theta) is undefined";
    return report;
  }
  report.p_checked = true;
  for (int i = 0; i < probes; ++i) {
    double p = y1s[i];
    double p1 = y2s[i] / p;
    double p2 = (y3s[i] * p - y2s[i] * y2s[i]) / (p * p * p);
    double theta = ys[i];
    double rp = p * p * p2 + p * p1 * p1 + 3.0 * p * p * p1 + p * p * p +
                (a * theta + f0) * p - 1.0 / (c1 * a);
    report.p_residual = std::max(report.p_residual, std::abs(rp));
  }
  return report;
}

}  // namespace gkdv
