#include "gkdv/ode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gkdv/errors.hpp"

namespace gkdv {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;

// difference between the 5th and embedded 4th order weights
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

// continuous-extension weights
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

}  // namespace

void DenseSolution::eval(double t, std::span<double> y_out) const {
  if (steps_.empty()) fail(Errc::out_of_range, "empty solution");
  double lo = std::min(t0_, t1_), hi = std::max(t0_, t1_);
  double slack = 1e-9 * (hi - lo) + 1e-12;
  if (t < lo - slack || t > hi + slack)
    fail(Errc::out_of_range,
         "query t=" + std::to_string(t) + " outside the integrated span");

  // steps are ordered by traversal; locate by signed progress
  double dir = t1_ >= t0_ ? 1.0 : -1.0;
  std::size_t leftmost = 0, count = steps_.size();
  while (count > 1) {
    std::size_t half = count / 2;
    std::size_t mid = leftmost + half;
    double step_end = steps_[mid].t;
    if ((t - step_end) * dir >= 0.0) {
      leftmost = mid;
      count -= half;
    } else {
      count = half;
    }
  }
  const Step& s = steps_[leftmost];
  double theta = (t - s.t) / s.h;
  theta = std::clamp(theta, 0.0, 1.0);
  double th1 = 1.0 - theta;
  for (std::size_t i = 0; i < dim_; ++i) {
    const double* rc = s.rcont.data() + 5 * i;
    y_out[i] = rc[0] + theta * (rc[1] + th1 * (rc[2] + theta * (rc[3] + th1 * rc[4])));
  }
}

std::vector<double> DenseSolution::eval(double t) const {
  std::vector<double> y(dim_);
  eval(t, y);
  return y;
}

DenseSolution integrate_dense(const OdeRhs& rhs, double t0,
                              std::span<const double> y0, double t1,
                              const OdeOptions& opts) {
  const std::size_t n = y0.size();
  DenseSolution sol;
  sol.t0_ = t0;
  sol.t1_ = t1;
  sol.dim_ = n;
  if (t0 == t1) return sol;

  const double span = t1 - t0;
  const double dir = span > 0 ? 1.0 : -1.0;
  const double h_floor = 1e-14 * std::max(1.0, std::abs(span));
  double h_max = opts.max_step > 0 ? opts.max_step : std::abs(span);

  std::vector<double> y(y0.begin(), y0.end());
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
  std::vector<double> ytmp(n), ynew(n);

  double t = t0;
  rhs(t, y, k1);
  double h = opts.initial_step != 0 ? std::abs(opts.initial_step)
                                    : std::abs(span) / 100.0;
  h = std::min(h, h_max);

  bool k1_fresh = true;
  for (std::size_t step = 0;; ++step) {
    if (step >= opts.max_steps)
      fail(Errc::step_size_underflow,
           "step limit reached at t=" + std::to_string(t));
    if (h < h_floor)
      fail(Errc::step_size_underflow,
           "step size underflow at t=" + std::to_string(t));

    bool last = false;
    if (h >= std::abs(t1 - t)) {
      h = std::abs(t1 - t);
      last = true;
    }
    const double hs = dir * h;  // signed step

    if (!k1_fresh) {
      rhs(t, y, k1);
      k1_fresh = true;
    }

    bool stage_failed = false;
    try {
      for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + hs * a21 * k1[i];
      rhs(t + c2 * hs, ytmp, k2);
      for (std::size_t i = 0; i < n; ++i)
        ytmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
      rhs(t + c3 * hs, ytmp, k3);
      for (std::size_t i = 0; i < n; ++i)
        ytmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
      rhs(t + c4 * hs, ytmp, k4);
      for (std::size_t i = 0; i < n; ++i)
        ytmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
      rhs(t + c5 * hs, ytmp, k5);
      for (std::size_t i = 0; i < n; ++i)
        ytmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                               a64 * k4[i] + a65 * k5[i]);
      rhs(t + hs, ytmp, k6);
      for (std::size_t i = 0; i < n; ++i)
        ynew[i] = y[i] + hs * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] +
                               a75 * k5[i] + a76 * k6[i]);
      rhs(t + hs, ynew, k7);
    } catch (const Error& err) {
      if (err.code() != Errc::domain_error) throw;
      if (h / 2 < h_floor) throw;  // the domain edge is genuine
      stage_failed = true;
    }
    if (stage_failed) {
      h /= 2;
      continue;
    }

    double err = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < n; ++i) {
      double ei = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                        e6 * k6[i] + e7 * k7[i]);
      double sk = opts.abs_tol +
                  opts.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      if (!std::isfinite(ynew[i])) finite = false;
      err += (ei / sk) * (ei / sk);
    }
    err = std::sqrt(err / n);
    if (!finite) err = 1e10;

    if (err <= 1.0) {
      DenseSolution::Step st;
      st.t = t;
      st.h = hs;
      st.rcont.resize(5 * n);
      for (std::size_t i = 0; i < n; ++i) {
        double ydiff = ynew[i] - y[i];
        double bspl = hs * k1[i] - ydiff;
        double* rc = st.rcont.data() + 5 * i;
        rc[0] = y[i];
        rc[1] = ydiff;
        rc[2] = bspl;
        rc[3] = ydiff - hs * k7[i] - bspl;
        rc[4] = hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                      d6 * k6[i] + d7 * k7[i]);
      }
      sol.steps_.push_back(std::move(st));

      t += hs;
      y.swap(ynew);
      k1.swap(k7);  // FSAL
      k1_fresh = true;
      if (last) break;
      double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
      h = std::min(h * std::clamp(fac, 0.2, 5.0), h_max);
    } else {
      double fac = 0.9 * std::pow(err, -0.2);
      h *= std::clamp(fac, 0.1, 0.9);
    }
  }
  return sol;
}

}  // namespace gkdv
