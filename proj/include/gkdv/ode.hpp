#pragma once

#include <functional>
#include <span>
#include <vector>

namespace gkdv {

// Writes dy/dt into dydt (same length as y).  May throw Errc::domain_error;
// the integrator then retries with a smaller step before giving up.
using OdeRhs = std::function<void(double t, std::span<const double> y,
                                  std::span<double> dydt)>;

struct OdeOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double initial_step = 0.0;  // 0: pick from the span
  double max_step = 0.0;      // 0: unrestricted
  std::size_t max_steps = 2'000'000;
};

// Continuous extension of an adaptive Dormand-Prince (5)4 run.  Each
// accepted step stores the quartic interpolation polynomial, so states can
// be queried anywhere on the span at the accuracy of the integration.
class DenseSolution {
 public:
  double t_begin() const { return t0_; }
  double t_end() const { return t1_; }
  std::size_t dim() const { return dim_; }
  std::size_t step_count() const { return steps_.size(); }

  void eval(double t, std::span<double> y_out) const;
  std::vector<double> eval(double t) const;

 private:
  friend DenseSolution integrate_dense(const OdeRhs&, double,
                                       std::span<const double>, double,
                                       const OdeOptions&);
  struct Step {
    double t, h;                // step covers [t, t+h] (h may be negative)
    std::vector<double> rcont;  // 5 * dim interpolation coefficients
  };
  double t0_ = 0, t1_ = 0;
  std::size_t dim_ = 0;
  std::vector<Step> steps_;
};

/// Integrate from t0 to t1 (either direction).  Throws
/// Errc::step_size_underflow when the controller cannot make progress and
/// propagates rhs domain errors that persist at the smallest step size.
DenseSolution integrate_dense(const OdeRhs& rhs, double t0,
                              std::span<const double> y0, double t1,
                              const OdeOptions& opts = {});

}  // namespace gkdv
