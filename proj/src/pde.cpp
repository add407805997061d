#include "gkdv/pde.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>

#include "gkdv/errors.hpp"

namespace gkdv {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

using Spectrum = std::vector<std::complex<double>>;

// Cached out-of-place plans per grid size.  A single lock serializes all
// transforms; planning and execution share the workspace buffers.
class Fft {
 public:
  explicit Fft(int n) : n_(n) {
    real_ = fftw_alloc_real(n);
    cplx_ = fftw_alloc_complex(n / 2 + 1);
    fwd_ = fftw_plan_dft_r2c_1d(n, real_, cplx_, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_c2r_1d(n, cplx_, real_, FFTW_ESTIMATE);
  }
  ~Fft() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(real_);
    fftw_free(cplx_);
  }
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  Spectrum forward(const std::vector<double>& u) {
    std::copy(u.begin(), u.end(), real_);
    fftw_execute(fwd_);
    Spectrum spec(n_ / 2 + 1);
    for (int m = 0; m <= n_ / 2; ++m)
      spec[m] = {cplx_[m][0], cplx_[m][1]};
    return spec;
  }

  std::vector<double> inverse(const Spectrum& spec) {
    for (int m = 0; m <= n_ / 2; ++m) {
      cplx_[m][0] = spec[m].real();
      cplx_[m][1] = spec[m].imag();
    }
    fftw_execute(bwd_);
    std::vector<double> u(n_);
    for (int j = 0; j < n_; ++j) u[j] = real_[j] / n_;
    return u;
  }

 private:
  int n_;
  double* real_;
  fftw_complex* cplx_;
  fftw_plan fwd_, bwd_;
};

std::mutex fft_mutex;

Fft& fft_for(int n) {
  static std::map<int, std::unique_ptr<Fft>> cache;
  auto it = cache.find(n);
  if (it == cache.end())
    it = cache.emplace(n, std::make_unique<Fft>(n)).first;
  return *it->second;
}

Spectrum forward(const std::vector<double>& u) {
  std::scoped_lock lock(fft_mutex);
  return fft_for(static_cast<int>(u.size())).forward(u);
}

std::vector<double> inverse(const Spectrum& spec, int n) {
  std::scoped_lock lock(fft_mutex);
  return fft_for(n).inverse(spec);
}

void validate(const Field& field, const char* who) {
  if (!(field.L > 0.0) || !std::isfinite(field.L))
    fail(Errc::invalid_argument,
         std::string(who) + ": domain length must be positive");
  if (field.N < 16 || (field.N & (field.N - 1)) != 0)
    fail(Errc::invalid_argument,
         std::string(who) + ": N must be a power of two, at least 16");
  if (static_cast<int>(field.values.size()) != field.N)
    fail(Errc::invalid_argument,
         std::string(who) + ": values size does not match N");
  for (double v : field.values)
    if (!std::isfinite(v))
      fail(Errc::invalid_argument,
           std::string(who) + ": field contains a non-finite value");
}

// multiply by (i k)^order in place; odd orders zero the Nyquist mode
void apply_derivative(Spectrum& spec, double L, int order) {
  int half = static_cast<int>(spec.size()) - 1;
  for (int m = 0; m <= half; ++m) {
    double k = 2.0 * M_PI * m / L;
    std::complex<double> v = spec[m];
    switch (order) {
      case 1: spec[m] = {-k * v.imag(), k * v.real()}; break;
      case 2: spec[m] = -(k * k) * v; break;
      case 3: {
        double k3 = k * k * k;
        spec[m] = {k3 * v.imag(), -k3 * v.real()};
        break;
      }
      default:
        fail(Errc::invalid_argument, "derivative order must be 1, 2 or 3");
    }
  }
  if (order % 2 == 1) spec[half] = 0.0;
}

// trigonometric interpolant of the spectrum at angle theta = 2 pi x / L
double trig_eval(const Spectrum& spec, int n, double theta) {
  std::complex<double> rot = std::polar(1.0, theta);
  std::complex<double> ph = rot;
  double acc = spec[0].real();
  for (int m = 1; m < n / 2; ++m) {
    acc += 2.0 * (spec[m] * ph).real();
    ph *= rot;
  }
  acc += spec[n / 2].real() * std::cos(0.5 * n * theta);
  return acc / n;
}

struct Peak {
  double x = 0;
  double u = 0;
};

// parabola through the three samples around the discrete maximum
Peak find_peak(const Field& field) {
  int n = field.N;
  int j = static_cast<int>(std::max_element(field.values.begin(),
                                            field.values.end()) -
                           field.values.begin());
  double ym = field.values[(j + n - 1) % n];
  double y0 = field.values[j];
  double yp = field.values[(j + 1) % n];
  double denom = ym - 2.0 * y0 + yp;
  double delta = denom == 0.0 ? 0.0 : 0.5 * (ym - yp) / denom;
  double dx = field.L / n;
  Peak p;
  p.x = j * dx + delta * dx;
  p.u = y0 - 0.25 * (ym - yp) * delta;
  return p;
}

}  // namespace

Field make_field(double L, int N, double t) {
  Field f;
  f.L = L;
  f.N = N;
  f.values.assign(std::max(N, 0), 0.0);
  f.t = t;
  validate(f, "make_field");
  return f;
}

Field spectral_dx(const Field& field, int order) {
  validate(field, "spectral_dx");
  Spectrum spec = forward(field.values);
  apply_derivative(spec, field.L, order);
  Field out = field;
  out.values = inverse(spec, field.N);
  return out;
}

double residual(const Field& field, const Field& u_t, const Expr& f) {
  validate(field, "residual");
  validate(u_t, "residual");
  if (u_t.N != field.N || u_t.L != field.L)
    fail(Errc::invalid_argument, "residual: u_t is on a different grid");
  Spectrum spec = forward(field.values);
  Spectrum d1 = spec, d3 = spec;
  apply_derivative(d1, field.L, 1);
  apply_derivative(d3, field.L, 3);
  std::vector<double> ux = inverse(d1, field.N);
  std::vector<double> uxxx = inverse(d3, field.N);
  double worst = 0.0;
  for (int j = 0; j < field.N; ++j) {
    double r = u_t.values[j] - eval(f, field.values[j]) * ux[j] - uxxx[j];
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

double suggest_dt(const Field& field, const Expr& f) {
  validate(field, "suggest_dt");
  double worst = 0.0;
  for (double v : field.values) worst = std::max(worst, std::abs(eval(f, v)));
  double k_max = M_PI * field.N / field.L;
  return 0.5 / (worst * k_max + 0.05);
}

Field step(const Field& field, const Expr& f, double dt) {
  validate(field, "step");
  if (!(dt > 0.0)) fail(Errc::invalid_argument, "step: dt must be positive");
  double bound = suggest_dt(field, f);
  if (dt > bound)
    fail(Errc::unstable_step, "step: dt = " + fmt(dt) +
                                  " exceeds the advective stability bound " +
                                  fmt(bound) + " at t = " + fmt(field.t));

  int n = field.N;
  int half = n / 2;
  int keep = n / 3;  // 2/3-rule cutoff for the nonlinear product

  // dealiased spectrum of f(u) u_x
  auto nonlinear = [&](const Spectrum& spec) {
    std::vector<double> u = inverse(spec, n);
    Spectrum dspec = spec;
    apply_derivative(dspec, field.L, 1);
    std::vector<double> ux = inverse(dspec, n);
    std::vector<double> prod(n);
    for (int j = 0; j < n; ++j) prod[j] = eval(f, u[j]) * ux[j];
    Spectrum out = forward(prod);
    for (int m = keep + 1; m <= half; ++m) out[m] = 0.0;
    return out;
  };

  // half-step and full-step phases of the exact dispersive propagator
  Spectrum e1(half + 1), e2(half + 1);
  for (int m = 0; m <= half; ++m) {
    double k = 2.0 * M_PI * m / field.L;
    e1[m] = std::polar(1.0, -k * k * k * dt / 2.0);
    e2[m] = e1[m] * e1[m];
  }

  Spectrum u0 = forward(field.values);
  auto combine = [&](const Spectrum& base, const Spectrum& incr,
                     double scale) {
    Spectrum out(half + 1);
    for (int m = 0; m <= half; ++m) out[m] = base[m] + scale * incr[m];
    return out;
  };
  auto phase = [&](const Spectrum& e, const Spectrum& v) {
    Spectrum out(half + 1);
    for (int m = 0; m <= half; ++m) out[m] = e[m] * v[m];
    return out;
  };

  Spectrum k1 = nonlinear(u0);
  Spectrum k2 = nonlinear(phase(e1, combine(u0, k1, dt / 2.0)));
  Spectrum k3 = nonlinear(combine(phase(e1, u0), k2, dt / 2.0));
  Spectrum k4 = nonlinear(combine(phase(e2, u0), phase(e1, k3), dt));

  Spectrum next(half + 1);
  for (int m = 0; m <= half; ++m) {
    next[m] = e2[m] * u0[m] +
              dt / 6.0 *
                  (e2[m] * k1[m] + 2.0 * e1[m] * (k2[m] + k3[m]) + k4[m]);
  }

  Field out = field;
  out.values = inverse(next, n);
  out.t = field.t + dt;

  double before = 0.0, after = 0.0;
  for (double v : field.values) before = std::max(before, std::abs(v));
  for (double v : out.values) {
    if (!std::isfinite(v))
      fail(Errc::unstable_step,
           "step: non-finite value after the step ending at t = " +
               fmt(out.t) + " with dt = " + fmt(dt));
    after = std::max(after, std::abs(v));
  }
  if (after > 1e8 * (1.0 + before))
    fail(Errc::unstable_step, "step: amplitude grew to " + fmt(after) +
                                  " at t = " + fmt(out.t) + " with dt = " +
                                  fmt(dt));
  return out;
}

RunReport evolve(const Field& field, const Expr& f, double T, double dt,
                 int sample_every) {
  validate(field, "evolve");
  if (!(dt > 0.0)) fail(Errc::invalid_argument, "evolve: dt must be positive");
  if (sample_every < 1)
    fail(Errc::invalid_argument, "evolve: sample_every must be at least 1");
  long long steps = std::llround(T / dt);
  if (steps < 1) fail(Errc::invalid_argument, "evolve: T spans no steps");

  RunReport report;
  double cell = field.L / field.N;
  auto sample = [&](const Field& q) {
    double m = 0.0, p = 0.0;
    for (double v : q.values) {
      m += v;
      p += v * v;
    }
    Peak peak = find_peak(q);
    if (!report.peak_x.empty()) {
      double prev = report.peak_x.back();
      while (peak.x - prev > field.L / 2.0) peak.x -= field.L;
      while (peak.x - prev < -field.L / 2.0) peak.x += field.L;
    }
    report.times.push_back(q.t);
    report.mass.push_back(m * cell);
    report.momentum.push_back(p * cell);
    report.peak_x.push_back(peak.x);
    report.peak_u.push_back(peak.u);
  };

  Field current = field;
  sample(current);
  for (long long k = 1; k <= steps; ++k) {
    try {
      current = step(current, f, dt);
    } catch (const Error& e) {
      if (e.code() != Errc::unstable_step) throw;
      char buf[160];
      std::snprintf(buf, sizeof(buf),
                    "%s; run aborted after %lld of %lld steps at t = %.6g, "
                    "last sampled peak %.6g",
                    e.what(), k - 1, steps, current.t,
                    report.peak_u.empty() ? 0.0 : report.peak_u.back());
      fail(Errc::unstable_step, buf);
    }
    if (k % sample_every == 0 || k == steps) sample(current);
  }
  report.final_field = current;

  double tbar = 0.0, xbar = 0.0;
  std::size_t count = report.times.size();
  for (std::size_t i = 0; i < count; ++i) {
    tbar += report.times[i];
    xbar += report.peak_x[i];
  }
  tbar /= static_cast<double>(count);
  xbar /= static_cast<double>(count);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    num += (report.times[i] - tbar) * (report.peak_x[i] - xbar);
    den += (report.times[i] - tbar) * (report.times[i] - tbar);
  }
  // traveling-wave convention u = w(x + ct): speed c is minus the drift
  // rate of the crest
  report.speed_fit = den == 0.0 ? 0.0 : -num / den;
  return report;
}

Field flow_transform(const Field& field, const SymmetryGenerator& g,
                     const ClassificationResult& f_params, double eps) {
  validate(field, "flow_transform");
  if (!std::isfinite(eps))
    fail(Errc::invalid_argument, "flow_transform: eps must be finite");

  double t0 = field.t;
  double t_new, stretch, shift;
  if (g.b != 0.0) {
    double head = t0 + g.tau0 / (3.0 * g.b);
    double e3 = std::exp(3.0 * g.b * eps);
    stretch = std::exp(g.b * eps);
    t_new = head * e3 - g.tau0 / (3.0 * g.b);
    shift = (g.a0 - g.a1 * g.tau0 / (3.0 * g.b)) * (stretch - 1.0) / g.b +
            g.a1 * head * (e3 - stretch) / (2.0 * g.b);
  } else {
    stretch = 1.0;
    t_new = t0 + g.tau0 * eps;
    shift = g.a0 * eps + g.a1 * (t0 * eps + g.tau0 * eps * eps / 2.0);
  }
  double gain, offset;
  if (g.d != 0.0) {
    gain = std::exp(g.d * eps);
    offset = g.c / g.d * (gain - 1.0);
  } else {
    gain = 1.0;
    offset = g.c * eps;
  }

  int n = field.N;
  double dx = field.L / n;
  if (stretch != 1.0) {
    // scaling maps are not compatible with the periodic wrap, so the field
    // must deviate from its background only on a strip whose image stays
    // inside the cell
    double base;
    if (f_params.params.u0) {
      base = *f_params.params.u0;
    } else {
      double edge = 0.0;
      for (int j = 0; j < 4; ++j)
        edge += field.values[j] + field.values[n - 1 - j];
      base = edge / 8.0;
    }
    double scale = 0.0;
    for (double v : field.values)
      scale = std::max(scale, std::abs(v - base));
    if (scale > 0.0) {
      int lo = 0, hi = n - 1;
      while (lo < n && std::abs(field.values[lo] - base) <= 1e-10 * scale)
        ++lo;
      while (hi >= 0 && std::abs(field.values[hi] - base) <= 1e-10 * scale)
        --hi;
      double img_lo = stretch * (lo * dx) + shift;
      double img_hi = stretch * (hi * dx) + shift;
      double slack = 1e-9 * field.L;
      if (img_lo < -slack || img_hi > field.L + slack)
        fail(Errc::window_exceeded,
             "flow_transform: the transformed support [" + fmt(img_lo) +
                 ", " + fmt(img_hi) + "] leaves the periodic cell [0, " +
                 fmt(field.L) + "]");
    }
  }

  Spectrum spec = forward(field.values);
  Field out = field;
  out.t = t_new;
  for (int j = 0; j < n; ++j) {
    double src = (j * dx - shift) / stretch;
    src -= field.L * std::floor(src / field.L);
    double theta = 2.0 * M_PI * src / field.L;
    out.values[j] = gain * trig_eval(spec, n, theta) + offset;
  }
  return out;
}

}  // namespace gkdv
