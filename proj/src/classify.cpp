#include "gkdv/classify.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "gkdv/errors.hpp"

namespace gkdv {

namespace {

constexpr double kSingularValueCut = 1e-9;  // relative to the largest
constexpr double kComponentCut = 1e-8;      // null vector entries ~ 0
constexpr double kDerivativeCut = 1e-10;    // f' == 0 / f'' == 0 tests

double max_abs(const Expr& e, const std::vector<double>& samples) {
  double m = 0.0;
  for (double u : samples) m = std::max(m, std::abs(eval(e, u)));
  return m;
}

}  // namespace

const char* case_name(SymmetryCase c) {
  switch (c) {
    case SymmetryCase::generic: return "A";
    case SymmetryCase::constant_f: return "B1";
    case SymmetryCase::affine_f: return "B2";
    case SymmetryCase::power: return "B3_POWER";
    case SymmetryCase::exponential: return "B3_EXP";
    case SymmetryCase::logarithmic: return "B3_LOG";
  }
  return "?";
}

std::vector<double> chebyshev_points(const DomainInterval& domain, int m) {
  if (m < 1) fail(Errc::invalid_argument, "need at least one sample point");
  if (!(domain.hi > domain.lo))
    fail(Errc::degenerate_sampling, "empty sampling interval");
  double mid = 0.5 * (domain.lo + domain.hi);
  double rad = 0.5 * (domain.hi - domain.lo);
  std::vector<double> pts(m);
  for (int i = 0; i < m; ++i)
    pts[i] = mid + rad * std::cos(M_PI * (2.0 * i + 1.0) / (2.0 * m));
  std::sort(pts.begin(), pts.end());
  for (int i = 1; i < m; ++i)
    if (pts[i] == pts[i - 1])
      fail(Errc::degenerate_sampling, "duplicate sample points");
  return pts;
}

Expr symmetry_condition_expr(const Expr& f) {
  Expr f1 = diff(f);
  Expr f2 = diff(f1);
  Expr f3 = diff(f2);
  Expr f4 = diff(f3);
  Expr two = Expr::constant(2.0);
  Expr term1 = Expr::mul({f4, Expr::pow(f2, two), f1});
  Expr term2 = Expr::mul({f3, Expr::pow(f2, Expr::constant(3.0))});
  Expr term3 = Expr::neg(Expr::mul({two, Expr::pow(f3, two), f2, f1}));
  return simplify(Expr::add({term1, term2, term3}));
}

namespace {

NullspaceReport nullspace_at(const Expr& f, const Expr& fp,
                             const std::vector<double>& samples) {
  const int m = static_cast<int>(samples.size());
  Eigen::MatrixXd A(m, 4);
  for (int i = 0; i < m; ++i) {
    double u = samples[i];
    double fpu = eval(fp, u);
    A(i, 0) = fpu;
    A(i, 1) = u * fpu;
    A(i, 2) = eval(f, u);
    A(i, 3) = 1.0;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();

  NullspaceReport rep;
  rep.samples = samples;
  for (int j = 0; j < 4; ++j)
    rep.singular_values[j] = j < sv.size() ? sv(j) : 0.0;
  double cut = kSingularValueCut * rep.singular_values[0];
  rep.rank = 0;
  for (int j = 0; j < 4; ++j)
    if (rep.singular_values[j] > cut) ++rep.rank;
  rep.nullity = 4 - rep.rank;

  for (int j = rep.rank; j < 4; ++j) {
    std::array<double, 4> v;
    for (int i = 0; i < 4; ++i) v[i] = svd.matrixV()(i, j);
    double res = 0.0;
    for (int i = 0; i < m; ++i) {
      double r = A(i, 0) * v[0] + A(i, 1) * v[1] + A(i, 2) * v[2] + A(i, 3) * v[3];
      res = std::max(res, std::abs(r));
    }
    rep.basis.push_back(v);
    rep.residuals.push_back(res);
  }
  return rep;
}

// Least-squares amplitude for  residual(u) ~ lambda * basis(u).
template <typename Fn>
std::optional<double> fit_amplitude(const std::vector<double>& samples,
                                    const Expr& f, double f0, Fn basis) {
  double num = 0.0, den = 0.0;
  int used = 0;
  for (double u : samples) {
    auto t = basis(u);
    if (!t) continue;
    double r = eval(f, u) - f0;
    num += r * *t;
    den += *t * *t;
    ++used;
  }
  if (used == 0 || den == 0.0) return std::nullopt;
  return num / den;
}

struct SubcaseDecision {
  SymmetryCase tag;
  CanonicalParams params;
};

SubcaseDecision decide_from_null_vector(const Expr& f,
                                        const std::vector<double>& samples,
                                        const std::array<double, 4>& v_raw) {
  // v = (c, d, 2b, a1), fixed only up to scale
  double norm = std::sqrt(v_raw[0] * v_raw[0] + v_raw[1] * v_raw[1] +
                          v_raw[2] * v_raw[2] + v_raw[3] * v_raw[3]);
  std::array<double, 4> v = v_raw;
  for (auto& x : v) x /= norm;
  const double c = v[0], d = v[1], twob = v[2], a1 = v[3];
  const bool b_zero = std::abs(twob) <= kComponentCut;
  const bool d_zero = std::abs(d) <= kComponentCut;

  SubcaseDecision out;
  if (!b_zero && !d_zero) {
    out.tag = SymmetryCase::power;
    double alpha = -twob / d;
    double u0 = -c / d;
    double f0 = -a1 / twob;
    out.params.alpha = alpha;
    out.params.u0 = u0;
    out.params.f0 = f0;
    // |u - u0|^alpha covers both sides of u0 for fractional alpha and
    // reduces to the signed power for integer alpha; alpha carries ~1e-15
    // relative noise from the SVD ratio, so integer detection needs slack
    double alpha_int = std::nearbyint(alpha);
    bool integer_alpha =
        std::abs(alpha - alpha_int) <= 1e-9 * (1.0 + std::abs(alpha));
    out.params.lambda = fit_amplitude(
        samples, f, f0, [&](double u) -> std::optional<double> {
          double base = u - u0;
          if (base == 0.0) return std::nullopt;
          if (integer_alpha) return std::pow(base, alpha_int);
          return std::pow(std::abs(base), alpha);
        });
  } else if (d_zero && !b_zero) {
    if (std::abs(c) <= kComponentCut)
      fail(Errc::inconsistent_nullity,
           "null vector implies constant f but f' is not numerically zero");
    out.tag = SymmetryCase::exponential;
    double rate = -twob / c;
    double f0 = -a1 / twob;
    out.params.alpha = rate;
    out.params.f0 = f0;
    out.params.lambda = fit_amplitude(
        samples, f, f0,
        [&](double u) -> std::optional<double> { return std::exp(rate * u); });
  } else if (b_zero && !d_zero) {
    out.tag = SymmetryCase::logarithmic;
    double alpha = -a1 / d;
    double u0 = -c / d;
    out.params.alpha = alpha;
    out.params.u0 = u0;
    double acc = 0.0;
    int used = 0;
    for (double u : samples) {
      double base = std::abs(u - u0);
      if (base == 0.0) continue;
      acc += eval(f, u) - alpha * std::log(base);
      ++used;
    }
    if (used > 0) out.params.f0 = acc / used;
  } else {
    fail(Errc::inconsistent_nullity,
         "null vector implies affine f but f'' is not numerically zero");
  }
  return out;
}

bool params_agree(const std::optional<double>& a, const std::optional<double>& b) {
  if (a.has_value() != b.has_value()) return false;
  if (!a) return true;
  return std::abs(*a - *b) <= 1e-6 * (1.0 + std::abs(*a));
}

}  // namespace

NullspaceReport eqf3_nullspace(const Expr& f, const DomainInterval& domain,
                               int m) {
  if (m < 8)
    fail(Errc::invalid_argument, "need at least 8 samples for the rank test");
  return nullspace_at(f, diff(f), chebyshev_points(domain, m));
}

ClassificationResult classify(const Expr& f, const DomainInterval& domain,
                              int m) {
  if (m < 8) fail(Errc::invalid_argument, "classification needs m >= 8");
  std::vector<double> samples = chebyshev_points(domain, m);
  Expr fp = diff(f);
  Expr fpp = diff(fp);

  ClassificationResult result;
  if (!(domain.lo < 0.0 && domain.hi > 0.0))
    result.notes.push_back(
        "domain does not straddle u=0; parameters refer to this interval only");

  double maxf = max_abs(f, samples);
  double maxfp = max_abs(fp, samples);

  if (maxfp <= kDerivativeCut * (1.0 + maxf)) {
    result.case_tag = SymmetryCase::constant_f;
    double mean = 0.0;
    for (double u : samples) mean += eval(f, u);
    result.params.f0 = mean / samples.size();
    result.extra_symmetry_nullity = 3;
    result.nullspace = nullspace_at(f, fp, samples);
    result.notes.push_back(
        "constant f: the algebra is infinite-dimensional (v(x,t)*du for any "
        "solution v of the linear equation); the finite part is listed");
    result.generators = generators(result);
    return result;
  }

  double maxfpp = max_abs(fpp, samples);
  if (maxfpp <= kDerivativeCut * (1.0 + maxfp)) {
    result.case_tag = SymmetryCase::affine_f;
    double su = 0.0, sf = 0.0, suu = 0.0, suf = 0.0;
    for (double u : samples) {
      double fu = eval(f, u);
      su += u;
      sf += fu;
      suu += u * u;
      suf += u * fu;
    }
    double n = static_cast<double>(samples.size());
    double f1 = (suf - su * sf / n) / (suu - su * su / n);
    double f0 = (sf - f1 * su) / n;
    result.params.f0 = f0;
    result.params.f1 = f1;
    result.extra_symmetry_nullity = 2;
    result.nullspace = nullspace_at(f, fp, samples);
    result.generators = generators(result);
    return result;
  }

  // genuinely nonlinear f: consult the sampled nullspace, then re-run on a
  // disjoint node set as a consistency check
  NullspaceReport rep = nullspace_at(f, fp, samples);
  std::vector<double> samples2 = chebyshev_points(domain, m + 5);
  NullspaceReport rep2 = nullspace_at(f, fp, samples2);

  if (rep.nullity != rep2.nullity)
    fail(Errc::inconsistent_nullity,
         "nullity " + std::to_string(rep.nullity) + " vs " +
             std::to_string(rep2.nullity) + " on shifted samples");

  result.nullspace = rep;
  result.extra_symmetry_nullity = rep.nullity;

  if (rep.nullity == 0) {
    result.case_tag = SymmetryCase::generic;
    result.generators = generators(result);
    return result;
  }
  if (rep.nullity > 1)
    fail(Errc::inconsistent_nullity,
         "nullity " + std::to_string(rep.nullity) +
             " with nonvanishing f''; sampling is degenerate");

  SubcaseDecision first = decide_from_null_vector(f, samples, rep.basis[0]);
  SubcaseDecision second = decide_from_null_vector(f, samples2, rep2.basis[0]);
  if (first.tag != second.tag ||
      !params_agree(first.params.alpha, second.params.alpha) ||
      !params_agree(first.params.u0, second.params.u0) ||
      !params_agree(first.params.f0, second.params.f0))
    fail(Errc::inconsistent_nullity,
         "parameter extraction disagrees between sample sets");

  result.case_tag = first.tag;
  result.params = first.params;
  result.generators = generators(result);
  return result;
}

std::vector<SymmetryGenerator> generators(const ClassificationResult& result) {
  std::vector<SymmetryGenerator> gens;
  SymmetryGenerator time_shift;
  time_shift.tau0 = 1.0;
  SymmetryGenerator space_shift;
  space_shift.a0 = 1.0;
  gens.push_back(time_shift);
  gens.push_back(space_shift);

  const CanonicalParams& p = result.params;
  switch (result.case_tag) {
    case SymmetryCase::generic:
      break;
    case SymmetryCase::constant_f: {
      double f0 = p.f0.value_or(0.0);
      SymmetryGenerator shift;   // u -> u + eps
      shift.c = 1.0;
      SymmetryGenerator scale_u; // u -> e^eps u
      scale_u.d = 1.0;
      SymmetryGenerator dilate;  // (x - 2 f0 t) dx + 3 t dt
      dilate.b = 1.0;
      dilate.a1 = -2.0 * f0;
      gens.push_back(shift);
      gens.push_back(scale_u);
      gens.push_back(dilate);
      break;
    }
    case SymmetryCase::affine_f: {
      double f0 = p.f0.value_or(0.0);
      double f1 = p.f1.value_or(0.0);
      SymmetryGenerator dilate;  // (2 f0 t - x) dx - 3 t dt + 2 u du
      dilate.b = -1.0;
      dilate.a1 = 2.0 * f0;
      dilate.d = 2.0;
      SymmetryGenerator boost;   // -f1 t dx + du
      boost.a1 = -f1;
      boost.c = 1.0;
      gens.push_back(dilate);
      gens.push_back(boost);
      break;
    }
    case SymmetryCase::power: {
      double f0 = p.f0.value_or(0.0);
      double alpha = p.alpha.value_or(1.0);
      double u0 = p.u0.value_or(0.0);
      SymmetryGenerator g;  // (2 f0 t - x) dx - 3 t dt + (2/alpha)(u - u0) du
      g.b = -1.0;
      g.a1 = 2.0 * f0;
      g.d = 2.0 / alpha;
      g.c = -2.0 * u0 / alpha;
      gens.push_back(g);
      break;
    }
    case SymmetryCase::exponential: {
      double f0 = p.f0.value_or(0.0);
      double rate = p.alpha.value_or(1.0);
      SymmetryGenerator g;  // (2 f0 t - x) dx - 3 t dt + (2/rate) du
      g.b = -1.0;
      g.a1 = 2.0 * f0;
      g.c = 2.0 / rate;
      gens.push_back(g);
      break;
    }
    case SymmetryCase::logarithmic: {
      double alpha = p.alpha.value_or(1.0);
      double u0 = p.u0.value_or(0.0);
      SymmetryGenerator g;  // -alpha t dx + (u - u0) du
      g.a1 = -alpha;
      g.d = 1.0;
      g.c = -u0;
      gens.push_back(g);
      break;
    }
  }
  return gens;
}

double verify_generator(const Expr& f, const SymmetryGenerator& g,
                        const DomainInterval& domain, int m) {
  std::vector<double> samples = chebyshev_points(domain, m);
  Expr fp = diff(f);
  double worst = 0.0;
  for (double u : samples) {
    double defect = (g.c + g.d * u) * eval(fp, u) + 2.0 * g.b * eval(f, u) + g.a1;
    worst = std::max(worst, std::abs(defect));
  }
  return worst;
}

}  // namespace gkdv
