#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "gkdv/classify.hpp"
#include "gkdv/errors.hpp"
#include "gkdv/expr.hpp"

using gkdv::classify;
using gkdv::DomainInterval;
using gkdv::eqf3_nullspace;
using gkdv::Errc;
using gkdv::Error;
using gkdv::eval;
using gkdv::Expr;
using gkdv::parse;
using gkdv::SymmetryCase;
using gkdv::SymmetryGenerator;
using gkdv::verify_generator;

namespace {

// Independent rank oracle: modified Gram-Schmidt on the columns
// [f'(u_i), u_i f'(u_i), f(u_i), 1], no SVD involved.
int mgs_rank(const Expr& f, const std::vector<double>& pts) {
  Expr fp = gkdv::diff(f);
  const int m = static_cast<int>(pts.size());
  std::array<std::vector<double>, 4> col;
  for (auto& c : col) c.assign(m, 0.0);
  for (int i = 0; i < m; ++i) {
    double u = pts[i];
    double fpu = eval(fp, u);
    col[0][i] = fpu;
    col[1][i] = u * fpu;
    col[2][i] = eval(f, u);
    col[3][i] = 1.0;
  }
  auto norm = [m](const std::vector<double>& v) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += v[i] * v[i];
    return std::sqrt(s);
  };
  double scale = 0.0;
  for (const auto& c : col) scale = std::max(scale, norm(c));

  int rank = 0;
  std::vector<std::vector<double>> q;
  for (int j = 0; j < 4; ++j) {
    std::vector<double> v = col[j];
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& e : q) {
        double dot = 0.0;
        for (int i = 0; i < m; ++i) dot += e[i] * v[i];
        for (int i = 0; i < m; ++i) v[i] -= dot * e[i];
      }
    double n = norm(v);
    if (n > 1e-8 * scale) {
      for (int i = 0; i < m; ++i) v[i] /= n;
      q.push_back(v);
      ++rank;
    }
  }
  return rank;
}

double max_on_grid(const Expr& e, const std::vector<double>& pts) {
  double m = 0.0;
  for (double u : pts) m = std::max(m, std::abs(eval(e, u)));
  return m;
}

struct CorpusEntry {
  const char* text;
  DomainInterval domain;
  SymmetryCase want;
  int nullity;
};

// classification ground truth, worked out by hand from the defect identity
// (c + d u) f' + 2 b f + a1 = 0
const std::vector<CorpusEntry>& corpus() {
  static const std::vector<CorpusEntry> k = {
      {"1", {-1, 1}, SymmetryCase::constant_f, 3},
      {"5", {-2, 2}, SymmetryCase::constant_f, 3},
      {"u", {-1, 1}, SymmetryCase::affine_f, 2},
      {"2 - 3*u", {-1, 1}, SymmetryCase::affine_f, 2},
      {"u^2", {-1, 1}, SymmetryCase::power, 1},
      {"1 + u^2", {-1, 1}, SymmetryCase::power, 1},
      {"2 + u^3", {-1, 1}, SymmetryCase::power, 1},
      {"u - u^2", {-1, 1}, SymmetryCase::power, 1},
      {"1/u", {0.5, 3}, SymmetryCase::power, 1},
      {"abs(u)^2.5", {-1, 1}, SymmetryCase::power, 1},
      {"exp(u)", {-1, 1}, SymmetryCase::exponential, 1},
      {"1 + exp(2*u)", {-1, 1}, SymmetryCase::exponential, 1},
      {"3 - 0.5*exp(-u)", {-1, 1}, SymmetryCase::exponential, 1},
      {"3*log(u-1)", {1.1, 3.5}, SymmetryCase::logarithmic, 1},
      {"2 + 0.5*log(u+3)", {-1, 1}, SymmetryCase::logarithmic, 1},
      {"sin(u)", {-1, 1}, SymmetryCase::generic, 0},
      {"u^2 + sin(u)", {-1, 1}, SymmetryCase::generic, 0},
  };
  return k;
}

}  // namespace

TEST_CASE("chebyshev points are distinct, sorted, interior") {
  auto pts = gkdv::chebyshev_points({-1, 1}, 12);
  REQUIRE(pts.size() == 12);
  for (size_t i = 0; i < pts.size(); ++i) {
    CHECK(pts[i] > -1.0);
    CHECK(pts[i] < 1.0);
    if (i > 0) CHECK(pts[i] > pts[i - 1]);
  }
  CHECK_THROWS_AS(gkdv::chebyshev_points({2, 2}, 8), Error);
}

TEST_CASE("sampled rank agrees with the Gram-Schmidt oracle") {
  for (const auto& entry : corpus()) {
    CAPTURE(entry.text);
    Expr f = parse(entry.text);
    auto rep = eqf3_nullspace(f, entry.domain, 12);
    CHECK(rep.rank + rep.nullity == 4);
    CHECK(rep.nullity == entry.nullity);
    CHECK(rep.rank == mgs_rank(f, rep.samples));
  }
}

TEST_CASE("nullspace basis is orthonormal with small residuals") {
  auto rep = eqf3_nullspace(parse("u"), {-1, 1}, 12);
  REQUIRE(rep.nullity == 2);
  REQUIRE(rep.basis.size() == 2);
  auto dot = [](const std::array<double, 4>& a, const std::array<double, 4>& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
  };
  CHECK(std::abs(dot(rep.basis[0], rep.basis[0]) - 1.0) < 1e-12);
  CHECK(std::abs(dot(rep.basis[1], rep.basis[1]) - 1.0) < 1e-12);
  CHECK(std::abs(dot(rep.basis[0], rep.basis[1])) < 1e-12);
  for (double r : rep.residuals) CHECK(r < 1e-9);
}

TEST_CASE("quadratic nonlinearity pins the known null direction") {
  auto rep = eqf3_nullspace(parse("1 + u^2"), {-1, 1}, 12);
  REQUIRE(rep.nullity == 1);
  // (c, d, 2b, a1) proportional to (0, 1, -2, 2)
  const double w[4] = {0.0, 1.0 / 3.0, -2.0 / 3.0, 2.0 / 3.0};
  double align = 0.0;
  for (int i = 0; i < 4; ++i) align += rep.basis[0][i] * w[i];
  CHECK(std::abs(std::abs(align) - 1.0) < 1e-10);
}

TEST_CASE("sample counts below eight are rejected") {
  Expr f = parse("u^2");
  CHECK_THROWS_AS(eqf3_nullspace(f, {-1, 1}, 7), Error);
  CHECK_THROWS_AS(classify(f, {-1, 1}, 7), Error);
}

TEST_CASE("the six families are recognized with exact parameters") {
  auto run = [](const char* text, DomainInterval dom) {
    return classify(parse(text), dom);
  };

  auto b1 = run("1", {-1, 1});
  CHECK(b1.case_tag == SymmetryCase::constant_f);
  CHECK(std::abs(*b1.params.f0 - 1.0) < 1e-12);
  CHECK(b1.extra_symmetry_nullity == 3);
  bool mentions_infinite = false;
  for (const auto& n : b1.notes)
    mentions_infinite = mentions_infinite || n.find("infinite") != std::string::npos;
  CHECK(mentions_infinite);

  auto b2 = run("u", {-1, 1});
  CHECK(b2.case_tag == SymmetryCase::affine_f);
  CHECK(std::abs(*b2.params.f0) < 1e-12);
  CHECK(std::abs(*b2.params.f1 - 1.0) < 1e-12);
  CHECK(b2.extra_symmetry_nullity == 2);

  auto pw = run("2 + u^3", {-1, 1});
  CHECK(pw.case_tag == SymmetryCase::power);
  CHECK(std::abs(*pw.params.alpha - 3.0) < 1e-8);
  CHECK(std::abs(*pw.params.u0) < 1e-8);
  CHECK(std::abs(*pw.params.f0 - 2.0) < 1e-8);
  CHECK(std::abs(*pw.params.lambda - 1.0) < 1e-8);

  auto ex = run("1 + exp(2*u)", {-1, 1});
  CHECK(ex.case_tag == SymmetryCase::exponential);
  CHECK(std::abs(*ex.params.alpha - 2.0) < 1e-8);
  CHECK(std::abs(*ex.params.f0 - 1.0) < 1e-8);
  CHECK(std::abs(*ex.params.lambda - 1.0) < 1e-8);

  auto lg = run("3*log(u-1)", {1.1, 3.5});
  CHECK(lg.case_tag == SymmetryCase::logarithmic);
  CHECK(std::abs(*lg.params.alpha - 3.0) < 1e-8);
  CHECK(std::abs(*lg.params.u0 - 1.0) < 1e-8);
  CHECK(std::abs(*lg.params.f0) < 1e-8);

  auto gen = run("sin(u)", {-1, 1});
  CHECK(gen.case_tag == SymmetryCase::generic);
  CHECK(gen.extra_symmetry_nullity == 0);
  CHECK(gen.generators.size() == 2);
}

TEST_CASE("shifted and scaled families keep exact parameters") {
  auto r1 = classify(parse("u - u^2"), {-1, 1});
  CHECK(r1.case_tag == SymmetryCase::power);
  CHECK(std::abs(*r1.params.alpha - 2.0) < 1e-8);
  CHECK(std::abs(*r1.params.u0 - 0.5) < 1e-8);
  CHECK(std::abs(*r1.params.f0 - 0.25) < 1e-8);
  CHECK(std::abs(*r1.params.lambda + 1.0) < 1e-8);

  auto r2 = classify(parse("1/u"), {0.5, 3});
  CHECK(r2.case_tag == SymmetryCase::power);
  CHECK(std::abs(*r2.params.alpha + 1.0) < 1e-8);
  CHECK(std::abs(*r2.params.u0) < 1e-8);
  CHECK(std::abs(*r2.params.lambda - 1.0) < 1e-8);

  auto r3 = classify(parse("abs(u)^2.5"), {-1, 1});
  CHECK(r3.case_tag == SymmetryCase::power);
  CHECK(std::abs(*r3.params.alpha - 2.5) < 1e-8);
  CHECK(std::abs(*r3.params.u0) < 1e-8);
  CHECK(std::abs(*r3.params.lambda - 1.0) < 1e-7);

  auto r4 = classify(parse("3 - 0.5*exp(-u)"), {-1, 1});
  CHECK(r4.case_tag == SymmetryCase::exponential);
  CHECK(std::abs(*r4.params.alpha + 1.0) < 1e-8);
  CHECK(std::abs(*r4.params.f0 - 3.0) < 1e-8);
  CHECK(std::abs(*r4.params.lambda + 0.5) < 1e-8);

  auto r5 = classify(parse("2 + 0.5*log(u+3)"), {-1, 1});
  CHECK(r5.case_tag == SymmetryCase::logarithmic);
  CHECK(std::abs(*r5.params.alpha - 0.5) < 1e-8);
  CHECK(std::abs(*r5.params.u0 + 3.0) < 1e-8);
  CHECK(std::abs(*r5.params.f0 - 2.0) < 1e-8);
}

TEST_CASE("every emitted generator satisfies the defect identity") {
  for (const auto& entry : corpus()) {
    CAPTURE(entry.text);
    Expr f = parse(entry.text);
    auto result = classify(f, entry.domain);
    CHECK(result.generators.size() == 2 + static_cast<size_t>(entry.nullity));
    CHECK((result.case_tag == SymmetryCase::generic) == (entry.nullity == 0));

    auto pts = gkdv::chebyshev_points(entry.domain, 12);
    double budget =
        1e-9 * (1.0 + max_on_grid(f, pts) + max_on_grid(gkdv::diff(f), pts));
    for (const auto& g : result.generators) {
      CHECK(verify_generator(f, g, entry.domain, 12) <= budget);
    }
  }
}

TEST_CASE("generator coordinates match the worked examples") {
  // pure quadratic: dilation with eta = u
  auto pw = classify(parse("u^2"), {-1, 1});
  REQUIRE(pw.generators.size() == 3);
  const auto& g = pw.generators[2];
  CHECK(g.tau0 == 0.0);
  CHECK(g.a0 == 0.0);
  CHECK(std::abs(g.a1) < 1e-10);
  CHECK(g.b == -1.0);
  CHECK(std::abs(g.c) < 1e-10);
  CHECK(std::abs(g.d - 1.0) < 1e-10);

  // logarithmic: xi = -t, eta = u - 1
  auto lg = classify(parse("log(u-1)"), {1.1, 3.5});
  REQUIRE(lg.generators.size() == 3);
  const auto& h = lg.generators[2];
  CHECK(std::abs(h.a1 + 1.0) < 1e-10);
  CHECK(h.b == 0.0);
  CHECK(std::abs(h.c + 1.0) < 1e-10);
  CHECK(std::abs(h.d - 1.0) < 1e-10);

  // affine: dilation (b=-1, d=2) plus the boost with a1 = -f1
  auto b2 = classify(parse("u"), {-1, 1});
  REQUIRE(b2.generators.size() == 4);
  CHECK(b2.generators[2].b == -1.0);
  CHECK(std::abs(b2.generators[2].d - 2.0) < 1e-12);
  CHECK(std::abs(b2.generators[2].a1) < 1e-12);
  CHECK(std::abs(b2.generators[3].a1 + 1.0) < 1e-12);
  CHECK(b2.generators[3].c == 1.0);
}

TEST_CASE("defect evaluation on hand-built generators") {
  Expr fu = parse("u");
  SymmetryGenerator boost;  // eta = 1 forces a1 = -1 for f = u
  boost.a1 = -1.0;
  boost.c = 1.0;
  CHECK(verify_generator(fu, boost, {-1, 1}, 12) < 1e-14);

  SymmetryGenerator flipped = boost;  // wrong a1 sign has defect exactly 2
  flipped.a1 = 1.0;
  CHECK(verify_generator(fu, flipped, {-1, 1}, 12) == doctest::Approx(2.0));

  Expr fe = parse("exp(u)");
  SymmetryGenerator dil;
  dil.b = -1.0;
  dil.c = 2.0;
  CHECK(verify_generator(fe, dil, {-1, 1}, 12) < 1e-14);

  SymmetryGenerator tshift;
  tshift.tau0 = 1.0;
  CHECK(verify_generator(parse("sin(u)"), tshift, {-1, 1}, 12) == 0.0);
}

TEST_CASE("scaling a null vector preserves the defect verdict") {
  auto rep = eqf3_nullspace(parse("1 + u^2"), {-1, 1}, 12);
  REQUIRE(rep.nullity == 1);
  for (double s : {1.0, -3.7, 250.0}) {
    SymmetryGenerator g;
    g.c = s * rep.basis[0][0];
    g.d = s * rep.basis[0][1];
    g.b = s * rep.basis[0][2] / 2.0;
    g.a1 = s * rep.basis[0][3];
    CHECK(verify_generator(parse("1 + u^2"), g, {-1, 1}, 12) < 1e-8 * std::abs(s));

    SymmetryGenerator bad;  // a non-null direction stays non-null under scaling
    bad.c = s;
    CHECK(verify_generator(parse("1 + u^2"), bad, {-1, 1}, 12) > 0.1 * std::abs(s));
  }
}

TEST_CASE("extracted parameters do not depend on the sample count") {
  for (int m : {12, 16, 25}) {
    auto r = classify(parse("2 + u^3"), {-1, 1}, m);
    CHECK(r.case_tag == SymmetryCase::power);
    CHECK(std::abs(*r.params.alpha - 3.0) < 1e-9);
    CHECK(std::abs(*r.params.u0) < 1e-9);
    CHECK(std::abs(*r.params.f0 - 2.0) < 1e-9);
  }
}

TEST_CASE("nullity is invariant under translating the sampling window") {
  // same f expressed around a shifted origin, window shifted to match
  auto a = eqf3_nullspace(parse("2 + u^3"), {-1, 1}, 12);
  auto b = eqf3_nullspace(parse("2 + (u - 0.7)^3"), {-0.3, 1.7}, 12);
  CHECK(a.nullity == b.nullity);

  auto c = eqf3_nullspace(parse("sin(u)"), {-1, 1}, 12);
  auto d = eqf3_nullspace(parse("sin(u - 0.7)"), {-0.3, 1.7}, 12);
  CHECK(c.nullity == d.nullity);

  auto shifted = classify(parse("2 + (u - 0.7)^3"), {-0.3, 1.7});
  CHECK(shifted.case_tag == SymmetryCase::power);
  CHECK(std::abs(*shifted.params.alpha - 3.0) < 1e-8);
  CHECK(std::abs(*shifted.params.u0 - 0.7) < 1e-8);
}

TEST_CASE("obstruction expression vanishes exactly for the extra-symmetry families") {
  for (const auto& entry : corpus()) {
    Expr f = parse(entry.text);
    Expr f2 = gkdv::nth_derivative(f, 2);
    auto pts = gkdv::chebyshev_points(entry.domain, 12);
    if (max_on_grid(f2, pts) <= 1e-10) continue;  // families with f'' = 0
    CAPTURE(entry.text);

    Expr cond = gkdv::symmetry_condition_expr(f);
    Expr d1 = gkdv::diff(f);
    Expr d2 = gkdv::diff(d1);
    Expr d3 = gkdv::diff(d2);
    Expr d4 = gkdv::diff(d3);

    double worst_rel = 0.0;
    for (double u : pts) {
      double v1 = eval(d1, u), v2 = eval(d2, u), v3 = eval(d3, u),
             v4 = eval(d4, u);
      // the three summands set the cancellation scale
      double scale = std::abs(v4 * v2 * v2 * v1) + std::abs(v3 * v2 * v2 * v2) +
                     std::abs(2.0 * v3 * v3 * v2 * v1);
      double value = std::abs(eval(cond, u));
      worst_rel = std::max(worst_rel, value / (1.0 + scale));
    }
    if (entry.nullity >= 1)
      CHECK(worst_rel <= 1e-12);
    else
      CHECK(worst_rel > 1e-6);
  }
}

TEST_CASE("obstruction for sin(u) is sin(2u)") {
  Expr cond = gkdv::symmetry_condition_expr(parse("sin(u)"));
  for (double u : {0.25, 0.5, M_PI / 4.0, 1.3, -0.9}) {
    CHECK(eval(cond, u) == doctest::Approx(std::sin(2.0 * u)).epsilon(1e-12));
  }
  CHECK(eval(cond, M_PI / 4.0) == doctest::Approx(1.0));
}

TEST_CASE("obstruction vanishes identically for exp(u)") {
  Expr cond = gkdv::symmetry_condition_expr(parse("exp(u)"));
  for (int i = 0; i < 10; ++i) {
    double u = -1.0 + 0.2 * i;
    CHECK(std::abs(eval(cond, u)) <= 1e-12 * std::exp(4.0 * u));
  }
}

TEST_CASE("near-degenerate input is reported, not silently classified") {
  Expr f = parse("u + 0.000000001*u^2");
  try {
    classify(f, {-1, 1});
    FAIL("expected a degeneracy report");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::inconsistent_nullity);
  }
}

TEST_CASE("classification is exclusive over the corpus") {
  for (const auto& entry : corpus()) {
    CAPTURE(entry.text);
    auto r = classify(parse(entry.text), entry.domain);
    CHECK(r.case_tag == entry.want);
    CHECK(r.extra_symmetry_nullity == entry.nullity);
  }
}

TEST_CASE("domains away from the origin are flagged in the notes") {
  auto r = classify(parse("3*log(u-1)"), {1.1, 3.5});
  bool flagged = false;
  for (const auto& n : r.notes)
    flagged = flagged || n.find("domain") != std::string::npos;
  CHECK(flagged);
}
