#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "gkdv/expr.hpp"

namespace gkdv {

// Vector field  xi*d/dx + tau*d/dt + eta*d/du  in the six-constant form
//   tau = tau0 + 3*b*t,   xi = a0 + a1*t + b*x,   eta = c + d*u.
// Such a field is a symmetry of u_t = f(u) u_x + u_xxx exactly when
//   (c + d*u) f'(u) + 2*b f(u) + a1 = 0   for all admissible u.
struct SymmetryGenerator {
  double tau0 = 0, a0 = 0, a1 = 0, b = 0, c = 0, d = 0;
};

enum class SymmetryCase {
  generic,     // only the two translations
  constant_f,  // f' = 0: infinite-dimensional algebra
  affine_f,    // f'' = 0: Galilean boost and scaling appear
  power,       // f = f0 + lambda*(u - u0)^alpha
  exponential, // f = f0 + lambda*exp(alpha*u)
  logarithmic  // f = f0 + alpha*log|u - u0|
};

const char* case_name(SymmetryCase c);  // "A", "B1", "B2", "B3_POWER", ...

struct CanonicalParams {
  std::optional<double> f0, f1, lambda, alpha, u0;
};

// Rank analysis of the sampled linear system in (c, d, 2b, a1) whose rows
// are [f'(u_i), u_i f'(u_i), f(u_i), 1].
struct NullspaceReport {
  std::vector<double> samples;
  int rank = 0;
  int nullity = 0;
  std::vector<std::array<double, 4>> basis;  // orthonormal (c, d, 2b, a1)
  std::vector<double> residuals;             // max_i |A v| per basis vector
  std::array<double, 4> singular_values{};
};

struct ClassificationResult {
  SymmetryCase case_tag = SymmetryCase::generic;
  CanonicalParams params;
  int extra_symmetry_nullity = 0;
  std::vector<SymmetryGenerator> generators;
  std::vector<std::string> notes;
  NullspaceReport nullspace;
};

/// The obstruction whose vanishing (with f'' != 0) is equivalent to the
/// existence of an extra symmetry:
///   f'''' f''^2 f' + f''' f''^3 - 2 f'''^2 f'' f'
Expr symmetry_condition_expr(const Expr& f);

/// Sample the symmetry condition's linear system at m Chebyshev points and
/// return its SVD rank/nullspace (singular values below 1e-9 of the largest
/// count as zero).  Throws Errc::degenerate_sampling for duplicate points.
NullspaceReport eqf3_nullspace(const Expr& f, const DomainInterval& domain,
                               int m);

/// Full decision tree: constant and affine f are recognized directly from
/// derivative bounds; otherwise the nullspace dimension and the structure of
/// the null vector select the power/exponential/logarithmic family and its
/// parameters.  The classification is repeated on a second, disjoint sample
/// set; disagreement raises Errc::inconsistent_nullity.
ClassificationResult classify(const Expr& f, const DomainInterval& domain,
                              int m = 12);

/// Explicit generator basis for a classified f: the x- and t-translations
/// plus one generator per extra symmetry, with a1 tied to the fitted
/// parameters so that the defect below vanishes identically.
std::vector<SymmetryGenerator> generators(const ClassificationResult& result);

/// max over m sample points of |(c + d u) f'(u) + 2 b f(u) + a1|.
double verify_generator(const Expr& f, const SymmetryGenerator& g,
                        const DomainInterval& domain, int m);

/// Chebyshev-Gauss points on the interval interior, sorted ascending.
std::vector<double> chebyshev_points(const DomainInterval& domain, int m);

}  // namespace gkdv
