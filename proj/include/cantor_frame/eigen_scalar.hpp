#pragma once

// Scalar route to the top eigenvalue: the secular equation
//   m(lambda / p) + m(lambda / (1 - p)) = 1
// characterizes eigenvalues above alpha * ||K||, and the secular function is
// strictly decreasing there, so a bracketed bisection finds the top.  All
// statements about the limit operator carry certified intervals propagated
// from the truncation tails.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "cantor_frame/resolvent.hpp"
#include "cantor_frame/spectral.hpp"

namespace cantor_frame {

struct BracketFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SecularValue {
  double value;
  double error_radius;
};

// Secular function from explicit spectral data.
inline SecularValue secular_value(double lambda, const SpectralData& sd,
                                  double p) {
  BranchWeights bw(p);
  ResolventValue a = resolvent_value(lambda / p, sd);
  ResolventValue b = resolvent_value(lambda / (1.0 - p), sd);
  return {a.value + b.value - 1.0, a.error_radius + b.error_radius};
}

// Secular function through a rooted-resolvent provider (peeled for deep
// truncations); the provider's own branch weight is used.
inline SecularValue secular_value(double lambda, const RootedResolvent& res) {
  double p = res.p();
  ResolventValue a = res.eval(lambda / p);
  ResolventValue b = res.eval(lambda / (1.0 - p));
  return {a.value + b.value - 1.0, a.error_radius + b.error_radius};
}

struct SimplicityReport {
  double lambda_max;
  double second;
  double gap;               // lambda_max - second eigenvalue
  double tail_bound;
  bool certified_simple;    // gap beats twice the tail, so the top of the
                            // limit operator is provably simple & separated
};

inline SimplicityReport simplicity_report(const SpectralData& sd) {
  if (sd.eigenvalues.size() < 2)
    throw std::invalid_argument("simplicity_report: need two eigenvalues");
  SimplicityReport r;
  r.lambda_max = sd.eigenvalues.back();
  r.second = sd.eigenvalues[sd.eigenvalues.size() - 2];
  r.gap = r.lambda_max - r.second;
  r.tail_bound = sd.tail_bound;
  r.certified_simple = r.gap > 2.0 * sd.tail_bound;
  return r;
}

struct SecularSolve {
  double p = 0.5;
  int depth = 0;
  double lambda_star = 0.0;         // root of the truncated secular equation
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  double residual = 0.0;            // |s(lambda_star)|
  double lambda_direct = 0.0;       // dense top eigenvalue at the base depth
  double combined_tolerance = 0.0;  // certified |lambda_star-lambda_direct|
  bool agreement = false;
  double tol = 0.0;
  double gap = 0.0;                 // top gap of the base spectrum
  bool certified_simple = false;
};

constexpr int kSecularSamples = 32;
constexpr int kSecularMaxIterations = 200;

// Certified lower bound for |s'| on [lo, hi]: by Cauchy-Schwarz the limit
// resolvent satisfies |m'(z)| >= m(z)^2, m is decreasing, and each m value
// is at least the truncated value minus its radius, so evaluating at hi
// minimizes the bound.
inline double secular_slope_lower_bound(double hi,
                                        const RootedResolvent& res) {
  double p = res.p();
  ResolventValue a = res.eval(hi / p);
  ResolventValue b = res.eval(hi / (1.0 - p));
  double a_lo = std::max(0.0, a.value - a.error_radius);
  double b_lo = std::max(0.0, b.value - b.error_radius);
  return a_lo * a_lo / p + b_lo * b_lo / (1.0 - p);
}

inline SecularSolve solve_top_eigenvalue(
    double p, int depth, double tol = 1e-10,
    int dense_depth_cap = kDefaultDenseBaseDepth) {
  if (depth < 4)
    throw std::invalid_argument("solve_top_eigenvalue: depth >= 4");
  if (!(tol >= 1e-12))
    throw std::invalid_argument("solve_top_eigenvalue: tol >= 1e-12");
  RootedResolvent res = RootedResolvent::build(p, depth, dense_depth_cap);
  BranchWeights bw(p);

  // Both resolvent arguments lambda/p and lambda/(1-p) must clear the
  // certified spectral radius, and lambda must exceed alpha * ||K||; the
  // first constraint is the stricter one and gives the same alpha factor.
  double threshold = res.min_valid_z();
  double delta = 1e-6;
  double lo = bw.alpha() * threshold + delta;
  double hi = res.lambda_upper() + 1.0;
  if (!(lo < hi))
    throw BracketFailure(
        "secular bracket is empty (tail bound too large); raise the depth");

  // Sample the bracket and demand exactly one sign change.
  std::vector<double> values(kSecularSamples);
  int change_at = -1, changes = 0;
  for (int i = 0; i < kSecularSamples; ++i) {
    double t = lo + (hi - lo) * double(i) / double(kSecularSamples - 1);
    values[size_t(i)] = secular_value(t, res).value;
    if (i > 0 && ((values[size_t(i) - 1] > 0.0) != (values[size_t(i)] > 0.0))) {
      ++changes;
      change_at = i;
    }
  }
  if (changes != 1 || values.front() <= 0.0 || values.back() >= 0.0)
    throw BracketFailure(
        "secular function does not cross zero exactly once in the bracket; "
        "raise the depth");

  double a = lo + (hi - lo) * double(change_at - 1) / double(kSecularSamples - 1);
  double b = lo + (hi - lo) * double(change_at) / double(kSecularSamples - 1);
  for (int it = 0; it < kSecularMaxIterations && (b - a) > tol; ++it) {
    double mid = 0.5 * (a + b);
    double s = secular_value(mid, res).value;
    if (s == 0.0) {
      a = b = mid;
      break;
    }
    (s > 0.0 ? a : b) = mid;
  }

  SecularSolve out;
  out.p = p;
  out.depth = depth;
  out.lambda_star = 0.5 * (a + b);
  out.bracket_lo = lo;
  out.bracket_hi = hi;
  out.tol = tol;
  SecularValue at_root = secular_value(out.lambda_star, res);
  out.residual = std::fabs(at_root.value);
  out.lambda_direct = res.lambda_lower();

  // |lambda_star - L| <= (sum of radii at the root) / (slope lower bound),
  // and |L - lambda_direct| <= the base truncation tail.
  double slope = secular_slope_lower_bound(hi, res);
  double base_gap = truncation_error_bound(p, res.base_depth());
  double root_radius = at_root.error_radius + out.residual;
  out.combined_tolerance =
      (slope > 0.0) ? base_gap + root_radius / slope
                    : std::numeric_limits<double>::infinity();
  out.agreement =
      std::fabs(out.lambda_star - out.lambda_direct) <=
      out.combined_tolerance + tol;

  // Simplicity certificate from an explicit base spectrum.
  SpectralData base = (p == 0.5)
                          ? spectral_symmetric_kinf_closed(std::min(depth, 14))
                          : res.base();
  SimplicityReport simple = simplicity_report(base);
  out.gap = simple.gap;
  out.certified_simple = simple.certified_simple;
  return out;
}

}  // namespace cantor_frame
