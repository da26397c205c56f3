#pragma once

// Moments of the rooted spectral measure: the recursion driven by the
// renormalization identity, the closed forms for the first three moments,
// the operator-power oracle on truncations, and the numerical verification
// of the renormalization identity itself with certified tolerances.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cantor_frame/laurent.hpp"
#include "cantor_frame/resolvent.hpp"
#include "cantor_frame/spectral.hpp"

namespace cantor_frame {

enum class ScalarMode { Float, ExactRational };

constexpr int kMaxMomentsFloat = 64;
constexpr int kMaxMomentsRational = 32;

template <class S>
S power(S base, int n) {
  S acc(1);
  for (int i = 0; i < n; ++i) acc = acc * base;
  return acc;
}

// Right side of the renormalization identity as a truncated tail:
//   F(a, b) = a / (1 - a) + b / ((1 - a)(1 - a - b))
//           = a (1 + g_a) + b (1 + g_a)(1 + g_s),   s = a + b,
// where g_x is the tail of the geometric inverse of 1 - x.
template <class S>
LaurentTail<S> renorm_rhs_tail(const LaurentTail<S>& a,
                               const LaurentTail<S>& b) {
  LaurentTail<S> ga = inv_one_minus(a);
  LaurentTail<S> gs = inv_one_minus(add(a, b));
  LaurentTail<S> first = mul_one_plus(a, ga);
  LaurentTail<S> second = mul_one_plus(mul_one_plus(b, ga), gs);
  return add(first, second);
}

// Moment recursion: expand both sides of the identity in powers of z^-1.
// The z^-(n+1) coefficient of the left side is mu_n; on the right, mu_n
// enters linearly with factor p^(n+1) + (1-p)^(n+1) (through the leading
// terms of a and b), so evaluating the right side with the mu_n slot
// zeroed and dividing by 1 - p^(n+1) - (1-p)^(n+1) isolates it.
template <class S>
std::vector<S> moments_recursive(const S& p, int big_n) {
  if (big_n < 0) throw std::invalid_argument("moments_recursive: N >= 0");
  if (!(p > S(0) && p < S(1)))
    throw std::invalid_argument("moments_recursive: p in (0,1)");
  S one_minus_p = S(1) - p;
  std::vector<S> mu = {S(1)};
  for (int n = 1; n <= big_n; ++n) {
    int order = n + 1;
    LaurentTail<S> a(order), b(order);
    for (int k = 1; k <= n; ++k) {
      // Coefficient of z^-k in m(z/p) is mu_{k-1} p^k.
      a.coeff(k) = mu[size_t(k) - 1] * power(p, k);
      b.coeff(k) = mu[size_t(k) - 1] * power(one_minus_p, k);
    }
    LaurentTail<S> rhs = renorm_rhs_tail(a, b);
    S denom = S(1) - power(p, n + 1) - power(one_minus_p, n + 1);
    mu.push_back(rhs.coeff(n + 1) / denom);
  }
  return mu;
}

// Closed forms for the first three moments.
template <class S>
std::vector<S> moments_closed(const S& p) {
  if (!(p > S(0) && p < S(1)))
    throw std::invalid_argument("moments_closed: p in (0,1)");
  S u = S(1) - p;
  S mu1 = S(1) / (S(2) * p * u);
  S mu2 = (p * p - p + S(1)) / (S(3) * p * p * u * u);
  S mu3 = (S(12) * power(p, 4) - S(24) * power(p, 3) + S(38) * p * p -
           S(26) * p + S(11)) /
          (S(24) * power(p, 3) * power(u, 3) * (p * p - p + S(2)));
  return {mu1, mu2, mu3};
}

// ---------------------------------------------------------------------------
// Operator oracle: <root, K_M^n root> by repeated matrix-vector products.

struct MomentOracleEntry {
  double value;
  double error_bound;  // certified |mu_n - value|
};

constexpr int kMaxOraclePower = 8;
constexpr int kMaxOracleDepth = 10;
constexpr int kOracleNormDepthCap = 8;  // dense eigensolve for the B constant

// The error bound follows from telescoping K^n - K_M^n: each of the n slots
// swaps one factor at cost ||K - K_M|| <= tau, every remaining factor has
// norm at most B >= max(||K||, ||K_M||); B is certified from a dense
// eigensolve at a capped depth plus its own tail.
inline std::vector<MomentOracleEntry> moments_operator_oracle(double p, int m,
                                                              int big_n) {
  if (big_n < 0 || big_n > kMaxOraclePower)
    throw std::invalid_argument("moments_operator_oracle: n out of range");
  if (m < 0 || m > kMaxOracleDepth)
    throw std::invalid_argument("moments_operator_oracle: depth out of range");
  SymMatrix k = assemble_km_closed(p, m);
  int dim = k.m.rows;

  double tau = truncation_error_bound(p, m);
  int norm_depth = std::min(m, kOracleNormDepthCap);
  SpectralData norm_data = spectral_km_dense(p, norm_depth);
  double b_const =
      norm_data.lambda_max() + truncation_error_bound(p, norm_depth);

  std::vector<MomentOracleEntry> out;
  std::vector<double> v(size_t(dim), 0.0);
  v[0] = 1.0;  // the root vector
  out.push_back({1.0, 0.0});
  std::vector<double> w(size_t(dim), 0.0);
  for (int n = 1; n <= big_n; ++n) {
    for (int i = 0; i < dim; ++i) {
      double acc = 0.0;
      for (int j = 0; j < dim; ++j) acc += k.m(i, j) * v[size_t(j)];
      w[size_t(i)] = acc;
    }
    v.swap(w);
    out.push_back({v[0], double(n) * std::pow(b_const, n - 1) * tau});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Renormalization identity check with certified tolerance.

struct RenormReport {
  double lhs;                  // m(z) on the depth-M truncation
  double rhs;                  // F(m(z/p), m(z/(1-p))) on the same truncation
  double residual;             // |lhs - rhs|
  double certified_tolerance;  // interval bound covering the residual
  bool ok;                     // residual <= certified_tolerance
};

// F is increasing in both arguments on 0 <= a, 0 <= b, a + b < 1 (both
// partial derivatives are positive there), so interval endpoints bound the
// deviation.  The identity is exact for the limit resolvent; the truncated
// values each sit within their certified radius of it, which makes
// residual <= certified_tolerance a theorem, not a hope.
inline RenormReport renormalization_residual(double p, double z, int depth,
                                             int dense_depth_cap =
                                                 kDefaultDenseBaseDepth) {
  RootedResolvent res = RootedResolvent::build(p, depth, dense_depth_cap);
  double norm_upper = res.lambda_upper() + res.tail_bound();
  if (!(z > norm_upper + 1.0))
    throw std::domain_error(
        "renormalization_residual: z must exceed the norm bound plus one");

  ResolventValue mz = res.eval(z);
  ResolventValue ma = res.eval(z / p);
  ResolventValue mb = res.eval(z / (1.0 - p));

  double a_lo = std::max(0.0, ma.value - ma.error_radius);
  double a_hi = ma.value + ma.error_radius;
  double b_lo = std::max(0.0, mb.value - mb.error_radius);
  double b_hi = mb.value + mb.error_radius;
  if (!(a_hi + b_hi < 1.0))
    throw std::domain_error(
        "renormalization_residual: radii too large to certify; raise depth");

  double rhs = resolvent_recursion_step(ma.value, mb.value);
  double rhs_hi = resolvent_recursion_step(a_hi, b_hi);
  double rhs_lo = resolvent_recursion_step(a_lo, b_lo);

  RenormReport r;
  r.lhs = mz.value;
  r.rhs = rhs;
  r.residual = std::fabs(mz.value - rhs);
  r.certified_tolerance =
      mz.error_radius + std::max(rhs_hi - rhs, rhs - rhs_lo) + 1e-12;
  r.ok = r.residual <= r.certified_tolerance;
  return r;
}

}  // namespace cantor_frame
