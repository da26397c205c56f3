#pragma once

// Truncated Laurent-tail arithmetic: series of the form
//   a(z) = c_1 z^-1 + c_2 z^-2 + ... + c_N z^-N,
// with coefficient k of any product depending only on input coefficients
// of index <= k (grading), so arithmetic is exact through the fixed order.
// The scalar type S is double or an exact rational.
//
// Expressions like 1/(1 - a) carry an implicit unit: inv_one_minus returns
// only the tail g with 1/(1 - a) = 1 + g, keeping everything inside tails.

#include <stdexcept>
#include <vector>

namespace cantor_frame {

template <class S>
struct LaurentTail {
  std::vector<S> c;  // c[k-1] multiplies z^-k

  LaurentTail() = default;
  explicit LaurentTail(int order) : c(size_t(order), S(0)) {
    if (order < 0) throw std::invalid_argument("negative order");
  }

  int order() const { return int(c.size()); }
  const S& coeff(int k) const { return c.at(size_t(k) - 1); }
  S& coeff(int k) { return c.at(size_t(k) - 1); }
};

template <class S>
void check_same_order(const LaurentTail<S>& a, const LaurentTail<S>& b) {
  if (a.order() != b.order())
    throw std::invalid_argument("laurent order mismatch");
}

template <class S>
LaurentTail<S> add(const LaurentTail<S>& a, const LaurentTail<S>& b) {
  check_same_order(a, b);
  LaurentTail<S> out(a.order());
  for (int k = 0; k < a.order(); ++k) out.c[k] = a.c[k] + b.c[k];
  return out;
}

template <class S>
LaurentTail<S> sub(const LaurentTail<S>& a, const LaurentTail<S>& b) {
  check_same_order(a, b);
  LaurentTail<S> out(a.order());
  for (int k = 0; k < a.order(); ++k) out.c[k] = a.c[k] - b.c[k];
  return out;
}

// Truncated Cauchy product; both factors are tails, so the product starts
// at z^-2 and coefficient k uses only inputs of index < k.
template <class S>
LaurentTail<S> mul(const LaurentTail<S>& a, const LaurentTail<S>& b) {
  check_same_order(a, b);
  int n = a.order();
  LaurentTail<S> out(n);
  for (int i = 1; i < n; ++i) {
    if (a.c[i - 1] == S(0)) continue;
    for (int j = 1; i + j <= n; ++j)
      out.c[i + j - 1] += a.c[i - 1] * b.c[j - 1];
  }
  return out;
}

// Tail g of the geometric inverse: 1/(1 - a) = 1 + g with
// g = a + a g, i.e. g_k = a_k + sum_{i<k} a_i g_{k-i}.
template <class S>
LaurentTail<S> inv_one_minus(const LaurentTail<S>& a) {
  int n = a.order();
  LaurentTail<S> g(n);
  for (int k = 1; k <= n; ++k) {
    S acc = a.c[k - 1];
    for (int i = 1; i < k; ++i) acc += a.c[i - 1] * g.c[k - i - 1];
    g.c[k - 1] = acc;
  }
  return g;
}

// x * (1 + g) for a tail x and an implicit-unit factor 1 + g.
template <class S>
LaurentTail<S> mul_one_plus(const LaurentTail<S>& x, const LaurentTail<S>& g) {
  return add(x, mul(x, g));
}

}  // namespace cantor_frame
