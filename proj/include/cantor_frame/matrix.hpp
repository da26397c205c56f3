#pragma once

// Minimal dense row-major matrix type plus the metadata wrapper used by the
// frame-operator assemblers.  Dimensions stay small (at most 2^10 for dense
// eigensolves), so a straightforward contiguous layout is all that is needed.

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace cantor_frame {

struct Matrix {
  int rows = 0, cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), a(size_t(r) * size_t(c), 0.0) {
    if (r < 0 || c < 0) throw std::invalid_argument("negative dimension");
  }

  double& operator()(int i, int j) { return a[size_t(i) * cols + j]; }
  double operator()(int i, int j) const { return a[size_t(i) * cols + j]; }

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
};

inline Matrix matmul(const Matrix& x, const Matrix& y) {
  if (x.cols != y.rows) throw std::invalid_argument("matmul shape mismatch");
  Matrix z(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i) {
    const double* xi = &x.a[size_t(i) * x.cols];
    double* zi = &z.a[size_t(i) * z.cols];
    for (int k = 0; k < x.cols; ++k) {
      double xik = xi[k];
      if (xik == 0.0) continue;
      const double* yk = &y.a[size_t(k) * y.cols];
      for (int j = 0; j < y.cols; ++j) zi[j] += xik * yk[j];
    }
  }
  return z;
}

inline Matrix transpose(const Matrix& x) {
  Matrix t(x.cols, x.rows);
  for (int i = 0; i < x.rows; ++i)
    for (int j = 0; j < x.cols; ++j) t(j, i) = x(i, j);
  return t;
}

// q^T a q for a square and q possibly rectangular (rows of q = dim of a).
inline Matrix conjugate_transposed(const Matrix& q, const Matrix& a) {
  return matmul(transpose(q), matmul(a, q));
}

inline Matrix add(const Matrix& x, const Matrix& y) {
  if (x.rows != y.rows || x.cols != y.cols)
    throw std::invalid_argument("add shape mismatch");
  Matrix z = x;
  for (size_t i = 0; i < z.a.size(); ++i) z.a[i] += y.a[i];
  return z;
}

inline Matrix sub(const Matrix& x, const Matrix& y) {
  if (x.rows != y.rows || x.cols != y.cols)
    throw std::invalid_argument("sub shape mismatch");
  Matrix z = x;
  for (size_t i = 0; i < z.a.size(); ++i) z.a[i] -= y.a[i];
  return z;
}

inline Matrix scale(const Matrix& x, double s) {
  Matrix z = x;
  for (double& v : z.a) v *= s;
  return z;
}

inline double max_abs(const Matrix& x) {
  double m = 0.0;
  for (double v : x.a) m = std::max(m, std::fabs(v));
  return m;
}

inline double max_abs_diff(const Matrix& x, const Matrix& y) {
  if (x.rows != y.rows || x.cols != y.cols)
    throw std::invalid_argument("max_abs_diff shape mismatch");
  double m = 0.0;
  for (size_t i = 0; i < x.a.size(); ++i)
    m = std::max(m, std::fabs(x.a[i] - y.a[i]));
  return m;
}

inline double max_offdiag_abs(const Matrix& x) {
  double m = 0.0;
  for (int i = 0; i < x.rows; ++i)
    for (int j = 0; j < x.cols; ++j)
      if (i != j) m = std::max(m, std::fabs(x(i, j)));
  return m;
}

inline double symmetry_defect(const Matrix& x) {
  double m = 0.0;
  for (int i = 0; i < x.rows; ++i)
    for (int j = i + 1; j < x.cols; ++j)
      m = std::max(m, std::fabs(x(i, j) - x(j, i)));
  return m;
}

// Deterministic shortest-ish round-trip formatting for exports.
inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

enum class Provenance {
  ClosedForm,
  GramOracle,
  Filtration,
  PsiIteration,
  NeumannSum,
};

inline const char* provenance_tag(Provenance p) {
  switch (p) {
    case Provenance::ClosedForm: return "ClosedForm";
    case Provenance::GramOracle: return "GramOracle";
    case Provenance::Filtration: return "Filtration";
    case Provenance::PsiIteration: return "PsiIteration";
    case Provenance::NeumannSum: return "NeumannSum";
  }
  return "?";
}

enum class BasisKind { Haar, Atom };

// A symmetric operator matrix tagged with the coordinates it lives in and
// which construction produced it.
struct SymMatrix {
  Matrix m;
  int depth = 0;        // frame depth (matrix dimension is 2^depth)
  double p = 0.5;       // branch weight it was assembled at
  BasisKind basis = BasisKind::Haar;
  Provenance provenance = Provenance::ClosedForm;

  int dim() const { return m.rows; }
};

// Coordinate-list CSV: one header line, then "row,col,value" for every
// nonzero with row <= col (the lower triangle is implied by symmetry).
inline std::string matrix_to_csv(const SymMatrix& s) {
  std::string out = "# basis=";
  out += (s.basis == BasisKind::Haar) ? "haar" : "atom";
  out += " depth=" + std::to_string(s.depth);
  out += " p=" + fmt_double(s.p);
  out += " provenance=";
  out += provenance_tag(s.provenance);
  out += "\n";
  for (int i = 0; i < s.m.rows; ++i)
    for (int j = i; j < s.m.cols; ++j)
      if (s.m(i, j) != 0.0) {
        out += std::to_string(i);
        out += ',';
        out += std::to_string(j);
        out += ',';
        out += fmt_double(s.m(i, j));
        out += '\n';
      }
  return out;
}

}  // namespace cantor_frame
