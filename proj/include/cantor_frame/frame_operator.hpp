#pragma once

// Finite-depth cylinder frame operators in the orthonormal Haar basis, the
// truncated limit operator, and the closed-form spectral data available in
// the symmetric case p = 1/2.
//
// The depth-m frame operator aggregates all cylinder overlaps down to level
// m:  K_m f = sum_{|u| <= m} <1_{C_u}, f> 1_{C_u}.  Three independent
// assembly routes are provided; they must agree to rounding and the tests
// hold them to that.
//
//   closed      - per-entry closed forms in the Haar basis
//   gram oracle - rank-one accumulation of the raw indicator family in
//                 normalized atom coordinates, transported by the
//                 orthogonal change of basis
//   filtration  - sum of mass-weighted conditional expectations
//                 K_m = sum_{n<=m} D_n E_n in atom coordinates
//
// Matrix entries in the Haar basis (q = p^2 + (1-p)^2, and
// G_w = sum_{j=0}^{m-|w|-1} q^j counts levels that still fit below w):
//
//   Root-Root        sum_{n<=m} q^n
//   Root-Diff(w)     (2p-1) sqrt(p(1-p)) mass(w)^{3/2} G_w
//   Diff(w)^2        2 p (1-p) mass(w) G_w
//   Diff(u)-Diff(v)  sigma(u,v) (2p-1) mass(v)^{3/2} mass(u)^{-1/2} G_v
//                    for u a proper prefix of v, where sigma = (1-p) when
//                    v continues through u0 and -p through u2
//   incomparable     exactly zero (tree-banded sparsity)
//
// The limit operator replaces G_w by the full geometric sum 1/(1-q).

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cantor_frame/haar.hpp"
#include "cantor_frame/matrix.hpp"
#include "cantor_frame/word.hpp"

namespace cantor_frame {

constexpr int kMaxClosedDepth = 12;      // dense Haar matrices up to 2^12
constexpr int kMaxGramOracleDepth = 8;   // quadratic-in-words oracle cap
constexpr int kMaxFiltrationDepth = 10;  // dense atom products cap

inline double geometric_sum(double q, int terms) {
  double s = 0.0, t = 1.0;
  for (int j = 0; j < terms; ++j) {
    s += t;
    t *= q;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Closed-form assembly.

inline SymMatrix assemble_km_closed(double p, int m) {
  if (m < 0 || m > kMaxClosedDepth)
    throw std::invalid_argument("assemble_km_closed: depth out of range");
  BranchWeights bw(p);
  HaarFrame frame(m, bw);
  int n = frame.size();
  SymMatrix s;
  s.m = Matrix(n, n);
  s.depth = m;
  s.p = p;
  s.basis = BasisKind::Haar;
  s.provenance = Provenance::ClosedForm;

  double q = bw.q();
  double two_p_minus_1 = 2.0 * p - 1.0;
  double root_norm = std::sqrt(p * (1.0 - p));
  s.m(0, 0) = geometric_sum(q, m + 1);

  std::vector<Word> diffs = frame.diff_words();
  for (size_t k = 0; k < diffs.size(); ++k) {
    const Word& v = diffs[k];
    int col = 1 + int(k);
    double mv = mass(v, bw);
    double gv = geometric_sum(q, m - v.length());
    double mv32 = mv * std::sqrt(mv);
    s.m(0, col) = two_p_minus_1 * root_norm * mv32 * gv;
    s.m(col, 0) = s.m(0, col);
    s.m(col, col) = 2.0 * p * (1.0 - p) * mv * gv;
    // Proper prefixes u of v.
    Word u;
    for (int i = 0; i < v.length(); ++i) {
      double sigma = (v.letter(i) == 0) ? (1.0 - p) : -p;
      int row = 1 + int(word_index(u));
      double entry =
          sigma * two_p_minus_1 * mv32 / std::sqrt(mass(u, bw)) * gv;
      s.m(row, col) = entry;
      s.m(col, row) = entry;
      u = u.child(v.letter(i));
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Gram-oracle assembly: run over the raw indicator family.

// Atom coordinates of 1_{C_u} at the given frame depth: sqrt(mass(t)) on
// every atom t below u.
inline std::vector<double> indicator_atom_coords(const Word& u,
                                                 const HaarFrame& frame) {
  std::vector<Word> atoms = frame.atoms();
  std::vector<double> c(atoms.size(), 0.0);
  for (size_t t = 0; t < atoms.size(); ++t)
    if (u.is_prefix_of(atoms[t]))
      c[t] = std::sqrt(mass(atoms[t], frame.weights));
  return c;
}

inline SymMatrix assemble_km_gram_oracle(double p, int m) {
  if (m < 0 || m > kMaxGramOracleDepth)
    throw std::invalid_argument("assemble_km_gram_oracle: depth out of range");
  BranchWeights bw(p);
  HaarFrame frame(m, bw);
  int n = frame.size();

  Matrix atom_k(n, n);
  for (const Word& u : enumerate_words(m)) {
    std::vector<double> c = indicator_atom_coords(u, frame);
    for (int t = 0; t < n; ++t) {
      if (c[t] == 0.0) continue;
      for (int ss = 0; ss < n; ++ss) atom_k(t, ss) += c[t] * c[ss];
    }
  }

  Matrix q = atom_change_of_basis(frame);
  SymMatrix s;
  s.m = conjugate_transposed(q, atom_k);
  s.depth = m;
  s.p = p;
  s.basis = BasisKind::Haar;
  s.provenance = Provenance::GramOracle;
  return s;
}

// ---------------------------------------------------------------------------
// Filtration assembly: K_m = sum_{n=0}^m D_n E_n.

// Conditional expectation onto level-n cylinders, written in normalized
// level-`atom_depth` atom coordinates (n <= atom_depth): the orthogonal
// projection sum_{|w|=n} |w^><w^| with w^ the normalized indicator of C_w.
inline Matrix atom_conditional_expectation(int n, int atom_depth,
                                           const BranchWeights& bw) {
  if (n < 0 || n > atom_depth)
    throw std::invalid_argument("conditional expectation level out of range");
  int dim = 1 << atom_depth;
  Matrix e(dim, dim);
  std::vector<Word> atoms = level_words(atom_depth);
  // Atoms below a level-n word w form the contiguous lex block of length
  // 2^(atom_depth - n) starting at lex_rank(w) * 2^(atom_depth - n).
  int block = 1 << (atom_depth - n);
  for (int wstart = 0; wstart < dim; wstart += block) {
    Word w = atoms[wstart];
    for (int i = 0; i < atom_depth - n; ++i) w = w.parent();
    double mw = mass(w, bw);
    for (int t = wstart; t < wstart + block; ++t)
      for (int ss = wstart; ss < wstart + block; ++ss)
        e(t, ss) = std::sqrt(mass(atoms[t], bw)) *
                   std::sqrt(mass(atoms[ss], bw)) / mw;
  }
  return e;
}

// Multiplication by the level-n cylinder mass, diagonal in atom coordinates.
inline std::vector<double> atom_mass_diagonal(int n, int atom_depth,
                                              const BranchWeights& bw) {
  if (n < 0 || n > atom_depth)
    throw std::invalid_argument("mass diagonal level out of range");
  std::vector<Word> atoms = level_words(atom_depth);
  std::vector<double> d(atoms.size());
  for (size_t t = 0; t < atoms.size(); ++t) {
    Word w = atoms[t];
    for (int i = 0; i < atom_depth - n; ++i) w = w.parent();
    d[t] = mass(w, bw);
  }
  return d;
}

inline SymMatrix assemble_km_filtration(double p, int m) {
  if (m < 0 || m > kMaxFiltrationDepth)
    throw std::invalid_argument("assemble_km_filtration: depth out of range");
  BranchWeights bw(p);
  HaarFrame frame(m, bw);
  int n = frame.size();

  Matrix atom_k(n, n);
  for (int level = 0; level <= m; ++level) {
    Matrix e = atom_conditional_expectation(level, m, bw);
    std::vector<double> d = atom_mass_diagonal(level, m, bw);
    // D_level E_level: scale the rows of the projection.  The mass is
    // constant on each block, so the product commutes and stays symmetric.
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) atom_k(i, j) += d[i] * e(i, j);
  }

  Matrix q = atom_change_of_basis(frame);
  SymMatrix s;
  s.m = conjugate_transposed(q, atom_k);
  s.depth = m;
  s.p = p;
  s.basis = BasisKind::Haar;
  s.provenance = Provenance::Filtration;
  return s;
}

// ---------------------------------------------------------------------------
// Truncated limit operator: compression of the norm limit K to the depth-M
// frame.  Entries are the m -> infinity limits of the finite-depth ones.

inline SymMatrix assemble_kinf_truncated(double p, int depth) {
  if (depth < 1 || depth > kMaxClosedDepth)
    throw std::invalid_argument("assemble_kinf_truncated: depth out of range");
  BranchWeights bw(p);
  HaarFrame frame(depth, bw);
  int n = frame.size();
  SymMatrix s;
  s.m = Matrix(n, n);
  s.depth = depth;
  s.p = p;
  s.basis = BasisKind::Haar;
  s.provenance = Provenance::ClosedForm;

  double q = bw.q();
  double two_p_minus_1 = 2.0 * p - 1.0;
  double root_norm = std::sqrt(p * (1.0 - p));
  s.m(0, 0) = 1.0 / (1.0 - q);

  std::vector<Word> diffs = frame.diff_words();
  for (size_t k = 0; k < diffs.size(); ++k) {
    const Word& v = diffs[k];
    int col = 1 + int(k);
    double mv = mass(v, bw);
    double mv32 = mv * std::sqrt(mv);
    s.m(0, col) = two_p_minus_1 / (2.0 * root_norm) * mv32;
    s.m(col, 0) = s.m(0, col);
    s.m(col, col) = mv;
    Word u;
    for (int i = 0; i < v.length(); ++i) {
      double coef = (v.letter(i) == 0)
                        ? two_p_minus_1 / (2.0 * p)
                        : -two_p_minus_1 / (2.0 * (1.0 - p));
      int row = 1 + int(word_index(u));
      double entry = coef * mv32 / std::sqrt(mass(u, bw));
      s.m(row, col) = entry;
      s.m(col, row) = entry;
      u = u.child(v.letter(i));
    }
  }
  return s;
}

// Independent atom-coordinate route to the same compression: the level
// sums n <= depth are kept exactly and every deeper level collapses onto
// the atom masses, contributing the geometric factor q/(1-q) times the
// level-`depth` mass diagonal.
inline Matrix kinf_truncated_atom_route(double p, int depth) {
  BranchWeights bw(p);
  int n = 1 << depth;
  Matrix atom_k(n, n);
  for (int level = 0; level <= depth; ++level) {
    Matrix e = atom_conditional_expectation(level, depth, bw);
    std::vector<double> d = atom_mass_diagonal(level, depth, bw);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) atom_k(i, j) += d[i] * e(i, j);
  }
  std::vector<double> dm = atom_mass_diagonal(depth, depth, bw);
  double tail_factor = bw.q() / (1.0 - bw.q());
  for (int i = 0; i < n; ++i) atom_k(i, i) += tail_factor * dm[i];
  return atom_k;
}

// Norm tail of the filtration: ||K - K_m|| <= alpha^(m+1) / (1 - alpha).
inline double truncation_error_bound(double p, int m) {
  BranchWeights bw(p);
  double a = bw.alpha();
  return std::pow(a, m + 1) / (1.0 - a);
}

// Certified bound on ||K - P_M K P_M|| for the depth-M compression: the
// off-corner blocks and the outer block each carry at most one norm tail,
// so twice the filtration bound is safe.  (The top eigenvalue enjoys the
// sharper one-sided bound |lambda_max(K) - lambda_max(P K P)| <= tail.)
inline double compression_error_bound(double p, int depth) {
  return 2.0 * truncation_error_bound(p, depth);
}

// ---------------------------------------------------------------------------
// Symmetric-case closed spectra.

struct EigenvalueGroup {
  double value;
  int multiplicity;
};

// Spectrum of the depth-m operator at p = 1/2, ascending:
//   2^(-(n-1)) (1 - 2^-(m-n+1)) with multiplicity 2^(n-1) for n = m..1,
//   then the simple top eigenvalue 2 - 2^-m.
inline std::vector<EigenvalueGroup> symmetric_closed_spectrum(int m) {
  if (m < 0 || m > 40)
    throw std::invalid_argument("symmetric_closed_spectrum: bad depth");
  std::vector<EigenvalueGroup> groups;
  for (int n = m; n >= 1; --n) {
    double value =
        std::ldexp(1.0, -(n - 1)) * (1.0 - std::ldexp(1.0, -(m - n + 1)));
    groups.push_back({value, 1 << (n - 1)});
  }
  groups.push_back({2.0 - std::ldexp(1.0, -m), 1});
  return groups;
}

// Point spectrum of the limit operator at p = 1/2, ascending: eigenvalues
// 2^(-(n-1)) with multiplicity 2^(n-1) for n = n_max..1 and the simple top
// eigenvalue 2.  Zero is the only accumulation point and is omitted.
inline std::vector<EigenvalueGroup> symmetric_kinf_spectrum(int n_max) {
  if (n_max < 0 || n_max > 30)
    throw std::invalid_argument("symmetric_kinf_spectrum: bad count");
  std::vector<EigenvalueGroup> groups;
  for (int n = n_max; n >= 1; --n)
    groups.push_back({std::ldexp(1.0, -(n - 1)), 1 << (n - 1)});
  groups.push_back({2.0, 1});
  return groups;
}

// ---------------------------------------------------------------------------
// Two-dimensional compression onto span{root, e_empty} and its closed top
// eigenvalue; a rigorous lower bound for the top of the limit operator.

struct Compression2x2 {
  Matrix m;  // 2x2
  double lambda_max;
};

inline Compression2x2 compression_2x2(double p) {
  BranchWeights bw(p);
  double q = bw.q();
  double a = 1.0 / (1.0 - q);
  double b = (2.0 * p - 1.0) * std::sqrt(p * (1.0 - p)) / (1.0 - q);
  Compression2x2 c;
  c.m = Matrix(2, 2);
  c.m(0, 0) = a;
  c.m(0, 1) = b;
  c.m(1, 0) = b;
  c.m(1, 1) = 1.0;
  c.lambda_max =
      0.5 * (a + 1.0) + 0.5 * std::sqrt((a - 1.0) * (a - 1.0) + 4.0 * b * b);
  return c;
}

// ---------------------------------------------------------------------------
// Schatten sums in the symmetric case: sum of s_j^r over the spectrum of
// the limit operator.  Finite exactly when r > 1, where it equals
// 2^r + 1/(1 - 2^(1-r)); divergent at r = 1 (not trace class).

inline std::optional<double> schatten_symmetric_closed(double r) {
  if (r < 1.0)
    throw std::invalid_argument("schatten_symmetric_closed: r must be >= 1");
  if (r == 1.0) return std::nullopt;
  return std::pow(2.0, r) + 1.0 / (1.0 - std::pow(2.0, 1.0 - r));
}

}  // namespace cantor_frame
