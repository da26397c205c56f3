#pragma once

// Branch isometries between Haar frames, the Cuntz relations they satisfy,
// the affine fixed-point map Psi (with linear part Phi), Neumann partial
// sums, and the two-by-two block form of the truncated limit operator.

#include <cmath>
#include <stdexcept>

#include "cantor_frame/frame_operator.hpp"
#include "cantor_frame/haar.hpp"
#include "cantor_frame/matrix.hpp"

namespace cantor_frame {

struct BranchMap {
  int branch = 0;        // 0 or 2
  int source_depth = 0;  // columns live in the depth-m frame
  Matrix matrix;         // 2^(m+1) x 2^m, isometry in Haar coordinates
};

// Closed-form columns: the branch maps act on the Haar frame by
//   U_0 e_w = e_{0w},  U_0 e_root = sqrt(p) e_root + sqrt(1-p) e_empty,
//   U_2 e_w = e_{2w},  U_2 e_root = sqrt(1-p) e_root - sqrt(p) e_empty.
inline BranchMap branch_isometry(int branch, double p, int m) {
  if (branch != 0 && branch != 2)
    throw std::invalid_argument("branch_isometry: branch must be 0 or 2");
  if (m < 0 || m + 1 > kMaxFrameDepth)
    throw std::invalid_argument("branch_isometry: depth out of range");
  BranchWeights bw(p);
  HaarFrame source(m, bw);
  HaarFrame target(m + 1, bw);
  BranchMap u;
  u.branch = branch;
  u.source_depth = m;
  u.matrix = Matrix(target.size(), source.size());

  // Root column: mixes the target root with the top difference vector.
  double root_coeff = (branch == 0) ? std::sqrt(p) : std::sqrt(1.0 - p);
  double diff_coeff = (branch == 0) ? std::sqrt(1.0 - p) : -std::sqrt(p);
  u.matrix(0, 0) = root_coeff;
  u.matrix(target.index_of(BasisIndex::diff(Word())), 0) = diff_coeff;

  // Difference columns: e_w maps to the difference vector at the shifted
  // word, unit coefficient.
  Word prefix = Word().child(branch == 0 ? 0 : 2);
  for (const Word& w : source.diff_words()) {
    Word shifted = prefix;
    for (int i = 0; i < w.length(); ++i) shifted = shifted.child(w.letter(i));
    u.matrix(target.index_of(BasisIndex::diff(shifted)),
             source.index_of(BasisIndex::diff(w))) = 1.0;
  }
  return u;
}

struct CuntzReport {
  double isometry_0;     // ||U_0^T U_0 - I||_max
  double isometry_2;     // ||U_2^T U_2 - I||_max
  double orthogonality;  // ||U_0^T U_2||_max
  double completeness;   // ||U_0 U_0^T + U_2 U_2^T - I||_max on depth m+1
  double worst() const {
    return std::max(std::max(isometry_0, isometry_2),
                    std::max(orthogonality, completeness));
  }
};

inline CuntzReport cuntz_check(double p, int m) {
  if (m < 1) throw std::invalid_argument("cuntz_check: m >= 1");
  BranchMap u0 = branch_isometry(0, p, m);
  BranchMap u2 = branch_isometry(2, p, m);
  int small = u0.matrix.cols, big = u0.matrix.rows;
  CuntzReport r;
  r.isometry_0 = max_abs_diff(matmul(transpose(u0.matrix), u0.matrix),
                              Matrix::identity(small));
  r.isometry_2 = max_abs_diff(matmul(transpose(u2.matrix), u2.matrix),
                              Matrix::identity(small));
  r.orthogonality = max_abs(matmul(transpose(u0.matrix), u2.matrix));
  Matrix ranges = add(matmul(u0.matrix, transpose(u0.matrix)),
                      matmul(u2.matrix, transpose(u2.matrix)));
  r.completeness = max_abs_diff(ranges, Matrix::identity(big));
  return r;
}

// Linear part Phi(T) = p U_0 T U_0^T + (1-p) U_2 T U_2^T, lifting depth m
// to depth m+1.
inline SymMatrix phi_apply(const SymMatrix& t, double p) {
  if (t.basis != BasisKind::Haar)
    throw std::invalid_argument("phi_apply expects Haar coordinates");
  int m = 0;
  while ((1 << m) < t.m.rows) ++m;
  if ((1 << m) != t.m.rows)
    throw std::invalid_argument("phi_apply: dimension is not a power of two");
  BranchMap u0 = branch_isometry(0, p, m);
  BranchMap u2 = branch_isometry(2, p, m);
  Matrix lifted =
      add(scale(matmul(u0.matrix, matmul(t.m, transpose(u0.matrix))), p),
          scale(matmul(u2.matrix, matmul(t.m, transpose(u2.matrix))),
                1.0 - p));
  SymMatrix out;
  out.m = std::move(lifted);
  out.depth = m + 1;
  out.p = p;
  out.basis = BasisKind::Haar;
  out.provenance = Provenance::PsiIteration;
  return out;
}

// Affine fixed-point map Psi(T) = P_root + Phi(T).
inline SymMatrix psi_apply(const SymMatrix& t, double p) {
  SymMatrix out = phi_apply(t, p);
  out.m(0, 0) += 1.0;
  return out;
}

// Partial Neumann sum sum_{n=0}^N Phi^n(P_root), built by the recursion
// S_N = P_root + Phi(S_{N-1}); equals the depth-N assembly exactly.
inline SymMatrix neumann_partial_sum(double p, int big_n) {
  if (big_n < 0) throw std::invalid_argument("neumann_partial_sum: N >= 0");
  BranchWeights bw(p);
  SymMatrix s;
  s.m = Matrix(1, 1);
  s.m(0, 0) = 1.0;
  s.depth = 0;
  s.p = p;
  s.basis = BasisKind::Haar;
  s.provenance = Provenance::NeumannSum;
  for (int n = 1; n <= big_n; ++n) {
    s = psi_apply(s, p);
    s.provenance = Provenance::NeumannSum;
  }
  return s;
}

// Right side of the block identity: conjugating the depth-M truncation by
// W = [U_0 | U_2] produces
//   [ p K' + p P_root          c P_root            ]
//   [ c P_root                 (1-p) K' + (1-p) P_root ],
// with K' the depth-(M-1) truncation and c = sqrt(p (1-p)).
inline Matrix block_form_reference(double p, const Matrix& k_smaller) {
  int n = k_smaller.rows;
  Matrix block(2 * n, 2 * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      block(i, j) = p * k_smaller(i, j);
      block(n + i, n + j) = (1.0 - p) * k_smaller(i, j);
    }
  double c = std::sqrt(p * (1.0 - p));
  block(0, 0) += p;
  block(n, n) += 1.0 - p;
  block(0, n) += c;
  block(n, 0) += c;
  return block;
}

struct BlockFormReport {
  double residual;          // ||W^T K W - block reference||_max
  double unitarity_defect;  // ||W^T W - I||_max
};

inline BlockFormReport block_form_residual(double p, int depth) {
  if (depth < 2) throw std::invalid_argument("block_form_residual: M >= 2");
  BranchMap u0 = branch_isometry(0, p, depth - 1);
  BranchMap u2 = branch_isometry(2, p, depth - 1);
  int small = u0.matrix.cols;
  Matrix w(u0.matrix.rows, 2 * small);
  for (int i = 0; i < w.rows; ++i) {
    for (int j = 0; j < small; ++j) {
      w(i, j) = u0.matrix(i, j);
      w(i, small + j) = u2.matrix(i, j);
    }
  }
  SymMatrix k = assemble_kinf_truncated(p, depth);
  SymMatrix k_smaller = assemble_kinf_truncated(p, depth - 1);
  Matrix conjugated = conjugate_transposed(w, k.m);
  Matrix reference = block_form_reference(p, k_smaller.m);
  BlockFormReport r;
  r.residual = max_abs_diff(conjugated, reference);
  r.unitarity_defect =
      max_abs_diff(matmul(transpose(w), w), Matrix::identity(w.cols));
  return r;
}

}  // namespace cantor_frame
