#pragma once

// The weighted Haar system attached to a Bernoulli branch measure.
//
// The depth-m frame F_m is the span of the level-m cylinder indicators
// (dimension 2^m).  Its orthonormal basis consists of the constant function
// (index 0, the "Root" vector) followed by one difference vector per word w
// with |w| <= m-1:
//
//   h_w = (1-p) 1_{C_{w0}} - p 1_{C_{w2}},   ||h_w||^2 = p(1-p) mass(w),
//   e_w = h_w / sqrt(p(1-p) mass(w)).
//
// Basis order is canonical word order (by length, then lex), so the depth-m
// index list is an initial segment of the depth-(m+1) list.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cantor_frame/matrix.hpp"
#include "cantor_frame/word.hpp"

namespace cantor_frame {

constexpr int kMaxFrameDepth = 20;  // dense work stays far below this

inline int basis_size(int depth) {
  if (depth < 0 || depth > kMaxFrameDepth)
    throw std::invalid_argument("basis_size: bad depth");
  return 1 << depth;
}

// Identifies one orthonormal basis vector: the constant (root) vector or the
// difference vector of a word.
struct BasisIndex {
  bool is_root = true;
  Word word;  // meaningful when !is_root

  static BasisIndex root() { return BasisIndex{}; }
  static BasisIndex diff(const Word& w) { return BasisIndex{false, w}; }
};

struct HaarFrame {
  int depth;
  BranchWeights weights;

  HaarFrame(int depth_, BranchWeights weights_)
      : depth(depth_), weights(weights_) {
    if (depth_ < 0 || depth_ > kMaxFrameDepth)
      throw std::invalid_argument("HaarFrame: bad depth");
  }

  int size() const { return basis_size(depth); }

  // Basis position of a difference vector; the root occupies index 0.
  int index_of(const BasisIndex& b) const {
    if (b.is_root) return 0;
    if (b.word.length() >= depth)
      throw std::invalid_argument("difference word too deep for this frame");
    return 1 + int(word_index(b.word));
  }

  BasisIndex label_of(int index) const {
    if (index < 0 || index >= size()) throw std::out_of_range("basis index");
    if (index == 0) return BasisIndex::root();
    return BasisIndex::diff(diff_words()[index - 1]);
  }

  // Difference words in basis order (lengths 0 .. depth-1).
  std::vector<Word> diff_words() const {
    if (depth == 0) return {};
    return enumerate_words(depth - 1);
  }

  // Level-`depth` atoms in lex order; their normalized indicators are the
  // orthonormal coordinate system the assemblers cross-check against.
  std::vector<Word> atoms() const { return level_words(depth); }
};

// Coefficients of the cylinder indicator 1_{C_u} in the orthonormal basis.
// Against the root: mass(u).  Against e_w: nonzero only when w is a proper
// prefix of u, with sign decided by the branch u takes below w:
//   <1_u, e_w> = (1-p) mass(u)/sqrt(p(1-p) mass(w))   if u passes through w0
//   <1_u, e_w> =   -p  mass(u)/sqrt(p(1-p) mass(w))   if u passes through w2
inline std::vector<double> indicator_to_haar(const Word& u,
                                             const HaarFrame& frame) {
  if (u.length() > frame.depth)
    throw std::invalid_argument("indicator word deeper than frame");
  const BranchWeights& bw = frame.weights;
  std::vector<double> coeff(frame.size(), 0.0);
  double mu = mass(u, bw);
  coeff[0] = mu;
  Word prefix;  // walks the proper prefixes of u
  for (int i = 0; i < u.length(); ++i) {
    double mw = mass(prefix, bw);
    double norm = std::sqrt(bw.p * bw.one_minus_p() * mw);
    double sigma = (u.letter(i) == 0) ? bw.one_minus_p() : -bw.p;
    coeff[frame.index_of(BasisIndex::diff(prefix))] = sigma * mu / norm;
    prefix = prefix.child(u.letter(i));
  }
  return coeff;
}

// Orthogonal change of basis Q between normalized level-m atom coordinates
// (rows, lex order) and the Haar basis (columns, canonical order):
// Q[t][j] = <1_{C_t}/sqrt(mass(t)), e_j>.  Columns of Q are the basis
// vectors written in atom coordinates; Q^T Q = I.
inline Matrix atom_change_of_basis(const HaarFrame& frame) {
  int n = frame.size();
  Matrix q(n, n);
  std::vector<Word> atoms = frame.atoms();
  for (int t = 0; t < n; ++t) {
    std::vector<double> coeff = indicator_to_haar(atoms[t], frame);
    double root_mass = std::sqrt(mass(atoms[t], frame.weights));
    for (int j = 0; j < n; ++j) q(t, j) = coeff[j] / root_mass;
  }
  return q;
}

// Gram matrix of the raw indicator family {1_{C_u} : |u| <= max_len} in
// canonical word order: G[u][v] = mass(C_u cap C_v).
inline Matrix indicator_gram(int max_len, const BranchWeights& bw) {
  std::vector<Word> words = enumerate_words(max_len);
  int n = int(words.size());
  Matrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      g(i, j) = intersection_mass(words[i], words[j], bw);
  return g;
}

}  // namespace cantor_frame
