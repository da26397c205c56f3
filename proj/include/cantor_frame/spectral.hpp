#pragma once

// Deterministic dense symmetric eigensolver (cyclic Jacobi) and the spectral
// data consumed downstream: rooted spectral measures, resolvent values with
// certified error radii, Schatten partial sums, and exact operator norms of
// filtration windows.
//
// Jacobi was chosen over QR/tridiagonalization on purpose: it is simple,
// rotation order is fixed, and there is no shift heuristic, so results are
// bit-reproducible across runs for the dimensions used here (<= 2^10).

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "cantor_frame/frame_operator.hpp"
#include "cantor_frame/matrix.hpp"

namespace cantor_frame {

constexpr int kMaxEighDim = 1 << 10;
constexpr double kJacobiTol = 1e-13;
constexpr int kJacobiMaxSweeps = 100;

struct EighNoConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EighResult {
  std::vector<double> eigenvalues;  // ascending
  Matrix vectors;                   // column j pairs with eigenvalues[j]
  int sweeps = 0;
  double max_offdiag = 0.0;
};

// Cyclic-by-rows Jacobi: sweep all (p,q) pairs in fixed order, rotating each
// nonzero off-diagonal to zero, until the largest off-diagonal magnitude
// drops below kJacobiTol.  Throws EighNoConvergence after 100 sweeps.
inline EighResult eigh(const Matrix& input) {
  if (input.rows != input.cols) throw std::invalid_argument("eigh: not square");
  int n = input.rows;
  if (n < 1 || n > kMaxEighDim)
    throw std::invalid_argument("eigh: dimension outside supported range");

  Matrix a = input;
  // Accumulate eigenvectors as rows (contiguous rotations), transpose at end.
  Matrix vt = Matrix::identity(n);

  int sweep = 0;
  double off = max_offdiag_abs(a);
  while (off >= kJacobiTol) {
    if (++sweep > kJacobiMaxSweeps)
      throw EighNoConvergence("jacobi sweeps exhausted, off=" +
                              fmt_double(off));
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double apq = a(p, q);
        if (apq == 0.0) continue;
        double app = a(p, p), aqq = a(q, q);
        double theta = (aqq - app) / (2.0 * apq);
        double t = (theta >= 0.0)
                       ? 1.0 / (theta + std::sqrt(theta * theta + 1.0))
                       : 1.0 / (theta - std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;

        double* ap = &a.a[size_t(p) * n];
        double* aq = &a.a[size_t(q) * n];
        for (int k = 0; k < n; ++k) {
          double akp = ap[k], akq = aq[k];
          ap[k] = c * akp - s * akq;
          aq[k] = s * akp + c * akq;
        }
        // Closed-form corners; the row pass mangled them.
        ap[p] = app - t * apq;
        aq[q] = aqq + t * apq;
        ap[q] = 0.0;
        aq[p] = 0.0;
        // Mirror the rotated rows into the columns.
        for (int k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          a(k, p) = ap[k];
          a(k, q) = aq[k];
        }

        double* vp = &vt.a[size_t(p) * n];
        double* vq = &vt.a[size_t(q) * n];
        for (int k = 0; k < n; ++k) {
          double vkp = vp[k], vkq = vq[k];
          vp[k] = c * vkp - s * vkq;
          vq[k] = s * vkp + c * vkq;
        }
      }
    }
    off = max_offdiag_abs(a);
  }

  EighResult r;
  r.sweeps = sweep;
  r.max_offdiag = off;
  r.eigenvalues.resize(n);
  for (int i = 0; i < n; ++i) r.eigenvalues[i] = a(i, i);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    return r.eigenvalues[i] < r.eigenvalues[j];
  });
  std::vector<double> sorted(n);
  Matrix v(n, n);
  for (int j = 0; j < n; ++j) {
    sorted[j] = r.eigenvalues[order[j]];
    for (int i = 0; i < n; ++i) v(i, j) = vt(order[j], i);
  }
  r.eigenvalues = std::move(sorted);
  r.vectors = std::move(v);
  return r;
}

// Largest |A v_j - lambda_j v_j| over all eigenpairs; test-side certificate.
inline double eigh_residual(const Matrix& a, const EighResult& r) {
  int n = a.rows;
  double worst = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += a(i, k) * r.vectors(k, j);
      worst = std::max(worst, std::fabs(acc - r.eigenvalues[j] *
                                                  r.vectors(i, j)));
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Spectral data: eigenvalues plus the rooted weights |<root, v_j>|^2 and a
// certified operator-norm distance to the limit operator.

struct SpectralData {
  std::vector<double> eigenvalues;     // ascending
  Matrix eigenvectors;                 // may be empty for closed-form data
  std::vector<double> rooted_weights;  // aligned with eigenvalues
  double tail_bound = 0.0;             // certified ||K - source||
  int depth = 0;
  double p = 0.5;
  Provenance provenance = Provenance::ClosedForm;

  double lambda_max() const { return eigenvalues.back(); }
  bool has_vectors() const { return eigenvectors.rows > 0; }
};

inline SpectralData spectral_from_matrix(const SymMatrix& s,
                                         double tail_bound) {
  if (s.basis != BasisKind::Haar)
    throw std::invalid_argument("spectral_from_matrix expects Haar basis");
  EighResult r = eigh(s.m);
  SpectralData sd;
  sd.eigenvalues = r.eigenvalues;
  sd.rooted_weights.resize(sd.eigenvalues.size());
  for (size_t j = 0; j < sd.eigenvalues.size(); ++j) {
    double c = r.vectors(0, int(j));  // root vector has basis index 0
    sd.rooted_weights[j] = c * c;
  }
  sd.eigenvectors = std::move(r.vectors);
  sd.tail_bound = tail_bound;
  sd.depth = s.depth;
  sd.p = s.p;
  sd.provenance = s.provenance;
  return sd;
}

// Dense route for the depth-m frame operator.
inline SpectralData spectral_km_dense(double p, int m) {
  return spectral_from_matrix(assemble_km_closed(p, m),
                              truncation_error_bound(p, m));
}

// Dense route for the depth-M compression of the limit operator.
inline SpectralData spectral_kinf_dense(double p, int depth) {
  return spectral_from_matrix(assemble_kinf_truncated(p, depth),
                              compression_error_bound(p, depth));
}

inline SpectralData expand_groups(const std::vector<EigenvalueGroup>& groups) {
  SpectralData sd;
  for (const EigenvalueGroup& g : groups)
    for (int i = 0; i < g.multiplicity; ++i)
      sd.eigenvalues.push_back(g.value);
  std::sort(sd.eigenvalues.begin(), sd.eigenvalues.end());
  sd.rooted_weights.assign(sd.eigenvalues.size(), 0.0);
  return sd;
}

// Closed-form spectral data in the symmetric case.  The matrices are
// diagonal at p = 1/2, the constant function is the top eigenvector, and
// the rooted measure is the point mass at the top eigenvalue.
inline SpectralData spectral_symmetric_km_closed(int m) {
  SpectralData sd = expand_groups(symmetric_closed_spectrum(m));
  sd.rooted_weights.back() = 1.0;
  sd.tail_bound = truncation_error_bound(0.5, m);
  sd.depth = m;
  sd.p = 0.5;
  sd.provenance = Provenance::ClosedForm;
  return sd;
}

inline SpectralData spectral_symmetric_kinf_closed(int depth) {
  if (depth < 1 || depth > 30)
    throw std::invalid_argument("symmetric closed data: bad depth");
  // Depth-M compression at p = 1/2: diagonal entries 2 (root) and the
  // cylinder masses 2^-l with multiplicity 2^l, l < M.
  std::vector<EigenvalueGroup> groups;
  for (int l = depth - 1; l >= 0; --l)
    groups.push_back({std::ldexp(1.0, -l), 1 << l});
  groups.push_back({2.0, 1});
  SpectralData sd = expand_groups(groups);
  sd.rooted_weights.back() = 1.0;
  sd.tail_bound = compression_error_bound(0.5, depth);
  sd.depth = depth;
  sd.p = 0.5;
  sd.provenance = Provenance::ClosedForm;
  return sd;
}

// ---------------------------------------------------------------------------
// Rooted spectral measure and resolvent evaluation.

struct MeasureAtom {
  double lambda;
  double weight;
};

inline std::vector<MeasureAtom> rooted_spectral_measure(
    const SpectralData& sd, double weight_floor = 1e-14) {
  std::vector<MeasureAtom> atoms;
  for (size_t j = 0; j < sd.eigenvalues.size(); ++j)
    if (sd.rooted_weights[j] > weight_floor)
      atoms.push_back({sd.eigenvalues[j], sd.rooted_weights[j]});
  return atoms;
}

struct ResolventValue {
  double value;
  double error_radius;
};

// m(z) = sum_j w_j / (z - lambda_j) with the certified radius from the
// second resolvent identity:
//   |m_limit(z) - m(z)| <= tail / ((z - L)(z - L - tail)).
// Requires z beyond the certified spectral radius, z > L + tail.
inline ResolventValue resolvent_value(double z, const SpectralData& sd) {
  double lmax = sd.lambda_max();
  if (!(z > lmax + sd.tail_bound))
    throw std::domain_error("resolvent_value: z not certifiably beyond the spectrum");
  double v = 0.0;
  for (size_t j = 0; j < sd.eigenvalues.size(); ++j) {
    double w = sd.rooted_weights[j];
    if (w != 0.0) v += w / (z - sd.eigenvalues[j]);
  }
  double d = z - lmax;
  return {v, sd.tail_bound / (d * (d - sd.tail_bound))};
}

// Partial Schatten sum over the nonnegative spectrum.
inline double schatten_partial_sum(const SpectralData& sd, double r) {
  if (r < 1.0) throw std::invalid_argument("schatten_partial_sum: r >= 1");
  double s = 0.0;
  for (double lam : sd.eigenvalues)
    if (lam > 0.0) s += std::pow(lam, r);
  return s;
}

// Group numerically coincident eigenvalues (within tol) into multiplicity
// clusters, ascending.
inline std::vector<EigenvalueGroup> cluster_eigenvalues(
    const std::vector<double>& eigenvalues, double tol = 1e-8) {
  std::vector<EigenvalueGroup> out;
  for (double lam : eigenvalues) {
    if (!out.empty() && std::fabs(lam - out.back().value) <= tol) {
      // Keep the running mean as the cluster representative.
      EigenvalueGroup& g = out.back();
      g.value = (g.value * g.multiplicity + lam) / (g.multiplicity + 1);
      g.multiplicity += 1;
    } else {
      out.push_back({lam, 1});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exact operator norms of filtration windows.
//
// The window sum_{n=m+1}^{m+k} D_n E_n only couples atoms inside a common
// level-(m+1) cylinder, and the block of cylinder a equals mass(a) times one
// canonical copy (the window of the depth-(k-1) suffix system).  The norm is
// therefore alpha^(m+1) * lambda_max(canonical block), with one small dense
// eigensolve in place of a depth-(m+k) one.

// ||K_{m+k} - K_m|| exactly (as an operator on the measure space).
inline double km_difference_norm(double p, int m, int k) {
  if (k < 1) throw std::invalid_argument("km_difference_norm: k >= 1");
  BranchWeights bw(p);
  int d = k - 1;  // canonical block = atom matrix of the depth-d system
  Matrix block(1 << d, 1 << d);
  for (int level = 0; level <= d; ++level) {
    Matrix e = atom_conditional_expectation(level, d, bw);
    std::vector<double> dg = atom_mass_diagonal(level, d, bw);
    for (int i = 0; i < block.rows; ++i)
      for (int j = 0; j < block.cols; ++j) block(i, j) += dg[i] * e(i, j);
  }
  EighResult r = eigh(block);
  return std::pow(bw.alpha(), m + 1) * r.eigenvalues.back();
}

// ||P_M K P_M - K_m|| exactly for M > m: same block structure, with the
// collapsed deeper levels adding the geometric diagonal tail.
inline double kinf_truncated_minus_km_norm(double p, int m, int depth) {
  if (depth <= m)
    throw std::invalid_argument("kinf_truncated_minus_km_norm: depth > m");
  BranchWeights bw(p);
  int d = depth - m - 1;
  Matrix block = kinf_truncated_atom_route(p, d);
  EighResult r = eigh(block);
  return std::pow(bw.alpha(), m + 1) * r.eigenvalues.back();
}

}  // namespace cantor_frame
