#pragma once

// Batch diagnostic table.  Each row exercises one structural identity of the
// library end to end and reports a measured residual next to a certified
// tolerance.  Rows carry short reference keys that downstream reports print
// verbatim; the keys are stable identifiers, not computed values.
//
// The whole table is designed to run in a few seconds on one core: dense
// eigensolves are capped at dimension 256 and every recursion depth is kept
// small.  `perturb` is a test hook that injects a known defect into the
// filtration assembly so callers can verify that failures are reported.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "eigen_scalar.hpp"
#include "frame_operator.hpp"
#include "haar.hpp"
#include "matrix.hpp"
#include "moments.hpp"
#include "resolvent.hpp"
#include "selfsim.hpp"
#include "spectral.hpp"
#include "word.hpp"

namespace cantor_frame {

struct CheckRow {
  std::string ref;          // reference key printed in the report table
  std::string description;  // what the row verifies
  bool pass = false;
  double residual = 0.0;  // measured defect (signed where that is meaningful)
  double tolerance = 0.0;  // certified allowance
};

struct SelfcheckReport {
  std::vector<CheckRow> rows;
  bool all_pass = true;
};

namespace detail {

inline CheckRow make_row(std::string ref, std::string description,
                         double residual, double tolerance) {
  CheckRow row;
  row.ref = std::move(ref);
  row.description = std::move(description);
  row.residual = residual;
  row.tolerance = tolerance;
  row.pass = residual <= tolerance;
  return row;
}

// Operator norm of a symmetric matrix via the dense eigensolver.
inline double sym_operator_norm(const Matrix& a) {
  EighResult r = eigh(a);
  return std::max(std::abs(r.eigenvalues.front()),
                  std::abs(r.eigenvalues.back()));
}

// Random symmetric matrix in Haar coordinates at the given depth.
inline SymMatrix random_symmetric(int depth, double p, std::mt19937& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  int dim = 1 << depth;
  SymMatrix s;
  s.m = Matrix(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) {
      double v = unit(rng);
      s.m(i, j) = v;
      s.m(j, i) = v;
    }
  s.depth = depth;
  s.p = p;
  s.basis = BasisKind::Haar;
  s.provenance = Provenance::PsiIteration;
  return s;
}

}  // namespace detail

inline SelfcheckReport run_selfcheck(bool perturb = false) {
  using detail::make_row;
  using Rational = boost::multiprecision::cpp_rational;

  SelfcheckReport report;
  auto push = [&report](CheckRow row) {
    report.all_pass = report.all_pass && row.pass;
    report.rows.push_back(std::move(row));
  };

  // Symmetric Haar diagonalization: diagonal entries follow the dyadic
  // eigenvalue formulas, off-diagonal entries vanish.
  {
    const int m = 6;
    SymMatrix k = assemble_km_closed(0.5, m);
    BranchWeights bw(0.5);
    HaarFrame frame(m, bw);
    std::vector<Word> diffs = frame.diff_words();
    double residual = std::abs(k.m(0, 0) - (2.0 - std::ldexp(1.0, -m)));
    for (size_t idx = 0; idx < diffs.size(); ++idx) {
      int ell = diffs[idx].length();
      double expected =
          std::ldexp(1.0, -ell) * (1.0 - std::ldexp(1.0, -(m - ell)));
      int col = 1 + int(idx);
      residual = std::max(residual, std::abs(k.m(col, col) - expected));
    }
    residual = std::max(residual, max_offdiag_abs(k.m));
    push(make_row("Prop 3.1",
                  "symmetric Haar vectors are eigenvectors with dyadic "
                  "eigenvalues",
                  residual, 1e-13));
  }

  // Martingale difference decomposition: conditional-expectation projections
  // with depth coefficients rebuild the symmetric frame operator.
  {
    const int m = 5;
    BranchWeights bw(0.5);
    HaarFrame frame(m, bw);
    Matrix q = atom_change_of_basis(frame);
    int dim = 1 << m;
    std::vector<Matrix> e_haar;
    e_haar.reserve(size_t(m) + 1);
    for (int n = 0; n <= m; ++n)
      e_haar.push_back(
          conjugate_transposed(q, atom_conditional_expectation(n, m, bw)));
    Matrix sum(dim, dim);
    double c0 = 2.0 - std::ldexp(1.0, -m);
    sum = scale(e_haar[0], c0);
    for (int n = 1; n <= m; ++n) {
      double cn = std::ldexp(1.0, -(n - 1)) *
                  (1.0 - std::ldexp(1.0, -(m - n + 1)));
      sum = add(sum, scale(sub(e_haar[size_t(n)], e_haar[size_t(n) - 1]), cn));
    }
    double residual = max_abs_diff(sum, assemble_km_closed(0.5, m).m);
    push(make_row("Prop 3.4",
                  "martingale difference decomposition rebuilds the frame "
                  "operator",
                  residual, 1e-12));
  }

  // Dense eigensolve against the closed symmetric spectrum.
  {
    const int m = 5;
    SpectralData dense = spectral_km_dense(0.5, m);
    SpectralData closed = spectral_symmetric_km_closed(m);
    double residual = 0.0;
    for (size_t j = 0; j < dense.eigenvalues.size(); ++j)
      residual = std::max(
          residual, std::abs(dense.eigenvalues[j] - closed.eigenvalues[j]));
    push(make_row("Cor 3.5",
                  "dense symmetric eigensolve matches the closed spectrum",
                  residual, 1e-10));
  }

  // Symmetric truncated limit: top eigenvalue is exactly two.
  {
    SpectralData dense = spectral_kinf_dense(0.5, 6);
    double residual = std::abs(dense.lambda_max() - 2.0);
    residual = std::max(
        residual,
        std::abs(spectral_symmetric_kinf_closed(8).lambda_max() - 2.0));
    push(make_row("Cor 3.6", "symmetric limit operator has top eigenvalue two",
                  residual, 1e-10));
  }

  // Hilbert-Schmidt but not trace class: squared singular values sum toward
  // six while the trace grows without bound.
  {
    SpectralData d4 = spectral_symmetric_kinf_closed(4);
    SpectralData d8 = spectral_symmetric_kinf_closed(8);
    double frob2 = schatten_partial_sum(d8, 2.0);
    double trace4 = schatten_partial_sum(d4, 1.0);
    double trace8 = schatten_partial_sum(d8, 1.0);
    CheckRow row = make_row(
        "Cor 3.7", "Hilbert-Schmidt sum approaches six while the trace grows",
        std::abs(frob2 - 6.0), 1e-2);
    row.pass = row.pass && (trace8 > trace4 + 3.9);
    push(row);
  }

  // Tree sparsity: incomparable difference pairs decouple, and the
  // quadrature route reproduces the exact zeros.
  {
    const int m = 5;
    BranchWeights bw(0.3);
    HaarFrame frame(m, bw);
    SymMatrix k = assemble_km_gram_oracle(0.3, m);
    std::vector<Word> diffs = frame.diff_words();
    double residual = 0.0;
    for (size_t a = 0; a < diffs.size(); ++a)
      for (size_t b = 0; b < diffs.size(); ++b) {
        const Word& u = diffs[a];
        const Word& v = diffs[b];
        if (comparable(u, v)) continue;
        residual =
            std::max(residual, std::abs(k.m(1 + int(a), 1 + int(b))));
      }
    residual = std::max(residual,
                        max_offdiag_abs(assemble_km_closed(0.5, m).m));
    push(make_row("Thm 4.1(5)",
                  "incomparable difference pairs decouple in the frame "
                  "operator",
                  residual, 1e-13));
  }

  // Filtration assembly against the closed form.  The perturbation hook
  // injects a one-entry defect here so reported failures can be exercised.
  {
    const int m = 5;
    SymMatrix filt = assemble_km_filtration(0.3, m);
    if (perturb) filt.m(1, 1) += 1e-6;
    double residual = max_abs_diff(filt.m, assemble_km_closed(0.3, m).m);
    push(make_row("Prop 4.3",
                  "filtration sum over level mass operators rebuilds the "
                  "frame operator",
                  residual, 1e-12));
  }

  // Quadrature Gram matrix against the closed-form entries.
  {
    const int m = 5;
    double residual = 0.0;
    for (double p : {0.3, 0.65})
      residual = std::max(residual,
                          max_abs_diff(assemble_km_gram_oracle(p, m).m,
                                       assemble_km_closed(p, m).m));
    push(make_row("Cor 4.5",
                  "quadrature Gram assembly matches the closed-form entries",
                  residual, 1e-12));
  }

  // Window norms sit inside the geometric tail bound, and the root moment
  // of the truncated limit matches its closed value.
  {
    const double p = 0.35;
    BranchWeights bw(p);
    double worst_ratio = 0.0;
    for (int m = 1; m <= 4; ++m)
      for (int k = 1; k <= 3; ++k) {
        double bound =
            std::pow(bw.alpha(), m + 1) / (1.0 - bw.alpha());
        worst_ratio =
            std::max(worst_ratio, km_difference_norm(p, m, k) / bound);
      }
    SymMatrix a6 = assemble_kinf_truncated(p, 6);
    double mu1 = 1.0 / (1.0 - bw.q());
    CheckRow row = make_row(
        "Prop 5.1", "window norms stay inside the geometric tail bound",
        worst_ratio, 1.0);
    row.pass = row.pass && std::abs(a6.m(0, 0) - mu1) <= 1e-12;
    push(row);
  }

  // Truncated limit entries: closed form against the cylinder-coordinate
  // route.
  {
    const int depth = 5;
    BranchWeights bw(0.3);
    HaarFrame frame(depth, bw);
    Matrix via_atoms = conjugate_transposed(
        atom_change_of_basis(frame), kinf_truncated_atom_route(0.3, depth));
    double residual =
        max_abs_diff(via_atoms, assemble_kinf_truncated(0.3, depth).m);
    push(make_row("Prop 5.2",
                  "truncated limit entries agree with the "
                  "cylinder-coordinate route",
                  residual, 1e-12));
  }

  // Two-by-two compression lower-bounds the top eigenvalue (signed margin:
  // negative residual means the bound holds with room).
  {
    Compression2x2 c = compression_2x2(0.3);
    SpectralData dense = spectral_kinf_dense(0.3, 8);
    double residual = c.lambda_max - dense.lambda_max();
    push(make_row("Cor 5.3",
                  "two-by-two compression lower-bounds the top eigenvalue",
                  residual, 1e-12));
  }

  // Branch maps are isometries.
  {
    CuntzReport cuntz = cuntz_check(0.3, 4);
    push(make_row("Lem 6.1",
                  "branch operators are isometries between depth spaces",
                  std::max(cuntz.isometry_0, cuntz.isometry_2), 1e-12));
    push(make_row("Rem 6.2",
                  "branch ranges are orthogonal and jointly complete",
                  std::max(cuntz.orthogonality, cuntz.completeness), 1e-12));
  }

  // One renormalization step advances the depth by one.
  {
    SymMatrix k4 = assemble_km_closed(0.3, 4);
    double residual =
        max_abs_diff(psi_apply(k4, 0.3).m, assemble_km_closed(0.3, 5).m);
    push(make_row("Thm 6.3(1)",
                  "one renormalization step advances the depth by one",
                  residual, 1e-12));
  }

  // The difference part of the renormalization contracts by exactly the
  // branch factor.
  {
    const double p = 0.3;
    const int m = 2;
    BranchWeights bw(p);
    std::mt19937 rng(20240518u);
    double residual = 0.0;
    for (int trial = 0; trial < 4; ++trial) {
      SymMatrix t = detail::random_symmetric(m, p, rng);
      SymMatrix s = detail::random_symmetric(m, p, rng);
      double before = detail::sym_operator_norm(sub(t.m, s.m));
      double after = detail::sym_operator_norm(
          sub(phi_apply(t, p).m, phi_apply(s, p).m));
      residual = std::max(residual, std::abs(after - bw.alpha() * before));
    }
    push(make_row("Thm 6.3(3)",
                  "renormalization contracts differences by the branch "
                  "factor",
                  residual, 1e-10));
  }

  // Conjugating the truncated limit by the branch isometries produces the
  // two-block form.
  {
    BlockFormReport block = block_form_residual(0.3, 5);
    push(make_row("Cor 6.4",
                  "branch conjugation block-diagonalizes the truncated "
                  "limit",
                  std::max(block.residual, block.unitarity_defect), 1e-10));
  }

  // Neumann partial sums reproduce the finite-depth operators.
  {
    double residual = max_abs_diff(neumann_partial_sum(0.3, 5).m,
                                   assemble_km_closed(0.3, 5).m);
    push(make_row("Cor 6.6",
                  "Neumann partial sums reproduce the finite-depth "
                  "operators",
                  residual, 1e-12));
  }

  // Scalar renormalization identity with interval certificate.
  {
    RenormReport renorm = renormalization_residual(0.3, 6.0, 10, 8);
    CheckRow row = make_row(
        "Thm 7.1",
        "rooted resolvent satisfies the scalar renormalization identity",
        renorm.residual, renorm.certified_tolerance);
    row.pass = row.pass && renorm.ok;
    push(row);
  }

  // Moment recursion against the closed expressions: exact in rational
  // arithmetic, then in floating point.
  {
    Rational third(1, 3);
    std::vector<Rational> rec = moments_recursive<Rational>(third, 3);
    std::vector<Rational> closed = moments_closed<Rational>(third);
    bool exact = rec[1] == closed[0] && rec[2] == closed[1] &&
                 rec[3] == closed[2];
    std::vector<double> rec_f = moments_recursive<double>(0.3, 3);
    std::vector<double> closed_f = moments_closed<double>(0.3);
    double residual = exact ? 0.0 : 1.0;
    for (int n = 1; n <= 3; ++n)
      residual = std::max(
          residual, std::abs(rec_f[size_t(n)] - closed_f[size_t(n) - 1]) /
                        closed_f[size_t(n) - 1]);
    push(make_row("Prop 7.2",
                  "low moment recursion matches the closed expressions",
                  residual, 1e-12));
  }

  // Symmetric moments are two, four, eight -- exactly; and the first moment
  // equals the closed root value in rational arithmetic.
  {
    Rational half(1, 2);
    std::vector<Rational> mu = moments_recursive<Rational>(half, 3);
    bool exact = mu[0] == 1 && mu[1] == 2 && mu[2] == 4 && mu[3] == 8;
    Rational third(1, 3);
    Rational q = third * third + (1 - third) * (1 - third);
    exact = exact &&
            moments_recursive<Rational>(third, 1)[1] == 1 / (1 - q);
    push(make_row("Cor 7.3", "symmetric moments are two, four, eight",
                  exact ? 0.0 : 1.0, 0.0));
  }

  // Symmetric rooted resolvent is the Stieltjes transform of a point mass
  // at two.
  {
    RootedResolvent res = RootedResolvent::build(0.5, 25);
    double residual = 0.0;
    double tolerance = 0.0;
    for (double z : {3.0, 4.0}) {
      ResolventValue v = res.eval(z);
      residual = std::max(residual, std::abs(v.value - 1.0 / (z - 2.0)));
      tolerance = std::max(tolerance, v.error_radius);
    }
    push(make_row("Cor 7.5",
                  "symmetric rooted resolvent matches the point mass at two",
                  residual, tolerance));
  }

  // Scalar secular root against the direct dense eigensolve.
  {
    SecularSolve solve = solve_top_eigenvalue(0.35, 10, 1e-10, 8);
    CheckRow row = make_row(
        "Thm 7.6", "scalar secular root matches the direct top eigenvalue",
        std::abs(solve.lambda_star - solve.lambda_direct),
        solve.combined_tolerance);
    row.pass = row.pass && solve.agreement && solve.certified_simple;
    push(row);
  }

  return report;
}

inline std::string format_selfcheck(const SelfcheckReport& report) {
  std::string out;
  char line[224];
  size_t passed = 0;
  for (const CheckRow& row : report.rows) {
    if (row.pass) ++passed;
    std::snprintf(line, sizeof line,
                  "%s  %-11s %-62s residual=%10.3e  tol=%10.3e\n",
                  row.pass ? "PASS" : "FAIL", row.ref.c_str(),
                  row.description.c_str(), row.residual, row.tolerance);
    out += line;
  }
  std::snprintf(line, sizeof line, "%zu/%zu checks passed\n", passed,
                report.rows.size());
  out += line;
  return out;
}

}  // namespace cantor_frame
