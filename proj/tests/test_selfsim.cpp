#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "cantor_frame/selfsim.hpp"
#include "cantor_frame/spectral.hpp"

using namespace cantor_frame;

namespace {

// Independent oracle for the branch maps: in atom coordinates a branch map
// is literally the embedding of the 2^m coordinates into the matching half
// of the 2^(m+1) atoms (the measure scaling cancels against the
// normalization), so the Haar-coordinate matrix is Q_{m+1}^T E Q_m.
Matrix branch_oracle(int branch, double p, int m) {
  BranchWeights bw(p);
  HaarFrame source(m, bw);
  HaarFrame target(m + 1, bw);
  Matrix embed(target.size(), source.size());
  int offset = (branch == 0) ? 0 : source.size();
  for (int j = 0; j < source.size(); ++j) embed(offset + j, j) = 1.0;
  Matrix qs = atom_change_of_basis(source);
  Matrix qt = atom_change_of_basis(target);
  return matmul(transpose(qt), matmul(embed, qs));
}

double operator_norm(const Matrix& sym) {
  EighResult r = eigh(sym);
  return std::max(std::fabs(r.eigenvalues.front()),
                  std::fabs(r.eigenvalues.back()));
}

Matrix random_symmetric(int dim, std::mt19937& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Matrix a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) {
      double v = dist(rng);
      a(i, j) = v;
      a(j, i) = v;
    }
  return a;
}

SymMatrix wrap_haar(Matrix m, int depth, double p) {
  SymMatrix s;
  s.m = std::move(m);
  s.depth = depth;
  s.p = p;
  s.basis = BasisKind::Haar;
  s.provenance = Provenance::ClosedForm;
  return s;
}

}  // namespace

TEST_CASE("branch maps match the atom-embedding oracle") {
  for (double p : {0.3, 0.5, 0.7}) {
    for (int m = 0; m <= 4; ++m) {
      for (int branch : {0, 2}) {
        BranchMap u = branch_isometry(branch, p, m);
        Matrix oracle = branch_oracle(branch, p, m);
        INFO("p=" << p << " m=" << m << " branch=" << branch);
        REQUIRE(u.matrix.rows == 1 << (m + 1));
        REQUIRE(u.matrix.cols == 1 << m);
        REQUIRE(max_abs_diff(u.matrix, oracle) < 1e-12);
      }
    }
  }
}

TEST_CASE("frozen branch-map entries in the symmetric case") {
  BranchMap u0 = branch_isometry(0, 0.5, 2);
  double r = 1.0 / std::sqrt(2.0);
  REQUIRE(u0.matrix(0, 0) == Catch::Approx(r).margin(1e-15));
  REQUIRE(u0.matrix(1, 0) == Catch::Approx(r).margin(1e-15));
  BranchMap u2 = branch_isometry(2, 0.5, 2);
  REQUIRE(u2.matrix(0, 0) == Catch::Approx(r).margin(1e-15));
  REQUIRE(u2.matrix(1, 0) == Catch::Approx(-r).margin(1e-15));

  // Every column has unit norm.
  for (const BranchMap* u : {&u0, &u2}) {
    for (int j = 0; j < u->matrix.cols; ++j) {
      double norm2 = 0.0;
      for (int i = 0; i < u->matrix.rows; ++i)
        norm2 += u->matrix(i, j) * u->matrix(i, j);
      REQUIRE(norm2 == Catch::Approx(1.0).margin(1e-14));
    }
  }
}

TEST_CASE("cuntz relations hold to rounding") {
  for (double p : {0.2, 0.5, 0.8}) {
    for (int m : {1, 3, 5}) {
      CuntzReport r = cuntz_check(p, m);
      INFO("p=" << p << " m=" << m);
      REQUIRE(r.isometry_0 < 1e-12);
      REQUIRE(r.isometry_2 < 1e-12);
      REQUIRE(r.orthogonality < 1e-12);
      REQUIRE(r.completeness < 1e-12);
      REQUIRE(r.worst() < 1e-12);
    }
  }
  REQUIRE_THROWS_AS(cuntz_check(0.3, 0), std::invalid_argument);
}

TEST_CASE("psi reproduces the next-depth assembly") {
  for (double p : {0.2, 0.35, 0.5, 0.65, 0.8}) {
    for (int m = 0; m <= 5; ++m) {
      SymMatrix lifted = psi_apply(assemble_km_closed(p, m), p);
      SymMatrix direct = assemble_km_closed(p, m + 1);
      INFO("p=" << p << " m=" << m);
      REQUIRE(max_abs_diff(lifted.m, direct.m) < 1e-12);
      REQUIRE(lifted.depth == m + 1);
      REQUIRE(lifted.provenance == Provenance::PsiIteration);
    }
  }
}

TEST_CASE("psi of zero is the root projection") {
  SymMatrix zero = wrap_haar(Matrix(8, 8), 3, 0.3);
  SymMatrix lifted = psi_apply(zero, 0.3);
  REQUIRE(lifted.m.rows == 16);
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j)
      REQUIRE(lifted.m(i, j) == ((i == 0 && j == 0) ? 1.0 : 0.0));
}

TEST_CASE("psi contracts with ratio exactly alpha") {
  std::mt19937 rng(12345);
  for (double p : {0.3, 0.5, 0.7}) {
    double alpha = BranchWeights(p).alpha();
    for (int trial = 0; trial < 20; ++trial) {
      Matrix a = random_symmetric(8, rng);
      Matrix b = random_symmetric(8, rng);
      SymMatrix pa = psi_apply(wrap_haar(a, 3, p), p);
      SymMatrix pb = psi_apply(wrap_haar(b, 3, p), p);
      double lifted_norm = operator_norm(sub(pa.m, pb.m));
      double base_norm = operator_norm(sub(a, b));
      INFO("p=" << p << " trial=" << trial);
      REQUIRE(lifted_norm == Catch::Approx(alpha * base_norm).margin(1e-10));
    }
  }
}

TEST_CASE("phi norm ratio is exactly alpha on random input") {
  std::mt19937 rng(777);
  double p = 0.4;
  double alpha = BranchWeights(p).alpha();
  for (int trial = 0; trial < 5; ++trial) {
    Matrix t = random_symmetric(8, rng);
    SymMatrix lifted = phi_apply(wrap_haar(t, 3, p), p);
    REQUIRE(operator_norm(lifted.m) ==
            Catch::Approx(alpha * operator_norm(t)).margin(1e-10));
  }
}

TEST_CASE("neumann partial sums rebuild the assembly") {
  SymMatrix n0 = neumann_partial_sum(0.3, 0);
  REQUIRE(n0.m.rows == 1);
  REQUIRE(n0.m(0, 0) == 1.0);

  for (double p : {0.3, 0.5}) {
    for (int n : {1, 4, 5}) {
      SymMatrix s = neumann_partial_sum(p, n);
      SymMatrix direct = assemble_km_closed(p, n);
      INFO("p=" << p << " N=" << n);
      REQUIRE(s.provenance == Provenance::NeumannSum);
      REQUIRE(max_abs_diff(s.m, direct.m) < 1e-12);
    }
  }
}

TEST_CASE("block form of the truncated limit operator") {
  for (auto [p, depth] : {std::pair{0.5, 4}, {0.3, 5}, {0.65, 2}}) {
    BlockFormReport r = block_form_residual(p, depth);
    INFO("p=" << p << " M=" << depth);
    REQUIRE(r.residual <= 1e-10);
    REQUIRE(r.unitarity_defect <= 1e-12);
  }
  REQUIRE_THROWS_AS(block_form_residual(0.3, 1), std::invalid_argument);
}

TEST_CASE("successive filtration gaps shrink geometrically") {
  double p = 0.3;
  double alpha = BranchWeights(p).alpha();
  double prev = km_difference_norm(p, 0, 1);
  for (int m = 1; m <= 5; ++m) {
    double cur = km_difference_norm(p, m, 1);
    REQUIRE(cur == Catch::Approx(alpha * prev).margin(1e-12));
    prev = cur;
  }
}

TEST_CASE("input validation") {
  REQUIRE_THROWS_AS(branch_isometry(1, 0.3, 2), std::invalid_argument);
  SymMatrix bad = wrap_haar(Matrix(3, 3), 0, 0.3);
  REQUIRE_THROWS_AS(phi_apply(bad, 0.3), std::invalid_argument);
  SymMatrix atom_basis = wrap_haar(Matrix(4, 4), 2, 0.3);
  atom_basis.basis = BasisKind::Atom;
  REQUIRE_THROWS_AS(phi_apply(atom_basis, 0.3), std::invalid_argument);
  REQUIRE_THROWS_AS(neumann_partial_sum(0.3, -1), std::invalid_argument);
}
