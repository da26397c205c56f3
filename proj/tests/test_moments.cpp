#include <catch2/catch_amalgamated.hpp>

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <sstream>

#include "cantor_frame/moments.hpp"

using namespace cantor_frame;
using Rational = boost::multiprecision::cpp_rational;

namespace {

Rational rat(long num, long den) { return Rational(num) / Rational(den); }

std::string to_string(const Rational& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

}  // namespace

TEST_CASE("laurent tail arithmetic") {
  SECTION("product of two simple poles") {
    LaurentTail<double> a(4), b(4);
    a.coeff(1) = 1.0;  // z^-1
    b.coeff(1) = 1.0;
    LaurentTail<double> ab = mul(a, b);
    REQUIRE(ab.coeff(1) == 0.0);
    REQUIRE(ab.coeff(2) == 1.0);  // z^-2
    REQUIRE(ab.coeff(3) == 0.0);
    REQUIRE(ab.coeff(4) == 0.0);
  }

  SECTION("grading: low product coefficients ignore high inputs") {
    LaurentTail<double> a(5), b(5);
    a.coeff(1) = 2.0;
    a.coeff(2) = -1.0;
    b.coeff(1) = 3.0;
    b.coeff(2) = 0.5;
    LaurentTail<double> low = mul(a, b);
    a.coeff(5) = 100.0;  // must not affect coefficients below order 6
    b.coeff(4) = -50.0;  // affects only order >= 5
    LaurentTail<double> high = mul(a, b);
    for (int k = 1; k <= 3; ++k) REQUIRE(low.coeff(k) == high.coeff(k));
  }

  SECTION("geometric inverse with implicit unit") {
    LaurentTail<Rational> zero(3);
    LaurentTail<Rational> g0 = inv_one_minus(zero);
    for (int k = 1; k <= 3; ++k) REQUIRE(g0.coeff(k) == Rational(0));

    LaurentTail<Rational> a(4);
    a.coeff(1) = rat(1, 2);
    LaurentTail<Rational> g = inv_one_minus(a);
    REQUIRE(g.coeff(1) == rat(1, 2));
    REQUIRE(g.coeff(2) == rat(1, 4));
    REQUIRE(g.coeff(3) == rat(1, 8));
    REQUIRE(g.coeff(4) == rat(1, 16));

    // (1 - a)(1 + g) = 1: the tail of the product must vanish exactly.
    LaurentTail<Rational> residual = sub(g, add(a, mul(a, g)));
    for (int k = 1; k <= 4; ++k) REQUIRE(residual.coeff(k) == Rational(0));
  }

  SECTION("order mismatch is rejected") {
    LaurentTail<double> a(3), b(4);
    REQUIRE_THROWS_AS(add(a, b), std::invalid_argument);
    REQUIRE_THROWS_AS(mul(a, b), std::invalid_argument);
  }
}

TEST_CASE("moment recursion in exact rational mode") {
  SECTION("symmetric point gives the doubling sequence") {
    std::vector<Rational> mu = moments_recursive(rat(1, 2), 3);
    REQUIRE(mu[0] == Rational(1));
    REQUIRE(mu[1] == Rational(2));
    REQUIRE(mu[2] == Rational(4));
    REQUIRE(mu[3] == Rational(8));
  }

  SECTION("frozen values at p = 1/3") {
    std::vector<Rational> mu = moments_recursive(rat(1, 3), 3);
    REQUIRE(mu[1] == rat(9, 4));
    REQUIRE(mu[2] == rat(21, 4));
    REQUIRE(mu[3] == rat(12717, 1024));
  }

  SECTION("frozen values at p = 2/5") {
    std::vector<Rational> mu = moments_recursive(rat(2, 5), 3);
    REQUIRE(mu[1] == rat(25, 12));
    REQUIRE(mu[2] == rat(475, 108));
    REQUIRE(mu[3] == rat(2129375, 228096));
  }

  SECTION("closed forms agree exactly") {
    for (const Rational& p :
         {rat(1, 2), rat(1, 3), rat(2, 5), rat(7, 10)}) {
      std::vector<Rational> rec = moments_recursive(p, 3);
      std::vector<Rational> closed = moments_closed(p);
      REQUIRE(rec[1] == closed[0]);
      REQUIRE(rec[2] == closed[1]);
      REQUIRE(rec[3] == closed[2]);
    }
  }

  SECTION("rational printing uses fraction form") {
    REQUIRE(to_string(rat(9, 4)) == "9/4");
    REQUIRE(to_string(Rational(2)) == "2");
  }
}

TEST_CASE("moment recursion in float mode") {
  for (double p : {0.3, 0.5, 0.73}) {
    std::vector<double> rec = moments_recursive(p, 3);
    std::vector<double> closed = moments_closed(p);
    INFO("p=" << p);
    REQUIRE(rec[0] == 1.0);
    for (int i = 0; i < 3; ++i)
      REQUIRE(rec[size_t(i) + 1] ==
              Catch::Approx(closed[size_t(i)]).margin(1e-12));
  }

  SECTION("float tracks the exact rationals at larger order") {
    std::vector<Rational> exact = moments_recursive(rat(1, 3), 10);
    std::vector<double> approx = moments_recursive(1.0 / 3.0, 10);
    for (size_t n = 0; n <= 10; ++n) {
      double e = exact[n].convert_to<double>();
      REQUIRE(approx[n] == Catch::Approx(e).epsilon(1e-10));
    }
  }
}

TEST_CASE("moment sequence shape") {
  for (double p : {0.3, 0.5}) {
    std::vector<double> mu = moments_recursive(p, 10);
    double b0 = 1.0 / (1.0 - BranchWeights(p).alpha());
    for (size_t n = 0; n <= 10; ++n) {
      REQUIRE(mu[n] > 0.0);
      // Hausdorff envelope: the rooted measure is a probability measure
      // supported inside [0, b0].
      REQUIRE(mu[n] <= std::pow(b0, double(n)) * (1.0 + 1e-12));
    }
    // Log-convexity from Cauchy-Schwarz.
    for (size_t n = 1; n + 1 <= 10; ++n)
      REQUIRE(mu[n] * mu[n] <= mu[n - 1] * mu[n + 1] * (1.0 + 1e-10));
  }

  SECTION("log-convexity is exact in rational mode") {
    std::vector<Rational> mu = moments_recursive(rat(3, 10), 8);
    for (size_t n = 1; n + 1 <= 8; ++n)
      REQUIRE(mu[n] * mu[n] <= mu[n - 1] * mu[n + 1]);
  }
}

TEST_CASE("operator oracle moments") {
  SECTION("power zero and one") {
    auto oracle = moments_operator_oracle(0.3, 6, 1);
    REQUIRE(oracle[0].value == 1.0);
    REQUIRE(oracle[0].error_bound == 0.0);
    SymMatrix k = assemble_km_closed(0.3, 6);
    REQUIRE(oracle[1].value == Catch::Approx(k.m(0, 0)).margin(1e-14));
    double q = BranchWeights(0.3).q();
    REQUIRE(std::fabs(oracle[1].value - 1.0 / (1.0 - q)) <=
            truncation_error_bound(0.3, 6));
  }

  SECTION("agreement with the recursion within certified bounds") {
    for (double p : {0.3, 0.5, 0.7}) {
      std::vector<double> mu = moments_recursive(p, 5);
      auto oracle = moments_operator_oracle(p, 10, 5);
      for (size_t n = 0; n <= 5; ++n) {
        INFO("p=" << p << " n=" << n);
        REQUIRE(std::fabs(mu[n] - oracle[n].value) <=
                oracle[n].error_bound + 1e-12);
      }
    }
  }

  SECTION("symmetric second moment within bound of four") {
    auto oracle = moments_operator_oracle(0.5, 10, 2);
    REQUIRE(std::fabs(oracle[2].value - 4.0) <= oracle[2].error_bound);
  }

  SECTION("caps") {
    REQUIRE_THROWS_AS(moments_operator_oracle(0.3, 11, 2),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(moments_operator_oracle(0.3, 6, 9),
                      std::invalid_argument);
  }
}

TEST_CASE("renormalization identity on truncations") {
  SECTION("symmetric closed form is exact") {
    RenormReport r = renormalization_residual(0.5, 4.0, 25);
    REQUIRE(r.residual <= 1e-10);
    REQUIRE(r.ok);
    REQUIRE(r.lhs == Catch::Approx(0.5).margin(1e-14));
  }

  SECTION("asymmetric weights with certified tolerance") {
    for (double z : {6.0, 8.0}) {
      RenormReport r = renormalization_residual(0.3, z, 12, 8);
      INFO("z=" << z);
      REQUIRE(r.ok);
      REQUIRE(r.residual <= r.certified_tolerance);
      REQUIRE(r.certified_tolerance < 0.1);
    }
  }

  SECTION("far field behaves like the leading moment") {
    RenormReport r = renormalization_residual(0.4, 1e6, 8, 6);
    REQUIRE(r.lhs * 1e6 == Catch::Approx(1.0).margin(1e-4));
    REQUIRE(r.ok);
  }

  SECTION("precondition on z") {
    REQUIRE_THROWS_AS(renormalization_residual(0.3, 3.0, 10, 8),
                      std::domain_error);
  }
}
