#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sigmak/model.hpp"
#include "sigmak/selftest.hpp"

using namespace sigmak;
using doctest::Approx;

TEST_CASE("binomial") {
  CHECK(binomial(2, 0) == 1);
  CHECK(binomial(4, 2) == 6);
  CHECK(binomial(4, 1) == 4);
  CHECK(binomial(64, 32) == 1832624140942590534ULL);
  CHECK_THROWS_AS(binomial(3, 4), DomainError);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(SigmaParams(1, 1, 1.0), DomainError);
  CHECK_THROWS_AS(SigmaParams(2, 4, 1.0), DomainError);
  CHECK_THROWS_AS(SigmaParams(2, 0, 1.0), DomainError);
  CHECK_THROWS_AS(SigmaParams(2, 1, NAN), DomainError);
}

TEST_CASE("l(k) values") {
  CHECK(l_of_k({2, 1, 4}, 1.0) == Approx(2.0).epsilon(1e-15));
  CHECK(l_of_k({2, 3, 1}, 1.0) == Approx(1.0).epsilon(1e-15));
  CHECK(l_of_k({2, 2, 0}, 5.0) == Approx(-2.5).epsilon(1e-15));
  CHECK(sigma_of(2, 1, 2.0, 1.0) == Approx(4.0));
  CHECK(sigma_of(2, 3, 1.0, 1.0) == Approx(1.0));
  CHECK(sigma_of(3, 2, 7.0, 0.0) == 0.0);
  CHECK_THROWS_AS(l_of_k({2, 2, 1}, 0.0), SingularityError);
}

TEST_CASE("dl/dk values") {
  CHECK(dl_dk({2, 1, 4}, 1.0) == Approx(-2.0));
  CHECK(dl_dk({2, 3, 1}, 1.0) == Approx(-2.0));
  for (int n = 2; n <= 5; ++n) CHECK(dl_dk({n, 2, 0}, 1.0) == Approx(-(2.0 * n - 3) / 2));
}

TEST_CASE("critical values") {
  const CriticalValues a = critical_k({2, 1, 4});
  REQUIRE(a.k_c2_pos);
  REQUIRE(a.k_c1_pos);
  CHECK(*a.k_c2_pos == Approx(1.0).epsilon(1e-14));
  CHECK(*a.k_c1_pos == Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK_FALSE(a.k_c2_neg);

  const CriticalValues b = critical_k({2, 2, 6});
  CHECK(*b.k_c2_pos == Approx(std::sqrt(6.0 / 5.0)).epsilon(1e-14));
  CHECK(*b.k_c1_pos == Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(*b.k_c2_neg == Approx(-std::sqrt(6.0 / 5.0)).epsilon(1e-14));
  CHECK(*b.k_c1_neg == Approx(-std::sqrt(2.0)).epsilon(1e-14));

  const CriticalValues c = critical_k({2, 2, -1});
  CHECK_FALSE(c.k_c1_pos);
  CHECK_FALSE(c.k_c1_neg);
  CHECK(c.empty());
}

TEST_CASE("vector field values") {
  const SigmaParams p{2, 1, 4};
  PhaseVelocity v = vector_field(p, {0.0, 0.0});
  CHECK(v.dk == 0.0);
  CHECK(v.dalpha == 0.0);
  v = vector_field(p, {0.0, 4.0 / 3.0});
  CHECK(std::abs(v.dk) < 1e-15);
  CHECK(std::abs(v.dalpha) < 1e-14);
  v = vector_field(p, {1.0, 2.0});
  CHECK(v.dk == Approx(-4.0));
  CHECK(v.dalpha == Approx(3.0));
}

TEST_CASE("nullcline values") {
  const SigmaParams p{2, 1, 4};
  REQUIRE(nullcline_alpha(p, 4.0 / 3.0));
  CHECK(*nullcline_alpha(p, 4.0 / 3.0) == Approx(0.0));
  CHECK(*nullcline_alpha(p, 4.0) == Approx(std::sqrt(32.0)));
  CHECK_FALSE(nullcline_alpha(p, 1.0));
}

TEST_CASE("main term") {
  CHECK(main_term_pi({2, 1, 4}, {1.0, 0.5}) > 0.0);
  CHECK(main_term_pi({2, 1, 0}, {1.0, 1.0}) == Approx(24.0));
  const SigmaParams p{2, 3, 1};
  for (double k0 : {0.5, 1.5, -2.0}) {
    const double l = l_of_k(p, k0);
    CHECK(main_term_pi(p, {0.0, k0}) == Approx((k0 * k0 - k0 * l) * (k0 * k0 - k0 * l)));
  }
}

TEST_CASE("convexity signs") {
  const SigmaParams even{2, 2, 6};
  CHECK(d2alpha_dk2(even, {0.5, 2.0}) < 0.0);
  CHECK(d2alpha_dk2(even, {0.5, 0.5}) < 0.0);
  const SigmaParams odd{2, 3, 1};
  CHECK(d2alpha_dk2(odd, {0.5, 2.0}) < 0.0);
  CHECK(d2alpha_dk2(odd, {0.5, 0.3}) < 0.0);
  CHECK(d2alpha_dk2(odd, {-0.5, 0.3}) > 0.0);
  CHECK_THROWS(d2alpha_dk2(even, {0.3, std::sqrt(6.0 / 5.0)}));
}

TEST_CASE("region labels") {
  const SigmaParams p{2, 1, 4};
  CHECK(classify_region(p, {0.5, 2.0}) == RegionLabel::BandAboveKc1);
  CHECK(classify_region(p, {0.5, 1.0}) == RegionLabel::ConstantKLine);
  CHECK(classify_region(p, {0.5, -1.0}) == RegionLabel::LowerHalf);
}

TEST_CASE("desingularized field is k^{i-1} times the flow") {
  for (const SigmaParams& p : {SigmaParams{2, 3, 1}, SigmaParams{3, 4, -1}, SigmaParams{2, 2, 6}, SigmaParams{4, 5, 2}}) {
    for (double k : {-1.7, -0.3, 0.01, 0.6, 2.2}) {
      for (double a : {-1.5, 0.0, 0.8}) {
        const PhaseVelocity v = vector_field(p, {a, k});
        const DesingularizedVelocity d = desingularized_field(p, {a, k});
        const double m = ipow(k, p.i() - 1);
        CHECK(d.ds == Approx(m));
        CHECK(d.dk == Approx(m * v.dk).epsilon(1e-12));
        CHECK(d.dalpha == Approx(m * v.dalpha).epsilon(1e-12));
      }
    }
    const DesingularizedVelocity o = desingularized_field(p, {0.0, 0.0});
    CHECK(o.dk == 0.0);
    CHECK(o.dalpha == 0.0);
  }
}

TEST_CASE("model invariants") {
  for (const char* name : {"model.constraint_closure", "model.dl_dk_consistency", "model.symmetries",
                           "model.l_minus_2k_identity", "model.critical_values", "model.nullcline_shape"}) {
    const CheckResult r = run_check(name);
    INFO(r.name << ": " << r.detail);
    CHECK(r.passed);
  }
}
