#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "subheat/jets.hpp"
#include "subheat/rng.hpp"

#include <cmath>

using namespace subheat;

namespace {
Point pt(double a = 0, double b = 0, double c = 0, double d = 0) { return {a, b, c, d}; }
}

TEST_CASE("product of coordinate jets: bilinear monomial") {
    Point c = pt(0.3, -0.7);
    Jet a = jet_coordinate(2, 2, c, 0);
    Jet b = jet_coordinate(2, 2, c, 1);
    Jet p = a * b;
    CHECK(p.value() == doctest::Approx(0.3 * -0.7));
    CHECK(p.d2(0, 1) == doctest::Approx(1.0));
    CHECK(p.d2(0, 0) == doctest::Approx(0.0));
    CHECK(p.d2(1, 1) == doctest::Approx(0.0));
}

TEST_CASE("addition with a 0-jet truncates to min order") {
    Point c = pt(1.0);
    Jet a = jet_coordinate(1, 3, c, 0);
    Jet z = jet_constant(1, 0, c, 0.0);
    Jet s = a + z;
    CHECK(s.order == 0);
    CHECK(s.value() == doctest::Approx(1.0));
}

TEST_CASE("z^2 * z^3 at z=1 differentiates like z^5") {
    // hand oracle: d/dz z^5 = 5 z^4, d2 = 20 z^3 -> at 1: 1, 5, 20
    Point c = pt(1.0);
    Polynomial z2, z3;
    z2.n = 1;
    z2.add_term(1.0, {2});
    z3.n = 1;
    z3.add_term(1.0, {3});
    Jet p = z2.jet(c, 4) * z3.jet(c, 4);
    CHECK(p.value() == doctest::Approx(1.0));
    CHECK(p.d(0) == doctest::Approx(5.0));
    CHECK(p.d2(0, 0) == doctest::Approx(20.0));
}

TEST_CASE("center/dimension mismatch is an error") {
    Jet a = jet_coordinate(2, 2, pt(0, 0), 0);
    Jet b = jet_coordinate(2, 2, pt(1, 0), 0);
    CHECK_THROWS(a * b);
    Jet c1 = jet_coordinate(1, 2, pt(0), 0);
    CHECK_THROWS(a + c1);
}

TEST_CASE("sqrt of |x|^2 reproduces |x| jets at (1,0)") {
    Point c = pt(1.0, 0.0);
    Polynomial r2;
    r2.n = 2;
    r2.add_term(1.0, {2, 0});
    r2.add_term(1.0, {0, 2});
    Jet r = jet_compose_univariate(UnivariateFn::Sqrt, r2.jet(c, 2));
    CHECK(r.value() == doctest::Approx(1.0));
    CHECK(r.d(0) == doctest::Approx(1.0));
    CHECK(r.d(1) == doctest::Approx(0.0));
    CHECK(r.d2(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("exp of zero jet is the constant 1") {
    Jet z = jet_constant(1, 0, pt(0.0), 0.0);
    Jet e = jet_compose_univariate(UnivariateFn::Exp, z);
    CHECK(e.value() == doctest::Approx(1.0));
}

TEST_CASE("reciprocal jet of z at z=2") {
    // 1/x at 2: 0.5, -0.25, 0.25, -0.375
    Jet z = jet_coordinate(1, 3, pt(2.0), 0);
    Jet r = jet_compose_univariate(UnivariateFn::Reciprocal, z);
    CHECK(r.value() == doctest::Approx(0.5));
    CHECK(r.d(0) == doctest::Approx(-0.25));
    CHECK(r.d2(0, 0) == doctest::Approx(0.25));
    MultiIndex a{3, 0, 0, 0};
    CHECK(r.d(a) == doctest::Approx(-0.375));
}

TEST_CASE("domain violations throw") {
    Jet neg = jet_constant(1, 2, pt(0.0), -1.0);
    CHECK_THROWS_AS(jet_compose_univariate(UnivariateFn::Sqrt, neg), std::domain_error);
    Jet zero = jet_constant(1, 2, pt(0.0), 0.0);
    CHECK_THROWS_AS(jet_compose_univariate(UnivariateFn::Reciprocal, zero), std::domain_error);
}

TEST_CASE("directional derivative basics") {
    // X = d_z1 applied to z1 -> 1
    Point c = pt(0.4, 0.2);
    std::vector<Jet> X = {jet_constant(2, 1, c, 1.0), jet_constant(2, 1, c, 0.0)};
    Jet f = jet_coordinate(2, 1, c, 0);
    CHECK(directional_derivative(X, f).value() == doctest::Approx(1.0));

    // Heisenberg X = d_x - (y/2) d_z applied to z at (0,1,0) -> -1/2
    Point h = pt(0.0, 1.0, 0.0);
    std::vector<Jet> Xh = {jet_constant(3, 1, h, 1.0), jet_constant(3, 1, h, 0.0),
                           (-0.5) * jet_coordinate(3, 1, h, 1)};
    Jet fz = jet_coordinate(3, 1, h, 2);
    CHECK(directional_derivative(Xh, fz).value() == doctest::Approx(-0.5));

    // Grushin Y = x d_y applied to y at x = 3 -> 3
    Point g = pt(3.0, -1.0);
    std::vector<Jet> Y = {jet_constant(2, 1, g, 0.0), jet_coordinate(2, 1, g, 0)};
    Jet fy = jet_coordinate(2, 1, g, 1);
    CHECK(directional_derivative(Y, fy).value() == doctest::Approx(3.0));

    Jet f0 = jet_constant(2, 0, c, 1.0);
    CHECK_THROWS(directional_derivative(X, f0));
}

TEST_CASE("polynomial jets equal exact partial derivatives (degree <= 4 monomials)") {
    // p = 2 x^2 y + x y^3
    Polynomial p;
    p.n = 2;
    p.add_term(2.0, {2, 1});
    p.add_term(1.0, {1, 3});
    Point c = pt(1.3, -0.6);
    Jet j = p.jet(c, 4);
    const double x = c[0], y = c[1];
    CHECK(j.value() == doctest::Approx(2 * x * x * y + x * y * y * y));
    CHECK(j.d(0) == doctest::Approx(4 * x * y + y * y * y));
    CHECK(j.d(1) == doctest::Approx(2 * x * x + 3 * x * y * y));
    CHECK(j.d2(0, 1) == doctest::Approx(4 * x + 3 * y * y));
    MultiIndex a13{1, 3, 0, 0};
    CHECK(j.d(a13) == doctest::Approx(6.0));
}

TEST_CASE("product rule for directional derivatives on random polynomials") {
    RngStream rng(7, 0);
    for (int rep = 0; rep < 20; ++rep) {
        Polynomial f, g;
        f.n = g.n = 2;
        for (int t = 0; t < 4; ++t) {
            f.add_term(rng.next_normal(), {int(rng.next_u64() % 3), int(rng.next_u64() % 3)});
            g.add_term(rng.next_normal(), {int(rng.next_u64() % 3), int(rng.next_u64() % 3)});
        }
        Point c = pt(rng.next_normal(), rng.next_normal());
        std::vector<Jet> X = {Polynomial::coordinate(2, 1).jet(c, 3),
                              Polynomial::coordinate(2, 0).jet(c, 3)}; // X = y d_x + x d_y
        Jet fj = f.jet(c, 4), gj = g.jet(c, 4);
        Jet lhs = directional_derivative(X, fj * gj);
        Jet rhs = directional_derivative(X, fj) * gj.truncated(3) +
                  fj.truncated(3) * directional_derivative(X, gj);
        for (std::size_t k = 0; k < lhs.coeff.size(); ++k)
            CHECK(lhs.coeff[k] == doctest::Approx(rhs.coeff[k]).epsilon(1e-10));
    }
}

TEST_CASE("sqrt(a^2) reproduces a to machine precision at order 4") {
    RngStream rng(11, 0);
    for (int rep = 0; rep < 10; ++rep) {
        Polynomial a;
        a.n = 2;
        a.add_term(2.0 + rng.next_uniform(), {0, 0});
        a.add_term(rng.next_normal(), {1, 0});
        a.add_term(rng.next_normal(), {0, 1});
        a.add_term(0.5 * rng.next_normal(), {1, 1});
        Point c = pt(0.3 * rng.next_normal(), 0.3 * rng.next_normal());
        Jet aj = a.jet(c, 4);
        if (aj.value() <= 0.1) continue;
        Jet back = jet_compose_univariate(UnivariateFn::Sqrt, aj * aj);
        for (std::size_t k = 0; k < back.coeff.size(); ++k)
            CHECK(back.coeff[k] == doctest::Approx(aj.coeff[k]).epsilon(1e-12));
    }
}

TEST_CASE("erf jet matches finite differences") {
    Jet z = jet_coordinate(1, 3, pt(0.37), 0);
    Jet e = jet_compose_univariate(UnivariateFn::Erf, z);
    const double h = 1e-5, x = 0.37;
    const double d1 = (std::erf(x + h) - std::erf(x - h)) / (2 * h);
    const double d2 = (std::erf(x + h) - 2 * std::erf(x) + std::erf(x - h)) / (h * h);
    CHECK(e.value() == doctest::Approx(std::erf(x)));
    CHECK(e.d(0) == doctest::Approx(d1).epsilon(1e-8));
    CHECK(e.d2(0, 0) == doctest::Approx(d2).epsilon(1e-4));
}

TEST_CASE("smooth transition: plateau values and vanishing jets at seams") {
    Jet below = smooth_transition_jet(jet_constant(1, 3, pt(0.0), -0.2));
    CHECK(below.value() == 0.0);
    Jet above = smooth_transition_jet(jet_constant(1, 3, pt(0.0), 1.3));
    CHECK(above.value() == 1.0);
    Jet mid = smooth_transition_jet(jet_coordinate(1, 3, pt(0.5), 0));
    CHECK(mid.value() == doctest::Approx(0.5));
    CHECK(mid.d(0) > 0.0);
    // near the seam all derivatives are tiny
    Jet seam = smooth_transition_jet(jet_coordinate(1, 3, pt(0.999), 0));
    CHECK(seam.value() == doctest::Approx(1.0).epsilon(1e-6));
}
