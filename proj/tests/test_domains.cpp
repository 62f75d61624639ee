#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "subheat/domains.hpp"
#include "subheat/rng.hpp"

#include <cmath>
#include <numbers>

using namespace subheat;

namespace {
const double kPi = std::numbers::pi;
const double kSqrtPi = std::sqrt(kPi);

DomainSpec disc() { return make_domain(model_by_name("euclid2"), "disc", {{"R", 1.0}}); }
DomainSpec interval() { return make_domain(model_by_name("euclid1"), "interval", {{"L", 1.0}}); }
DomainSpec ball() { return make_domain(model_by_name("euclid3"), "ball", {{"R", 1.0}}); }
DomainSpec slab() { return make_domain(model_by_name("heisenberg"), "heis_slab"); }
DomainSpec strip() { return make_domain(model_by_name("grushin"), "grushin_strip"); }
}

TEST_CASE("perimeters") {
    CHECK(boundary_integral(disc(), [](const Point&) { return 1.0; }) ==
          doctest::Approx(2 * kPi).epsilon(1e-10));
    CHECK(boundary_integral(interval(), [](const Point&) { return 1.0; }) ==
          doctest::Approx(2.0));
    // slab patch {x=0, |y|<=1, |z|<=1} has sigma-area 4; both faces: 8
    DomainSpec s = slab();
    double both = boundary_integral(s, [](const Point&) { return 1.0; });
    CHECK(both == doctest::Approx(8.0).epsilon(1e-10));
    double face0 = 0.0;
    for (const BoundaryNode& n : boundary_nodes(s, 64))
        if (n.patch == 0) face0 += n.weight;
    CHECK(face0 == doctest::Approx(4.0).epsilon(1e-10));
    CHECK(boundary_integral(ball(), [](const Point&) { return 1.0; }) ==
          doctest::Approx(4 * kPi).epsilon(1e-9));
}

TEST_CASE("quadrature converges: halving the order changes little") {
    DomainSpec d = disc();
    auto f = [](const Point& x) { return std::exp(x[0]) * (1.0 + 0.5 * x[1]); };
    double i64 = boundary_integral(d, f, 64);
    double i32 = boundary_integral(d, f, 32);
    CHECK(std::abs(i64 - i32) < 1e-8);
    CHECK(i64 > 0.0);
}

TEST_CASE("delta vanishes on the boundary and is eikonal in the band") {
    RngStream rng(17, 0);
    for (auto make : {disc, interval, ball, slab, strip}) {
        DomainSpec d = make();
        const ModelSpace& m = *d.model;
        for (const BoundaryNode& n : boundary_nodes(d, 16))
            CHECK(std::abs(d.delta.value(n.x)) < 1e-10);
        // random band points via offsets of boundary nodes
        auto nodes = boundary_nodes(d, 8);
        for (int rep = 0; rep < 1000; ++rep) {
            const double s = (2.0 * rng.next_uniform() - 1.0) * 0.9 * d.rho0;
            const BoundaryPatch& p = d.patches[rep % d.patches.size()];
            const double u0 = p.prange[0].first +
                              rng.next_uniform() * (p.prange[0].second - p.prange[0].first);
            const double v0 = p.prange[1].first +
                              rng.next_uniform() * (p.prange[1].second - p.prange[1].first);
            Point x = p.map(u0, p.pdim == 2 ? v0 : 0.0, s);
            TangentVector g = horizontal_gradient(m, d.delta, x);
            CHECK(g.norm() == doctest::Approx(1.0).epsilon(1e-8));
            CHECK(d.delta.value(x) == doctest::Approx(s).epsilon(1e-9));
        }
    }
}

TEST_CASE("signed distance flow: delta(G(t,y)) = t") {
    for (auto make : {disc, ball, slab}) {
        DomainSpec d = make();
        const ModelSpace& m = *d.model;
        const double t = 0.5 * d.rho0 * 0.5;
        for (const BoundaryNode& n : boundary_nodes(d, 8)) {
            // integrate x' = grad delta (coordinate components) by RK4
            Point x = n.x;
            const int steps = 64;
            const double h = t / steps;
            auto vel = [&](const Point& q) {
                return horizontal_gradient(m, d.delta, q).components;
            };
            for (int k = 0; k < steps; ++k) {
                Point k1 = vel(x), x2 = x;
                for (int i = 0; i < m.n; ++i) x2[i] += 0.5 * h * k1[i];
                Point k2 = vel(x2), x3 = x;
                for (int i = 0; i < m.n; ++i) x3[i] += 0.5 * h * k2[i];
                Point k3 = vel(x3), x4 = x;
                for (int i = 0; i < m.n; ++i) x4[i] += h * k3[i];
                Point k4 = vel(x4);
                for (int i = 0; i < m.n; ++i)
                    x[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
            }
            CHECK(d.delta.value(x) == doctest::Approx(t).epsilon(1e-6));
        }
    }
}

TEST_CASE("operator N on built-ins") {
    DomainSpec d = disc();
    const ModelSpace& e2 = *d.model;
    Point b{1.0, 0.0, 0, 0};
    // N(1) = Delta delta = -1 at r=1
    CHECK(operator_N(e2, d, field_constant(2, 1.0), b) == doctest::Approx(-1.0).epsilon(1e-12));
    // N(z1) at (1,0) = 2 g(grad z1, grad delta) + z1 Delta delta = -2 - 1 = -3
    CHECK(operator_N(e2, d, field_coordinate(2, 0), b) == doctest::Approx(-3.0).epsilon(1e-12));

    DomainSpec s = slab();
    CHECK(operator_N(*s.model, s, field_constant(3, 1.0), Point{0.0, 0.3, -0.2, 0}) ==
          doctest::Approx(0.0).epsilon(1e-14));
    CHECK_THROWS_AS(operator_N(e2, d, field_constant(2, 1.0), Point{0.2, 0.0, 0, 0}),
                    std::domain_error);
}

TEST_CASE("characteristic detection") {
    CHECK(detect_characteristic(slab()).clean());
    CHECK(detect_characteristic(slab()).min_ratio == doctest::Approx(1.0));
    CHECK(detect_characteristic(disc()).min_ratio == doctest::Approx(1.0));
    DomainSpec hb = make_domain(model_by_name("heisenberg"), "heis_ball", {{"R", 1.0}});
    CharacteristicReport rep = detect_characteristic(hb);
    CHECK_FALSE(rep.clean());
    bool pole = false;
    for (const Point& x : rep.offending)
        if (std::abs(x[0]) < 1e-9 && std::abs(x[1]) < 1e-9 && std::abs(std::abs(x[2]) - 1.0) < 1e-9)
            pole = true;
    CHECK(pole);
}

TEST_CASE("predicted coefficients, chi == 1") {
    auto c = predict_coefficients(disc());
    CHECK(c[0] == doctest::Approx(kPi));
    CHECK(c[1] == doctest::Approx(-2 * kSqrtPi).epsilon(1e-10));
    CHECK(std::abs(c[2]) < 1e-12);
    CHECK(c[3] == doctest::Approx(kSqrtPi / 2).epsilon(1e-10));
    CHECK(std::abs(c[4]) < 1e-12);

    auto ci = predict_coefficients(interval());
    CHECK(ci[0] == doctest::Approx(1.0));
    CHECK(ci[1] == doctest::Approx(-2.0 / kSqrtPi).epsilon(1e-12));
    CHECK(std::abs(ci[2]) < 1e-12);
    CHECK(std::abs(ci[3]) < 1e-12);
    CHECK(std::abs(ci[4]) < 1e-12);

    // Heisenberg slab: flat patches, Delta delta = 0, all curvature terms vanish
    DomainSpec s = slab();
    ScalarField lap_delta = laplacian_field(*s.model, s.delta);
    ScalarField n2 = n_operator_field(s, n_operator_field(s, field_constant(3, 1.0)));
    for (const BoundaryNode& n : boundary_nodes(s, 8)) {
        CHECK(std::abs(lap_delta.value(n.x)) < 1e-13);
        CHECK(std::abs(n2.value(n.x)) < 1e-13);
    }

    CHECK_THROWS(predict_coefficients(make_domain(model_by_name("heisenberg"), "heis_ball")));
}

TEST_CASE("cross-formula: c3 equals the Euclidean curvature coefficient") {
    auto cd = predict_coefficients(disc());
    double ed = euclidean_curvature_coefficient(disc());
    CHECK(ed == doctest::Approx(kSqrtPi / 2).epsilon(1e-8));
    CHECK(std::abs(cd[3] - ed) / std::abs(ed) < 1e-6);

    auto cb = predict_coefficients(ball());
    double eb = euclidean_curvature_coefficient(ball());
    CHECK(eb == doctest::Approx(8.0 / 3.0 * kSqrtPi).epsilon(1e-7));
    CHECK(std::abs(cb[3] - eb) / std::abs(eb) < 1e-6);

    DomainSpec big = make_domain(model_by_name("euclid3"), "ball", {{"R", 2.0}});
    auto cs = predict_coefficients(big);
    double es = euclidean_curvature_coefficient(big);
    CHECK(std::abs(cs[3] - es) / std::abs(es) < 1e-6);

    CHECK(euclidean_curvature_coefficient(interval()) == 0.0);
    CHECK_THROWS(euclidean_curvature_coefficient(slab()));
}

TEST_CASE("weighted coefficients on the slab: flat boundary reduces c3") {
    DomainSpec s = slab();
    WeightSpec w = make_weight(s, "distance_slope");
    CHECK(weight_support_violation(s, w) < 1e-12);
    auto c = predict_coefficients(s, w);
    // c1 = -(1/sqrt(pi)) int chi dsigma over the x=0 patch
    double c1_direct = -(1.0 / kSqrtPi) *
                       boundary_integral(s, [&](const Point& x) { return w.chi.value(x); });
    CHECK(c[1] == doctest::Approx(c1_direct).epsilon(1e-12));
    CHECK(c[1] < -1e-3);
    // c2 = -(1/2) int g(grad chi, grad delta): nonzero for the slope profile
    CHECK(std::abs(c[2]) > 1e-4);
    // Delta delta = 0 on the patch, so the (N chi)(Delta delta) part of c3 vanishes;
    // check c3 equals the -(1/(12 sqrt pi)) int (4 Delta + N^2) chi term alone
    const ModelSpace& m = *s.model;
    ScalarField lap_chi = laplacian_field(m, w.chi);
    ScalarField n2_chi = n_operator_field(s, n_operator_field(s, w.chi));
    double c3_direct = -(1.0 / (12.0 * kSqrtPi)) *
                       boundary_integral(s, [&](const Point& x) {
                           return 4.0 * lap_chi.value(x) + n2_chi.value(x);
                       });
    CHECK(c[3] == doctest::Approx(c3_direct).epsilon(1e-10));
}

TEST_CASE("coeff_a examples on the disc") {
    DomainSpec d = disc();
    // phi == 1 near boundary -> a1 = a2 = 0
    WeightSpec plateau = make_weight(d, "boundary_plateau");
    CHECK(std::abs(coeff_a(d, plateau.chi, 1)) < 1e-12);
    CHECK(std::abs(coeff_a(d, plateau.chi, 2)) < 1e-10);
    // phi = z1 * bump: odd in theta -> 0
    WeightSpec zb = make_weight(d, "coord_bump", {{"j", 0}});
    CHECK(std::abs(coeff_a(d, zb.chi, 1)) < 1e-12);
    // phi = delta * bump: a1 = int g(grad delta, grad delta) = perimeter
    WeightSpec db = make_weight(d, "delta_bump");
    CHECK(coeff_a(d, db.chi, 1) == doctest::Approx(2 * kPi).epsilon(1e-10));
    CHECK_THROWS(coeff_a(d, db.chi, 3));
}

TEST_CASE("mean value residual") {
    DomainSpec d = disc();
    CHECK(mean_value_residual(d, field_constant(2, 1.0), 0.1) < 1e-5);
    DomainSpec i = interval();
    CHECK(mean_value_residual(i, field_constant(1, 1.0), 0.15) < 1e-8);
    // Heisenberg slab with v = bump(y) bump(z), x-independent, supported in the window
    DomainSpec s = slab();
    auto bump1 = [](int axis) -> ScalarField {
        ScalarField coord = field_coordinate(3, axis);
        auto ce = coord.eval;
        return {"bump", [ce](const Point& x, int order) {
                    Jet t = ce(x, order);
                    Jet a = t.value() >= 0.0 ? t : (-1.0) * t;
                    Jet u = (1.0 / 0.7) * (jet_constant(3, order, x, 0.8) - a);
                    return 0.5 * (jet_compose_univariate(UnivariateFn::Erf,
                                                         8.0 * (u - 0.5)) +
                                  1.0);
                }};
    };
    ScalarField byz = field_product(bump1(1), bump1(2));
    CHECK(mean_value_residual(s, byz, 0.05) < 1e-4);
    CHECK_THROWS(mean_value_residual(d, field_constant(2, 1.0), d.rho0));
}

TEST_CASE("sector weight stays supported and integrates over a sub-arc") {
    DomainSpec d = disc();
    WeightSpec w = make_weight(d, "sector", {{"theta0", 0.0}, {"width_in", 0.4}, {"width_out", 0.8}});
    double arc = boundary_integral(d, [&](const Point& x) { return w.chi.value(x); });
    CHECK(arc > 2 * 0.4 * 0.9);
    CHECK(arc < 2 * 0.8 * 1.1);
    CHECK(std::abs(w.chi.value(Point{-1.0, 0.0, 0, 0})) == 0.0);
}
