#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "subheat/gauss.hpp"
#include "subheat/models.hpp"
#include "subheat/rng.hpp"

#include <cmath>

using namespace subheat;

namespace {
Point pt(double a = 0, double b = 0, double c = 0, double d = 0) { return {a, b, c, d}; }
}

TEST_CASE("horizontal gradient on built-ins") {
    const ModelSpace& e2 = model_by_name("euclid2");
    TangentVector g = horizontal_gradient(e2, field_coordinate(2, 0), pt(0.4, -1.0));
    CHECK(g.horiz[0] == doctest::Approx(1.0));
    CHECK(g.horiz[1] == doctest::Approx(0.0));
    CHECK(g.norm() == doctest::Approx(1.0));

    const ModelSpace& h = model_by_name("heisenberg");
    TangentVector gh = horizontal_gradient(h, field_coordinate(3, 0), pt(0, 0, 0));
    CHECK(gh.horiz[0] == doctest::Approx(1.0));
    CHECK(gh.horiz[1] == doctest::Approx(0.0));
    CHECK(gh.components[0] == doctest::Approx(1.0));
    CHECK(gh.components[1] == doctest::Approx(0.0));
    CHECK(gh.components[2] == doctest::Approx(0.0));
    CHECK(gh.norm() == doctest::Approx(1.0));

    const ModelSpace& gr = model_by_name("grushin");
    TangentVector gg = horizontal_gradient(gr, field_coordinate(2, 1), pt(2.0, 0.3));
    CHECK(gg.horiz[0] == doctest::Approx(0.0));
    CHECK(gg.horiz[1] == doctest::Approx(2.0));
    CHECK(gg.norm() == doctest::Approx(2.0));
}

TEST_CASE("sublaplacian on built-ins") {
    const ModelSpace& e2 = model_by_name("euclid2");
    Polynomial r2;
    r2.n = 2;
    r2.add_term(1.0, {2, 0});
    r2.add_term(1.0, {0, 2});
    CHECK(sublaplacian(e2, field_poly(r2), pt(0.7, 0.1)) == doctest::Approx(4.0));

    const ModelSpace& h = model_by_name("heisenberg");
    CHECK(sublaplacian(h, field_coordinate(3, 0), pt(0.2, -0.4, 1.0)) ==
          doctest::Approx(0.0).epsilon(1e-14));

    // delta = R - |z| on the disc: Laplacian is -1/r
    ScalarField rad = field_compose(UnivariateFn::Sqrt, field_poly(r2));
    ScalarField del = field_sum(field_constant(2, 1.0), field_scale(-1.0, rad));
    CHECK(sublaplacian(e2, del, pt(0.5, 0.0)) == doctest::Approx(-2.0));
}

TEST_CASE("sublaplacian order cap") {
    const ModelSpace& e1 = model_by_name("euclid1");
    CHECK_THROWS(sublaplacian(e1, field_coordinate(1, 0), pt(0.0), 3));
}

TEST_CASE("dilations") {
    const ModelSpace& h = model_by_name("heisenberg");
    Point d = dilate(h, 2.0, pt(1, 1, 1));
    CHECK(d[0] == doctest::Approx(2.0));
    CHECK(d[1] == doctest::Approx(2.0));
    CHECK(d[2] == doctest::Approx(4.0));
    Point id = dilate(h, 1.0, pt(0.3, -0.2, 0.9));
    CHECK(id[0] == doctest::Approx(0.3));
    CHECK(id[2] == doctest::Approx(0.9));
    Point neg = dilate(h, -1.0, pt(1, 0, 0.5));
    CHECK(neg[0] == doctest::Approx(-1.0));
    CHECK(neg[2] == doctest::Approx(0.5)); // weight-2 coordinate keeps its sign

    const ModelSpace& gr = model_by_name("grushin");
    CHECK_THROWS(dilate(gr, 2.0, pt(1, 1)));
}

TEST_CASE("Leibniz identity for the sub-Laplacian on random polynomials") {
    RngStream rng(5, 0);
    for (const char* name : {"euclid2", "heisenberg"}) {
        const ModelSpace& m = model_by_name(name);
        for (int rep = 0; rep < 8; ++rep) {
            Polynomial f, g;
            f.n = g.n = m.n;
            for (int t = 0; t < 3; ++t) {
                f.add_term(rng.next_normal(), {int(rng.next_u64() % 3), int(rng.next_u64() % 2),
                                               int(rng.next_u64() % 2)});
                g.add_term(rng.next_normal(), {int(rng.next_u64() % 2), int(rng.next_u64() % 3),
                                               int(rng.next_u64() % 2)});
            }
            Point x = pt(rng.next_normal(), rng.next_normal(), rng.next_normal());
            ScalarField ff = field_poly(f), gf = field_poly(g);
            double lhs = sublaplacian(m, field_product(ff, gf), x);
            double sum_grad = 0.0;
            TangentVector gfv = horizontal_gradient(m, ff, x);
            TangentVector ggv = horizontal_gradient(m, gf, x);
            for (std::size_t i = 0; i < gfv.horiz.size(); ++i) sum_grad += gfv.horiz[i] * ggv.horiz[i];
            double rhs = f.eval(x) * sublaplacian(m, gf, x) + g.eval(x) * sublaplacian(m, ff, x) +
                         2.0 * sum_grad;
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
        }
    }
}

TEST_CASE("divergence theorem: Delta symmetric against compact bumps") {
    // int f Delta g domega = int g Delta f domega for compactly supported f, g
    for (const char* name : {"euclid2", "heisenberg"}) {
        const ModelSpace& m = model_by_name(name);
        const double a = 1.0; // bump box half-width
        // f = B * p, g = B * q with B = prod (1 - (x_i/a)^2)^4 vanishing on the box edge
        Polynomial B = Polynomial::constant(m.n, 1.0);
        for (int i = 0; i < m.n; ++i) {
            Polynomial bi;
            bi.n = m.n;
            bi.add_term(1.0, {0, 0, 0});
            MultiIndex e{0, 0, 0, 0};
            e[i] = 2;
            bi.terms.push_back({-1.0 / (a * a), e});
            Polynomial b4 = bi * bi;
            b4 = b4 * b4;
            B = B * b4;
        }
        Polynomial p, q;
        p.n = q.n = m.n;
        p.add_term(1.0, {1, 0, 0});
        p.add_term(0.3, {0, 2, 0});
        q.add_term(1.0, {0, 1, 0});
        q.add_term(-0.5, {1, 1, 0});
        ScalarField f = field_poly(B * p), g = field_poly(B * q);
        ScalarField lap_f = laplacian_field(m, f), lap_g = laplacian_field(m, g);

        const GaussRule& gl = gauss_legendre(24);
        double ifg = 0.0, igf = 0.0;
        auto node = [&](int k) { return a * gl.node[k]; };
        for (std::size_t i = 0; i < gl.node.size(); ++i)
            for (std::size_t j = 0; j < gl.node.size(); ++j) {
                if (m.n == 2) {
                    Point x = pt(node(i), node(j));
                    const double w = gl.weight[i] * gl.weight[j] * a * a;
                    ifg += w * f.value(x) * lap_g.value(x);
                    igf += w * g.value(x) * lap_f.value(x);
                } else {
                    for (std::size_t k = 0; k < gl.node.size(); ++k) {
                        Point x = pt(node(i), node(j), node(k));
                        const double w = gl.weight[i] * gl.weight[j] * gl.weight[k] * a * a * a;
                        ifg += w * f.value(x) * lap_g.value(x);
                        igf += w * g.value(x) * lap_f.value(x);
                    }
                }
            }
        CHECK(ifg == doctest::Approx(igf).epsilon(5e-6));
    }
}

TEST_CASE("Carnot homogeneity of the horizontal gradient norm") {
    const ModelSpace& h = model_by_name("heisenberg");
    RngStream rng(3, 0);
    for (int rep = 0; rep < 10; ++rep) {
        const double eps = 0.5 + 1.5 * rng.next_uniform();
        Point z = pt(rng.next_normal(), rng.next_normal(), rng.next_normal());
        // f linear in x: f = x; f compose dilation = eps * x
        ScalarField f = field_coordinate(3, 0);
        ScalarField f_eps = field_scale(eps, field_coordinate(3, 0));
        double lhs = horizontal_gradient(h, f_eps, z).norm();
        double rhs = eps * horizontal_gradient(h, f, dilate(h, eps, z)).norm();
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("frame homogeneity of Carnot built-ins at random points") {
    // weight-w_j component of a weight-1 field scales as eps^(w_j - 1)
    const ModelSpace& h = model_by_name("heisenberg");
    RngStream rng(9, 0);
    for (int rep = 0; rep < 10; ++rep) {
        const double eps = 0.5 + 1.5 * rng.next_uniform();
        Point z = pt(rng.next_normal(), rng.next_normal(), rng.next_normal());
        Point dz = dilate(h, eps, z);
        for (const VecField& X : h.frame) {
            Point at_z = X.eval(z), at_dz = X.eval(dz);
            for (int j = 0; j < 3; ++j) {
                double scale = std::pow(eps, h.weights[j] - 1);
                CHECK(at_dz[j] == doctest::Approx(scale * at_z[j]).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("minimal-norm tangent representation") {
    const ModelSpace& gr = model_by_name("grushin");
    // v = (0, 2) at x = 2: u = (0, 1), norm^2 = 1 (Y = x d_y has length |x| there)
    TangentVector t = tangent_from_components(gr, pt(2.0, 0.0), pt(0.0, 2.0));
    CHECK(t.horiz[0] == doctest::Approx(0.0));
    CHECK(t.horiz[1] == doctest::Approx(1.0));
    CHECK(t.norm_sq == doctest::Approx(1.0));
    CHECK_THROWS(tangent_from_components(gr, pt(0.0, 0.0), pt(0.0, 1.0)));
}
