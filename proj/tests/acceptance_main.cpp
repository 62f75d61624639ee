// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// sub-check fails. Budgets sized for a single desk-scale run.

#include "subheat/asymptotics.hpp"
#include "subheat/gauss.hpp"
#include "subheat/opalg.hpp"
#include "subheat/pdegrid.hpp"
#include "subheat/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

using namespace subheat;

namespace {

const double kPi = std::numbers::pi;
const double kSqrtPi = std::sqrt(kPi);

int g_failures = 0;

struct Criterion {
    int id;
    std::string title;
    bool pass = true;
    std::string detail;

    void check(bool ok, const std::string& what) {
        detail += "\n    " + std::string(ok ? "[ok]   " : "[FAIL] ") + what;
        if (!ok) pass = false;
    }
    void note(const std::string& what) { detail += "\n    [note] " + what; }
    ~Criterion() {
        std::printf("criterion %2d: %s %s%s\n", id, pass ? "PASS" : "FAIL", title.c_str(),
                    detail.c_str());
        std::fflush(stdout);
        if (!pass) ++g_failures;
    }
};

std::vector<double> ladder(double lo, double hi, int n) {
    std::vector<double> t(n);
    for (int i = 0; i < n; ++i) t[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
    return t;
}

std::string num(double v) {
    char b[48];
    std::snprintf(b, sizeof(b), "%.6g", v);
    return b;
}

HeatContentCurve exact_curve(const DomainSpec& dom, const std::vector<double>& ts) {
    HeatContentCurve c;
    c.kind = "H";
    c.backend = "kernel-exact";
    for (double t : ts) c.points.push_back({t, exact_relative_heat_content(dom, t), 0.0, 0});
    return c;
}

void criterion1() {
    Criterion c{1, "disc kernel-exact fit on the pinned 12-point ladder"};
    DomainSpec disc = make_domain(model_by_name("euclid2"), "disc", {{"R", 1.0}});
    auto ts = ladder(2.5e-4, 4e-3, 12);
    const auto t0 = std::chrono::steady_clock::now();
    HeatContentCurve curve = exact_curve(disc, ts);
    AsymptoticFit fit = fit_sqrt_t(curve, {0, 0.5, 1, 1.5, 2}, ts.front(), ts.back(), true, kPi);
    const double c1 = fit.coef_for(0.5), c2 = fit.coef_for(1.0);
    const double c3 = fit.coef_for(1.5), c4 = fit.coef_for(2.0);
    c.check(std::abs(c1 + 2 * kSqrtPi) / (2 * kSqrtPi) <= 1e-3,
            "c1 = " + num(c1) + " vs -2 sqrt(pi), rel " +
                num(std::abs(c1 + 2 * kSqrtPi) / (2 * kSqrtPi)) + " <= 1e-3");
    c.check(std::abs(c2) <= 1e-2, "|c2| = " + num(std::abs(c2)) + " <= 1e-2");
    c.check(std::abs(c3 - kSqrtPi / 2) / (kSqrtPi / 2) <= 1e-2,
            "c3 = " + num(c3) + " vs sqrt(pi)/2, rel " +
                num(std::abs(c3 - kSqrtPi / 2) / (kSqrtPi / 2)) + " <= 1e-2");
    c.check(std::abs(c4) <= 1e-2, "|c4| = " + num(std::abs(c4)) + " <= 1e-2");
    if (std::abs(c4) > 1e-2)
        c.note("the exact curve carries a genuine (3/16) sqrt(pi) t^{5/2} term; restricted to "
               "exponents <= 2 on this window it aliases onto t^2 at the 4e-2 level, so this "
               "bound is unattainable for the true curve (see the fitted tail slope " +
               num(fit.tail_slope) + ")");
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.check(secs < 60.0, "runtime " + num(secs) + " s < 60 s");
}

void criterion2() {
    Criterion c{2, "disc MC fit (1e6 paths, dt = t/400)"};
    const ModelSpace& e2 = model_by_name("euclid2");
    DomainSpec disc = make_domain(e2, "disc", {{"R", 1.0}});
    auto ts = ladder(2.5e-4, 4e-3, 12);
    SdeConfig cfg;
    cfg.n_paths = 1000000;
    cfg.steps_per_t = 400;
    cfg.seed = 20240817;
    HeatContentCurve curve = estimate_heat_content(e2, disc, ContentKind::H, std::nullopt, ts, cfg);
    AsymptoticFit fit = fit_sqrt_t(curve, {0, 0.5, 1, 1.5, 2}, ts.front(), ts.back(), true, kPi);
    const double z1 = (fit.coef_for(0.5) + 2 * kSqrtPi) / fit.se_for(0.5);
    const double z2 = fit.coef_for(1.0) / fit.se_for(1.0);
    c.check(std::abs(z1) <= 3.0, "c1 z-score vs -2 sqrt(pi): " + num(z1));
    c.check(std::abs(z2) <= 3.0, "c2 consistent with 0: z = " + num(z2));
}

void criterion3() {
    Criterion c{3, "cross-formula identity c3 == Euclidean curvature coefficient"};
    struct Case {
        const char* model;
        const char* domain;
        double R;
    } cases[] = {{"euclid2", "disc", 1.0}, {"euclid3", "ball", 1.0}, {"euclid3", "ball", 2.0}};
    for (const auto& cs : cases) {
        DomainSpec d = make_domain(model_by_name(cs.model), cs.domain, {{"R", cs.R}});
        const double c3 = predict_coefficients(d)[3];
        const double eu = euclidean_curvature_coefficient(d);
        c.check(std::abs(c3 - eu) / std::abs(eu) <= 1e-6,
                std::string(cs.domain) + " R=" + num(cs.R) + ": " + num(c3) + " vs " + num(eu) +
                    ", rel " + num(std::abs(c3 - eu) / std::abs(eu)));
    }
}

void criterion4() {
    Criterion c{4, "boundary limit u -> 1/2"};
    const ModelSpace& h = model_by_name("heisenberg");
    DomainSpec slab = make_domain(h, "heis_slab");
    SdeConfig cfg;
    cfg.n_paths = 100000;
    cfg.steps_per_t = 200;
    cfg.seed = 5;
    for (Point bp : {Point{0.0, 0.3, -0.1, 0}, Point{0.0, -0.5, 0.4, 0}}) {
        Estimate u = estimate_u(h, slab, 1e-3, bp, cfg);
        c.check(std::abs(u.value - 0.5) <= 0.02,
                "heis slab boundary (" + num(bp[1]) + "," + num(bp[2]) + "): u = " + num(u.value));
    }
    const double flat = halfspace_temperature_exact(1e-3, 0.0);
    c.check(flat == 0.5, "euclid half-space kernel-exact u = " + num(flat) + " (exact 0.5)");
    DomainSpec seg = make_domain(model_by_name("euclid1"), "interval", {{"L", 1.0}});
    const double useg = exact_u(seg, 1e-3, Point{0.0, 0, 0, 0});
    c.check(std::abs(useg - 0.5) < 1e-15, "interval endpoint kernel-exact u = " + num(useg));
}

void criterion5() {
    Criterion c{5, "conservation H + K = omega(Omega)"};
    const ModelSpace& e2 = model_by_name("euclid2");
    DomainSpec disc = make_domain(e2, "disc", {{"R", 1.0}});
    auto ts = ladder(5e-4, 4e-3, 4);
    SdeConfig cfg;
    cfg.n_paths = 50000;
    cfg.seed = 77;
    HeatContentCurve H = estimate_heat_content(e2, disc, ContentKind::H, std::nullopt, ts, cfg);
    HeatContentCurve K = estimate_heat_content(e2, disc, ContentKind::K, std::nullopt, ts, cfg);
    double worst = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k)
        worst = std::max(worst, std::abs(H.points[k].value + K.points[k].value - kPi));
    c.check(worst < 1e-12, "MC batch identity |H + K - pi| = " + num(worst));

    DomainSpec seg = make_domain(model_by_name("euclid1"), "interval", {{"L", 1.0}});
    GridSpec g1;
    g1.lo[0] = 0;
    g1.hi[0] = 1;
    g1.res[0] = 2000;
    g1.padding = 0.5;
    GridSolution sol1;
    solve_heat(model_by_name("euclid1"), seg, g1, {4e-3}, std::nullopt, &sol1);
    c.check(grid_mass_leakage(sol1) < 1e-6,
            "interval grid leakage " + num(grid_mass_leakage(sol1)));
    GridSpec g2;
    g2.lo[0] = g2.lo[1] = -1;
    g2.hi[0] = g2.hi[1] = 1;
    g2.res[0] = g2.res[1] = 300;
    g2.padding = 0.45;
    g2.substeps = 48;
    GridSolution sol2;
    solve_heat(e2, disc, g2, {4e-3}, std::nullopt, &sol2);
    c.check(grid_mass_leakage(sol2) < 1e-6, "disc grid leakage " + num(grid_mass_leakage(sol2)));
}

void criterion6() {
    Criterion c{6, "Heisenberg weighted content (slab patch, smooth chi)"};
    const ModelSpace& h = model_by_name("heisenberg");
    DomainSpec slab = make_domain(h, "heis_slab");
    WeightSpec w = make_weight(slab, "distance_slope");
    const auto pred = predict_coefficients(slab, w);
    auto ts = ladder(2.5e-4, 4e-3, 12);
    SdeConfig cfg;
    cfg.n_paths = 1000000;
    cfg.steps_per_t = 400;
    cfg.seed = 424243;
    HeatContentCurve curve = estimate_heat_content(h, slab, ContentKind::Hchi, w, ts, cfg);
    AsymptoticFit fit =
        fit_sqrt_t(curve, {0, 0.5, 1, 1.5, 2}, ts.front(), ts.back(), true, pred[0]);
    const double z1 = (fit.coef_for(0.5) - pred[1]) / fit.se_for(0.5);
    const double z2 = (fit.coef_for(1.0) - pred[2]) / fit.se_for(1.0);
    const double z3 = (fit.coef_for(1.5) - pred[3]) / fit.se_for(1.5);
    c.check(std::abs(z1) <= 3.0,
            "c1 fitted " + num(fit.coef_for(0.5)) + " vs -(1/sqrt pi) int chi = " + num(pred[1]) +
                ", z = " + num(z1));
    c.check(std::abs(z2) <= 3.0,
            "c2 fitted " + num(fit.coef_for(1.0)) + " vs -(1/2) int g(grad chi, grad delta) = " +
                num(pred[2]) + ", z = " + num(z2));
    c.check(std::abs(z3) <= 4.0, "c3 (flat boundary: pure (4 Lap + N^2) chi term) fitted " +
                                     num(fit.coef_for(1.5)) + " vs " + num(pred[3]) +
                                     ", z = " + num(z3));
}

void criterion7() {
    Criterion c{7, "G_u slope law on the disc (kernel-exact)"};
    DomainSpec disc = make_domain(model_by_name("euclid2"), "disc", {{"R", 1.0}});
    WeightSpec w = make_weight(disc, "boundary_plateau");
    UEval u = exact_u_backend(disc);
    auto ts = ladder(2.5e-4, 4e-3, 12);
    HeatContentCurve gu;
    gu.kind = "G";
    gu.backend = "kernel-exact";
    for (double t : ts)
        gu.points.push_back({t, g_functional(disc, u, 0.0, 1.0, w.chi, t).value, 0.0, 0});
    AsymptoticFit fit = fit_sqrt_t(gu, {0.5, 1.0, 1.5}, ts.front(), ts.back());
    const double a = fit.coef_for(0.5), b = fit.coef_for(1.0);
    c.check(std::abs(a - kSqrtPi) / kSqrtPi <= 1e-2,
            "sqrt(t) coefficient " + num(a) + " vs sqrt(pi), rel " +
                num(std::abs(a - kSqrtPi) / kSqrtPi));
    c.check(std::abs(b + kPi / 4) / (kPi / 4) <= 1e-2,
            "t coefficient " + num(b) + " vs -pi/4, rel " + num(std::abs(b + kPi / 4) / (kPi / 4)));
}

void criterion8() {
    Criterion c{8, "Duhamel residuals (first order + inside/outside)"};
    DomainSpec seg = make_domain(model_by_name("euclid1"), "interval", {{"L", 1.0}});
    WeightSpec wseg = make_weight(seg, "boundary_plateau");
    LadderReport lad = duhamel_residual_ladder(seg, wseg.chi, exact_u_backend(seg),
                                               ladder(1e-4, 1e-2, 8));
    c.check(lad.exponent >= 1.0, "exact 1d pipeline residual exponent " +
                                     (std::isinf(lad.exponent) ? std::string("inf (below floor)")
                                                               : num(lad.exponent)) +
                                     " >= 1.0");

    DomainSpec disc = make_domain(model_by_name("euclid2"), "disc", {{"R", 1.0}});
    UEval ud = exact_u_backend(disc);
    WeightSpec db = make_weight(disc, "delta_bump");
    InsideOutsideReport in_out =
        inside_outside_check(*disc.model, disc, db, ladder(4e-4, 3e-3, 6), ud);
    c.check(std::abs(in_out.a1 - 2 * kPi) < 1e-8,
            "nontrivial a1 = " + num(in_out.a1) + " (= 2 pi)");
    c.check(in_out.exponent >= 2.0, "inside/outside residual exponent " + num(in_out.exponent) +
                                        " >= 2.0");

    WeightSpec plateau = make_weight(disc, "boundary_plateau");
    SdeConfig cfg;
    cfg.n_paths = 100000;
    cfg.seed = 31;
    InsideOutsideReport flat = inside_outside_check(*disc.model, disc, plateau,
                                                    {5e-4, 1e-3, 2e-3}, ud, cfg);
    c.check(flat.within_noise, "|I phi - I^c phi| below 3 stderr for phi == 1 near the boundary");
}

// Independent route for the Heisenberg kernel: raw lambda-integral with its
// own panelization (the library evaluator works in scale-reduced variables, so
// this keeps the two sides of the homogeneity check numerically independent).
double heis_kernel_raw(double t, const Point& x, const Point& y) {
    const double z1 = y[0] - x[0], z2 = y[1] - x[1];
    const double z3 = y[2] - x[2] - 0.5 * (x[0] * y[1] - x[1] * y[0]);
    const double rho2 = z1 * z1 + z2 * z2;
    const double lmax = 40.0 / t;
    // resolve both the cos(lambda z3) oscillation and the exponential decay
    const double feature = 3.0 / std::max({std::abs(z3), t + 0.25 * rho2, 0.2 * t});
    const int panels = std::min(16000, static_cast<int>(std::ceil(lmax / feature)) + 8);
    auto f = [&](double lam) {
        const double lt = lam * t;
        double over_sinh, coth;
        if (lt < 1e-6) {
            over_sinh = (1.0 / t) * (1.0 - lt * lt / 6.0);
            coth = (1.0 + lt * lt / 3.0) / lt;
        } else {
            over_sinh = lam / std::sinh(lt);
            coth = std::cosh(lt) / std::sinh(lt);
        }
        return std::cos(lam * z3) * over_sinh * std::exp(-0.25 * lam * rho2 * coth);
    };
    // avoid the lam -> 0 removable limit by a tiny offset; the integrand there
    // is smooth and O(1/t)
    return integrate_panels(f, 1e-12, lmax, panels, 16) / (4.0 * kPi * kPi);
}

void criterion9() {
    Criterion c{9, "Heisenberg kernel homogeneity and mass"};
    const ModelSpace& h = model_by_name("heisenberg");
    RngStream rng(12345, 0);
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        const double t = 0.2 + 0.8 * rng.next_uniform();
        Point z{rng.next_normal(), rng.next_normal(), rng.next_normal(), 0};
        Point zp{rng.next_normal(), rng.next_normal(), rng.next_normal(), 0};
        const double eps = (rep % 2 == 0) ? 0.5 : 2.0;
        const double p = heat_kernel(h, t, z, zp);
        // rescaled evaluation through the independent raw-lambda quadrature
        const double ps = std::pow(eps, 4) *
                          heis_kernel_raw(eps * eps * t, dilate(h, eps, z), dilate(h, eps, zp));
        worst = std::max(worst, std::abs(ps - p) / p);
    }
    c.check(worst < 1e-6, "eps^4-rescaling residual " + num(worst) +
                              " < 1e-6 over 20 tuples (independent quadrature route)");
    const double mass = heisenberg_kernel_mass(0.3);
    c.check(std::abs(mass - 1.0) < 1e-4, "kernel mass " + num(mass) + " within 1e-4 of 1");
}

void criterion10() {
    Criterion c{10, "Appendix-A operator algebra"};
    auto [m10, m11] = seed_matrices();
    const bool seeds_ok = m10.at(0, 0) == OpPoly::term("D") &&
                          m10.at(0, 1) == OpPoly::term("DN") &&
                          m10.at(1, 0) == OpPoly::term("N", -1) &&
                          m10.at(1, 1) == OpPoly::term("NN", -1) + OpPoly::term("D") &&
                          m11.at(0, 1) == OpPoly::term("N", -1) && m11.at(0, 0).is_zero() &&
                          m11.at(1, 0).is_zero() && m11.at(1, 1).is_zero();
    c.check(seeds_ok, "seed matrices match the display");
    c.check((m11 * m11).is_zero(), "M11^2 = 0");

    auto rows = recursion(6);
    bool tri = true, wordlen = true;
    for (int k = 1; k <= 6; ++k) {
        tri = tri && static_cast<int>(rows[k - 1].size()) == k + 1;
        for (const auto& mat : rows[k - 1])
            for (const OpPoly& p : mat.e) wordlen = wordlen && p.max_word_length() <= 2 * k;
    }
    c.check(tri, "triangular support (0 <= j <= k) for k <= 6");
    c.check(wordlen, "word length <= 2k in every entry");

    auto ops = expansion_coefficient_operators();
    OpPoly target = Rational(6) * OpPoly::term("ND") - OpPoly::term("NNN") -
                    Rational(2) * OpPoly::term("DN");
    c.check(ops.at("6ND-N^3-2DN") == target,
            "assembled operator " + ops.at("6ND-N^3-2DN").pretty() + " matches 6ND - N^3 - 2DN");
}

void criterion11() {
    Criterion c{11, "localization and eikonal identity"};
    // deep interior stays hot at t = 1e-2 (delta >= 0.5 points)
    struct Probe {
        const char* model;
        const char* domain;
        Point x;
    } probes[] = {
        {"euclid1", "interval", {0.5, 0, 0, 0}},
        {"euclid2", "disc", {0.0, 0.0, 0, 0}},
        {"euclid3", "ball", {0.1, 0.0, 0.0, 0}},
        {"heisenberg", "heis_slab", {1.0, 0.2, -0.1, 0}},
        {"grushin", "grushin_strip", {0.5, 0.3, 0, 0}},
    };
    for (const auto& p : probes) {
        DomainSpec d = make_domain(model_by_name(p.model), p.domain, {});
        const double u = exact_u(d, 1e-2, p.x);
        c.check(1.0 - u <= 1e-3,
                std::string(p.domain) + " deep interior 1 - u = " + num(1.0 - u) + " <= 1e-3");
    }
    // eikonal |grad delta|_g = 1 at 1000 band points per domain
    RngStream rng(99, 0);
    for (const char* spec : {"interval", "disc", "ball", "heis_slab", "grushin_strip"}) {
        const char* model = spec == std::string("interval")   ? "euclid1"
                            : spec == std::string("disc")     ? "euclid2"
                            : spec == std::string("ball")     ? "euclid3"
                            : spec == std::string("heis_slab") ? "heisenberg"
                                                               : "grushin";
        DomainSpec d = make_domain(model_by_name(model), spec, {});
        double worst = 0.0;
        for (int k = 0; k < 1000; ++k) {
            const BoundaryPatch& patch = d.patches[k % d.patches.size()];
            const double s = (2.0 * rng.next_uniform() - 1.0) * 0.9 * d.rho0;
            const double u0 = patch.prange[0].first +
                              rng.next_uniform() * (patch.prange[0].second - patch.prange[0].first);
            const double v0 = patch.prange[1].first +
                              rng.next_uniform() * (patch.prange[1].second - patch.prange[1].first);
            Point x = patch.map(u0, patch.pdim == 2 ? v0 : 0.0, s);
            worst = std::max(worst,
                             std::abs(horizontal_gradient(*d.model, d.delta, x).norm() - 1.0));
        }
        c.check(worst < 1e-8, std::string(spec) + " eikonal deviation " + num(worst) + " < 1e-8");
    }
}

} // namespace

int main() {
    std::printf("%s acceptance suite\n", kVersion);
    const auto t0 = std::chrono::steady_clock::now();
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    criterion11();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("total runtime %.1f s; %d criterion(s) failed\n", secs, g_failures);
    return g_failures == 0 ? 0 : 1;
}
