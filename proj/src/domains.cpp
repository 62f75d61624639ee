#include "subheat/domains.hpp"

#include "subheat/gauss.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace subheat {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
const double kSqrtPi = std::sqrt(std::numbers::pi);

double get(const std::map<std::string, double>& p, const std::string& k, double dflt) {
    auto it = p.find(k);
    return it == p.end() ? dflt : it->second;
}

// Analytic C^inf step: 1/2 (1 + erf(sigma (u - 1/2))). Effectively 0 / 1 a
// short margin past the transition window (< 1e-12 at u = -0.15, u = 1.15),
// and gentle enough for Gauss-Legendre quadrature at default orders.
constexpr double kStepSigma = 8.0;
// fraction of the transition width past its end where the step is < 1e-12
constexpr double kSupportMargin = 0.2;

Jet step_up(const Jet& u) {
    Jet a = kStepSigma * (u - 0.5);
    return 0.5 * (jet_compose_univariate(UnivariateFn::Erf, a) + 1.0);
}

// S((hi - t)/(hi - lo)): ~1 for t <= lo, ~0 for t >= hi
Jet down_ramp(const Jet& t, double lo, double hi) {
    return step_up((1.0 / (hi - lo)) * (jet_constant(t.n, t.order, t.center, hi) - t));
}

// |t| as a branch on the sign of the value; the profiles are flat (derivatives
// below double precision) around t = 0, so the kink is invisible to the jets
Jet abs_branch(const Jet& t) { return t.value() >= 0.0 ? t : (-1.0) * t; }

ScalarField plateau_of(const ScalarField& s, double inner, double outer,
                       const std::string& name) {
    auto ev = s.eval;
    return {name, [ev, inner, outer](const Point& x, int order) {
                return down_ramp(abs_branch(ev(x, order)), inner, outer);
            }};
}

// T(t) = S((t-l0)/(l1-l0)) * S((u1-t)/(u1-u0)); plateau on [l1,u0], support (l0,u1)
ScalarField window_of(const ScalarField& s, double l0, double l1, double u0, double u1,
                      const std::string& name) {
    auto ev = s.eval;
    return {name, [ev, l0, l1, u0, u1](const Point& x, int order) {
                Jet t = ev(x, order);
                Jet up = step_up((1.0 / (l1 - l0)) * (t - l0));
                return up * down_ramp(t, u0, u1);
            }};
}

// -- built-in domains ---------------------------------------------------------

DomainSpec make_interval(const ModelSpace& m, const std::map<std::string, double>& p) {
    const double L = get(p, "L", 1.0);
    DomainSpec d;
    d.model = &m;
    d.name = "interval";
    d.params = {{"L", L}};
    Polynomial f; // x (L - x)
    f.n = 1;
    f.add_term(L, {1});
    f.add_term(-1.0, {2});
    d.F = field_poly(f, "interval_level");
    d.delta = {"interval_delta", [L](const Point& x, int order) {
                   if (x[0] < 0.5 * L) return jet_coordinate(1, order, x, 0);
                   return jet_constant(1, order, x, L) - jet_coordinate(1, order, x, 0);
               }};
    d.rho0 = 0.4 * L;
    d.volume = L;
    d.box_lo = {0, 0, 0, 0};
    d.box_hi = {L, 0, 0, 0};
    d.deep_point = {0.5 * L, 0, 0, 0};
    BoundaryPatch left{"x=0", 0, {}, [](double, double, double s) { return Point{s, 0, 0, 0}; },
                       [](double, double, double) { return 1.0; },
                       field_coordinate(1, 0)};
    BoundaryPatch right{"x=L", 0, {},
                        [L](double, double, double s) { return Point{L - s, 0, 0, 0}; },
                        [](double, double, double) { return 1.0; },
                        field_sum(field_constant(1, L), field_scale(-1.0, field_coordinate(1, 0)))};
    d.patches = {left, right};
    return d;
}

ScalarField radial_delta(int n, double R) {
    // R - |z|
    Polynomial r2;
    r2.n = n;
    for (int i = 0; i < n; ++i) {
        MultiIndex e{0, 0, 0, 0};
        e[i] = 2;
        r2.terms.push_back({1.0, e});
    }
    ScalarField rad = field_compose(UnivariateFn::Sqrt, field_poly(r2, "r2"));
    return {"radial_delta",
            [R, rad](const Point& x, int order) {
                return jet_constant(rad.eval(x, 0).n, order, x, R) - rad.eval(x, order);
            }};
}

Polynomial ball_level(int n, double R) {
    Polynomial f; // R^2 - |z|^2
    f.n = n;
    f.add_term(R * R, {0, 0, 0});
    for (int i = 0; i < n; ++i) {
        MultiIndex e{0, 0, 0, 0};
        e[i] = 2;
        f.terms.push_back({-1.0, e});
    }
    return f;
}

DomainSpec make_disc(const ModelSpace& m, const std::map<std::string, double>& p) {
    const double R = get(p, "R", 1.0);
    DomainSpec d;
    d.model = &m;
    d.name = "disc";
    d.params = {{"R", R}};
    d.F = field_poly(ball_level(2, R), "disc_level");
    d.delta = radial_delta(2, R);
    d.rho0 = 0.5 * R;
    d.volume = std::numbers::pi * R * R;
    d.box_lo = {-R, -R, 0, 0};
    d.box_hi = {R, R, 0, 0};
    d.deep_point = {0, 0, 0, 0};
    BoundaryPatch c;
    c.name = "circle";
    c.pdim = 1;
    c.prange[0] = {0.0, 2.0 * std::numbers::pi};
    c.map = [R](double u, double, double s) {
        return Point{(R - s) * std::cos(u), (R - s) * std::sin(u), 0, 0};
    };
    c.area_elem = [R](double, double, double s) { return R - s; };
    c.localF = d.F;
    d.patches = {c};
    return d;
}

DomainSpec make_ball(const ModelSpace& m, const std::map<std::string, double>& p) {
    const double R = get(p, "R", 1.0);
    DomainSpec d;
    d.model = &m;
    d.name = "ball";
    d.params = {{"R", R}};
    d.F = field_poly(ball_level(3, R), "ball_level");
    d.delta = radial_delta(3, R);
    d.rho0 = 0.5 * R;
    d.volume = 4.0 / 3.0 * std::numbers::pi * R * R * R;
    d.box_lo = {-R, -R, -R, 0};
    d.box_hi = {R, R, R, 0};
    d.deep_point = {0, 0, 0, 0};
    BoundaryPatch s;
    s.name = "sphere";
    s.pdim = 2;
    s.prange[0] = {0.0, std::numbers::pi};
    s.prange[1] = {0.0, 2.0 * std::numbers::pi};
    s.map = [R](double th, double ph, double off) {
        const double r = R - off;
        return Point{r * std::sin(th) * std::cos(ph), r * std::sin(th) * std::sin(ph),
                     r * std::cos(th), 0};
    };
    s.area_elem = [R](double th, double, double off) {
        const double r = R - off;
        return r * r * std::sin(th);
    };
    s.localF = d.F;
    d.patches = {s};
    return d;
}

DomainSpec make_heis_slab(const ModelSpace& m, const std::map<std::string, double>& p) {
    const double L = get(p, "L", 2.0);
    const double a = get(p, "a", 1.0);
    DomainSpec d;
    d.model = &m;
    d.name = "heis_slab";
    d.params = {{"L", L}, {"a", a}};
    Polynomial f; // x (L - x)
    f.n = 3;
    f.add_term(L, {1, 0, 0});
    f.add_term(-1.0, {2, 0, 0});
    d.F = field_poly(f, "slab_level");
    d.delta = {"slab_delta", [L](const Point& x, int order) {
                   if (x[0] < 0.5 * L) return jet_coordinate(3, order, x, 0);
                   return jet_constant(3, order, x, L) - jet_coordinate(3, order, x, 0);
               }};
    d.rho0 = 0.4 * L;
    d.volume = kNaN; // unbounded cross-section: weighted experiments only
    d.box_lo = {0, -a, -a, 0};
    d.box_hi = {L, a, a, 0};
    d.deep_point = {0.5 * L, 0, 0, 0};
    BoundaryPatch p0;
    p0.name = "x=0";
    p0.pdim = 2;
    p0.prange[0] = {-a, a};
    p0.prange[1] = {-a, a};
    p0.map = [](double u, double v, double s) { return Point{s, u, v, 0}; };
    p0.area_elem = [](double, double, double) { return 1.0; };
    p0.localF = field_coordinate(3, 0);
    BoundaryPatch pL = p0;
    pL.name = "x=L";
    pL.map = [L](double u, double v, double s) { return Point{L - s, u, v, 0}; };
    pL.localF = field_sum(field_constant(3, L), field_scale(-1.0, field_coordinate(3, 0)));
    d.patches = {p0, pL};
    return d;
}

DomainSpec make_grushin_strip(const ModelSpace& m, const std::map<std::string, double>& p) {
    const double x0 = get(p, "x0", 0.0);
    const double L = get(p, "L", 1.0);
    const double a = get(p, "a", 1.0);
    DomainSpec d;
    d.model = &m;
    d.name = "grushin_strip";
    d.params = {{"x0", x0}, {"L", L}, {"a", a}};
    Polynomial f; // (x - x0)(x0 + L - x)
    f.n = 2;
    f.add_term(-x0 * (x0 + L), {0, 0});
    f.add_term(2 * x0 + L, {1, 0});
    f.add_term(-1.0, {2, 0});
    d.F = field_poly(f, "strip_level");
    d.delta = {"strip_delta", [x0, L](const Point& x, int order) {
                   if (x[0] < x0 + 0.5 * L)
                       return jet_coordinate(2, order, x, 0) - x0;
                   return jet_constant(2, order, x, x0 + L) - jet_coordinate(2, order, x, 0);
               }};
    d.rho0 = 0.4 * L;
    d.volume = kNaN;
    d.box_lo = {x0, -a, 0, 0};
    d.box_hi = {x0 + L, a, 0, 0};
    d.deep_point = {x0 + 0.5 * L, 0, 0, 0};
    BoundaryPatch p0;
    p0.name = "x=x0";
    p0.pdim = 1;
    p0.prange[0] = {-a, a};
    p0.map = [x0](double u, double, double s) { return Point{x0 + s, u, 0, 0}; };
    p0.area_elem = [](double, double, double) { return 1.0; };
    p0.localF = field_sum(field_coordinate(2, 0), field_constant(2, -x0));
    BoundaryPatch p1 = p0;
    p1.name = "x=x0+L";
    p1.map = [x0, L](double u, double, double s) { return Point{x0 + L - s, u, 0, 0}; };
    p1.localF = field_sum(field_constant(2, x0 + L), field_scale(-1.0, field_coordinate(2, 0)));
    d.patches = {p0, p1};
    return d;
}

DomainSpec make_heis_ball(const ModelSpace& m, const std::map<std::string, double>& p) {
    const double R = get(p, "R", 1.0);
    DomainSpec d = make_ball(m, {{"R", R}});
    d.model = &m;
    d.name = "heis_ball";
    d.has_delta = false; // characteristic at the poles; detection only
    d.delta = {"unavailable", [](const Point&, int) -> Jet {
                   throw std::domain_error("heis_ball: no signed-distance jets (characteristic)");
               }};
    d.rho0 = 0.0;
    for (auto& patch : d.patches) patch.localF = d.F;
    return d;
}

} // namespace

bool DomainSpec::finite_volume() const { return std::isfinite(volume); }

DomainSpec make_domain(const ModelSpace& m, const std::string& name,
                       const std::map<std::string, double>& params) {
    if (name == "interval") {
        if (m.name != "euclid1") throw std::invalid_argument("interval lives in euclid1");
        return make_interval(m, params);
    }
    if (name == "disc") {
        if (m.name != "euclid2") throw std::invalid_argument("disc lives in euclid2");
        return make_disc(m, params);
    }
    if (name == "ball") {
        if (m.name != "euclid3") throw std::invalid_argument("ball lives in euclid3");
        return make_ball(m, params);
    }
    if (name == "heis_slab") {
        if (m.name != "heisenberg") throw std::invalid_argument("heis_slab lives in heisenberg");
        return make_heis_slab(m, params);
    }
    if (name == "grushin_strip") {
        if (m.name != "grushin") throw std::invalid_argument("grushin_strip lives in grushin");
        return make_grushin_strip(m, params);
    }
    if (name == "heis_ball") {
        if (m.name != "heisenberg") throw std::invalid_argument("heis_ball lives in heisenberg");
        return make_heis_ball(m, params);
    }
    throw std::invalid_argument("unknown domain: " + name);
}

std::vector<std::string> domain_names() {
    return {"interval", "disc", "ball", "heis_slab", "grushin_strip", "heis_ball"};
}

// -- quadrature ----------------------------------------------------------------

namespace {

double sigma_ratio(const DomainSpec& dom, const ScalarField& level, const Point& x) {
    const ModelSpace& m = *dom.model;
    Jet f = level.jet(x, 1);
    double hn = 0.0, en = 0.0;
    for (int i = 0; i < m.frame_size(); ++i) {
        const double u = m.frame[i].apply(f).value();
        hn += u * u;
    }
    for (int j = 0; j < m.n; ++j) {
        const double g = f.d(j);
        en += g * g;
    }
    if (en <= 0.0) throw std::domain_error("sigma density: vanishing Euclidean gradient");
    return std::sqrt(hn / en);
}

double node_weight(const DomainSpec& dom, const BoundaryPatch& patch, const Point& x,
                   double area, double s) {
    const ScalarField& level = (dom.has_delta && s != 0.0) ? dom.delta : patch.localF;
    const double ratio = sigma_ratio(dom, level, x);
    if (ratio < 1e-9)
        throw std::domain_error("boundary quadrature hit a characteristic node in patch " +
                                patch.name);
    double dens = dom.model->density_is_one ? 1.0 : dom.model->density.value(x);
    return area * ratio * dens;
}

} // namespace

std::vector<BoundaryNode> boundary_nodes(const DomainSpec& dom, int qorder, double s) {
    std::vector<BoundaryNode> nodes;
    const GaussRule& g = gauss_legendre(qorder);
    for (std::size_t pi = 0; pi < dom.patches.size(); ++pi) {
        const BoundaryPatch& p = dom.patches[pi];
        if (p.pdim == 0) {
            Point x = p.map(0, 0, s);
            nodes.push_back({x, node_weight(dom, p, x, p.area_elem(0, 0, s), s),
                             static_cast<int>(pi), 0, 0});
        } else if (p.pdim == 1) {
            const auto [a, b] = p.prange[0];
            const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
            for (int i = 0; i < qorder; ++i) {
                const double u = mid + half * g.node[i];
                Point x = p.map(u, 0, s);
                nodes.push_back({x,
                                 half * g.weight[i] *
                                     node_weight(dom, p, x, p.area_elem(u, 0, s), s),
                                 static_cast<int>(pi), u, 0});
            }
        } else {
            const auto [a, b] = p.prange[0];
            const auto [c, d] = p.prange[1];
            const double mu = 0.5 * (a + b), hu = 0.5 * (b - a);
            const double mv = 0.5 * (c + d), hv = 0.5 * (d - c);
            for (int i = 0; i < qorder; ++i)
                for (int j = 0; j < qorder; ++j) {
                    const double u = mu + hu * g.node[i];
                    const double v = mv + hv * g.node[j];
                    Point x = p.map(u, v, s);
                    nodes.push_back({x,
                                     hu * hv * g.weight[i] * g.weight[j] *
                                         node_weight(dom, p, x, p.area_elem(u, v, s), s),
                                     static_cast<int>(pi), u, v});
                }
        }
    }
    return nodes;
}

double boundary_integral(const DomainSpec& dom, const std::function<double(const Point&)>& f,
                         int qorder, double s) {
    double acc = 0.0;
    for (const BoundaryNode& n : boundary_nodes(dom, qorder, s)) acc += n.weight * f(n.x);
    return acc;
}

double band_volume_integral(const DomainSpec& dom, const std::function<double(const Point&)>& f,
                            double s_lo, double s_hi, int qorder, int s_nodes) {
    if (!dom.has_delta) throw std::domain_error("band integral needs signed-distance jets");
    const GaussRule& g = gauss_legendre(s_nodes);
    const double mid = 0.5 * (s_lo + s_hi), half = 0.5 * (s_hi - s_lo);
    double acc = 0.0;
    for (int k = 0; k < s_nodes; ++k) {
        const double s = mid + half * g.node[k];
        acc += half * g.weight[k] * boundary_integral(dom, f, qorder, s);
    }
    return acc;
}

double band_volume_integral_layered(const DomainSpec& dom,
                                    const std::function<double(const Point&)>& f, double s_lo,
                                    double s_hi, double layer, int qorder) {
    // geometric s-panels away from 0 resolve profiles that vary on the scale
    // `layer` near the boundary
    std::vector<double> cuts{s_lo};
    auto push = [&](double c) {
        if (c > cuts.back() + 1e-15 && c < s_hi - 1e-15) cuts.push_back(c);
    };
    if (s_lo < 0.0)
        for (double c : {-16.0, -8.0, -4.0, -2.0, -1.0}) push(c * layer);
    if (s_lo < 0.0 && s_hi > 0.0) push(0.0);
    for (double c : {1.0, 2.0, 4.0, 8.0, 16.0}) push(c * layer);
    cuts.push_back(s_hi);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        acc += band_volume_integral(dom, f, cuts[i], cuts[i + 1], qorder, 24);
    return acc;
}

// -- domain operators ----------------------------------------------------------

ScalarField n_operator_field(const DomainSpec& dom, const ScalarField& phi) {
    const ModelSpace* m = dom.model;
    ScalarField lap_delta = laplacian_field(*m, dom.delta);
    auto phie = phi.eval;
    auto dele = dom.delta.eval;
    auto lapde = lap_delta.eval;
    return {"N(" + phi.name + ")", [m, phie, dele, lapde](const Point& x, int order) {
                Jet p = phie(x, order + 1);
                Jet d = dele(x, order + 1);
                Jet acc(m->n, order, x);
                for (int i = 0; i < m->frame_size(); ++i)
                    acc = acc + 2.0 * (m->frame[i].apply(p) * m->frame[i].apply(d));
                return acc + p.truncated(order) * lapde(x, order);
            }};
}

double operator_N(const ModelSpace& m, const DomainSpec& dom, const ScalarField& phi,
                  const Point& x, int power) {
    if (&m != dom.model) throw std::invalid_argument("operator_N: model/domain mismatch");
    if (power < 1 || power > 3) throw std::invalid_argument("operator_N: power must be 1..3");
    if (!dom.has_delta || std::abs(dom.delta.value(x)) >= dom.rho0)
        throw std::domain_error("operator_N: point outside the tubular band");
    ScalarField f = phi;
    for (int k = 0; k < power; ++k) f = n_operator_field(dom, f);
    return f.value(x);
}

double grad_pair(const ModelSpace& m, const ScalarField& a, const ScalarField& b, const Point& x) {
    Jet ja = a.jet(x, 1), jb = b.jet(x, 1);
    double acc = 0.0;
    for (int i = 0; i < m.frame_size(); ++i)
        acc += m.frame[i].apply(ja).value() * m.frame[i].apply(jb).value();
    return acc;
}

// -- characteristic detection ----------------------------------------------------

CharacteristicReport detect_characteristic(const DomainSpec& dom, int qorder, double threshold) {
    CharacteristicReport rep;
    rep.min_ratio = std::numeric_limits<double>::infinity();
    auto probe = [&](const BoundaryPatch& p, double u, double v) {
        Point x = p.map(u, v, 0.0);
        double ratio;
        try {
            ratio = sigma_ratio(dom, p.localF, x);
        } catch (const std::domain_error&) {
            ratio = 0.0; // vanishing Euclidean gradient counts as degenerate too
        }
        rep.min_ratio = std::min(rep.min_ratio, ratio);
        if (ratio <= threshold) rep.offending.push_back(x);
    };
    const GaussRule& g = gauss_legendre(qorder);
    for (const BoundaryPatch& p : dom.patches) {
        if (p.pdim == 0) {
            probe(p, 0, 0);
        } else if (p.pdim == 1) {
            const auto [a, b] = p.prange[0];
            probe(p, a, 0);
            probe(p, b, 0);
            for (int i = 0; i < qorder; ++i)
                probe(p, 0.5 * (a + b) + 0.5 * (b - a) * g.node[i], 0);
        } else {
            const auto [a, b] = p.prange[0];
            const auto [c, d] = p.prange[1];
            // quadrature nodes plus the parameter-grid edge, so tangency on the
            // patch rim (e.g. sphere poles) is reported
            std::vector<double> us = {a, b}, vs = {c, d};
            for (int i = 0; i < qorder; ++i) {
                us.push_back(0.5 * (a + b) + 0.5 * (b - a) * g.node[i]);
                vs.push_back(0.5 * (c + d) + 0.5 * (d - c) * g.node[i]);
            }
            for (double u : us)
                for (double v : vs) probe(p, u, v);
        }
    }
    return rep;
}

// -- weights ---------------------------------------------------------------------

WeightSpec make_weight(const DomainSpec& dom, const std::string& kind,
                       const std::map<std::string, double>& params) {
    if (!dom.has_delta) throw std::domain_error("weights need signed-distance jets");
    const double r0 = dom.rho0;
    const double inner = get(params, "inner", 0.35 * r0);
    const double outer = get(params, "outer", 0.85 * r0);
    if (!(0.0 < inner && inner < outer && outer + kSupportMargin * (outer - inner) < r0))
        throw std::invalid_argument("weight: profile must fit in the tubular band");

    const bool slab_like =
        dom.name == "heis_slab" || dom.name == "grushin_strip" || dom.name == "interval";
    // slab-like domains localize to the x0 face: use the face coordinate, which
    // equals delta inside the near band and extends it past the boundary
    const double x0 = get(dom.params, "x0", 0.0);
    ScalarField base = slab_like
                           ? ScalarField{"face_dist",
                                         [x0, n = dom.model->n](const Point& x, int order) {
                                             return jet_coordinate(n, order, x, 0) - x0;
                                         }}
                           : dom.delta;

    WeightSpec w;
    w.name = kind;

    ScalarField profile;
    bool one_near = false;
    double band_lo = -(outer + kSupportMargin * (outer - inner));
    double band_hi = -band_lo;
    if (kind == "boundary_plateau") {
        profile = plateau_of(base, inner, outer, "plateau");
        one_near = true;
    } else if (kind == "distance_slope") {
        const double l0 = get(params, "l0", -0.55 * r0);
        const double l1 = get(params, "l1", 0.35 * r0);
        const double u0 = get(params, "u0", 0.45 * r0);
        const double u1 = get(params, "u1", 0.85 * r0);
        if (!(-r0 < l0 && l0 < 0.0 && 0.0 < l1 && l1 <= u0 && u0 < u1 && u1 < r0))
            throw std::invalid_argument("distance_slope: need l0 < 0 < l1 <= u0 < u1 < rho0");
        profile = window_of(base, l0, l1, u0, u1, "slope");
        band_lo = l0 - kSupportMargin * (l1 - l0);
        band_hi = u1 + kSupportMargin * (u1 - u0);
    } else if (kind == "delta_bump") {
        profile = field_product(base, plateau_of(base, inner, outer, "plateau"));
    } else if (kind == "coord_bump") {
        const int j = static_cast<int>(get(params, "j", 0));
        profile = field_product(field_coordinate(dom.model->n, j),
                                plateau_of(base, inner, outer, "plateau"));
    } else if (kind == "sector") {
        if (dom.name != "disc") throw std::invalid_argument("sector weight is disc-only");
        const double th0 = get(params, "theta0", 0.0);
        const double win = get(params, "width_in", 0.5);
        const double wout = get(params, "width_out", 1.0);
        // angular window through the direction cosine c = (x cos th0 + y sin th0)/r
        Polynomial proj;
        proj.n = 2;
        proj.add_term(std::cos(th0), {1, 0});
        proj.add_term(std::sin(th0), {0, 1});
        Polynomial r2;
        r2.n = 2;
        r2.add_term(1.0, {2, 0});
        r2.add_term(1.0, {0, 2});
        ScalarField cosf = field_product(
            field_poly(proj, "proj"),
            field_compose(UnivariateFn::Power, field_poly(r2, "r2"), -0.5));
        const double ci = std::cos(win), co = std::cos(wout);
        auto ce = cosf.eval;
        ScalarField angular = {"angular", [ce, ci, co](const Point& x, int order) {
                                   return step_up((1.0 / (ci - co)) * (ce(x, order) - co));
                               }};
        profile = field_product(plateau_of(base, inner, outer, "plateau"), angular);
    } else {
        throw std::invalid_argument("unknown weight kind: " + kind);
    }

    if (slab_like) {
        w.support_lo[0] = x0 + band_lo;
        w.support_hi[0] = x0 + band_hi;
        if (dom.name != "interval") {
            const double a = dom.params.at("a");
            const double win = get(params, "win", 0.45 * a);
            const double wout = get(params, "wout", 0.88 * a);
            const double tmargin = kSupportMargin * (wout - win);
            if (wout + tmargin > a)
                throw std::invalid_argument("weight: tangential window exceeds the patch");
            profile = field_product(
                profile, plateau_of(field_coordinate(dom.model->n, 1), win, wout, "wy"));
            if (dom.model->n >= 3)
                profile = field_product(
                    profile, plateau_of(field_coordinate(dom.model->n, 2), win, wout, "wz"));
            for (int i = 1; i < dom.model->n; ++i) {
                w.support_lo[i] = -(wout + tmargin);
                w.support_hi[i] = wout + tmargin;
            }
        }
    } else {
        // radial domains: the band {band_lo < delta < band_hi} sits inside this box
        const double R = dom.params.at("R");
        for (int i = 0; i < dom.model->n; ++i) {
            w.support_lo[i] = -(R - band_lo);
            w.support_hi[i] = R - band_lo;
        }
    }

    w.chi = profile;
    w.one_near_boundary = one_near;
    return w;
}

double weight_support_violation(const DomainSpec& dom, const WeightSpec& w) {
    // probe a shell around the support box
    double worst = 0.0;
    const int n = dom.model->n;
    const int grid = 7;
    for (int side = 0; side < 2 * n; ++side) {
        const int axis = side / 2;
        const bool hi = side % 2;
        Point x{};
        for (int g0 = 0; g0 < grid; ++g0)
            for (int g1 = 0; g1 < grid; ++g1) {
                int q = 0;
                for (int i = 0; i < n; ++i) {
                    if (i == axis) {
                        x[i] = hi ? w.support_hi[i] + 1e-3 : w.support_lo[i] - 1e-3;
                    } else {
                        const double f = (q == 0 ? g0 : g1) / double(grid - 1);
                        x[i] = w.support_lo[i] + f * (w.support_hi[i] - w.support_lo[i]);
                        ++q;
                    }
                }
                worst = std::max(worst, std::abs(w.chi.value(x)));
            }
    }
    return worst;
}

// -- predictions -------------------------------------------------------------------

std::array<double, 5> predict_coefficients(const DomainSpec& dom,
                                           const std::optional<WeightSpec>& chi, int qorder) {
    CharacteristicReport rep = detect_characteristic(dom, qorder);
    if (!rep.clean())
        throw std::domain_error("predict_coefficients: domain has characteristic points (min "
                                "horizontal ratio " +
                                std::to_string(rep.min_ratio) + ")");
    const ModelSpace& m = *dom.model;
    std::array<double, 5> c{};
    ScalarField chif = chi ? chi->chi : field_constant(m.n, 1.0, "one");
    ScalarField lap_chi = laplacian_field(m, chif);
    ScalarField n_chi = n_operator_field(dom, chif);
    ScalarField n2_chi = n_operator_field(dom, n_chi);
    ScalarField lap_delta = laplacian_field(m, dom.delta);

    if (chi) {
        c[0] = band_volume_integral(dom, [&](const Point& x) { return chif.value(x); }, 0.0,
                                    dom.rho0, qorder);
    } else {
        if (!dom.finite_volume())
            throw std::domain_error("predict_coefficients: chi==1 needs a finite-volume domain");
        c[0] = dom.volume;
    }
    c[1] = -(1.0 / kSqrtPi) * boundary_integral(
                                  dom, [&](const Point& x) { return chif.value(x); }, qorder);
    c[2] = -0.5 * boundary_integral(
                      dom, [&](const Point& x) { return grad_pair(m, chif, dom.delta, x); },
                      qorder);
    c[3] = -(1.0 / (12.0 * kSqrtPi)) *
               boundary_integral(
                   dom,
                   [&](const Point& x) { return 4.0 * lap_chi.value(x) + n2_chi.value(x); },
                   qorder) +
           (1.0 / (6.0 * kSqrtPi)) *
               boundary_integral(
                   dom, [&](const Point& x) { return n_chi.value(x) * lap_delta.value(x); },
                   qorder);
    c[4] = -0.5 * boundary_integral(
                      dom, [&](const Point& x) { return grad_pair(m, lap_chi, dom.delta, x); },
                      qorder);
    return c;
}

namespace {

// principal curvatures of the boundary parametrization by 5-point stencils
void principal_curvatures(const BoundaryPatch& p, double u, double v, int pdim, double out[2]) {
    const double h = 1e-3;
    auto at = [&](double uu, double vv) { return p.map(uu, vv, 0.0); };
    auto d1 = [&](auto&& f, double t) {
        return (-f(t + 2 * h) + 8 * f(t + h) - 8 * f(t - h) + f(t - 2 * h)) / (12 * h);
    };
    auto d2 = [&](auto&& f, double t) {
        return (-f(t + 2 * h) + 16 * f(t + h) - 30 * f(t) + 16 * f(t - h) - f(t - 2 * h)) /
               (12 * h * h);
    };
    if (pdim == 0) {
        out[0] = out[1] = 0.0;
        return;
    }
    if (pdim == 1) {
        double t1[2], t2[2];
        for (int i = 0; i < 2; ++i) {
            auto fi = [&](double t) { return at(t, v)[i]; };
            t1[i] = d1(fi, u);
            t2[i] = d2(fi, u);
        }
        const double sp = std::pow(t1[0] * t1[0] + t1[1] * t1[1], 1.5);
        out[0] = (t1[0] * t2[1] - t1[1] * t2[0]) / sp;
        out[1] = 0.0;
        return;
    }
    // surface: shape operator from first/second fundamental forms
    double ru[3], rv[3], ruu[3], rvv[3], ruv[3];
    for (int i = 0; i < 3; ++i) {
        auto fu = [&](double t) { return at(t, v)[i]; };
        auto fv = [&](double t) { return at(u, t)[i]; };
        ru[i] = d1(fu, u);
        rv[i] = d1(fv, v);
        ruu[i] = d2(fu, u);
        rvv[i] = d2(fv, v);
        auto dv_at = [&](double uu) {
            auto g = [&](double t) { return at(uu, t)[i]; };
            return d1(g, v);
        };
        ruv[i] = d1(dv_at, u);
    }
    double nrm[3] = {ru[1] * rv[2] - ru[2] * rv[1], ru[2] * rv[0] - ru[0] * rv[2],
                     ru[0] * rv[1] - ru[1] * rv[0]};
    const double nn = std::sqrt(nrm[0] * nrm[0] + nrm[1] * nrm[1] + nrm[2] * nrm[2]);
    for (double& x : nrm) x /= nn;
    auto dot3 = [](const double* a, const double* b) {
        return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    };
    const double E = dot3(ru, ru), F = dot3(ru, rv), G = dot3(rv, rv);
    const double Lf = dot3(ruu, nrm), Mf = dot3(ruv, nrm), Nf = dot3(rvv, nrm);
    // eigenvalues of (I^-1 II)
    const double det = E * G - F * F;
    const double a11 = (G * Lf - F * Mf) / det, a12 = (G * Mf - F * Nf) / det;
    const double a21 = (E * Mf - F * Lf) / det, a22 = (E * Nf - F * Mf) / det;
    const double tr = a11 + a22, dd = a11 * a22 - a12 * a21;
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4 - dd));
    out[0] = tr / 2 + disc;
    out[1] = tr / 2 - disc;
}

} // namespace

double euclidean_curvature_coefficient(const DomainSpec& dom, int qorder) {
    const ModelSpace& m = *dom.model;
    if (m.name != "euclid1" && m.name != "euclid2" && m.name != "euclid3")
        throw std::domain_error("euclidean_curvature_coefficient: Euclidean models only");
    const int n = m.n;
    if (n == 1) return 0.0;
    double acc = 0.0;
    for (const BoundaryNode& node : boundary_nodes(dom, qorder, 0.0)) {
        double k[2];
        principal_curvatures(dom.patches[node.patch], node.u, node.v,
                             dom.patches[node.patch].pdim, k);
        const int m1 = n - 1;
        double H = 0.0, csum = 0.0;
        for (int i = 0; i < m1; ++i) {
            H += k[i] / m1;
            csum += k[i] * k[i];
        }
        acc += node.weight * (H * H + 2.0 * csum / (m1 * m1));
    }
    return (n - 1) * (n - 1) / (12.0 * kSqrtPi) * acc;
}

double coeff_a(const DomainSpec& dom, const ScalarField& phi, int i, int qorder) {
    if (i < 1 || i > 2) throw std::invalid_argument("coeff_a: i must be 1 or 2");
    const ModelSpace& m = *dom.model;
    ScalarField f = (i == 1) ? phi : laplacian_field(m, phi);
    return boundary_integral(
        dom, [&](const Point& x) { return grad_pair(m, f, dom.delta, x); }, qorder);
}

double mean_value_residual(const DomainSpec& dom, const ScalarField& v, double r, int qorder) {
    const double h = 1e-3;
    if (!(r >= 0.0 && r + 2 * h < dom.rho0 && r - 2 * h > -dom.rho0))
        throw std::invalid_argument("mean_value_residual: r too close to the band edge");
    const ModelSpace& m = *dom.model;
    ScalarField lap_v = laplacian_field(m, v);
    ScalarField lap_delta = laplacian_field(m, dom.delta);

    // deep part of int Delta v must reduce to a flux through {delta = rho0}
    auto F = [&](double rr) {
        return band_volume_integral(dom, [&](const Point& x) { return v.value(x); }, rr,
                                    dom.rho0, qorder);
    };
    const double f2 = (-F(r + 2 * h) + 16 * F(r + h) - 30 * F(r) + 16 * F(r - h) - F(r - 2 * h)) /
                      (12 * h * h);

    const double band_lap = band_volume_integral(
        dom, [&](const Point& x) { return lap_v.value(x); }, r, dom.rho0, qorder);
    const double deep_flux = -boundary_integral(
        dom, [&](const Point& x) { return grad_pair(m, v, dom.delta, x); }, qorder, dom.rho0);
    const double boundary_term = boundary_integral(
        dom, [&](const Point& x) { return -v.value(x) * lap_delta.value(x); }, qorder, r);
    return std::abs(f2 - (band_lap + deep_flux) - boundary_term);
}

} // namespace subheat
