#include "subheat/functionals.hpp"

#include "subheat/gauss.hpp"

#include <cmath>
#include <cstring>
#include <numbers>
#include <stdexcept>

namespace subheat {

namespace {

const double kSqrtPi = std::sqrt(std::numbers::pi);

std::uint64_t point_key(double t, const Point& x) {
    auto h = [](double v) {
        std::uint64_t u;
        std::memcpy(&u, &v, 8);
        return u;
    };
    std::uint64_t k = h(t);
    for (int i = 0; i < 4; ++i) k = RngStream::mix(k ^ (h(x[i]) + 0x9E3779B97F4A7C15ull * (i + 1)));
    return k;
}

void check_support(const DomainSpec& dom, const WeightSpec& phi) {
    if (weight_support_violation(dom, phi) > 1e-12)
        throw std::domain_error("boundary functional: weight leaks outside its support box");
}

} // namespace

UEval exact_u_backend(const DomainSpec& dom) {
    if (!exact_u_available(dom))
        throw std::invalid_argument("no exact kernel backend for domain " + dom.name);
    const DomainSpec* d = &dom;
    return {"kernel-exact", [d](double t, const Point& x) {
                return Estimate{exact_u(*d, t, x), 0.0, 0, "kernel-exact"};
            }};
}

UEval mc_u_backend(const ModelSpace& m, const DomainSpec& dom, const SdeConfig& cfg) {
    const ModelSpace* mp = &m;
    const DomainSpec* dp = &dom;
    return {"mc", [mp, dp, cfg](double t, const Point& x) {
                SdeConfig node_cfg = cfg;
                node_cfg.seed = RngStream::mix(cfg.seed ^ point_key(t, x));
                return estimate_u(*mp, *dp, t, x, node_cfg);
            }};
}

Estimate g_functional(const DomainSpec& dom, const UEval& u, double a, double b,
                      const ScalarField& phi, double t, int qorder, int theta_nodes) {
    if (t <= 0.0) throw std::invalid_argument("g_functional: t must be positive");
    auto nodes = boundary_nodes(dom, qorder, 0.0);
    std::vector<double> phiw(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i)
        phiw[i] = nodes[i].weight * phi.value(nodes[i].x);

    const GaussRule& g = gauss_legendre(theta_nodes);
    double acc = 0.0, var = 0.0;
    for (int k = 0; k < theta_nodes; ++k) {
        const double theta = 0.25 * std::numbers::pi * (g.node[k] + 1.0);
        const double wtheta = 0.25 * std::numbers::pi * g.weight[k];
        const double s = std::sin(theta);
        const double tau = t * s * s;
        double F = 0.0, Fvar = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (phiw[i] == 0.0) continue;
            Estimate e = u.eval(tau, nodes[i].x);
            F += phiw[i] * (a + b * e.value);
            Fvar += phiw[i] * phiw[i] * b * b * e.se * e.se;
        }
        acc += wtheta * F * s;
        var += wtheta * wtheta * s * s * Fvar;
    }
    const double pref = std::sqrt(t) / kSqrtPi;
    return {pref * acc, pref * std::sqrt(var), 0, u.tag};
}

namespace {

Estimate band_u_integral(const DomainSpec& dom, const UEval& u, const ScalarField& phi, double t,
                         double s_lo, double s_hi, double ua, double ub, int qorder) {
    // ∫ over {s_lo < delta < s_hi} of (ua + ub u) phi, layered near the boundary
    std::vector<double> cuts{s_lo};
    const double layer = std::sqrt(t);
    auto push = [&](double c) {
        if (c > cuts.back() + 1e-15 && c < s_hi - 1e-15) cuts.push_back(c);
    };
    if (s_lo < 0.0)
        for (double c : {-32.0, -24.0, -16.0, -8.0, -4.0, -2.0, -1.0}) push(c * layer);
    if (s_lo < 0.0 && s_hi > 0.0) push(0.0);
    for (double c : {1.0, 2.0, 4.0, 8.0, 16.0, 24.0, 32.0}) push(c * layer);
    cuts.push_back(s_hi);

    const GaussRule& g = gauss_legendre(32);
    double acc = 0.0, var = 0.0;
    for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
        const double mid = 0.5 * (cuts[p] + cuts[p + 1]);
        const double half = 0.5 * (cuts[p + 1] - cuts[p]);
        for (std::size_t k = 0; k < g.node.size(); ++k) {
            const double s = mid + half * g.node[k];
            const double ws = half * g.weight[k];
            for (const BoundaryNode& n : boundary_nodes(dom, qorder, s)) {
                const double pw = phi.value(n.x);
                if (pw == 0.0) continue;
                Estimate e = u.eval(t, n.x);
                const double w = ws * n.weight * pw;
                acc += w * (ua + ub * e.value);
                var += w * w * ub * ub * e.se * e.se;
            }
        }
    }
    return {acc, std::sqrt(var), 0, u.tag};
}

} // namespace

Estimate i_functional(const DomainSpec& dom, const UEval& u, const ScalarField& phi, double t,
                      double r, int qorder) {
    if (r < 0.0 || r >= dom.rho0) throw std::invalid_argument("i_functional: r outside the band");
    return band_u_integral(dom, u, phi, t, r, dom.rho0, 1.0, -1.0, qorder);
}

Estimate i_functional_complement(const DomainSpec& dom, const UEval& u, const ScalarField& phi,
                                 double t, double r, int qorder) {
    if (r < 0.0 || r >= dom.rho0)
        throw std::invalid_argument("i_functional_complement: r outside the band");
    return band_u_integral(dom, u, phi, t, -dom.rho0, -r, 0.0, 1.0, qorder);
}

Estimate lambda_functional(const DomainSpec& dom, const UEval& u, const ScalarField& phi,
                           double t, double r, int qorder) {
    double acc = 0.0, var = 0.0;
    for (const BoundaryNode& n : boundary_nodes(dom, qorder, r)) {
        const double pw = phi.value(n.x);
        if (pw == 0.0) continue;
        Estimate e = u.eval(t, n.x);
        acc -= n.weight * pw * (1.0 - e.value);
        var += n.weight * n.weight * pw * pw * e.se * e.se;
    }
    return {acc, std::sqrt(var), 0, u.tag};
}

HeatContentCurve estimate_boundary_functional(const ModelSpace& m, const DomainSpec& dom,
                                              BoundaryFunctional kind, const WeightSpec& phi,
                                              const std::vector<double>& tgrid, double r,
                                              const SdeConfig& cfg, const UEval& u) {
    (void)m;
    (void)cfg;
    check_support(dom, phi);
    HeatContentCurve curve;
    curve.backend = u.tag;
    curve.kind = kind == BoundaryFunctional::G ? "G"
                                               : (kind == BoundaryFunctional::I ? "I" : "Lambda");
    for (double t : tgrid) {
        Estimate e;
        switch (kind) {
            case BoundaryFunctional::G: e = g_functional(dom, u, 0.0, 1.0, phi.chi, t); break;
            case BoundaryFunctional::I: e = i_functional(dom, u, phi.chi, t, r); break;
            case BoundaryFunctional::Lambda:
                e = lambda_functional(dom, u, phi.chi, t, r);
                break;
        }
        curve.points.push_back({t, e.value, e.se, e.n});
    }
    curve.meta["model"] = m.name;
    curve.meta["domain"] = dom.name;
    curve.meta["r"] = std::to_string(r);
    return curve;
}

} // namespace subheat
