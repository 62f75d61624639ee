#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace subheat {

struct GaussRule {
    std::vector<double> node;   // on (-1, 1)
    std::vector<double> weight; // sums to 2
};

/// Gauss-Legendre rule of order n, cached per n.
const GaussRule& gauss_legendre(int n);

/// ∫_a^b f(x) dx with an n-point rule.
template <typename F>
double integrate(F&& f, double a, double b, int n = 64) {
    const GaussRule& g = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.node.size(); ++i)
        acc += g.weight[i] * f(mid + half * g.node[i]);
    return half * acc;
}

/// Composite rule: m equal panels of an n-point rule.
template <typename F>
double integrate_panels(F&& f, double a, double b, int panels, int n = 16) {
    double acc = 0.0;
    const double w = (b - a) / panels;
    for (int p = 0; p < panels; ++p)
        acc += integrate(f, a + p * w, a + (p + 1) * w, n);
    return acc;
}

} // namespace subheat
