#pragma once

#include "subheat/kernels.hpp"
#include "subheat/mc.hpp"

namespace subheat {

/// Pluggable temperature backend for the boundary functionals.
struct UEval {
    std::string tag; // "kernel-exact" | "mc"
    std::function<Estimate(double t, const Point&)> eval;
};

UEval exact_u_backend(const DomainSpec& dom);
/// MC backend: per-node estimates with the configured path budget; node seeds
/// derive from (cfg.seed, hash(t, x)) so results do not depend on call order.
UEval mc_u_backend(const ModelSpace& m, const DomainSpec& dom, const SdeConfig& cfg);

/// G_v[phi](t) = (1/(2 sqrt pi)) ∫_0^t ∫_∂Ω v(tau,.) phi dsigma (t-tau)^{-1/2} dtau
/// for v = a + b u; the substitution tau = t sin^2(theta) removes the endpoint
/// singularity and makes sqrt(tau)-behavior analytic.
Estimate g_functional(const DomainSpec& dom, const UEval& u, double a, double b,
                      const ScalarField& phi, double t, int qorder = 48, int theta_nodes = 48);

/// I phi(t, r) = ∫_{Omega_r} (1 - u) phi domega (phi supported in the band).
Estimate i_functional(const DomainSpec& dom, const UEval& u, const ScalarField& phi, double t,
                      double r, int qorder = 48);

/// Outside contribution I^c phi(t, r) = ∫_{(Omega^c)_r} u phi domega.
Estimate i_functional_complement(const DomainSpec& dom, const UEval& u, const ScalarField& phi,
                                 double t, double r, int qorder = 48);

/// Lambda phi(t, r) = -∫_{∂Omega_r} (1 - u) phi dsigma_r.
Estimate lambda_functional(const DomainSpec& dom, const UEval& u, const ScalarField& phi,
                           double t, double r, int qorder = 48);

enum class BoundaryFunctional { G, I, Lambda };

/// Curve of G_u[phi], I phi(., r) or Lambda phi(., r) over a t-grid.
HeatContentCurve estimate_boundary_functional(const ModelSpace& m, const DomainSpec& dom,
                                              BoundaryFunctional kind, const WeightSpec& phi,
                                              const std::vector<double>& tgrid, double r,
                                              const SdeConfig& cfg, const UEval& u);

} // namespace subheat
