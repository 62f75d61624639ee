#pragma once

#include "subheat/models.hpp"

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace subheat {

/// One smooth boundary component (or a window of one), parametrized together
/// with its inward-offset surfaces {delta = s}.
struct BoundaryPatch {
    std::string name;
    int pdim = 0; // 0 (points), 1 (curves), 2 (surfaces)
    std::array<std::pair<double, double>, 2> prange{};
    /// point of the offset surface at signed distance s (s = 0: boundary)
    std::function<Point(double u, double v, double s)> map;
    /// Euclidean area element of the offset surface at (u, v, s)
    std::function<double(double u, double v, double s)> area_elem;
    /// local defining function (F > 0 inside), used for the sigma density and
    /// characteristic detection
    ScalarField localF;
};

struct DomainSpec {
    const ModelSpace* model = nullptr;
    std::string name;
    std::map<std::string, double> params;
    ScalarField F;           // Omega = {F > 0}
    ScalarField delta;       // signed distance, jets valid on {|delta| < rho0}
    bool has_delta = true;
    double rho0 = 0.0;
    double volume = 0.0;     // NaN when infinite (weighted experiments only)
    std::vector<BoundaryPatch> patches;
    Point box_lo{}, box_hi{}; // sampling box covering Omega (finite domains)
    Point deep_point{};       // a point with delta >= 0.5 * domain scale

    bool contains(const Point& x) const { return F.value(x) > 0.0; }
    bool finite_volume() const;
};

/// Built-ins: interval(L) | disc(R) | ball(R) | heis_slab(L,a) |
/// grushin_strip(x0,L,a) | heis_ball(R).
DomainSpec make_domain(const ModelSpace& m, const std::string& name,
                       const std::map<std::string, double>& params = {});
std::vector<std::string> domain_names();

// -- quadrature --------------------------------------------------------------

struct BoundaryNode {
    Point x{};
    double weight = 0.0; // includes area element, sigma density ratio and omega density
    int patch = 0;
    double u = 0.0, v = 0.0;
};

/// Nodes of the offset surface {delta = s} with sigma_s weights.
std::vector<BoundaryNode> boundary_nodes(const DomainSpec& dom, int qorder, double s = 0.0);

/// ∫_{∂Ω_s} f dsigma_s (tensor Gauss-Legendre, default 64 nodes per axis).
double boundary_integral(const DomainSpec& dom, const std::function<double(const Point&)>& f,
                         int qorder = 64, double s = 0.0);

/// Co-area integral ∫ f over {s_lo < delta < s_hi} (band only).
double band_volume_integral(const DomainSpec& dom, const std::function<double(const Point&)>& f,
                            double s_lo, double s_hi, int qorder = 64, int s_nodes = 64);

/// Same, with extra s-panels of width `layer` near s = 0 to resolve a
/// temperature boundary layer of that scale.
double band_volume_integral_layered(const DomainSpec& dom,
                                    const std::function<double(const Point&)>& f, double s_lo,
                                    double s_hi, double layer, int qorder = 64);

// -- operators tied to the domain geometry -----------------------------------

/// N phi = 2 g(grad phi, grad delta) + phi * Delta delta, as a field transform.
ScalarField n_operator_field(const DomainSpec& dom, const ScalarField& phi);

/// N^power phi(x); x must lie in the tubular band.
double operator_N(const ModelSpace& m, const DomainSpec& dom, const ScalarField& phi,
                  const Point& x, int power = 1);

/// g(grad a, grad b)(x) = sum_i X_i(a) X_i(b).
double grad_pair(const ModelSpace& m, const ScalarField& a, const ScalarField& b, const Point& x);

// -- characteristic points ----------------------------------------------------

struct CharacteristicReport {
    double min_ratio = 0.0; // min over nodes of |grad_H F|_g / |grad F|
    std::vector<Point> offending;
    bool clean() const { return offending.empty(); }
};

CharacteristicReport detect_characteristic(const DomainSpec& dom, int qorder = 64,
                                           double threshold = 1e-6);

// -- weights ------------------------------------------------------------------

struct WeightSpec {
    std::string name;
    ScalarField chi;
    Point support_lo{}, support_hi{};
    /// true if chi == 1 identically near the boundary (plateau weights)
    bool one_near_boundary = false;
};

/// Built-in weights (all compactly supported in the tubular band):
///   boundary_plateau(inner,outer)          chi == 1 near the boundary
///   distance_slope(l0,l1,u0,u1)            chi = T(delta), T'(0) != 0
///   delta_bump(inner,outer)                chi = delta * plateau
///   coord_bump(j,inner,outer)              chi = z_j * plateau
///   sector(inner,outer,theta0,width)       disc only, angular window
/// Slab/strip weights are multiplied by tangential plateau windows.
WeightSpec make_weight(const DomainSpec& dom, const std::string& kind,
                       const std::map<std::string, double>& params = {});

/// max |chi| outside the declared support box over a probe grid
double weight_support_violation(const DomainSpec& dom, const WeightSpec& w);

// -- paper-facing predictions --------------------------------------------------

/// Coefficients of H^chi(t) ~ c0 + c1 sqrt(t) + c2 t + c3 t^(3/2) + c4 t^2.
/// chi == nullopt means chi == 1 (requires finite volume).
std::array<double, 5> predict_coefficients(const DomainSpec& dom,
                                           const std::optional<WeightSpec>& chi = std::nullopt,
                                           int qorder = 64);

/// Third-order coefficient from principal curvatures (Euclidean models only).
double euclidean_curvature_coefficient(const DomainSpec& dom, int qorder = 64);

/// a_i(phi) = ∫ g(grad(Delta^{i-1} phi), grad delta) dsigma, i in {1, 2}.
double coeff_a(const DomainSpec& dom, const ScalarField& phi, int i, int qorder = 64);

/// |F''(r) - ∫_{Omega_r} Delta v - ∫_{∂Omega_r} v div(nu_r)|, F(r) = ∫_{Omega_r} v.
double mean_value_residual(const DomainSpec& dom, const ScalarField& v, double r,
                           int qorder = 64);

} // namespace subheat
