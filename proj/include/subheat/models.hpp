#pragma once

#include "subheat/jets.hpp"

#include <memory>
#include <string>
#include <vector>

namespace subheat {

/// Vector field with polynomial components (all built-in frames are
/// polynomial, which keeps every jet exact).
struct VecField {
    int n = 1;
    std::vector<Polynomial> comp;           // size n
    Polynomial coord_div;                   // sum_j d(comp_j)/dx_j, precomputed

    VecField() = default;
    VecField(int n_, std::vector<Polynomial> c);

    Point eval(const Point& x) const;
    std::vector<Jet> jets(const Point& x, int order) const;
    /// X(f) as a jet transform (order drops by one)
    Jet apply(const Jet& f) const;
};

/// A generating frame with a measure and (for Carnot models) dilation weights.
struct ModelSpace {
    std::string name;
    int n = 1;                 // manifold dimension
    std::vector<VecField> frame;
    ScalarField density;       // density of omega against Lebesgue measure
    bool density_is_one = true;
    std::vector<int> weights;  // dilation weights w_i
    int Q = 0;                 // homogeneous dimension = sum w_i
    bool carnot = false;

    int frame_size() const { return static_cast<int>(frame.size()); }
};

/// Built-ins: euclid1|euclid2|euclid3|heisenberg|grushin.
const ModelSpace& model_by_name(const std::string& name);
std::vector<std::string> model_names();

struct TangentVector {
    Point base{};
    Point components{};            // coordinate components
    std::vector<double> horiz;     // minimal-norm frame coefficients u_i
    double norm_sq = 0.0;          // sum u_i^2
    double norm() const;
};

/// ∇f = sum_i X_i(f) X_i, with horizontal coefficients u_i = X_i(f)(x).
TangentVector horizontal_gradient(const ModelSpace& m, const ScalarField& f, const Point& x);

/// Minimal-norm frame representation of a coordinate vector v at x.
TangentVector tangent_from_components(const ModelSpace& m, const Point& x, const Point& v);

/// div(X_i) with respect to omega: coordinate divergence + X_i(log density).
Jet frame_divergence_jet(const ModelSpace& m, int i, const Point& x, int order);

/// Δf as a field (jet queries at order m pull f at order m + 2).
ScalarField laplacian_field(const ModelSpace& m, const ScalarField& f);

/// Δ^k f(x), k in {1, 2}.
double sublaplacian(const ModelSpace& m, const ScalarField& f, const Point& x, int k = 1);

/// Anisotropic dilation z_i -> eps^{w_i} z_i (Carnot models only).
Point dilate(const ModelSpace& m, double eps, const Point& z);

} // namespace subheat
