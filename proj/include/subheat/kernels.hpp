#pragma once

#include "subheat/domains.hpp"

#include <mutex>
#include <unordered_map>

namespace subheat {

/// Heat kernel of e^{t Delta} on the Heisenberg group (Delta = X^2 + Y^2),
/// evaluated from the oscillatory-integral representation. Depends on the
/// group-relative coordinates through (rho^2, |z|) only; small values are
/// memoized (boundary-functional quadratures reuse them heavily).
class HeisenbergKernel {
  public:
    /// kernel at relative coordinates (rho^2 = zeta1^2 + zeta2^2, zeta3)
    double relative(double t, double rho2, double z3) const;
    /// p_t(x, y) in group coordinates
    double at(double t, const Point& x, const Point& y) const;

  private:
    mutable std::unordered_map<std::uint64_t, double> cache_;
    mutable std::mutex mtx_;
};

/// p_t(x, y) for euclid-n and heisenberg; t > 0 required.
double heat_kernel(const ModelSpace& m, double t, const Point& x, const Point& y);

/// Temperature of the half-space {z1 > 0} at signed distance delta (Euclidean
/// closed form, also exact for Heisenberg/Grushin vertical planes).
double halfspace_temperature_exact(double t, double delta);

/// Heisenberg half-space {x > 0}: integral of the kernel over the half-space
/// by quadrature (validates the kernel against the closed form).
double halfspace_temperature_quadrature(double t, double delta);

/// Neumann heat kernel on the half-line.
double neumann_halfline_kernel(double t, double r, double s);

/// Kernel mass ∫ p_t(0, y) dy by quadrature (Heisenberg).
double heisenberg_kernel_mass(double t);

// -- exact (kernel-integral) backends per built-in domain ----------------------

bool exact_u_available(const DomainSpec& dom);

/// u(t, x) = ∫_Omega p_t(x, y) domega(y), exact up to quadrature:
///   interval / heis_slab / grushin_strip : 1D erf profile in the face coordinate
///   disc : radial Bessel-form integral       ball : radial image integral
double exact_u(const DomainSpec& dom, double t, const Point& x);

/// H_Omega(t) for finite-volume built-ins via the kernel autocorrelation
/// ∫ k_t(z) |Omega ∩ (Omega + z)| dz.
double exact_relative_heat_content(const DomainSpec& dom, double t);

/// H^chi_Omega(t) by co-area quadrature of exact_u against chi.
double exact_weighted_content(const DomainSpec& dom, const WeightSpec& chi, double t,
                              int qorder = 48);

} // namespace subheat
