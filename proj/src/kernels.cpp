#include "subheat/kernels.hpp"

#include "subheat/gauss.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <stdexcept>

namespace subheat {

namespace {

const double kPi = std::numbers::pi;

// I0(w) e^{-w}
double i0e(double w) {
    if (w < 0) w = -w;
    if (w <= 60.0) {
        double term = 1.0, sum = 1.0;
        const double q = 0.25 * w * w;
        for (int k = 1; k < 160; ++k) {
            term *= q / (double(k) * k);
            sum += term;
            if (term < 1e-18 * sum) break;
        }
        return sum * std::exp(-w);
    }
    // asymptotic: (2 pi w)^{-1/2} sum a_k / w^k, a_k = a_{k-1} (2k-1)^2 / (8k)
    double a = 1.0, sum = 1.0;
    for (int k = 1; k <= 12; ++k) {
        a *= (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k);
        const double term = a / std::pow(w, k);
        sum += term;
        if (term < 1e-18) break;
    }
    return sum / std::sqrt(2.0 * kPi * w);
}

double sq(double x) { return x * x; }

// Heisenberg group: zeta = x^{-1} y
Point heis_relative(const Point& x, const Point& y) {
    return {y[0] - x[0], y[1] - x[1], y[2] - x[2] - 0.5 * (x[0] * y[1] - x[1] * y[0]), 0};
}

std::uint64_t cache_key(double t, double rho2, double z3) {
    auto h = [](double v) {
        std::uint64_t u;
        static_assert(sizeof(u) == sizeof(v));
        std::memcpy(&u, &v, 8);
        return u;
    };
    std::uint64_t k = h(t) * 0x9E3779B97F4A7C15ull;
    k ^= h(rho2) + 0x9E3779B97F4A7C15ull + (k << 6) + (k >> 2);
    k ^= h(std::abs(z3)) + 0x9E3779B97F4A7C15ull + (k << 6) + (k >> 2);
    return k;
}

double heis_kernel_integral(double t, double rho2, double z3) {
    // (1/(4 pi^2 t^2)) ∫_0^∞ cos(s z3 / t) (s / sinh s) exp(-(rho2/4t) s coth s) ds
    const double gamma = 1.0 + 0.25 * rho2 / t;
    const double freq = std::abs(z3) / t;
    const double smax = 40.0;
    const double scale = std::max({1.0, gamma / 3.0, freq / 3.0});
    const int panels = std::min(4000, static_cast<int>(std::ceil(smax * scale / 3.0) * 3));
    auto f = [&](double s) {
        double s_over_sinh, s_coth;
        if (s < 1e-6) {
            s_over_sinh = 1.0 - s * s / 6.0;
            s_coth = 1.0 + s * s / 3.0;
        } else {
            const double sh = std::sinh(s);
            s_over_sinh = s / sh;
            s_coth = s * std::cosh(s) / sh;
        }
        return std::cos(s * freq) * s_over_sinh * std::exp(-0.25 * rho2 / t * s_coth);
    };
    const double integral = integrate_panels(f, 0.0, smax, panels, 16);
    return integral / (4.0 * kPi * kPi * t * t);
}

} // namespace

double HeisenbergKernel::relative(double t, double rho2, double z3) const {
    if (t <= 0.0) throw std::invalid_argument("heat kernel: t must be positive");
    const std::uint64_t key = cache_key(t, rho2, z3);
    {
        std::lock_guard<std::mutex> lock(mtx_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    const double v = heis_kernel_integral(t, rho2, z3);
    std::lock_guard<std::mutex> lock(mtx_);
    if (cache_.size() > 2'000'000) cache_.clear();
    cache_.emplace(key, v);
    return v;
}

double HeisenbergKernel::at(double t, const Point& x, const Point& y) const {
    const Point z = heis_relative(x, y);
    return relative(t, z[0] * z[0] + z[1] * z[1], z[2]);
}

double heat_kernel(const ModelSpace& m, double t, const Point& x, const Point& y) {
    if (t <= 0.0) throw std::invalid_argument("heat_kernel: t must be positive");
    if (m.name == "euclid1" || m.name == "euclid2" || m.name == "euclid3") {
        double d2 = 0.0;
        for (int i = 0; i < m.n; ++i) d2 += sq(x[i] - y[i]);
        return std::pow(4.0 * kPi * t, -0.5 * m.n) * std::exp(-d2 / (4.0 * t));
    }
    if (m.name == "heisenberg") {
        static HeisenbergKernel hk;
        return hk.at(t, x, y);
    }
    throw std::invalid_argument("heat_kernel: unsupported model " + m.name);
}

double halfspace_temperature_exact(double t, double delta) {
    if (t <= 0.0) throw std::invalid_argument("halfspace temperature: t must be positive");
    return 0.5 * std::erfc(-delta / (2.0 * std::sqrt(t)));
}

double halfspace_temperature_quadrature(double t, double delta) {
    if (t <= 0.0) throw std::invalid_argument("halfspace temperature: t must be positive");
    static HeisenbergKernel hk;
    // cylindrical reduction: u = ∫∫ k(rho^2, z3) alpha(rho) rho dz3 drho,
    // alpha = |{theta : rho cos theta > -delta}|
    auto alpha = [&](double rho) {
        const double c = std::clamp(-delta / rho, -1.0, 1.0);
        return 2.0 * std::acos(c);
    };
    const double P = std::abs(delta) + 16.0 * std::sqrt(t);
    const double Z = 30.0 * t;
    const double rho_panel = 1.5 * std::sqrt(t);
    const double z_panel = 3.0 * t;
    auto inner = [&](double rho) {
        auto g = [&](double z3) { return hk.relative(t, rho * rho, z3); };
        const int zp = std::max(2, static_cast<int>(std::ceil(Z / z_panel)));
        return 2.0 * integrate_panels(g, 0.0, Z, zp, 12); // even in z3
    };
    auto f = [&](double rho) { return inner(rho) * alpha(rho) * rho; };
    const double split = std::clamp(std::abs(delta), 0.0, P); // alpha kink
    double acc = 0.0;
    if (split > 1e-12) {
        const int p1 = std::max(2, static_cast<int>(std::ceil(split / rho_panel)));
        acc += integrate_panels(f, 0.0, split, p1, 12);
    }
    const int p2 = std::max(2, static_cast<int>(std::ceil((P - split) / rho_panel)));
    acc += integrate_panels(f, split, P, p2, 12);
    return acc;
}

double heisenberg_kernel_mass(double t) {
    // full angular measure 2 pi
    static HeisenbergKernel hk;
    const double P = 16.0 * std::sqrt(t);
    const double Z = 30.0 * t;
    auto inner = [&](double rho) {
        auto g = [&](double z3) { return hk.relative(t, rho * rho, z3); };
        const int zp = std::max(2, static_cast<int>(std::ceil(Z / (3.0 * t))));
        return 2.0 * integrate_panels(g, 0.0, Z, zp, 12);
    };
    auto f = [&](double rho) { return inner(rho) * 2.0 * kPi * rho; };
    const int p = std::max(2, static_cast<int>(std::ceil(P / (1.5 * std::sqrt(t)))));
    return integrate_panels(f, 0.0, P, p, 12);
}

double neumann_halfline_kernel(double t, double r, double s) {
    if (t <= 0.0) throw std::invalid_argument("neumann kernel: t must be positive");
    return (std::exp(-sq(r - s) / (4 * t)) + std::exp(-sq(r + s) / (4 * t))) /
           std::sqrt(4.0 * kPi * t);
}

// -- exact backends -------------------------------------------------------------

namespace {

// 1D segment (0, L): u(t, xi) for the face coordinate xi
double segment_u(double t, double xi, double L) {
    const double s = 2.0 * std::sqrt(t);
    return 0.5 * (std::erf((L - xi) / s) + std::erf(xi / s));
}

double disc_u(double t, double r, double R) {
    const double W = 20.0 * std::sqrt(t);
    const double lo = std::max(0.0, r - W), hi = std::min(R, r + W);
    if (hi <= lo) return 0.0;
    auto f = [&](double rho) {
        return rho / (2.0 * t) * std::exp(-sq(r - rho) / (4.0 * t)) *
               i0e(r * rho / (2.0 * t));
    };
    return integrate(f, lo, hi, 128);
}

double ball_u(double t, double r, double R) {
    const double W = 20.0 * std::sqrt(t);
    const double lo = std::max(0.0, r - W), hi = std::min(R, r + W);
    if (hi <= lo) return 0.0;
    const double pref = 1.0 / std::sqrt(4.0 * kPi * t);
    auto f = [&](double rho) {
        const double w = r * rho / (2.0 * t);
        if (w < 1e-4) {
            const double sinhc = 1.0 + w * w / 6.0;
            return pref * (rho * rho / t) * std::exp(-(r * r + rho * rho) / (4.0 * t)) * sinhc;
        }
        return pref * (rho / r) *
               (std::exp(-sq(r - rho) / (4.0 * t)) - std::exp(-sq(r + rho) / (4.0 * t)));
    };
    return integrate(f, lo, hi, 96);
}

double radius_of(const Point& x, int n) {
    double r2 = 0.0;
    for (int i = 0; i < n; ++i) r2 += x[i] * x[i];
    return std::sqrt(r2);
}

} // namespace

bool exact_u_available(const DomainSpec& dom) {
    return dom.name == "interval" || dom.name == "disc" || dom.name == "ball" ||
           dom.name == "heis_slab" || dom.name == "grushin_strip";
}

double exact_u(const DomainSpec& dom, double t, const Point& x) {
    if (t <= 0.0) throw std::invalid_argument("exact_u: t must be positive");
    if (dom.name == "interval") return segment_u(t, x[0], dom.params.at("L"));
    if (dom.name == "heis_slab") return segment_u(t, x[0], dom.params.at("L"));
    if (dom.name == "grushin_strip") {
        const double x0 = dom.params.at("x0");
        return segment_u(t, x[0] - x0, dom.params.at("L"));
    }
    if (dom.name == "disc") return disc_u(t, radius_of(x, 2), dom.params.at("R"));
    if (dom.name == "ball") return ball_u(t, radius_of(x, 3), dom.params.at("R"));
    throw std::invalid_argument("exact_u: no exact kernel backend for " + dom.name);
}

double exact_relative_heat_content(const DomainSpec& dom, double t) {
    if (t <= 0.0) throw std::invalid_argument("t must be positive");
    if (dom.name == "interval") {
        const double L = dom.params.at("L");
        return L * std::erf(L / (2.0 * std::sqrt(t))) -
               2.0 * std::sqrt(t / kPi) * (1.0 - std::exp(-L * L / (4.0 * t)));
    }
    if (dom.name == "disc") {
        const double R = dom.params.at("R");
        auto area = [&](double d) {
            if (d >= 2.0 * R) return 0.0;
            return 2.0 * R * R * std::acos(d / (2.0 * R)) -
                   0.5 * d * std::sqrt(4.0 * R * R - d * d);
        };
        const double smax = std::min(12.0, R / std::sqrt(t));
        auto f = [&](double s) { return 2.0 * s * std::exp(-s * s) * area(2.0 * std::sqrt(t) * s); };
        return integrate(f, 0.0, smax, 200);
    }
    if (dom.name == "ball") {
        const double R = dom.params.at("R");
        auto vol = [&](double d) {
            if (d >= 2.0 * R) return 0.0;
            return kPi / 12.0 * sq(2.0 * R - d) * (4.0 * R + d);
        };
        const double smax = std::min(12.0, R / std::sqrt(t));
        auto f = [&](double s) {
            return 4.0 / std::sqrt(kPi) * s * s * std::exp(-s * s) * vol(2.0 * std::sqrt(t) * s);
        };
        return integrate(f, 0.0, smax, 200);
    }
    throw std::invalid_argument("exact H: domain has no finite-volume kernel backend: " +
                                dom.name);
}

double exact_weighted_content(const DomainSpec& dom, const WeightSpec& chi, double t,
                              int qorder) {
    if (!exact_u_available(dom)) throw std::invalid_argument("no exact backend for " + dom.name);
    return band_volume_integral_layered(
        dom,
        [&](const Point& x) { return exact_u(dom, t, x) * chi.chi.value(x); },
        0.0, dom.rho0, std::sqrt(t), qorder);
}

} // namespace subheat
