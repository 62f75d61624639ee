#pragma once

#include "subheat/domains.hpp"
#include "subheat/rng.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace subheat {

enum class SdeScheme { StratonovichHeun, EulerMaruyama };

struct SdeConfig {
    double dt = 1e-4;        // absolute step for simulate_path
    int steps_per_t = 400;   // curve estimators step each segment with t_k / steps_per_t
    SdeScheme scheme = SdeScheme::StratonovichHeun;
    long n_paths = 10000;
    std::uint64_t seed = 1;
    bool antithetic = false;
    int threads = 0;         // 0: SUBHEAT_THREADS env or hardware concurrency
};

struct Estimate {
    double value = 0.0;
    double se = 0.0;
    long n = 0;
    std::string backend = "mc";
};

struct CurvePoint {
    double t = 0.0;
    double value = 0.0;
    double se = 0.0;
    long n = 0;
};

struct HeatContentCurve {
    std::string kind; // H | K | Q | Hchi | G | I | Lambda | UGlobal
    std::string backend;
    std::vector<CurvePoint> points;
    std::map<std::string, std::string> meta;
};

enum class ContentKind { H, K, Q, Hchi };

/// Horizontal diffusion with generator Delta = sum X_i^2 + (div X_i) X_i:
/// dX = sqrt(2) sum_i X_i(X) o dB^i + sum_i div(X_i) X_i(X) dt.
/// Integrates to time t with fixed step cfg.dt (final partial step).
Point simulate_path(const ModelSpace& m, const Point& x0, double t, const SdeConfig& cfg,
                    RngStream& rng);

/// u(t, x): fraction of paths whose endpoint lies in Omega.
Estimate estimate_u(const ModelSpace& m, const DomainSpec& dom, double t, const Point& x,
                    const SdeConfig& cfg);

/// H/K/Q/Hchi over a t-grid with common random numbers (one path per sample,
/// checkpointed at grid times; segment [t_{k-1}, t_k] stepped with t_k / steps_per_t).
HeatContentCurve estimate_heat_content(const ModelSpace& m, const DomainSpec& dom,
                                       ContentKind kind, const std::optional<WeightSpec>& chi,
                                       const std::vector<double>& tgrid, const SdeConfig& cfg);

/// ∫_M u(t, x) phi(x) domega(x) by importance sampling from |phi| omega over the
/// support box (both sides of the boundary). Shares paths across the grid.
HeatContentCurve estimate_global_weighted_u(const ModelSpace& m, const DomainSpec& dom,
                                            const WeightSpec& phi,
                                            const std::vector<double>& tgrid,
                                            const SdeConfig& cfg);

int resolve_threads(int requested);

} // namespace subheat
