#pragma once

#include "subheat/functionals.hpp"

#include <optional>
#include <string>
#include <vector>

namespace subheat {

struct AsymptoticFit {
    std::vector<double> exponents; // subset of {0, 1/2, 1, 3/2, 2}
    std::vector<double> coef;
    std::vector<double> se;
    std::vector<std::vector<double>> cov;
    double t_lo = 0.0, t_hi = 0.0;
    bool pinned_c0 = false;
    double max_std_residual = 0.0;
    double tail_slope = 0.0; // log-log slope of |residual| over the window

    double coef_for(double exponent) const;
    double se_for(double exponent) const;
};

/// Weighted least squares in the basis {t^e}. Points with positive stderr get
/// 1/se^2 weights; otherwise unit weights with residual-scaled covariance.
/// pin_c0 subtracts a fixed constant term c0 and drops exponent 0.
AsymptoticFit fit_sqrt_t(const HeatContentCurve& curve, const std::vector<double>& exponents,
                         double t_lo, double t_hi, bool pin_c0 = false, double c0 = 0.0);

struct ComparisonRow {
    std::string name;
    double predicted = 0.0;
    double fitted = 0.0;
    double se = 0.0;
    double z = 0.0; // (fitted - predicted) / se when se > 0
    bool pass = false;
};

struct CompareThresholds {
    double zmax = 3.0;           // stochastic backends
    double rel = 1e-3;           // oracle-backed values, exponents < 1
    double rel_high_order = 1e-2; // oracle-backed values, exponents >= 1 (o(t^2)
                                  // truncation contaminates them at this level)
    double abs_for_zero = 1e-2;  // |fitted| bound when predicted == 0
};

enum class CompareMode { Auto, Stochastic, Deterministic };

struct ComparisonReport {
    std::vector<ComparisonRow> rows;
    bool all_pass = true;
};

ComparisonReport compare(const AsymptoticFit& fit, const std::vector<double>& predicted,
                         const CompareThresholds& thr = {},
                         CompareMode mode = CompareMode::Auto);

/// |I phi(t,0) - 2 G_{1-u}[phi](t)|, the first-order Duhamel residual.
double duhamel_first_order_residual(const DomainSpec& dom, const ScalarField& phi,
                                    const UEval& u, double t, int qorder = 48);

struct LadderReport {
    std::vector<double> t;
    std::vector<double> residual;
    std::vector<double> se;
    double exponent = 0.0; // +inf when residuals sit below the floor
    double floor = 0.0;
};

/// Residual ladder + log-log decay exponent (exponent = +inf below the floor).
LadderReport duhamel_residual_ladder(const DomainSpec& dom, const ScalarField& phi,
                                     const UEval& u, const std::vector<double>& tladder,
                                     int qorder = 48);

struct InsideOutsideReport {
    std::vector<double> t;
    std::vector<double> diff;      // I phi - I^c phi
    std::vector<double> predicted; // a1 t + a2 t^2
    std::vector<double> residual;
    std::vector<double> se;
    double a1 = 0.0, a2 = 0.0;
    double exponent = 0.0; // decay exponent of |residual|, +inf below floor
    double floor = 0.0;
    bool within_noise = true; // every |residual| <= max(3 se, floor)
};

/// Prop-5.2-style check: the inside/outside difference minus its integer-power
/// series. With the exact backend the difference comes from quadratures; with
/// an SDE config it is estimated from common paths via ∫_Omega phi - ∫_M u phi.
InsideOutsideReport inside_outside_check(const ModelSpace& m, const DomainSpec& dom,
                                         const WeightSpec& phi,
                                         const std::vector<double>& tladder, const UEval& u,
                                         const std::optional<SdeConfig>& mc_cfg = std::nullopt,
                                         int qorder = 48);

/// least-squares slope of log|y| against log t, ignoring entries below `floor`
double loglog_slope(const std::vector<double>& t, const std::vector<double>& y, double floor);

} // namespace subheat
