#include "subheat/asymptotics.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace subheat {

double AsymptoticFit::coef_for(double exponent) const {
    for (std::size_t i = 0; i < exponents.size(); ++i)
        if (exponents[i] == exponent) return coef[i];
    throw std::invalid_argument("fit: exponent not in basis");
}

double AsymptoticFit::se_for(double exponent) const {
    for (std::size_t i = 0; i < exponents.size(); ++i)
        if (exponents[i] == exponent) return se[i];
    throw std::invalid_argument("fit: exponent not in basis");
}

AsymptoticFit fit_sqrt_t(const HeatContentCurve& curve, const std::vector<double>& exponents,
                         double t_lo, double t_hi, bool pin_c0, double c0) {
    std::vector<double> exps = exponents;
    if (pin_c0) {
        std::erase(exps, 0.0);
    }
    std::vector<const CurvePoint*> pts;
    for (const CurvePoint& p : curve.points)
        if (p.t >= t_lo && p.t <= t_hi) pts.push_back(&p);
    const int n = static_cast<int>(pts.size());
    const int k = static_cast<int>(exps.size());
    if (k == 0) throw std::invalid_argument("fit: empty basis");
    if (n < 2 * k)
        throw std::invalid_argument("fit: need at least twice as many points as basis functions");

    bool weighted = true;
    for (const CurvePoint* p : pts)
        if (!(p->se > 0.0)) weighted = false;

    Eigen::MatrixXd A(n, k);
    Eigen::VectorXd y(n), w(n);
    for (int i = 0; i < n; ++i) {
        const double t = pts[i]->t;
        for (int j = 0; j < k; ++j) A(i, j) = std::pow(t, exps[j]);
        y(i) = pts[i]->value - (pin_c0 ? c0 : 0.0);
        w(i) = weighted ? 1.0 / pts[i]->se : 1.0;
    }
    Eigen::MatrixXd Aw = w.asDiagonal() * A;
    Eigen::VectorXd yw = w.asDiagonal() * y;

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Aw, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double cond = svd.singularValues()(0) / svd.singularValues()(k - 1);
    if (!(cond < 1e12))
        throw std::runtime_error(
            "fit: design matrix condition number exceeds 1e12; narrow the basis or widen the "
            "t-window");
    Eigen::VectorXd beta = svd.solve(yw);

    // covariance: (A^T W A)^{-1} = V S^{-2} V^T, optionally scaled by residual
    // variance for unweighted fits
    Eigen::MatrixXd V = svd.matrixV();
    Eigen::VectorXd s = svd.singularValues();
    Eigen::MatrixXd cov = V * s.array().square().inverse().matrix().asDiagonal() * V.transpose();
    const Eigen::VectorXd resid = y - A * beta;
    double sigma2 = 1.0;
    if (!weighted) {
        sigma2 = (n > k) ? (w.asDiagonal() * resid).squaredNorm() / (n - k)
                         : std::numeric_limits<double>::quiet_NaN();
        cov *= sigma2;
    }

    AsymptoticFit fit;
    fit.t_lo = t_lo;
    fit.t_hi = t_hi;
    fit.pinned_c0 = pin_c0;
    fit.exponents = exps;
    if (pin_c0) {
        fit.exponents.insert(fit.exponents.begin(), 0.0);
        fit.coef.push_back(c0);
        fit.se.push_back(0.0);
    }
    for (int j = 0; j < k; ++j) {
        fit.coef.push_back(beta(j));
        fit.se.push_back(std::sqrt(std::max(0.0, cov(j, j))));
    }
    fit.cov.assign(k, std::vector<double>(k));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) fit.cov[i][j] = cov(i, j);

    double max_std = 0.0;
    std::vector<double> ts, rs;
    for (int i = 0; i < n; ++i) {
        const double scale = weighted ? 1.0 / pts[i]->se : 1.0 / std::sqrt(sigma2);
        max_std = std::max(max_std, std::abs(resid(i)) * scale);
        ts.push_back(pts[i]->t);
        rs.push_back(std::abs(resid(i)));
    }
    fit.max_std_residual = max_std;
    fit.tail_slope = loglog_slope(ts, rs, 0.0);
    return fit;
}

ComparisonReport compare(const AsymptoticFit& fit, const std::vector<double>& predicted,
                         const CompareThresholds& thr, CompareMode mode) {
    if (predicted.size() != fit.coef.size())
        throw std::invalid_argument("compare: length mismatch");
    ComparisonReport rep;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const double e = fit.exponents[i];
        ComparisonRow row;
        row.name = "c" + std::to_string(static_cast<int>(std::lround(2.0 * e)));
        row.predicted = predicted[i];
        row.fitted = fit.coef[i];
        row.se = fit.se[i];
        const bool use_z = (mode == CompareMode::Stochastic) ||
                           (mode == CompareMode::Auto && row.se > 0.0);
        if (fit.pinned_c0 && e == 0.0) {
            row.z = 0.0;
            row.pass = true;
        } else if (use_z && row.se > 0.0) {
            row.z = (row.fitted - row.predicted) / row.se;
            row.pass = std::abs(row.z) <= thr.zmax;
        } else if (row.predicted != 0.0) {
            row.z = 0.0;
            const double rel = (e >= 1.0) ? thr.rel_high_order : thr.rel;
            row.pass = std::abs(row.fitted - row.predicted) <= rel * std::abs(row.predicted);
        } else {
            row.z = 0.0;
            row.pass = std::abs(row.fitted) <= thr.abs_for_zero;
        }
        rep.all_pass = rep.all_pass && row.pass;
        rep.rows.push_back(row);
    }
    return rep;
}

double duhamel_first_order_residual(const DomainSpec& dom, const ScalarField& phi,
                                    const UEval& u, double t, int qorder) {
    const double lhs = i_functional(dom, u, phi, t, 0.0, qorder).value;
    const double rhs = 2.0 * g_functional(dom, u, 1.0, -1.0, phi, t, qorder).value;
    return std::abs(lhs - rhs);
}

double loglog_slope(const std::vector<double>& t, const std::vector<double>& y, double floor) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(y[i] > floor)) continue;
        const double lx = std::log(t[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 2) return std::numeric_limits<double>::infinity();
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

LadderReport duhamel_residual_ladder(const DomainSpec& dom, const ScalarField& phi,
                                     const UEval& u, const std::vector<double>& tladder,
                                     int qorder) {
    LadderReport rep;
    double scale = 0.0;
    for (double t : tladder) {
        const double lhs = i_functional(dom, u, phi, t, 0.0, qorder).value;
        const double rhs = 2.0 * g_functional(dom, u, 1.0, -1.0, phi, t, qorder).value;
        rep.t.push_back(t);
        rep.residual.push_back(std::abs(lhs - rhs));
        rep.se.push_back(0.0);
        scale = std::max({scale, std::abs(lhs), std::abs(rhs)});
    }
    rep.floor = 1e-12 * std::max(scale, 1e-30);
    bool any = false;
    for (double r : rep.residual) any = any || r > rep.floor;
    rep.exponent = any ? loglog_slope(rep.t, rep.residual, rep.floor)
                       : std::numeric_limits<double>::infinity();
    return rep;
}

InsideOutsideReport inside_outside_check(const ModelSpace& m, const DomainSpec& dom,
                                         const WeightSpec& phi,
                                         const std::vector<double>& tladder, const UEval& u,
                                         const std::optional<SdeConfig>& mc_cfg, int qorder) {
    InsideOutsideReport rep;
    rep.a1 = coeff_a(dom, phi.chi, 1, qorder);
    rep.a2 = coeff_a(dom, phi.chi, 2, qorder);

    double scale = 0.0; // functional magnitude, for the quadrature floor
    std::vector<double> diffs(tladder.size()), ses(tladder.size(), 0.0);
    if (mc_cfg) {
        // I phi - I^c phi = ∫_Omega phi - ∫_M u phi, estimated from common paths
        const double phi_inside = band_volume_integral(
            dom, [&](const Point& x) { return phi.chi.value(x); }, 0.0, dom.rho0, qorder, 48);
        HeatContentCurve global = estimate_global_weighted_u(m, dom, phi, tladder, *mc_cfg);
        for (std::size_t i = 0; i < tladder.size(); ++i) {
            diffs[i] = phi_inside - global.points[i].value;
            ses[i] = global.points[i].se;
        }
        scale = std::abs(phi_inside);
    } else {
        for (std::size_t i = 0; i < tladder.size(); ++i) {
            const double in = i_functional(dom, u, phi.chi, tladder[i], 0.0, qorder).value;
            const double out =
                i_functional_complement(dom, u, phi.chi, tladder[i], 0.0, qorder).value;
            diffs[i] = in - out;
            scale = std::max({scale, std::abs(in), std::abs(out)});
        }
    }

    for (std::size_t i = 0; i < tladder.size(); ++i) {
        const double t = tladder[i];
        // Taylor series of the smooth difference: the i-th term carries 1/i!
        const double pred = rep.a1 * t + 0.5 * rep.a2 * t * t;
        rep.t.push_back(t);
        rep.diff.push_back(diffs[i]);
        rep.predicted.push_back(pred);
        rep.residual.push_back(std::abs(diffs[i] - pred));
        rep.se.push_back(ses[i]);
    }
    rep.floor = (mc_cfg ? 1e-9 : 1e-9) * std::max(scale, 1e-30) + 1e-14;
    bool any = false;
    rep.within_noise = true;
    for (std::size_t i = 0; i < rep.residual.size(); ++i) {
        any = any || rep.residual[i] > rep.floor;
        if (rep.residual[i] > std::max(3.0 * rep.se[i], rep.floor)) rep.within_noise = false;
    }
    rep.exponent = any ? loglog_slope(rep.t, rep.residual, rep.floor)
                       : std::numeric_limits<double>::infinity();
    return rep;
}

} // namespace subheat
