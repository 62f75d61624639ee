#include "subheat/runner.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

namespace subheat {

namespace {

using nlohmann::json;

std::string fmt(double v, int prec = 17) {
    std::ostringstream os;
    os.precision(prec);
    os << v;
    return os.str();
}

json curve_to_json(const HeatContentCurve& c) {
    json j;
    j["kind"] = c.kind;
    j["backend"] = c.backend;
    j["meta"] = c.meta;
    j["points"] = json::array();
    for (const CurvePoint& p : c.points)
        j["points"].push_back({{"t", p.t}, {"value", p.value}, {"stderr", p.se}, {"n", p.n}});
    return j;
}

json fit_to_json(const AsymptoticFit& f) {
    json j;
    j["exponents"] = f.exponents;
    j["coefficients"] = f.coef;
    j["stderr"] = f.se;
    j["window"] = {f.t_lo, f.t_hi};
    j["pinned_c0"] = f.pinned_c0;
    j["max_std_residual"] = f.max_std_residual;
    j["tail_slope"] = f.tail_slope;
    return j;
}

void write_json(const json& j, const std::string& path) {
    std::ofstream out(path);
    out << j.dump(2) << "\n";
}

std::string out_path(const ExperimentConfig& cfg, const RunOptions& opt,
                     const std::string& suffix) {
    std::string dir = opt.out_override.value_or(cfg.out_dir);
    if (dir.empty()) dir = ".";
    std::filesystem::create_directories(dir);
    return dir + "/" + cfg.name + suffix;
}

std::vector<double> predictions_for_basis(const std::array<double, 5>& c,
                                          const std::vector<double>& exponents) {
    std::vector<double> out;
    for (double e : exponents) {
        const int idx = static_cast<int>(std::lround(2.0 * e));
        if (idx < 0 || idx > 4) throw std::invalid_argument("fit exponent outside {0,...,2}");
        out.push_back(c[idx]);
    }
    return out;
}

ExperimentConfig with_overrides(ExperimentConfig cfg, const RunOptions& opt) {
    if (opt.seed_override) cfg.sde.seed = *opt.seed_override;
    if (opt.threads_override) cfg.sde.threads = *opt.threads_override;
    return cfg;
}

GridSpec grid_for(const ExperimentConfig& cfg, const ResolvedExperiment& rx) {
    GridSpec g = cfg.grid;
    g.lo[0] = rx.domain.box_lo[0];
    g.hi[0] = rx.domain.box_hi[0];
    g.lo[1] = rx.domain.box_lo[1];
    g.hi[1] = rx.domain.box_hi[1];
    return g;
}

} // namespace

HeatContentCurve run_backend_curve(const ExperimentConfig& cfg0, const ResolvedExperiment& rx,
                                   const RunOptions& opt) {
    const ExperimentConfig cfg = with_overrides(cfg0, opt);
    const std::vector<double> ts = cfg.tgrid();
    HeatContentCurve curve;
    if (cfg.backend == BackendKind::Mc) {
        ContentKind kind = ContentKind::H;
        if (cfg.content_kind == "K") kind = ContentKind::K;
        if (cfg.content_kind == "Q") kind = ContentKind::Q;
        if (cfg.content_kind == "Hchi") kind = ContentKind::Hchi;
        curve = estimate_heat_content(*rx.model, rx.domain, kind, rx.weight, ts, cfg.sde);
    } else if (cfg.backend == BackendKind::Grid) {
        if (cfg.content_kind == "Q")
            throw std::invalid_argument("grid backend computes H/K/Hchi only");
        GridSpec g = grid_for(cfg, rx);
        GridSolution sol;
        curve = solve_heat(*rx.model, rx.domain, g, ts,
                           cfg.content_kind == "Hchi" ? rx.weight : std::nullopt, &sol);
        if (cfg.content_kind == "K") {
            for (CurvePoint& p : curve.points) p.value = rx.domain.volume - p.value;
            curve.kind = "K";
        }
        curve.meta["mass_leakage"] = fmt(grid_mass_leakage(sol));
    } else {
        if (cfg.content_kind == "Q")
            throw std::invalid_argument("kernel-exact backend computes H/K/Hchi only");
        curve.backend = "kernel-exact";
        curve.kind = cfg.content_kind;
        for (double t : ts) {
            double v = 0.0;
            if (cfg.content_kind == "Hchi")
                v = exact_weighted_content(rx.domain, *rx.weight, t);
            else {
                const double h = exact_relative_heat_content(rx.domain, t);
                v = cfg.content_kind == "K" ? rx.domain.volume - h : h;
            }
            curve.points.push_back({t, v, 0.0, 0});
        }
        curve.meta["model"] = rx.model->name;
        curve.meta["domain"] = rx.domain.name;
    }
    return curve;
}

int run_list(std::ostream& out) {
    out << "models:\n";
    for (const std::string& m : model_names()) out << "  " << m << "\n";
    out << "domains (parameters with defaults):\n";
    out << "  interval      euclid1     L=1\n";
    out << "  disc          euclid2     R=1\n";
    out << "  ball          euclid3     R=1\n";
    out << "  heis_slab     heisenberg  L=2 a=1\n";
    out << "  grushin_strip grushin     x0=0 L=1 a=1\n";
    out << "  heis_ball     heisenberg  R=1   (characteristic: detection only)\n";
    out << "weights (all supported in the tubular band):\n";
    out << "  boundary_plateau  inner outer            chi == 1 near the boundary\n";
    out << "  distance_slope    l0 l1 u0 u1            nonzero normal slope at the boundary\n";
    out << "  delta_bump        inner outer            chi = delta * plateau\n";
    out << "  coord_bump        j inner outer          chi = z_j * plateau\n";
    out << "  sector            theta0 width_in width_out   disc only\n";
    out << "  (slab/strip add tangential windows: win wout)\n";
    return kExitOk;
}

int run_predict(const ExperimentConfig& cfg, const RunOptions& opt, std::ostream& out) {
    ResolvedExperiment rx = resolve(cfg);
    const auto c = predict_coefficients(rx.domain, rx.weight);
    const char* provenance[5] = {
        "volume integral of chi over Omega",
        "-(1/sqrt(pi)) * int_dOmega chi dsigma",
        "-(1/2) * int_dOmega g(grad chi, grad delta) dsigma",
        "-(1/(12 sqrt(pi))) int (4 Lap + N^2) chi dsigma + (1/(6 sqrt(pi))) int (N chi) Lap "
        "delta dsigma",
        "-(1/2) * int_dOmega g(grad (Lap chi), grad delta) dsigma"};
    out << "# predicted sqrt(t)-expansion coefficients (" << cfg.model_name << "/"
        << cfg.domain_name << (rx.weight ? ", weighted" : ", chi == 1") << ")\n";
    char buf[64];
    for (int i = 0; i < 5; ++i) {
        std::snprintf(buf, sizeof(buf), "c%d % .6f", i, c[i]);
        out << buf << "   " << provenance[i] << "\n";
    }
    if (opt.out_override || !cfg.out_dir.empty()) {
        json j;
        j["config"] = cfg.resolved();
        j["coefficients"] = c;
        write_json(j, out_path(cfg, opt, "_predict.json"));
    }
    return kExitOk;
}

void write_curve_csv(const HeatContentCurve& curve, const std::string& path) {
    std::ofstream out(path);
    out << "t,value,stderr,n,kind,backend\n";
    for (const CurvePoint& p : curve.points)
        out << fmt(p.t) << "," << fmt(p.value) << "," << fmt(p.se) << "," << p.n << ","
            << curve.kind << "," << curve.backend << "\n";
}

HeatContentCurve read_curve_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open results file: " + path);
    std::string line;
    std::getline(in, line); // header
    HeatContentCurve c;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tok;
        CurvePoint p;
        std::getline(ls, tok, ',');
        p.t = std::stod(tok);
        std::getline(ls, tok, ',');
        p.value = std::stod(tok);
        std::getline(ls, tok, ',');
        p.se = std::stod(tok);
        std::getline(ls, tok, ',');
        p.n = std::stol(tok);
        std::getline(ls, c.kind, ',');
        std::getline(ls, c.backend, ',');
        c.points.push_back(p);
    }
    return c;
}

int run_estimate(const ExperimentConfig& cfg, const RunOptions& opt, std::ostream& out) {
    ResolvedExperiment rx = resolve(cfg);
    HeatContentCurve curve = run_backend_curve(cfg, rx, opt);
    const std::string csv = out_path(cfg, opt, "_curve.csv");
    write_curve_csv(curve, csv);
    json j;
    j["config"] = with_overrides(cfg, opt).resolved();
    j["curve"] = curve_to_json(curve);
    write_json(j, out_path(cfg, opt, "_meta.json"));
    if (opt.emit_plot_data) {
        std::ofstream plot(out_path(cfg, opt, "_plot.dat"));
        for (const CurvePoint& p : curve.points) plot << fmt(p.t) << " " << fmt(p.value) << "\n";
    }
    out << "wrote " << csv << " (" << curve.points.size() << " points, kind " << curve.kind
        << ", backend " << curve.backend << ")\n";
    for (const CurvePoint& p : curve.points)
        out << "  t=" << fmt(p.t, 6) << "  value=" << fmt(p.value, 10) << "  stderr=" << fmt(p.se, 4)
            << "\n";
    return kExitOk;
}

namespace {

AsymptoticFit fit_for(const ExperimentConfig& cfg, const ResolvedExperiment& rx,
                      const HeatContentCurve& curve, double c0) {
    const double lo = cfg.fit_lo > 0.0 ? cfg.fit_lo : cfg.t_min;
    const double hi = cfg.fit_hi > 0.0 ? cfg.fit_hi : cfg.t_max;
    (void)rx;
    return fit_sqrt_t(curve, cfg.fit_exponents, lo, hi, cfg.pin_c0, c0);
}

} // namespace

int run_fit(const ExperimentConfig& cfg, const RunOptions& opt, std::ostream& out,
            const std::string& csv_path) {
    ResolvedExperiment rx = resolve(cfg);
    HeatContentCurve curve =
        csv_path.empty() ? run_backend_curve(cfg, rx, opt) : read_curve_csv(csv_path);
    const auto pred = predict_coefficients(rx.domain, rx.weight);
    AsymptoticFit fit = fit_for(cfg, rx, curve, pred[0]);
    out << "# fitted coefficients (basis t^e)\n";
    for (std::size_t i = 0; i < fit.exponents.size(); ++i)
        out << "  e=" << fmt(fit.exponents[i], 3) << "  coef=" << fmt(fit.coef[i], 10)
            << "  stderr=" << fmt(fit.se[i], 4) << "\n";
    out << "  max standardized residual " << fmt(fit.max_std_residual, 4) << ", tail slope "
        << fmt(fit.tail_slope, 4) << "\n";
    json j;
    j["config"] = with_overrides(cfg, opt).resolved();
    j["fit"] = fit_to_json(fit);
    write_json(j, out_path(cfg, opt, "_fit.json"));
    return kExitOk;
}

int run_verify(const ExperimentConfig& cfg, const RunOptions& opt, std::ostream& out) {
    ResolvedExperiment rx = resolve(cfg);
    auto pred = predict_coefficients(rx.domain, rx.weight);
    for (double& p : pred) p *= opt.perturb_predictions;
    HeatContentCurve curve = run_backend_curve(cfg, rx, opt);
    AsymptoticFit fit = fit_for(cfg, rx, curve, pred[0]);
    CompareThresholds thr = cfg.thresholds;
    const CompareMode mode = cfg.backend == BackendKind::Mc ? CompareMode::Stochastic
                                                            : CompareMode::Deterministic;
    ComparisonReport rep = compare(fit, predictions_for_basis(pred, fit.exponents), thr, mode);
    out << "# verification (" << curve.backend << " backend)\n";
    for (const ComparisonRow& r : rep.rows) {
        out << "  " << r.name << ": predicted=" << fmt(r.predicted, 8)
            << " fitted=" << fmt(r.fitted, 8);
        if (r.se > 0.0) out << " z=" << fmt(r.z, 3);
        out << (r.pass ? "  PASS" : "  FAIL") << "\n";
    }
    json j;
    j["config"] = with_overrides(cfg, opt).resolved();
    j["curve"] = curve_to_json(curve);
    j["fit"] = fit_to_json(fit);
    j["compare"] = json::array();
    for (const ComparisonRow& r : rep.rows)
        j["compare"].push_back({{"name", r.name},
                                {"predicted", r.predicted},
                                {"fitted", r.fitted},
                                {"stderr", r.se},
                                {"z", r.z},
                                {"pass", r.pass}});
    j["all_pass"] = rep.all_pass;
    write_json(j, out_path(cfg, opt, "_verify.json"));
    out << (rep.all_pass ? "VERIFY PASS" : "VERIFY FAIL") << "\n";
    return rep.all_pass ? kExitOk : kExitVerifyFailed;
}

} // namespace subheat
