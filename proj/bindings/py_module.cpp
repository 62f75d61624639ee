#include "subheat/asymptotics.hpp"
#include "subheat/opalg.hpp"
#include "subheat/pdegrid.hpp"
#include "subheat/runner.hpp"

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace subheat;

namespace {

Point to_point(const std::vector<double>& v) {
    Point p{};
    for (std::size_t i = 0; i < v.size() && i < 4; ++i) p[i] = v[i];
    return p;
}

struct Experiment {
    ExperimentConfig cfg;
    ResolvedExperiment rx;
};

Experiment make_experiment(const std::string& model, const std::string& domain,
                           const std::map<std::string, double>& domain_params,
                           const std::optional<std::string>& weight,
                           const std::map<std::string, double>& weight_params) {
    Experiment e;
    e.cfg.model_name = model;
    e.cfg.domain_name = domain;
    e.cfg.domain_params = domain_params;
    if (weight) {
        e.cfg.weight_kind = weight;
        e.cfg.weight_params = weight_params;
        e.cfg.content_kind = "Hchi";
    }
    e.rx = resolve(e.cfg);
    return e;
}

SdeConfig sde_from_kwargs(long n_paths, double dt, int steps_per_t, std::uint64_t seed,
                          bool antithetic, int threads) {
    SdeConfig c;
    c.n_paths = n_paths;
    c.dt = dt;
    c.steps_per_t = steps_per_t;
    c.seed = seed;
    c.antithetic = antithetic;
    c.threads = threads;
    return c;
}

py::dict curve_to_dict(const HeatContentCurve& c) {
    py::list t, v, se, n;
    for (const CurvePoint& p : c.points) {
        t.append(p.t);
        v.append(p.value);
        se.append(p.se);
        n.append(p.n);
    }
    py::dict d;
    d["kind"] = c.kind;
    d["backend"] = c.backend;
    d["t"] = t;
    d["value"] = v;
    d["stderr"] = se;
    d["n"] = n;
    return d;
}

} // namespace

PYBIND11_MODULE(_subheat, m) {
    m.doc() = "sub-Riemannian relative heat content: exact kernels, horizontal diffusion, "
              "grid solver, expansion predictions and fits";
    m.attr("__version__") = kVersion;

    m.def("model_names", &model_names);
    m.def("domain_names", &domain_names);

    m.def(
        "predict_coefficients",
        [](const std::string& model, const std::string& domain,
           const std::map<std::string, double>& domain_params,
           const std::optional<std::string>& weight,
           const std::map<std::string, double>& weight_params) {
            Experiment e = make_experiment(model, domain, domain_params, weight, weight_params);
            auto c = predict_coefficients(e.rx.domain, e.rx.weight);
            return std::vector<double>(c.begin(), c.end());
        },
        py::arg("model"), py::arg("domain"), py::arg("domain_params") = std::map<std::string, double>{},
        py::arg("weight") = std::nullopt,
        py::arg("weight_params") = std::map<std::string, double>{},
        "coefficients (c0..c4) of the sqrt(t)-expansion of the (weighted) relative heat content");

    m.def(
        "euclidean_curvature_coefficient",
        [](const std::string& model, const std::string& domain,
           const std::map<std::string, double>& params) {
            Experiment e = make_experiment(model, domain, params, std::nullopt, {});
            return euclidean_curvature_coefficient(e.rx.domain);
        },
        py::arg("model"), py::arg("domain"), py::arg("domain_params") = std::map<std::string, double>{});

    m.def(
        "boundary_perimeter",
        [](const std::string& model, const std::string& domain,
           const std::map<std::string, double>& params) {
            Experiment e = make_experiment(model, domain, params, std::nullopt, {});
            return boundary_integral(e.rx.domain, [](const Point&) { return 1.0; });
        },
        py::arg("model"), py::arg("domain"), py::arg("domain_params") = std::map<std::string, double>{},
        "sigma(boundary) over the declared patches");

    m.def(
        "detect_characteristic",
        [](const std::string& model, const std::string& domain,
           const std::map<std::string, double>& params) {
            Experiment e = make_experiment(model, domain, params, std::nullopt, {});
            CharacteristicReport rep = detect_characteristic(e.rx.domain);
            py::dict d;
            d["min_ratio"] = rep.min_ratio;
            py::list pts;
            for (const Point& p : rep.offending)
                pts.append(std::vector<double>(p.begin(), p.begin() + e.rx.model->n));
            d["offending"] = pts;
            d["clean"] = rep.clean();
            return d;
        },
        py::arg("model"), py::arg("domain"), py::arg("domain_params") = std::map<std::string, double>{});

    m.def(
        "heat_kernel",
        [](const std::string& model, double t, const std::vector<double>& x,
           const std::vector<double>& y) {
            return heat_kernel(model_by_name(model), t, to_point(x), to_point(y));
        },
        py::arg("model"), py::arg("t"), py::arg("x"), py::arg("y"));

    m.def("halfspace_temperature", &halfspace_temperature_exact, py::arg("t"), py::arg("delta"),
          "temperature of {z1 > 0} at signed distance delta (exact erf profile)");
    m.def("neumann_halfline_kernel", &neumann_halfline_kernel, py::arg("t"), py::arg("r"),
          py::arg("s"));

    m.def(
        "exact_u",
        [](const std::string& model, const std::string& domain,
           const std::map<std::string, double>& params, double t, const std::vector<double>& x) {
            Experiment e = make_experiment(model, domain, params, std::nullopt, {});
            return exact_u(e.rx.domain, t, to_point(x));
        },
        py::arg("model"), py::arg("domain"), py::arg("domain_params"), py::arg("t"), py::arg("x"));

    m.def(
        "estimate_u",
        [](const std::string& model, const std::string& domain,
           const std::map<std::string, double>& params, double t, const std::vector<double>& x,
           long n_paths, double dt, int steps_per_t, std::uint64_t seed, bool antithetic,
           int threads) {
            Experiment e = make_experiment(model, domain, params, std::nullopt, {});
            Estimate est = estimate_u(*e.rx.model, e.rx.domain, t, to_point(x),
                                      sde_from_kwargs(n_paths, dt, steps_per_t, seed, antithetic,
                                                      threads));
            py::dict d;
            d["value"] = est.value;
            d["stderr"] = est.se;
            d["n"] = est.n;
            return d;
        },
        py::arg("model"), py::arg("domain"), py::arg("domain_params"), py::arg("t"), py::arg("x"),
        py::arg("n_paths") = 10000, py::arg("dt") = 1e-4, py::arg("steps_per_t") = 400,
        py::arg("seed") = 1, py::arg("antithetic") = false, py::arg("threads") = 0);

    m.def(
        "estimate_heat_content",
        [](const std::string& model, const std::string& domain,
           const std::map<std::string, double>& params, const std::string& kind,
           const std::vector<double>& tgrid, const std::optional<std::string>& weight,
           const std::map<std::string, double>& weight_params, long n_paths, double dt,
           int steps_per_t, std::uint64_t seed, bool antithetic, int threads) {
            Experiment e = make_experiment(model, domain, params, weight, weight_params);
            ContentKind k = ContentKind::H;
            if (kind == "K") k = ContentKind::K;
            else if (kind == "Q") k = ContentKind::Q;
            else if (kind == "Hchi") k = ContentKind::Hchi;
            else if (kind != "H") throw std::invalid_argument("kind must be H|K|Q|Hchi");
            HeatContentCurve c = estimate_heat_content(
                *e.rx.model, e.rx.domain, k, e.rx.weight, tgrid,
                sde_from_kwargs(n_paths, dt, steps_per_t, seed, antithetic, threads));
            return curve_to_dict(c);
        },
        py::arg("model"), py::arg("domain"), py::arg("domain_params"), py::arg("kind"),
        py::arg("tgrid"), py::arg("weight") = std::nullopt,
        py::arg("weight_params") = std::map<std::string, double>{}, py::arg("n_paths") = 10000,
        py::arg("dt") = 1e-4, py::arg("steps_per_t") = 400, py::arg("seed") = 1,
        py::arg("antithetic") = false, py::arg("threads") = 0);

    m.def(
        "exact_heat_content",
        [](const std::string& model, const std::string& domain,
           const std::map<std::string, double>& params, const std::vector<double>& tgrid) {
            Experiment e = make_experiment(model, domain, params, std::nullopt, {});
            std::vector<double> out;
            for (double t : tgrid) out.push_back(exact_relative_heat_content(e.rx.domain, t));
            return out;
        },
        py::arg("model"), py::arg("domain"), py::arg("domain_params"), py::arg("tgrid"));

    m.def(
        "solve_heat_grid",
        [](const std::string& model, const std::string& domain,
           const std::map<std::string, double>& params, const std::vector<double>& tgrid,
           int res_x, int res_y, double padding, const std::string& scheme, int substeps) {
            Experiment e = make_experiment(model, domain, params, std::nullopt, {});
            GridSpec g;
            g.lo[0] = e.rx.domain.box_lo[0];
            g.hi[0] = e.rx.domain.box_hi[0];
            g.lo[1] = e.rx.domain.box_lo[1];
            g.hi[1] = e.rx.domain.box_hi[1];
            g.res[0] = res_x;
            g.res[1] = res_y;
            g.padding = padding;
            g.scheme = scheme == "explicit" ? GridScheme::Explicit : GridScheme::Implicit;
            g.substeps = substeps;
            return curve_to_dict(solve_heat(*e.rx.model, e.rx.domain, g, tgrid));
        },
        py::arg("model"), py::arg("domain"), py::arg("domain_params"), py::arg("tgrid"),
        py::arg("res_x") = 400, py::arg("res_y") = 400, py::arg("padding") = 0.5,
        py::arg("scheme") = "implicit", py::arg("substeps") = 64);

    m.def(
        "fit_sqrt_t",
        [](const std::vector<double>& t, const std::vector<double>& value,
           const std::vector<double>& se, const std::vector<double>& exponents, double lo,
           double hi, bool pin_c0, double c0) {
            HeatContentCurve c;
            c.kind = "H";
            for (std::size_t i = 0; i < t.size(); ++i)
                c.points.push_back({t[i], value[i], se.empty() ? 0.0 : se[i], 1});
            AsymptoticFit f = fit_sqrt_t(c, exponents, lo > 0 ? lo : t.front(),
                                         hi > 0 ? hi : t.back(), pin_c0, c0);
            py::dict d;
            d["exponents"] = f.exponents;
            d["coefficients"] = f.coef;
            d["stderr"] = f.se;
            d["max_std_residual"] = f.max_std_residual;
            d["tail_slope"] = f.tail_slope;
            return d;
        },
        py::arg("t"), py::arg("value"), py::arg("stderr") = std::vector<double>{},
        py::arg("exponents") = std::vector<double>{0, 0.5, 1, 1.5, 2}, py::arg("window_lo") = 0.0,
        py::arg("window_hi") = 0.0, py::arg("pin_c0") = false, py::arg("c0") = 0.0);

    m.def("opalg_seed_matrices", [] {
        auto [m10, m11] = seed_matrices();
        py::list a, b;
        for (int i = 0; i < 4; ++i) {
            a.append(m10.e[i].pretty());
            b.append(m11.e[i].pretty());
        }
        return py::make_tuple(a, b);
    });

    m.def(
        "opalg_recursion",
        [](int k) {
            auto rows = recursion(k);
            py::list out;
            for (const auto& row : rows) {
                py::list rj;
                for (const OpMatrix& mat : row) {
                    py::list entries;
                    for (const OpPoly& p : mat.e) entries.append(p.pretty());
                    rj.append(entries);
                }
                out.append(rj);
            }
            return out;
        },
        py::arg("k"));

    m.def("opalg_expansion_operators", [] {
        std::map<std::string, std::string> out;
        for (const auto& [name, p] : expansion_coefficient_operators()) out[name] = p.pretty();
        return out;
    });

    m.def(
        "run_config",
        [](const std::string& text, const std::string& command, const std::string& out_dir) {
            ExperimentConfig cfg = ExperimentConfig::from_ini(IniFile::parse(text));
            RunOptions opt;
            if (!out_dir.empty()) opt.out_override = out_dir;
            std::ostringstream os;
            int rc = 0;
            if (command == "predict")
                rc = run_predict(cfg, opt, os);
            else if (command == "estimate")
                rc = run_estimate(cfg, opt, os);
            else if (command == "fit")
                rc = run_fit(cfg, opt, os);
            else if (command == "verify")
                rc = run_verify(cfg, opt, os);
            else
                throw std::invalid_argument("command must be predict|estimate|fit|verify");
            return py::make_tuple(rc, os.str());
        },
        py::arg("config_text"), py::arg("command"), py::arg("out_dir") = "");
}
