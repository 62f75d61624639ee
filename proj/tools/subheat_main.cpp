#include "subheat/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace subheat;

int main(int argc, char** argv) {
    CLI::App app{"sub-Riemannian relative heat content: estimators, predictions and checks"};
    app.require_subcommand(1);

    std::string config_path, out_dir, csv_path;
    std::uint64_t seed = 0;
    bool seed_set = false, emit_plot = false;
    int threads = 0;
    double perturb = 1.0;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        if (needs_config)
            sub->add_option("--config", config_path, "experiment config file")->required();
        sub->add_option("--seed", seed, "override the RNG seed")->each([&](const std::string&) {
            seed_set = true;
        });
        sub->add_option("--out", out_dir, "output directory override");
        sub->add_option("--threads", threads,
                        "worker threads (default: SUBHEAT_THREADS or hardware)");
    };

    CLI::App* list = app.add_subcommand("list", "print built-in models, domains and weights");
    CLI::App* predict =
        app.add_subcommand("predict", "closed-form expansion coefficients for a config");
    add_common(predict, true);
    CLI::App* estimate = app.add_subcommand("estimate", "run the configured backend over the t-grid");
    add_common(estimate, true);
    estimate->add_flag("--emit-plot-data", emit_plot, "write two-column t/value data");
    CLI::App* fit = app.add_subcommand("fit", "fit the sqrt(t)-basis to a curve");
    add_common(fit, true);
    fit->add_option("--curve", csv_path, "existing results CSV (default: compute inline)");
    CLI::App* verify = app.add_subcommand("verify", "predict + estimate + fit + compare");
    add_common(verify, true);
    verify->add_option("--perturb-predictions", perturb,
                       "scale predictions (negative-control hook)");

    CLI11_PARSE(app, argc, argv);

    RunOptions opt;
    if (seed_set) opt.seed_override = seed;
    if (!out_dir.empty()) opt.out_override = out_dir;
    if (threads > 0) opt.threads_override = threads;
    opt.emit_plot_data = emit_plot;
    opt.perturb_predictions = perturb;

    try {
        if (list->parsed()) return run_list(std::cout);
        ExperimentConfig cfg = ExperimentConfig::from_file(config_path);
        if (predict->parsed()) return run_predict(cfg, opt, std::cout);
        if (estimate->parsed()) return run_estimate(cfg, opt, std::cout);
        if (fit->parsed()) return run_fit(cfg, opt, std::cout, csv_path);
        if (verify->parsed()) return run_verify(cfg, opt, std::cout);
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::domain_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumericalError;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumericalError;
    }
    return kExitConfigError;
}
