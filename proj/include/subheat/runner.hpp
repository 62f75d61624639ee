#pragma once

#include "subheat/config.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace subheat {

// exit codes: 0 pass, 1 verification failure, 2 configuration error, 3 numerical failure
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericalError = 3;

struct RunOptions {
    std::optional<std::uint64_t> seed_override;
    std::optional<std::string> out_override;
    std::optional<int> threads_override;
    bool emit_plot_data = false;
    double perturb_predictions = 1.0; // negative-control hook for tests
};

int run_list(std::ostream& out);
int run_predict(const ExperimentConfig& cfg, const RunOptions& opt, std::ostream& out);
int run_estimate(const ExperimentConfig& cfg, const RunOptions& opt, std::ostream& out);
int run_fit(const ExperimentConfig& cfg, const RunOptions& opt, std::ostream& out,
            const std::string& csv_path = "");
int run_verify(const ExperimentConfig& cfg, const RunOptions& opt, std::ostream& out);

/// curve produced by the configured backend (shared by estimate/fit/verify)
HeatContentCurve run_backend_curve(const ExperimentConfig& cfg, const ResolvedExperiment& rx,
                                   const RunOptions& opt);

void write_curve_csv(const HeatContentCurve& curve, const std::string& path);
HeatContentCurve read_curve_csv(const std::string& path);

} // namespace subheat
