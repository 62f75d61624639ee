#pragma once

#include "subheat/asymptotics.hpp"
#include "subheat/pdegrid.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace subheat {

inline constexpr const char* kVersion = "subheat 0.1.0";

/// Sections of key = value pairs; '#' starts a comment. One experiment per file.
struct IniFile {
    std::map<std::string, std::map<std::string, std::string>> sections;

    static IniFile parse(const std::string& text);
    static IniFile load(const std::string& path);

    bool has(const std::string& sec) const { return sections.count(sec) > 0; }
    std::string get(const std::string& sec, const std::string& key,
                    const std::string& dflt = "") const;
    double get_num(const std::string& sec, const std::string& key, double dflt) const;
    long get_int(const std::string& sec, const std::string& key, long dflt) const;
    bool get_bool(const std::string& sec, const std::string& key, bool dflt) const;
};

enum class BackendKind { Mc, Grid, KernelExact };

struct ExperimentConfig {
    std::string name = "experiment";
    std::string model_name;
    std::map<std::string, double> domain_params;
    std::string domain_name;
    std::optional<std::string> weight_kind;
    std::map<std::string, double> weight_params;
    std::string content_kind = "H"; // H | K | Q | Hchi
    BackendKind backend = BackendKind::KernelExact;
    SdeConfig sde;
    GridSpec grid;
    bool grid_has_box = false;
    double t_min = 2.5e-4, t_max = 4e-3;
    int t_count = 12;
    std::vector<double> fit_exponents = {0.0, 0.5, 1.0, 1.5, 2.0};
    bool pin_c0 = true;
    double fit_lo = 0.0, fit_hi = 0.0; // 0: use the t-grid range
    CompareThresholds thresholds;
    std::string out_dir;

    static ExperimentConfig from_ini(const IniFile& ini);
    static ExperimentConfig from_file(const std::string& path);

    std::vector<double> tgrid() const;
    /// resolved copy of every setting, for embedding into results files
    std::map<std::string, std::string> resolved() const;
};

struct ResolvedExperiment {
    const ModelSpace* model = nullptr;
    DomainSpec domain;
    std::optional<WeightSpec> weight;
};

ResolvedExperiment resolve(const ExperimentConfig& cfg);

} // namespace subheat
