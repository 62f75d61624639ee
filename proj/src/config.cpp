#include "subheat/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace subheat {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

} // namespace

IniFile IniFile::parse(const std::string& text) {
    IniFile ini;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            ini.sections[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        if (section.empty())
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": key outside any [section]");
        ini.sections[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return ini;
}

IniFile IniFile::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string IniFile::get(const std::string& sec, const std::string& key,
                         const std::string& dflt) const {
    auto s = sections.find(sec);
    if (s == sections.end()) return dflt;
    auto k = s->second.find(key);
    return k == s->second.end() ? dflt : k->second;
}

double IniFile::get_num(const std::string& sec, const std::string& key, double dflt) const {
    const std::string v = get(sec, key);
    if (v.empty()) return dflt;
    std::size_t pos = 0;
    const double r = std::stod(v, &pos);
    if (pos != v.size())
        throw std::invalid_argument("config: bad number for " + sec + "." + key + ": " + v);
    return r;
}

long IniFile::get_int(const std::string& sec, const std::string& key, long dflt) const {
    const std::string v = get(sec, key);
    if (v.empty()) return dflt;
    return std::stol(v);
}

bool IniFile::get_bool(const std::string& sec, const std::string& key, bool dflt) const {
    const std::string v = get(sec, key);
    if (v.empty()) return dflt;
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("config: bad boolean for " + sec + "." + key + ": " + v);
}

ExperimentConfig ExperimentConfig::from_ini(const IniFile& ini) {
    ExperimentConfig cfg;
    cfg.name = ini.get("experiment", "name", "experiment");
    cfg.content_kind = ini.get("experiment", "kind", "H");
    if (cfg.content_kind != "H" && cfg.content_kind != "K" && cfg.content_kind != "Q" &&
        cfg.content_kind != "Hchi")
        throw std::invalid_argument("config: experiment.kind must be H|K|Q|Hchi");

    cfg.model_name = ini.get("model", "name");
    if (cfg.model_name.empty()) throw std::invalid_argument("config: [model] name is required");

    cfg.domain_name = ini.get("domain", "name");
    if (cfg.domain_name.empty()) throw std::invalid_argument("config: [domain] name is required");
    if (ini.has("domain"))
        for (const auto& [k, v] : ini.sections.at("domain"))
            if (k != "name") cfg.domain_params[k] = std::stod(v);

    if (ini.has("weight")) {
        cfg.weight_kind = ini.get("weight", "kind", "boundary_plateau");
        for (const auto& [k, v] : ini.sections.at("weight"))
            if (k != "kind") cfg.weight_params[k] = std::stod(v);
        if (cfg.content_kind == "H") cfg.content_kind = "Hchi";
    }

    const std::string backend = ini.get("backend", "kind", "kernel-exact");
    if (backend == "mc")
        cfg.backend = BackendKind::Mc;
    else if (backend == "grid")
        cfg.backend = BackendKind::Grid;
    else if (backend == "kernel-exact")
        cfg.backend = BackendKind::KernelExact;
    else
        throw std::invalid_argument("config: backend.kind must be mc|grid|kernel-exact");

    cfg.sde.n_paths = ini.get_int("mc", "n_paths", 100000);
    cfg.sde.dt = ini.get_num("mc", "dt", 1e-5);
    cfg.sde.steps_per_t = static_cast<int>(ini.get_int("mc", "steps_per_t", 400));
    cfg.sde.seed = static_cast<std::uint64_t>(ini.get_int("mc", "seed", 1));
    cfg.sde.antithetic = ini.get_bool("mc", "antithetic", false);
    cfg.sde.threads = static_cast<int>(ini.get_int("mc", "threads", 0));
    const std::string scheme = ini.get("mc", "scheme", "heun");
    if (scheme == "heun")
        cfg.sde.scheme = SdeScheme::StratonovichHeun;
    else if (scheme == "euler")
        cfg.sde.scheme = SdeScheme::EulerMaruyama;
    else
        throw std::invalid_argument("config: mc.scheme must be heun|euler");

    cfg.grid.res[0] = static_cast<int>(ini.get_int("grid", "res_x", 400));
    cfg.grid.res[1] = static_cast<int>(ini.get_int("grid", "res_y", 400));
    cfg.grid.padding = ini.get_num("grid", "padding", 0.5);
    cfg.grid.substeps = static_cast<int>(ini.get_int("grid", "substeps", 64));
    cfg.grid.dt = ini.get_num("grid", "dt", 0.0);
    const std::string gscheme = ini.get("grid", "scheme", "implicit");
    cfg.grid.scheme = gscheme == "explicit" ? GridScheme::Explicit : GridScheme::Implicit;

    cfg.t_min = ini.get_num("tgrid", "t_min", 2.5e-4);
    cfg.t_max = ini.get_num("tgrid", "t_max", 4e-3);
    cfg.t_count = static_cast<int>(ini.get_int("tgrid", "count", 12));
    if (!(cfg.t_min > 0.0 && cfg.t_max > cfg.t_min && cfg.t_count >= 2))
        throw std::invalid_argument("config: invalid t ladder");

    const std::string exps = ini.get("fit", "exponents", "0,0.5,1,1.5,2");
    cfg.fit_exponents.clear();
    std::istringstream es(exps);
    std::string tok;
    while (std::getline(es, tok, ',')) cfg.fit_exponents.push_back(std::stod(trim(tok)));
    cfg.pin_c0 = ini.get_bool("fit", "pin_c0", true);
    cfg.fit_lo = ini.get_num("fit", "window_lo", 0.0);
    cfg.fit_hi = ini.get_num("fit", "window_hi", 0.0);
    cfg.thresholds.zmax = ini.get_num("fit", "zmax", 3.0);
    cfg.thresholds.rel = ini.get_num("fit", "rel", 1e-3);
    cfg.thresholds.abs_for_zero = ini.get_num("fit", "abs_for_zero", 1e-2);

    cfg.out_dir = ini.get("output", "dir", "");
    return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    return from_ini(IniFile::load(path));
}

std::vector<double> ExperimentConfig::tgrid() const {
    std::vector<double> t(t_count);
    for (int i = 0; i < t_count; ++i)
        t[i] = t_min * std::pow(t_max / t_min, double(i) / (t_count - 1));
    return t;
}

std::map<std::string, std::string> ExperimentConfig::resolved() const {
    std::map<std::string, std::string> m;
    auto num = [](double v) {
        std::ostringstream os;
        os.precision(17);
        os << v;
        return os.str();
    };
    m["experiment.name"] = name;
    m["experiment.kind"] = content_kind;
    m["model.name"] = model_name;
    m["domain.name"] = domain_name;
    for (const auto& [k, v] : domain_params) m["domain." + k] = num(v);
    if (weight_kind) {
        m["weight.kind"] = *weight_kind;
        for (const auto& [k, v] : weight_params) m["weight." + k] = num(v);
    }
    m["backend.kind"] = backend == BackendKind::Mc
                            ? "mc"
                            : (backend == BackendKind::Grid ? "grid" : "kernel-exact");
    m["mc.n_paths"] = std::to_string(sde.n_paths);
    m["mc.dt"] = num(sde.dt);
    m["mc.steps_per_t"] = std::to_string(sde.steps_per_t);
    m["mc.seed"] = std::to_string(sde.seed);
    m["mc.antithetic"] = sde.antithetic ? "true" : "false";
    m["mc.scheme"] = sde.scheme == SdeScheme::StratonovichHeun ? "heun" : "euler";
    m["grid.res_x"] = std::to_string(grid.res[0]);
    m["grid.res_y"] = std::to_string(grid.res[1]);
    m["grid.padding"] = num(grid.padding);
    m["grid.scheme"] = grid.scheme == GridScheme::Explicit ? "explicit" : "implicit";
    m["grid.substeps"] = std::to_string(grid.substeps);
    m["tgrid.t_min"] = num(t_min);
    m["tgrid.t_max"] = num(t_max);
    m["tgrid.count"] = std::to_string(t_count);
    std::string exps;
    for (double e : fit_exponents) exps += (exps.empty() ? "" : ",") + num(e);
    m["fit.exponents"] = exps;
    m["fit.pin_c0"] = pin_c0 ? "true" : "false";
    m["version"] = kVersion;
    return m;
}

ResolvedExperiment resolve(const ExperimentConfig& cfg) {
    ResolvedExperiment r;
    r.model = &model_by_name(cfg.model_name);
    r.domain = make_domain(*r.model, cfg.domain_name, cfg.domain_params);
    if (cfg.weight_kind) r.weight = make_weight(r.domain, *cfg.weight_kind, cfg.weight_params);
    if (cfg.content_kind == "Hchi" && !r.weight)
        throw std::invalid_argument("config: Hchi needs a [weight] section");
    return r;
}

} // namespace subheat
