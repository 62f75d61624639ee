#include "subheat/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace subheat {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// One model's stepping machinery, precomputed once per estimator call. The
// built-in frames get branch-free fast paths; anything else goes through the
// generic polynomial evaluation.
struct Stepper {
    enum class Kind { Euclid, Heisenberg, Grushin, Generic };

    const ModelSpace* m;
    int n;
    int N;
    Kind kind = Kind::Generic;
    bool has_drift = false;
    std::vector<Polynomial> drift;      // sum_i div(X_i) X_i^j
    std::vector<Polynomial> ito_corr;   // sum_i (DX_i X_i)^j, Euler-Maruyama only
    SdeScheme scheme;

    explicit Stepper(const ModelSpace& model, SdeScheme sch) : m(&model), scheme(sch) {
        n = model.n;
        N = model.frame_size();
        if (!model.density_is_one)
            throw std::invalid_argument("mc: non-Lebesgue densities need a drift sampler");
        for (int j = 0; j < n; ++j) {
            Polynomial dj = Polynomial::constant(n, 0.0);
            for (int i = 0; i < N; ++i) dj = dj + (model.frame[i].coord_div * model.frame[i].comp[j]);
            if (!dj.terms.empty()) has_drift = true;
            drift.push_back(dj);
        }
        if (scheme == SdeScheme::EulerMaruyama) {
            for (int j = 0; j < n; ++j) {
                Polynomial cj = Polynomial::constant(n, 0.0);
                for (int i = 0; i < N; ++i)
                    for (int k = 0; k < n; ++k)
                        cj = cj + (model.frame[i].comp[k] * model.frame[i].comp[j].partial(k));
                ito_corr.push_back(cj);
            }
        }
        if (scheme == SdeScheme::StratonovichHeun) {
            if (model.name == "euclid1" || model.name == "euclid2" || model.name == "euclid3")
                kind = Kind::Euclid;
            else if (model.name == "heisenberg")
                kind = Kind::Heisenberg;
            else if (model.name == "grushin")
                kind = Kind::Grushin;
        }
    }

    void noise_at(const Point& x, const double* dW, double* out) const {
        for (int j = 0; j < n; ++j) out[j] = 0.0;
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < n; ++j) out[j] += m->frame[i].comp[j].eval(x) * dW[i];
    }

    void step(Point& x, double h, RngStream& rng) const {
        double dW[8];
        const double sh = std::sqrt(h);
        for (int i = 0; i < N; ++i) dW[i] = sh * rng.next_normal();
        step_with(x, h, dW);
    }

    void step_with(Point& x, double h, const double* dW) const {
        switch (kind) {
            case Kind::Euclid:
                for (int j = 0; j < n; ++j) x[j] += kSqrt2 * dW[j];
                return;
            case Kind::Heisenberg: {
                // X = d_x - (y/2) d_z, Y = d_y + (x/2) d_z; Heun only corrects z
                const double a1z = -0.5 * x[1] * dW[0] + 0.5 * x[0] * dW[1];
                const double xp = x[0] + kSqrt2 * dW[0];
                const double yp = x[1] + kSqrt2 * dW[1];
                const double a2z = -0.5 * yp * dW[0] + 0.5 * xp * dW[1];
                x[0] = xp;
                x[1] = yp;
                x[2] += 0.5 * kSqrt2 * (a1z + a2z);
                return;
            }
            case Kind::Grushin: {
                // X = d_x, Y = x d_y
                const double a1y = x[0] * dW[1];
                const double xp = x[0] + kSqrt2 * dW[0];
                const double a2y = xp * dW[1];
                x[0] = xp;
                x[1] += 0.5 * kSqrt2 * (a1y + a2y);
                return;
            }
            case Kind::Generic: break;
        }
        double a1[4], a2[4];
        noise_at(x, dW, a1);
        if (scheme == SdeScheme::EulerMaruyama) {
            for (int j = 0; j < n; ++j) {
                double b = has_drift ? drift[j].eval(x) : 0.0;
                b += ito_corr[j].eval(x);
                x[j] += kSqrt2 * a1[j] + b * h;
            }
            return;
        }
        // Stratonovich-Heun predictor-corrector
        Point xp = x;
        double b1[4] = {0, 0, 0, 0};
        for (int j = 0; j < n; ++j) {
            if (has_drift) b1[j] = drift[j].eval(x);
            xp[j] += kSqrt2 * a1[j] + b1[j] * h;
        }
        noise_at(xp, dW, a2);
        for (int j = 0; j < n; ++j) {
            const double b2 = has_drift ? drift[j].eval(xp) : 0.0;
            x[j] += 0.5 * kSqrt2 * (a1[j] + a2[j]) + 0.5 * h * (b1[j] + b2);
        }
    }

    /// advance from time a to b with steps <= h_max; optionally kill on exit
    void advance(Point& x, double a, double b, double h_max, RngStream& rng,
                 const DomainSpec* kill_dom, bool* alive) const {
        const double len = b - a;
        if (len <= 0.0) return;
        const int nsub = std::max(1, static_cast<int>(std::ceil(len / h_max)));
        const double h = len / nsub;
        for (int k = 0; k < nsub; ++k) {
            step(x, h, rng);
            if (kill_dom && *alive && !kill_dom->contains(x)) *alive = false;
        }
    }
};

int env_threads() {
    if (const char* s = std::getenv("SUBHEAT_THREADS")) {
        const int v = std::atoi(s);
        if (v > 0) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

constexpr long kChunk = 4096;

// Deterministic (worker-count independent) parallel map-reduce over samples:
// fixed-size chunks are processed by a pool and combined in chunk order.
template <typename ChunkFn>
void run_chunks(long n_samples, int threads, ChunkFn&& fn) {
    const long n_chunks = (n_samples + kChunk - 1) / kChunk;
    if (threads <= 1) {
        for (long c = 0; c < n_chunks; ++c) fn(c, c * kChunk, std::min(n_samples, (c + 1) * kChunk));
        return;
    }
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const long c = next.fetch_add(1);
                if (c >= n_chunks) return;
                fn(c, c * kChunk, std::min(n_samples, (c + 1) * kChunk));
            }
        });
    for (auto& th : pool) th.join();
}

struct Accum {
    std::vector<double> sum, sumsq;
    explicit Accum(std::size_t k) : sum(k, 0.0), sumsq(k, 0.0) {}
    void add(const Accum& o) {
        for (std::size_t i = 0; i < sum.size(); ++i) {
            sum[i] += o.sum[i];
            sumsq[i] += o.sumsq[i];
        }
    }
};

// rejection sampler for x0 ~ |w| restricted to a box (w == nullptr: uniform on
// {F > 0} within the box)
struct InitialSampler {
    const DomainSpec* dom;
    const ScalarField* weight = nullptr; // sample density proportional to |weight|
    bool restrict_inside = true;
    Point lo{}, hi{};
    double bound = 1.0;

    Point draw(RngStream& rng, double* sign) const {
        for (int attempt = 0; attempt < 100000; ++attempt) {
            Point x{};
            for (int i = 0; i < dom->model->n; ++i)
                x[i] = lo[i] + (hi[i] - lo[i]) * rng.next_uniform();
            if (restrict_inside && !dom->contains(x)) continue;
            if (!weight) {
                if (sign) *sign = 1.0;
                return x;
            }
            const double w = weight->value(x);
            if (std::abs(w) <= bound * rng.next_uniform()) continue;
            if (sign) *sign = (w >= 0.0) ? 1.0 : -1.0;
            return x;
        }
        throw std::runtime_error("mc: rejection sampler failed (weight support too thin?)");
    }
};

double weight_bound(const DomainSpec& dom, const WeightSpec& w) {
    double best = 0.0;
    const int g = 24;
    const int n = dom.model->n;
    Point x{};
    std::function<void(int)> rec = [&](int axis) {
        if (axis == n) {
            best = std::max(best, std::abs(w.chi.value(x)));
            return;
        }
        for (int i = 0; i < g; ++i) {
            x[axis] = w.support_lo[axis] +
                      (i + 0.5) / g * (w.support_hi[axis] - w.support_lo[axis]);
            rec(axis + 1);
        }
    };
    rec(0);
    return 1.05 * best + 1e-12;
}

HeatContentCurve run_weighted_indicator_curve(const ModelSpace& m, const DomainSpec& dom,
                                              const InitialSampler& sampler, double scale,
                                              ContentKind kind,
                                              const std::vector<double>& tgrid,
                                              const SdeConfig& cfg) {
    if (tgrid.empty()) throw std::invalid_argument("mc: empty t-grid");
    for (std::size_t i = 0; i + 1 < tgrid.size(); ++i)
        if (!(tgrid[i] < tgrid[i + 1]))
            throw std::invalid_argument("mc: t-grid must be strictly increasing");
    if (tgrid.front() <= 0.0) throw std::invalid_argument("mc: grid values must be positive");
    if (cfg.n_paths < 100) throw std::invalid_argument("mc: need at least 100 paths");
    if (cfg.antithetic && cfg.n_paths % 2 != 0)
        throw std::invalid_argument("mc: antithetic needs an even path count");

    const Stepper stepper(m, cfg.scheme);
    const std::size_t K = tgrid.size();
    const long n_units = cfg.antithetic ? cfg.n_paths / 2 : cfg.n_paths;
    const long n_chunks = (n_units + kChunk - 1) / kChunk;
    std::vector<Accum> per_chunk(n_chunks, Accum(K));

    const int threads = resolve_threads(cfg.threads);
    run_chunks(n_units, threads, [&](long chunk, long begin, long end) {
        Accum acc(K);
        std::vector<double> contrib(K);
        for (long unit = begin; unit < end; ++unit) {
            const int reps = cfg.antithetic ? 2 : 1;
            std::fill(contrib.begin(), contrib.end(), 0.0);
            // one stream per unit: the antithetic partner shares the initial
            // point and mirrors the gaussian increments
            RngStream unit_rng(cfg.seed, static_cast<std::uint64_t>(unit));
            double sign = 1.0;
            const Point x0 = sampler.draw(unit_rng, &sign);
            const RngStream path_start = unit_rng;
            for (int rep = 0; rep < reps; ++rep) {
                bool alive = true;
                double prev = 0.0;
                Point xp = x0;
                RngStream path_rng = path_start;
                const bool mirror = (rep == 1);
                for (std::size_t k = 0; k < K; ++k) {
                    const double h_max = tgrid[k] / cfg.steps_per_t;
                    const double len = tgrid[k] - prev;
                    const int nsub = std::max(1, static_cast<int>(std::ceil(len / h_max)));
                    const double h = len / nsub;
                    for (int st = 0; st < nsub; ++st) {
                        double dW[8];
                        const double sh = std::sqrt(h);
                        for (int i = 0; i < stepper.N; ++i) {
                            double g = path_rng.next_normal();
                            dW[i] = sh * (mirror ? -g : g);
                        }
                        stepper.step_with(xp, h, dW);
                        if (kind == ContentKind::Q && alive && !dom.contains(xp)) alive = false;
                    }
                    prev = tgrid[k];
                    const bool inside = dom.contains(xp);
                    double v = 0.0;
                    switch (kind) {
                        case ContentKind::H: v = inside ? 1.0 : 0.0; break;
                        case ContentKind::K: v = inside ? 0.0 : 1.0; break;
                        case ContentKind::Q: v = alive ? 1.0 : 0.0; break;
                        case ContentKind::Hchi: v = sign * (inside ? 1.0 : 0.0); break;
                    }
                    contrib[k] += v / reps;
                }
            }
            for (std::size_t k = 0; k < K; ++k) {
                acc.sum[k] += contrib[k];
                acc.sumsq[k] += contrib[k] * contrib[k];
            }
        }
        per_chunk[chunk] = std::move(acc);
    });

    Accum total(K);
    for (const Accum& a : per_chunk) total.add(a);

    HeatContentCurve curve;
    curve.backend = "mc";
    curve.points.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        const double mean = total.sum[k] / n_units;
        const double var =
            std::max(0.0, total.sumsq[k] / n_units - mean * mean) / std::max<long>(1, n_units - 1);
        curve.points[k] = {tgrid[k], scale * mean, scale * std::sqrt(var), cfg.n_paths};
    }
    return curve;
}

} // namespace

int resolve_threads(int requested) { return requested > 0 ? requested : env_threads(); }

Point simulate_path(const ModelSpace& m, const Point& x0, double t, const SdeConfig& cfg,
                    RngStream& rng) {
    if (t <= 0.0) throw std::invalid_argument("simulate_path: t must be positive");
    const Stepper stepper(m, cfg.scheme);
    Point x = x0;
    const int nfull = static_cast<int>(t / cfg.dt);
    for (int k = 0; k < nfull; ++k) stepper.step(x, cfg.dt, rng);
    const double rest = t - nfull * cfg.dt;
    if (rest > 1e-15 * t) stepper.step(x, rest, rng);
    return x;
}

Estimate estimate_u(const ModelSpace& m, const DomainSpec& dom, double t, const Point& x,
                    const SdeConfig& cfg) {
    if (t <= 0.0) throw std::invalid_argument("estimate_u: t must be positive");
    const Stepper stepper(m, cfg.scheme);
    const long n = cfg.n_paths;
    const long n_chunks = (n + kChunk - 1) / kChunk;
    std::vector<double> sums(n_chunks, 0.0);
    const double h_max = std::min(cfg.dt, t / cfg.steps_per_t);
    run_chunks(n, resolve_threads(cfg.threads), [&](long chunk, long begin, long end) {
        double s = 0.0;
        for (long p = begin; p < end; ++p) {
            RngStream rng(cfg.seed, static_cast<std::uint64_t>(p));
            Point xp = x;
            stepper.advance(xp, 0.0, t, h_max, rng, nullptr, nullptr);
            if (dom.contains(xp)) s += 1.0;
        }
        sums[chunk] = s;
    });
    double total = 0.0;
    for (double s : sums) total += s;
    const double p = total / n;
    return {p, std::sqrt(std::max(0.0, p * (1.0 - p)) / n), n, "mc"};
}

HeatContentCurve estimate_heat_content(const ModelSpace& m, const DomainSpec& dom,
                                       ContentKind kind, const std::optional<WeightSpec>& chi,
                                       const std::vector<double>& tgrid, const SdeConfig& cfg) {
    InitialSampler sampler;
    sampler.dom = &dom;
    double scale = 0.0;
    HeatContentCurve curve;
    if (kind == ContentKind::Hchi) {
        if (!chi) throw std::invalid_argument("mc: Hchi needs a weight");
        sampler.weight = &chi->chi;
        sampler.lo = chi->support_lo;
        sampler.hi = chi->support_hi;
        sampler.bound = weight_bound(dom, *chi);
        sampler.restrict_inside = true;
        // scale = int_{Omega ∩ supp chi} |chi| domega
        scale = band_volume_integral(
            dom, [&](const Point& x) { return std::abs(chi->chi.value(x)); }, 0.0, dom.rho0, 48,
            48);
        curve = run_weighted_indicator_curve(m, dom, sampler, scale, kind, tgrid, cfg);
        curve.kind = "Hchi";
    } else {
        if (!dom.finite_volume())
            throw std::invalid_argument(
                "mc: H/K/Q need a finite-volume domain (use Hchi with a weight)");
        sampler.lo = dom.box_lo;
        sampler.hi = dom.box_hi;
        sampler.restrict_inside = true;
        scale = dom.volume;
        curve = run_weighted_indicator_curve(m, dom, sampler, scale, kind, tgrid, cfg);
        curve.kind = kind == ContentKind::H ? "H" : (kind == ContentKind::K ? "K" : "Q");
    }
    curve.meta["model"] = m.name;
    curve.meta["domain"] = dom.name;
    curve.meta["scale"] = std::to_string(scale);
    return curve;
}

HeatContentCurve estimate_global_weighted_u(const ModelSpace& m, const DomainSpec& dom,
                                            const WeightSpec& phi,
                                            const std::vector<double>& tgrid,
                                            const SdeConfig& cfg) {
    InitialSampler sampler;
    sampler.dom = &dom;
    sampler.weight = &phi.chi;
    sampler.lo = phi.support_lo;
    sampler.hi = phi.support_hi;
    sampler.bound = weight_bound(dom, phi);
    sampler.restrict_inside = false;
    // scale = int_M |phi| domega over the band
    const double scale = band_volume_integral(
        dom, [&](const Point& x) { return std::abs(phi.chi.value(x)); }, -dom.rho0, dom.rho0, 48,
        48);
    HeatContentCurve curve =
        run_weighted_indicator_curve(m, dom, sampler, scale, ContentKind::Hchi, tgrid, cfg);
    curve.kind = "UGlobal";
    curve.meta["model"] = m.name;
    curve.meta["domain"] = dom.name;
    return curve;
}

} // namespace subheat
