#include "subheat/pdegrid.hpp"

#include "subheat/gauss.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace subheat {

namespace {

bool grid_model(const ModelSpace& m) {
    return m.name == "euclid1" || m.name == "euclid2" || m.name == "grushin";
}

// overlap of [a, b] with [c, d]
double overlap(double a, double b, double c, double d) {
    return std::max(0.0, std::min(b, d) - std::max(a, c));
}

// area fraction of a cell inside the disc of radius R, by exact x-splitting at
// the points where the circle crosses the cell's horizontal edges
double disc_cell_fraction(double R, double x1, double x2, double y1, double y2) {
    auto half_width = [&](double x) {
        const double q = R * R - x * x;
        return q <= 0.0 ? 0.0 : std::sqrt(q);
    };
    std::vector<double> cuts = {x1, x2};
    auto push = [&](double c) {
        if (c > x1 + 1e-15 && c < x2 - 1e-15) cuts.push_back(c);
    };
    push(-R);
    push(R);
    for (double y : {y1, y2}) {
        const double q = R * R - y * y;
        if (q > 0.0) {
            push(std::sqrt(q));
            push(-std::sqrt(q));
        }
    }
    std::sort(cuts.begin(), cuts.end());
    double area = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        auto f = [&](double x) {
            const double w = half_width(x);
            return overlap(y1, y2, -w, w);
        };
        area += integrate(f, cuts[k], cuts[k + 1], 16);
    }
    return area / ((x2 - x1) * (y2 - y1));
}

struct Tridiag {
    // solve (1 + 2c) v_i - c v_{i-1} - c v_{i+1} = rhs_i with Dirichlet 0 ends
    std::vector<double> cp, dp;
    void solve(const double* rhs, double c, int n, double* out) {
        cp.resize(n);
        dp.resize(n);
        const double b = 1.0 + 2.0 * c;
        cp[0] = -c / b;
        dp[0] = rhs[0] / b;
        for (int i = 1; i < n; ++i) {
            const double m = b + c * cp[i - 1];
            cp[i] = -c / m;
            dp[i] = (rhs[i] + c * dp[i - 1]) / m;
        }
        out[n - 1] = dp[n - 1];
        for (int i = n - 2; i >= 0; --i) out[i] = dp[i] - cp[i] * out[i + 1];
    }
};

} // namespace

void GridOperator::apply(const std::vector<double>& u, std::vector<double>& out) const {
    out.assign(u.size(), 0.0);
    const double ix2 = 1.0 / (hx * hx);
    const double iy2 = dim == 2 ? 1.0 / (hy * hy) : 0.0;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double c = u[idx(i, j)];
            const double xl = i > 0 ? u[idx(i - 1, j)] : 0.0;
            const double xr = i + 1 < nx ? u[idx(i + 1, j)] : 0.0;
            double v = (xl - 2.0 * c + xr) * ix2;
            if (dim == 2) {
                const double yl = j > 0 ? u[idx(i, j - 1)] : 0.0;
                const double yr = j + 1 < ny ? u[idx(i, j + 1)] : 0.0;
                v += ay_face[i] * (yl - 2.0 * c + yr) * iy2;
            }
            out[idx(i, j)] = v;
        }
    }
}

double GridOperator::inner(const std::vector<double>& a, const std::vector<double>& b) const {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s * hx * (dim == 2 ? hy : 1.0);
}

double GridOperator::cfl_dt() const {
    double rate = 1.0 / (hx * hx);
    if (dim == 2) {
        double amax = 0.0;
        for (double a : ay_face) amax = std::max(amax, a);
        rate += amax / (hy * hy);
    }
    return 0.5 / rate;
}

GridOperator assemble_operator(const ModelSpace& m, const DomainSpec& dom, const GridSpec& grid) {
    if (!grid_model(m))
        throw std::invalid_argument("pdegrid: supported models are euclid1, euclid2, grushin");
    (void)dom;
    GridOperator op;
    op.model = &m;
    op.dim = m.n;
    op.nx = grid.res[0];
    op.ny = op.dim == 2 ? grid.res[1] : 1;
    const double pad = grid.padding;
    op.x0 = grid.lo[0] - pad;
    op.hx = (grid.hi[0] - grid.lo[0] + 2 * pad) / op.nx;
    if (op.dim == 2) {
        op.y0 = grid.lo[1] - pad;
        op.hy = (grid.hi[1] - grid.lo[1] + 2 * pad) / op.ny;
        op.ay_face.resize(op.nx);
        for (int i = 0; i < op.nx; ++i) {
            const double x = op.xc(i);
            op.ay_face[i] = (m.name == "grushin") ? x * x : 1.0;
        }
    }
    return op;
}

namespace {

std::vector<double> cell_fractions(const DomainSpec& dom, const GridOperator& op) {
    std::vector<double> frac(static_cast<std::size_t>(op.nx) * op.ny, 0.0);
    if (dom.name == "interval") {
        const double L = dom.params.at("L");
        for (int i = 0; i < op.nx; ++i) {
            const double a = op.x0 + i * op.hx, b = a + op.hx;
            frac[i] = overlap(a, b, 0.0, L) / op.hx;
        }
        return frac;
    }
    if (dom.name == "disc") {
        const double R = dom.params.at("R");
        for (int j = 0; j < op.ny; ++j)
            for (int i = 0; i < op.nx; ++i) {
                const double a = op.x0 + i * op.hx, b = a + op.hx;
                const double c = op.y0 + j * op.hy, d = c + op.hy;
                // skip cells entirely inside/outside by corner radius
                const double rmin = std::hypot(std::max(0.0, std::max(a, -b)),
                                               std::max(0.0, std::max(c, -d)));
                const double rmax = std::hypot(std::max(std::abs(a), std::abs(b)),
                                               std::max(std::abs(c), std::abs(d)));
                if (rmax <= R)
                    frac[op.idx(i, j)] = 1.0;
                else if (rmin >= R)
                    frac[op.idx(i, j)] = 0.0;
                else
                    frac[op.idx(i, j)] = disc_cell_fraction(R, a, b, c, d);
            }
        return frac;
    }
    if (dom.name == "grushin_strip") {
        const double x0 = dom.params.at("x0"), L = dom.params.at("L");
        for (int j = 0; j < op.ny; ++j)
            for (int i = 0; i < op.nx; ++i) {
                const double a = op.x0 + i * op.hx, b = a + op.hx;
                frac[op.idx(i, j)] = overlap(a, b, x0, x0 + L) / op.hx;
            }
        return frac;
    }
    throw std::invalid_argument("pdegrid: no cell-fraction rule for domain " + dom.name);
}

void implicit_sweep_x(const GridOperator& op, std::vector<double>& u, double dt,
                      Tridiag& solver, std::vector<double>& row) {
    const double c = dt / (op.hx * op.hx);
    row.resize(op.nx);
    std::vector<double> out(op.nx);
    for (int j = 0; j < op.ny; ++j) {
        for (int i = 0; i < op.nx; ++i) row[i] = u[op.idx(i, j)];
        solver.solve(row.data(), c, op.nx, out.data());
        for (int i = 0; i < op.nx; ++i) u[op.idx(i, j)] = out[i];
    }
}

void implicit_sweep_y(const GridOperator& op, std::vector<double>& u, double dt,
                      Tridiag& solver, std::vector<double>& col) {
    col.resize(op.ny);
    std::vector<double> out(op.ny);
    for (int i = 0; i < op.nx; ++i) {
        const double c = dt * op.ay_face[i] / (op.hy * op.hy);
        for (int j = 0; j < op.ny; ++j) col[j] = u[op.idx(i, j)];
        solver.solve(col.data(), c, op.ny, out.data());
        for (int j = 0; j < op.ny; ++j) u[op.idx(i, j)] = out[j];
    }
}

void advance(const GridOperator& op, const GridSpec& grid, std::vector<double>& u, double from,
             double to, Tridiag& solver, std::vector<double>& scratch,
             std::vector<double>& scratch2) {
    const double len = to - from;
    if (len <= 0.0) return;
    if (grid.scheme == GridScheme::Explicit) {
        const double stable = op.cfl_dt();
        double dt = grid.dt > 0.0 ? grid.dt : 0.9 * stable;
        if (dt > stable)
            throw std::invalid_argument("pdegrid: explicit step violates the CFL bound; use dt <= " +
                                        std::to_string(stable));
        const int steps = std::max(1, static_cast<int>(std::ceil(len / dt)));
        const double h = len / steps;
        for (int s = 0; s < steps; ++s) {
            op.apply(u, scratch);
            for (std::size_t k = 0; k < u.size(); ++k) u[k] += h * scratch[k];
        }
        return;
    }
    // backward Euler, Lie splitting in 2d; graded sub-steps when starting at 0
    std::vector<double> times;
    if (from == 0.0) {
        const int n = grid.substeps;
        for (int j = 1; j <= n; ++j) times.push_back(to * (double(j) / n) * (double(j) / n));
    } else {
        const int n = grid.substeps;
        for (int j = 1; j <= n; ++j) times.push_back(from + len * double(j) / n);
    }
    double prev = from;
    for (double tk : times) {
        const double dt = tk - prev;
        prev = tk;
        if (dt <= 0.0) continue;
        implicit_sweep_x(op, u, dt, solver, scratch);
        if (op.dim == 2) implicit_sweep_y(op, u, dt, solver, scratch2);
    }
}

} // namespace

HeatContentCurve solve_heat(const ModelSpace& m, const DomainSpec& dom, const GridSpec& grid,
                            const std::vector<double>& tgrid,
                            const std::optional<WeightSpec>& chi, GridSolution* keep) {
    if (tgrid.empty()) throw std::invalid_argument("pdegrid: empty t-grid");
    for (std::size_t i = 0; i + 1 < tgrid.size(); ++i)
        if (!(tgrid[i] < tgrid[i + 1]))
            throw std::invalid_argument("pdegrid: t-grid must be strictly increasing");
    GridOperator op = assemble_operator(m, dom, grid);

    // padding must provide room for the heat to decay before the Dirichlet wall
    const double tmax = tgrid.back();
    double speed = 1.0;
    if (m.name == "grushin")
        speed = std::max(1.0, std::max(std::abs(grid.lo[0]), std::abs(grid.hi[0])));
    if (grid.padding < 6.0 * std::sqrt(tmax) * speed)
        throw std::invalid_argument("pdegrid: padding below 6 sqrt(t_max) x frame norm");

    GridSolution sol;
    sol.op = op;
    sol.cell_fraction = cell_fractions(dom, op);
    std::vector<double> u = sol.cell_fraction;
    sol.mass0 = op.inner(u, std::vector<double>(u.size(), 1.0));

    Tridiag solver;
    std::vector<double> s1, s2;
    HeatContentCurve curve;
    curve.kind = chi ? "Hchi" : "H";
    curve.backend = "grid";
    double prev = 0.0;
    const double cellvol = op.hx * (op.dim == 2 ? op.hy : 1.0);
    for (double tk : tgrid) {
        advance(op, grid, u, prev, tk, solver, s1, s2);
        prev = tk;
        double h = 0.0;
        for (int j = 0; j < op.ny; ++j)
            for (int i = 0; i < op.nx; ++i) {
                const std::size_t k = op.idx(i, j);
                if (sol.cell_fraction[k] == 0.0) continue;
                double w = sol.cell_fraction[k];
                if (chi) {
                    Point x{op.xc(i), op.dim == 2 ? op.yc(j) : 0.0, 0, 0};
                    w *= chi->chi.value(x);
                }
                h += u[k] * w;
            }
        curve.points.push_back({tk, h * cellvol, 0.0, static_cast<long>(u.size())});
        if (keep) {
            sol.snapshots.push_back(u);
            sol.tgrid.push_back(tk);
        }
    }
    if (keep) {
        // final mass for the leakage report
        keep->op = op;
        keep->cell_fraction = sol.cell_fraction;
        keep->snapshots = std::move(sol.snapshots);
        keep->tgrid = sol.tgrid;
        keep->mass0 = sol.mass0;
    }
    curve.meta["model"] = m.name;
    curve.meta["domain"] = dom.name;
    curve.meta["scheme"] = grid.scheme == GridScheme::Explicit ? "explicit" : "implicit";
    return curve;
}

double grid_mass_leakage(const GridSolution& sol) {
    if (sol.snapshots.empty()) return 0.0;
    const std::vector<double> ones(sol.snapshots.back().size(), 1.0);
    const double mass_end = sol.op.inner(sol.snapshots.back(), ones);
    return std::abs(sol.mass0 - mass_end);
}

void dump_snapshot(const GridSolution& sol, std::size_t index, const std::string& path_base) {
    if (index >= sol.snapshots.size()) throw std::invalid_argument("dump_snapshot: bad index");
    std::ofstream bin(path_base + ".f64", std::ios::binary);
    const auto& u = sol.snapshots[index];
    bin.write(reinterpret_cast<const char*>(u.data()),
              static_cast<std::streamsize>(u.size() * sizeof(double)));
    std::ofstream hdr(path_base + ".hdr");
    hdr << "dims " << sol.op.nx << " " << sol.op.ny << "\n"
        << "origin " << sol.op.x0 << " " << sol.op.y0 << "\n"
        << "spacing " << sol.op.hx << " " << sol.op.hy << "\n"
        << "t " << sol.tgrid[index] << "\n"
        << "layout row-major j*nx+i, float64 little-endian\n";
}

} // namespace subheat
