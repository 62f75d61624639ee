#pragma once

#include "subheat/domains.hpp"
#include "subheat/mc.hpp" // HeatContentCurve

#include <optional>
#include <string>
#include <vector>

namespace subheat {

enum class GridScheme { Explicit, Implicit };

struct GridSpec {
    // bounding box of the computational domain (before padding)
    double lo[2] = {0.0, 0.0};
    double hi[2] = {1.0, 1.0};
    int res[2] = {256, 1};      // cells per axis
    double padding = 0.5;       // far-field padding added on every side
    GridScheme scheme = GridScheme::Implicit;
    double dt = 0.0;            // explicit: 0 picks the CFL step; implicit: 0 grades t/64
    int substeps = 64;          // implicit sub-steps per grid segment
};

/// Divergence-form discretization of Delta for euclid1, euclid2 and grushin:
/// conservative 3/5-point stencil with per-axis coefficients (grushin:
/// d_x^2 + d_y (x^2 d_y)), Dirichlet 0 on the padded far boundary.
struct GridOperator {
    const ModelSpace* model = nullptr;
    int dim = 1;
    int nx = 0, ny = 1;
    double x0 = 0, y0 = 0; // cell-center origin
    double hx = 0, hy = 0;
    std::vector<double> ay_face; // y-diffusion coefficient on vertical faces, per i (grushin: x_i^2)

    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
    double xc(int i) const { return x0 + (i + 0.5) * hx; }
    double yc(int j) const { return y0 + (j + 0.5) * hy; }

    void apply(const std::vector<double>& u, std::vector<double>& out) const;
    double inner(const std::vector<double>& a, const std::vector<double>& b) const;
    /// largest stable explicit step
    double cfl_dt() const;
};

GridOperator assemble_operator(const ModelSpace& m, const DomainSpec& dom, const GridSpec& grid);

struct GridSolution {
    GridOperator op;
    std::vector<double> cell_fraction; // |cell ∩ Omega| / |cell|
    std::vector<std::vector<double>> snapshots; // u at each requested t
    std::vector<double> tgrid;
    double mass0 = 0.0;
};

/// Evolve u from the cell-averaged indicator of Omega and record H (and
/// optionally H^chi) at the requested times.
HeatContentCurve solve_heat(const ModelSpace& m, const DomainSpec& dom, const GridSpec& grid,
                            const std::vector<double>& tgrid,
                            const std::optional<WeightSpec>& chi = std::nullopt,
                            GridSolution* keep = nullptr);

/// mass Σ u h^n at the end minus at the start (far-boundary leakage)
double grid_mass_leakage(const GridSolution& sol);

/// Flat binary snapshot with a small text header next to it.
void dump_snapshot(const GridSolution& sol, std::size_t index, const std::string& path_base);

} // namespace subheat
