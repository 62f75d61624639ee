#include "subheat/models.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace subheat {

VecField::VecField(int n_, std::vector<Polynomial> c) : n(n_), comp(std::move(c)) {
    coord_div = Polynomial::constant(n, 0.0);
    for (int j = 0; j < n; ++j) coord_div = coord_div + comp[j].partial(j);
}

Point VecField::eval(const Point& x) const {
    Point v{};
    for (int j = 0; j < n; ++j) v[j] = comp[j].eval(x);
    return v;
}

std::vector<Jet> VecField::jets(const Point& x, int order) const {
    std::vector<Jet> js;
    js.reserve(n);
    for (int j = 0; j < n; ++j) js.push_back(comp[j].jet(x, order));
    return js;
}

Jet VecField::apply(const Jet& f) const {
    return directional_derivative(jets(f.center, std::max(0, f.order - 1)), f);
}

namespace {

ModelSpace make_euclid(int n) {
    ModelSpace m;
    m.name = "euclid" + std::to_string(n);
    m.n = n;
    for (int i = 0; i < n; ++i) {
        std::vector<Polynomial> c;
        for (int j = 0; j < n; ++j)
            c.push_back(j == i ? Polynomial::constant(n, 1.0) : Polynomial::constant(n, 0.0));
        m.frame.emplace_back(n, std::move(c));
    }
    m.density = field_constant(n, 1.0, "lebesgue");
    m.weights.assign(n, 1);
    m.Q = n;
    m.carnot = true;
    return m;
}

ModelSpace make_heisenberg() {
    ModelSpace m;
    m.name = "heisenberg";
    m.n = 3;
    // X = d_x - (y/2) d_z
    {
        std::vector<Polynomial> c(3, Polynomial::constant(3, 0.0));
        c[0] = Polynomial::constant(3, 1.0);
        c[2] = Polynomial::coordinate(3, 1, -0.5);
        m.frame.emplace_back(3, std::move(c));
    }
    // Y = d_y + (x/2) d_z
    {
        std::vector<Polynomial> c(3, Polynomial::constant(3, 0.0));
        c[1] = Polynomial::constant(3, 1.0);
        c[2] = Polynomial::coordinate(3, 0, 0.5);
        m.frame.emplace_back(3, std::move(c));
    }
    m.density = field_constant(3, 1.0, "lebesgue");
    m.weights = {1, 1, 2};
    m.Q = 4;
    m.carnot = true;
    return m;
}

ModelSpace make_grushin() {
    ModelSpace m;
    m.name = "grushin";
    m.n = 2;
    // X = d_x
    {
        std::vector<Polynomial> c(2, Polynomial::constant(2, 0.0));
        c[0] = Polynomial::constant(2, 1.0);
        m.frame.emplace_back(2, std::move(c));
    }
    // Y = x d_y
    {
        std::vector<Polynomial> c(2, Polynomial::constant(2, 0.0));
        c[1] = Polynomial::coordinate(2, 0, 1.0);
        m.frame.emplace_back(2, std::move(c));
    }
    m.density = field_constant(2, 1.0, "lebesgue");
    m.weights = {1, 2}; // at the singular set; rank-varying, not a Carnot group globally
    m.Q = 3;
    m.carnot = false;
    return m;
}

} // namespace

const ModelSpace& model_by_name(const std::string& name) {
    static const std::map<std::string, ModelSpace> models = [] {
        std::map<std::string, ModelSpace> ms;
        ms.emplace("euclid1", make_euclid(1));
        ms.emplace("euclid2", make_euclid(2));
        ms.emplace("euclid3", make_euclid(3));
        ms.emplace("heisenberg", make_heisenberg());
        ms.emplace("grushin", make_grushin());
        return ms;
    }();
    auto it = models.find(name);
    if (it == models.end()) throw std::invalid_argument("unknown model: " + name);
    return it->second;
}

std::vector<std::string> model_names() {
    return {"euclid1", "euclid2", "euclid3", "heisenberg", "grushin"};
}

double TangentVector::norm() const { return std::sqrt(norm_sq); }

TangentVector horizontal_gradient(const ModelSpace& m, const ScalarField& f, const Point& x) {
    TangentVector v;
    v.base = x;
    Jet fj = f.jet(x, 1);
    v.horiz.resize(m.frame_size());
    for (int i = 0; i < m.frame_size(); ++i) {
        const double ui = m.frame[i].apply(fj).value();
        v.horiz[i] = ui;
        const Point xi = m.frame[i].eval(x);
        for (int j = 0; j < m.n; ++j) v.components[j] += ui * xi[j];
        v.norm_sq += ui * ui;
    }
    return v;
}

TangentVector tangent_from_components(const ModelSpace& m, const Point& x, const Point& v) {
    // minimal-norm u solving A u = v, A = [X_1(x) ... X_N(x)]: u = A^T (A A^T)^{-1} v,
    // solved by Gaussian elimination on the n x n Gram matrix with full pivoting.
    const int n = m.n, N = m.frame_size();
    std::vector<Point> cols(N);
    for (int i = 0; i < N; ++i) cols[i] = m.frame[i].eval(x);
    double G[4][4] = {};
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            for (int i = 0; i < N; ++i) G[r][c] += cols[i][r] * cols[i][c];
    double rhs[4];
    for (int r = 0; r < n; ++r) rhs[r] = v[r];
    // solve G y = v
    int perm[4] = {0, 1, 2, 3};
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int r = k + 1; r < n; ++r)
            if (std::abs(G[perm[r]][k]) > std::abs(G[perm[piv]][k])) piv = r;
        std::swap(perm[k], perm[piv]);
        const double pv = G[perm[k]][k];
        if (std::abs(pv) < 1e-18)
            throw std::domain_error("tangent_from_components: frame Gram matrix is singular here");
        for (int r = k + 1; r < n; ++r) {
            const double f = G[perm[r]][k] / pv;
            for (int c = k; c < n; ++c) G[perm[r]][c] -= f * G[perm[k]][c];
            rhs[perm[r]] -= f * rhs[perm[k]];
        }
    }
    double y[4] = {};
    for (int k = n - 1; k >= 0; --k) {
        double s = rhs[perm[k]];
        for (int c = k + 1; c < n; ++c) s -= G[perm[k]][c] * y[c];
        y[k] = s / G[perm[k]][k];
    }
    TangentVector t;
    t.base = x;
    t.components = v;
    t.horiz.resize(N);
    for (int i = 0; i < N; ++i) {
        double ui = 0.0;
        for (int r = 0; r < n; ++r) ui += cols[i][r] * y[r];
        t.horiz[i] = ui;
        t.norm_sq += ui * ui;
    }
    return t;
}

Jet frame_divergence_jet(const ModelSpace& m, int i, const Point& x, int order) {
    Jet div = m.frame[i].coord_div.jet(x, order);
    if (!m.density_is_one) {
        // X_i(log rho) = X_i(rho) / rho
        Jet rho = m.density.jet(x, order + 1);
        Jet xrho = m.frame[i].apply(rho);
        div = div + xrho * jet_compose_univariate(UnivariateFn::Reciprocal, rho.truncated(order));
    }
    return div;
}

ScalarField laplacian_field(const ModelSpace& m, const ScalarField& f) {
    const ModelSpace* mp = &m;
    auto fe = f.eval;
    return {"lap(" + f.name + ")", [mp, fe](const Point& x, int order) {
                Jet fj = fe(x, order + 2);
                Jet acc(mp->n, order, x);
                for (int i = 0; i < mp->frame_size(); ++i) {
                    Jet xf = mp->frame[i].apply(fj);       // order + 1
                    Jet xxf = mp->frame[i].apply(xf);      // order
                    acc = acc + xxf +
                          frame_divergence_jet(*mp, i, x, order) * xf.truncated(order);
                }
                return acc;
            }};
}

double sublaplacian(const ModelSpace& m, const ScalarField& f, const Point& x, int k) {
    if (k < 1 || k > 2) throw std::invalid_argument("sublaplacian: k must be 1 or 2");
    ScalarField g = laplacian_field(m, f);
    if (k == 2) g = laplacian_field(m, g);
    return g.value(x);
}

Point dilate(const ModelSpace& m, double eps, const Point& z) {
    if (!m.carnot) throw std::invalid_argument("dilate: model is not dilation-homogeneous");
    if (eps == 0.0) throw std::invalid_argument("dilate: eps must be nonzero");
    Point r{};
    for (int i = 0; i < m.n; ++i) {
        double s = 1.0;
        for (int k = 0; k < m.weights[i]; ++k) s *= eps;
        r[i] = s * z[i];
    }
    return r;
}

} // namespace subheat
