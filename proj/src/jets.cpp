#include "subheat/jets.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace subheat {

namespace {

int total(const MultiIndex& a) { return a[0] + a[1] + a[2] + a[3]; }

const double kBinom[kMaxJetOrder + 1][kMaxJetOrder + 1] = {
    {1, 0, 0, 0, 0, 0, 0},      {1, 1, 0, 0, 0, 0, 0},      {1, 2, 1, 0, 0, 0, 0},
    {1, 3, 3, 1, 0, 0, 0},      {1, 4, 6, 4, 1, 0, 0},      {1, 5, 10, 10, 5, 1, 0},
    {1, 6, 15, 20, 15, 6, 1}};

double binom_mi(const MultiIndex& a, const MultiIndex& b) {
    return kBinom[a[0]][b[0]] * kBinom[a[1]][b[1]] * kBinom[a[2]][b[2]] * kBinom[a[3]][b[3]];
}

void check_compatible(const Jet& a, const Jet& b) {
    if (a.n != b.n) throw std::invalid_argument("jet: dimension mismatch");
    for (int i = 0; i < a.n; ++i)
        if (a.center[i] != b.center[i]) throw std::invalid_argument("jet: center mismatch");
}

} // namespace

int JetTable::find(const MultiIndex& a) const {
    int code = 0;
    for (int i = n - 1; i >= 0; --i) {
        if (a[i] > order) return -1;
        code = code * (order + 1) + a[i];
    }
    return pos[code];
}

const JetTable& JetTable::get(int n, int order) {
    if (n < 1 || n > kMaxDim) throw std::invalid_argument("jet: dimension must be 1..4");
    if (order < 0 || order > kMaxJetOrder) throw std::invalid_argument("jet: order must be 0..6");
    static std::map<std::pair<int, int>, JetTable> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(n, order);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    JetTable t;
    t.n = n;
    t.order = order;
    for (int deg = 0; deg <= order; ++deg) {
        MultiIndex a{0, 0, 0, 0};
        // enumerate all a with |a| = deg over n vars, lexicographically
        std::function<void(int, int)> rec = [&](int i, int rem) {
            if (i == n - 1) {
                a[i] = static_cast<std::uint8_t>(rem);
                t.idx.push_back(a);
                a[i] = 0;
                return;
            }
            for (int v = rem; v >= 0; --v) {
                a[i] = static_cast<std::uint8_t>(v);
                rec(i + 1, rem - v);
            }
            a[i] = 0;
        };
        rec(0, deg);
    }
    int span = 1;
    for (int i = 0; i < n; ++i) span *= (order + 1);
    t.pos.assign(span, -1);
    for (std::size_t k = 0; k < t.idx.size(); ++k) {
        int code = 0;
        for (int i = n - 1; i >= 0; --i) code = code * (order + 1) + t.idx[k][i];
        t.pos[code] = static_cast<int>(k);
    }
    return cache.emplace(key, std::move(t)).first->second;
}

Jet::Jet(int n_, int order_, const Point& c) : n(n_), order(order_), center(c) {
    coeff.assign(JetTable::get(n, order).idx.size(), 0.0);
}

double Jet::d(const MultiIndex& a) const {
    if (total(a) > order) return 0.0;
    const int k = table().find(a);
    return k < 0 ? 0.0 : coeff[k];
}

double Jet::d(int i) const {
    MultiIndex a{0, 0, 0, 0};
    a[i] = 1;
    return d(a);
}

double Jet::d2(int i, int j) const {
    MultiIndex a{0, 0, 0, 0};
    a[i] += 1;
    a[j] += 1;
    return d(a);
}

Jet Jet::truncated(int new_order) const {
    if (new_order >= order) return *this;
    Jet r(n, new_order, center);
    const JetTable& rt = r.table();
    const JetTable& st = table();
    for (std::size_t k = 0; k < rt.idx.size(); ++k) r.coeff[k] = coeff[st.find(rt.idx[k])];
    return r;
}

Jet jet_constant(int n, int order, const Point& c, double value) {
    Jet r(n, order, c);
    r.coeff[0] = value;
    return r;
}

Jet jet_coordinate(int n, int order, const Point& c, int i) {
    Jet r(n, order, c);
    r.coeff[0] = c[i];
    if (order >= 1) {
        MultiIndex a{0, 0, 0, 0};
        a[i] = 1;
        r.coeff[r.table().find(a)] = 1.0;
    }
    return r;
}

Jet operator+(const Jet& a, const Jet& b) {
    check_compatible(a, b);
    const int m = std::min(a.order, b.order);
    Jet r = a.truncated(m);
    Jet bb = b.truncated(m);
    for (std::size_t k = 0; k < r.coeff.size(); ++k) r.coeff[k] += bb.coeff[k];
    return r;
}

Jet operator-(const Jet& a, const Jet& b) { return a + (-1.0) * b; }

Jet operator*(double s, const Jet& a) {
    Jet r = a;
    for (double& c : r.coeff) c *= s;
    return r;
}

Jet operator+(const Jet& a, double s) {
    Jet r = a;
    r.coeff[0] += s;
    return r;
}

Jet operator-(const Jet& a, double s) { return a + (-s); }

Jet operator*(const Jet& a, const Jet& b) {
    check_compatible(a, b);
    const int m = std::min(a.order, b.order);
    Jet fa = a.truncated(m), fb = b.truncated(m);
    Jet r(a.n, m, a.center);
    const JetTable& t = r.table();
    // d^g(fg) = sum_{b <= g} C(g,b) d^b f d^(g-b) g
    for (std::size_t kg = 0; kg < t.idx.size(); ++kg) {
        const MultiIndex g = t.idx[kg];
        double acc = 0.0;
        MultiIndex b{0, 0, 0, 0};
        for (b[0] = 0; b[0] <= g[0]; ++b[0])
            for (b[1] = 0; b[1] <= g[1]; ++b[1])
                for (b[2] = 0; b[2] <= g[2]; ++b[2])
                    for (b[3] = 0; b[3] <= g[3]; ++b[3]) {
                        MultiIndex gb{static_cast<std::uint8_t>(g[0] - b[0]),
                                      static_cast<std::uint8_t>(g[1] - b[1]),
                                      static_cast<std::uint8_t>(g[2] - b[2]),
                                      static_cast<std::uint8_t>(g[3] - b[3])};
                        acc += binom_mi(g, b) * fa.coeff[t.find(b)] * fb.coeff[t.find(gb)];
                    }
        r.coeff[kg] = acc;
    }
    return r;
}

Jet jet_partial(const Jet& f, int j) {
    if (f.order == 0) throw std::invalid_argument("jet_partial: cannot differentiate a 0-jet");
    Jet r(f.n, f.order - 1, f.center);
    const JetTable& rt = r.table();
    const JetTable& ft = f.table();
    for (std::size_t k = 0; k < rt.idx.size(); ++k) {
        MultiIndex a = rt.idx[k];
        a[j] += 1;
        r.coeff[k] = f.coeff[ft.find(a)];
    }
    return r;
}

Jet jet_compose_series(const std::vector<double>& derivs, const Jet& a) {
    const int m = a.order;
    if (static_cast<int>(derivs.size()) < m + 1)
        throw std::invalid_argument("jet_compose_series: not enough derivatives");
    Jet h = a; // a - a0
    h.coeff[0] = 0.0;
    // Horner in h with Taylor coefficients derivs[k]/k!
    double fact = 1.0;
    std::vector<double> c(m + 1);
    for (int k = 0; k <= m; ++k) {
        if (k > 0) fact *= k;
        c[k] = derivs[k] / fact;
    }
    Jet r = jet_constant(a.n, m, a.center, c[m]);
    for (int k = m - 1; k >= 0; --k) r = r * h + c[k];
    return r;
}

Jet jet_compose_univariate(UnivariateFn f, const Jet& a, double p) {
    const int m = a.order;
    const double v = a.value();
    std::vector<double> d(m + 1, 0.0);
    switch (f) {
        case UnivariateFn::Sqrt: {
            if (v <= 0.0) throw std::domain_error("jet sqrt: value must be positive");
            // f^(k) = (1/2)(1/2 - 1)...(1/2 - k + 1) v^(1/2 - k)
            double coeff = 1.0;
            for (int k = 0; k <= m; ++k) {
                d[k] = coeff * std::pow(v, 0.5 - k);
                coeff *= (0.5 - k);
            }
            break;
        }
        case UnivariateFn::Reciprocal: {
            if (v == 0.0) throw std::domain_error("jet reciprocal: value is zero");
            double coeff = 1.0; // (-1)^k k!
            for (int k = 0; k <= m; ++k) {
                d[k] = coeff * std::pow(v, -1.0 - k);
                coeff *= -(k + 1.0);
            }
            break;
        }
        case UnivariateFn::Exp: {
            const double ev = std::exp(v);
            for (int k = 0; k <= m; ++k) d[k] = ev;
            break;
        }
        case UnivariateFn::Erf: {
            d[0] = std::erf(v);
            // erf^(k) = 2/sqrt(pi) * (-1)^(k-1) H_{k-1}(v) e^{-v^2}, Hermite (physicists')
            const double g = 2.0 / std::sqrt(std::numbers::pi) * std::exp(-v * v);
            double hm1 = 0.0, h0 = 1.0; // H_{-1} (unused), H_0
            double sign = 1.0;
            for (int k = 1; k <= m; ++k) {
                d[k] = sign * h0 * g;
                const double h1 = 2.0 * v * h0 - 2.0 * (k - 1) * hm1;
                hm1 = h0;
                h0 = h1;
                sign = -sign;
            }
            break;
        }
        case UnivariateFn::Sin: {
            const double s = std::sin(v), cc = std::cos(v);
            const double cyc[4] = {s, cc, -s, -cc};
            for (int k = 0; k <= m; ++k) d[k] = cyc[k % 4];
            break;
        }
        case UnivariateFn::Cos: {
            const double s = std::sin(v), cc = std::cos(v);
            const double cyc[4] = {cc, -s, -cc, s};
            for (int k = 0; k <= m; ++k) d[k] = cyc[k % 4];
            break;
        }
        case UnivariateFn::Power: {
            const bool integer_p = (p == std::floor(p));
            if (!integer_p && v <= 0.0)
                throw std::domain_error("jet power: non-integer exponent needs positive value");
            double coeff = 1.0, e = p;
            for (int k = 0; k <= m; ++k) {
                double pw;
                if (v == 0.0)
                    pw = (e == 0.0) ? 1.0 : (e > 0.0 ? 0.0 : throw std::domain_error(
                                                               "jet power: negative power of zero"));
                else
                    pw = std::pow(v, e);
                d[k] = coeff * pw;
                coeff *= e;
                e -= 1.0;
            }
            break;
        }
    }
    return jet_compose_series(d, a);
}

Jet directional_derivative(const std::vector<Jet>& components, const Jet& f) {
    if (f.order == 0) throw std::invalid_argument("directional_derivative: f has order 0");
    if (static_cast<int>(components.size()) < f.n)
        throw std::invalid_argument("directional_derivative: missing components");
    Jet r(f.n, f.order - 1, f.center);
    for (int j = 0; j < f.n; ++j) {
        Jet cj = components[j];
        if (cj.n != f.n) throw std::invalid_argument("directional_derivative: dimension mismatch");
        r = r + cj.truncated(f.order - 1) * jet_partial(f, j);
    }
    return r;
}

Jet smooth_transition_jet(const Jet& u) {
    const double v = u.value();
    if (v <= 0.0) return jet_constant(u.n, u.order, u.center, 0.0);
    if (v >= 1.0) return jet_constant(u.n, u.order, u.center, 1.0);
    // S(u) = B(u) / (B(u) + B(1-u)), B(u) = exp(-1/u)
    auto B = [](const Jet& w) {
        return jet_compose_univariate(UnivariateFn::Exp,
                                      (-1.0) * jet_compose_univariate(UnivariateFn::Reciprocal, w));
    };
    Jet bu = B(u);
    Jet bv = B((-1.0) * u + 1.0);
    return bu * jet_compose_univariate(UnivariateFn::Reciprocal, bu + bv);
}

// ---------------------------------------------------------------------------

double Polynomial::eval(const Point& x) const {
    double acc = 0.0;
    for (const Term& t : terms) {
        double m = t.c;
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < t.e[i]; ++k) m *= x[i];
        acc += m;
    }
    return acc;
}

Jet Polynomial::jet(const Point& center, int order) const {
    Jet r(n, order, center);
    const JetTable& tab = r.table();
    for (std::size_t k = 0; k < tab.idx.size(); ++k) {
        const MultiIndex a = tab.idx[k];
        double acc = 0.0;
        for (const Term& t : terms) {
            double m = t.c;
            bool ok = true;
            for (int i = 0; i < n && ok; ++i) {
                if (a[i] > t.e[i]) {
                    ok = false;
                    break;
                }
                for (int q = 0; q < a[i]; ++q) m *= (t.e[i] - q); // falling factorial
                for (int q = 0; q < t.e[i] - a[i]; ++q) m *= center[i];
            }
            if (ok) acc += m;
        }
        r.coeff[k] = acc;
    }
    return r;
}

Polynomial Polynomial::partial(int j) const {
    Polynomial r;
    r.n = n;
    for (const Term& t : terms) {
        if (t.e[j] == 0) continue;
        Term s = t;
        s.c *= t.e[j];
        s.e[j] -= 1;
        r.terms.push_back(s);
    }
    return r;
}

Polynomial Polynomial::constant(int n, double c) {
    Polynomial p;
    p.n = n;
    if (c != 0.0) p.terms.push_back({c, {0, 0, 0, 0}});
    return p;
}

Polynomial Polynomial::coordinate(int n, int i, double scale) {
    Polynomial p;
    p.n = n;
    MultiIndex e{0, 0, 0, 0};
    e[i] = 1;
    p.terms.push_back({scale, e});
    return p;
}

Polynomial& Polynomial::add_term(double c, std::initializer_list<int> exps) {
    Term t;
    t.c = c;
    t.e = {0, 0, 0, 0};
    int i = 0;
    for (int e : exps) t.e[i++] = static_cast<std::uint8_t>(e);
    terms.push_back(t);
    return *this;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    Polynomial r = a;
    r.terms.insert(r.terms.end(), b.terms.begin(), b.terms.end());
    return r;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial r;
    r.n = a.n;
    for (const auto& ta : a.terms)
        for (const auto& tb : b.terms) {
            Polynomial::Term t;
            t.c = ta.c * tb.c;
            for (int i = 0; i < 4; ++i) t.e[i] = static_cast<std::uint8_t>(ta.e[i] + tb.e[i]);
            r.terms.push_back(t);
        }
    return r;
}

// ---------------------------------------------------------------------------

ScalarField field_constant(int n, double c, const std::string& name) {
    return {name, [n, c](const Point& x, int order) { return jet_constant(n, order, x, c); }};
}

ScalarField field_coordinate(int n, int i) {
    return {"z" + std::to_string(i + 1),
            [n, i](const Point& x, int order) { return jet_coordinate(n, order, x, i); }};
}

ScalarField field_poly(const Polynomial& p, const std::string& name) {
    return {name, [p](const Point& x, int order) { return p.jet(x, order); }};
}

ScalarField field_sum(const ScalarField& a, const ScalarField& b) {
    auto ea = a.eval, eb = b.eval;
    return {a.name + "+" + b.name,
            [ea, eb](const Point& x, int order) { return ea(x, order) + eb(x, order); }};
}

ScalarField field_product(const ScalarField& a, const ScalarField& b) {
    auto ea = a.eval, eb = b.eval;
    return {a.name + "*" + b.name,
            [ea, eb](const Point& x, int order) { return ea(x, order) * eb(x, order); }};
}

ScalarField field_scale(double s, const ScalarField& a) {
    auto ea = a.eval;
    return {a.name, [ea, s](const Point& x, int order) { return s * ea(x, order); }};
}

ScalarField field_compose(UnivariateFn f, const ScalarField& a, double p) {
    auto ea = a.eval;
    return {"f(" + a.name + ")", [ea, f, p](const Point& x, int order) {
                return jet_compose_univariate(f, ea(x, order), p);
            }};
}

} // namespace subheat
