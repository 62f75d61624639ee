#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace subheat {

using Point = std::array<double, 4>; // coordinates beyond the model dimension are 0

constexpr int kMaxDim = 4;
constexpr int kMaxJetOrder = 6;

using MultiIndex = std::array<std::uint8_t, 4>;

/// Enumeration of multi-indices with |alpha| <= order in n variables
/// (graded-lex), with dense position lookup. Shared, immutable.
struct JetTable {
    int n = 0;
    int order = 0;
    std::vector<MultiIndex> idx;   // graded-lex
    std::vector<int> pos;          // dense (order+1)^n lookup, -1 if |alpha| > order
    int find(const MultiIndex& a) const;
    static const JetTable& get(int n, int order);
};

/// Truncated Taylor expansion of a scalar field at a point. Coefficients are
/// stored as partial-derivative values (not Taylor-normalized), so operator
/// assembly reads them off directly.
struct Jet {
    int n = 1;
    int order = 0;
    Point center{};
    std::vector<double> coeff; // indexed per JetTable::get(n, order)

    Jet() = default;
    Jet(int n_, int order_, const Point& c);

    const JetTable& table() const { return JetTable::get(n, order); }
    double value() const { return coeff[0]; }
    /// partial-derivative value for multi-index a (0 if |a| > order)
    double d(const MultiIndex& a) const;
    double d(int i) const;            // first derivative in coordinate i
    double d2(int i, int j) const;    // second derivative

    /// same jet truncated to a lower order
    Jet truncated(int new_order) const;
};

Jet jet_constant(int n, int order, const Point& c, double value);
Jet jet_coordinate(int n, int order, const Point& c, int i);

Jet operator+(const Jet& a, const Jet& b);
Jet operator-(const Jet& a, const Jet& b);
Jet operator*(const Jet& a, const Jet& b); // Leibniz, truncated at min order
Jet operator*(double s, const Jet& a);
Jet operator+(const Jet& a, double s);
Jet operator-(const Jet& a, double s);

/// d/dx_j, order drops by one
Jet jet_partial(const Jet& f, int j);

enum class UnivariateFn { Sqrt, Reciprocal, Exp, Erf, Sin, Cos, Power };

/// Truncated composition f(a); exact to the jet order. Power takes exponent p.
Jet jet_compose_univariate(UnivariateFn f, const Jet& a, double p = 0.0);

/// Composition against explicit derivative values derivs[k] = f^(k)(a.value()).
Jet jet_compose_series(const std::vector<double>& derivs, const Jet& a);

/// X(f) for a vector field given by component jets (x-components of X at the
/// same center). Result order = order(f) - 1.
Jet directional_derivative(const std::vector<Jet>& components, const Jet& f);

/// C^inf transition: 0 for u <= 0, 1 for u >= 1, strictly between otherwise;
/// exact jets everywhere (all derivatives vanish at the seams).
Jet smooth_transition_jet(const Jet& u);

// ---------------------------------------------------------------------------

/// Sparse polynomial in up to 4 variables; frame components and level
/// functions are polynomials so their jets are exact.
struct Polynomial {
    struct Term {
        double c;
        MultiIndex e;
    };
    int n = 1;
    std::vector<Term> terms;

    double eval(const Point& x) const;
    Jet jet(const Point& center, int order) const;
    Polynomial partial(int j) const;

    static Polynomial constant(int n, double c);
    static Polynomial coordinate(int n, int i, double scale = 1.0);
    Polynomial& add_term(double c, std::initializer_list<int> exps);
};

Polynomial operator+(const Polynomial& a, const Polynomial& b);
Polynomial operator*(const Polynomial& a, const Polynomial& b);

// ---------------------------------------------------------------------------

/// A scalar field is anything that can produce a jet at a query point.
struct ScalarField {
    std::string name;
    std::function<Jet(const Point&, int order)> eval;

    Jet jet(const Point& x, int order) const { return eval(x, order); }
    double value(const Point& x) const { return eval(x, 0).value(); }
};

ScalarField field_constant(int n, double c, const std::string& name = "const");
ScalarField field_coordinate(int n, int i);
ScalarField field_poly(const Polynomial& p, const std::string& name = "poly");
ScalarField field_sum(const ScalarField& a, const ScalarField& b);
ScalarField field_product(const ScalarField& a, const ScalarField& b);
ScalarField field_scale(double s, const ScalarField& a);
ScalarField field_compose(UnivariateFn f, const ScalarField& a, double p = 0.0);

} // namespace subheat
