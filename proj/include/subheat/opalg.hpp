#pragma once

#include "subheat/domains.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <map>
#include <string>

namespace subheat {

using Rational = boost::multiprecision::cpp_rational;

/// Word over the symbols D (the sub-Laplacian) and N (the boundary operator);
/// leftmost symbol applies last, so "DN" phi = D(N phi).
using OpWord = std::string;

/// graded-lex order: by word length, then lexicographic
struct WordOrder {
    bool operator()(const OpWord& a, const OpWord& b) const {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    }
};

/// Noncommutative polynomial in D, N with exact rational coefficients. Zero
/// coefficients are never stored.
class OpPoly {
  public:
    OpPoly() = default;
    static OpPoly zero() { return {}; }
    static OpPoly term(const OpWord& w, const Rational& c = 1);
    static OpPoly symbol_D() { return term("D"); }
    static OpPoly symbol_N() { return term("N"); }

    bool is_zero() const { return terms_.empty(); }
    const std::map<OpWord, Rational, WordOrder>& terms() const { return terms_; }
    Rational coefficient(const OpWord& w) const;
    int max_word_length() const;

    OpPoly& operator+=(const OpPoly& o);
    OpPoly& operator-=(const OpPoly& o);
    friend OpPoly operator+(OpPoly a, const OpPoly& b) { return a += b; }
    friend OpPoly operator-(OpPoly a, const OpPoly& b) { return a -= b; }
    friend OpPoly operator*(const OpPoly& a, const OpPoly& b); // word concatenation
    friend OpPoly operator*(const Rational& s, const OpPoly& a);
    friend bool operator==(const OpPoly& a, const OpPoly& b) { return a.terms_ == b.terms_; }

    /// canonical text form, graded-lex term order, e.g. "6*ND - N^3 - 2*DN"
    std::string pretty() const;

  private:
    std::map<OpWord, Rational, WordOrder> terms_;
    void set(const OpWord& w, const Rational& c);
};

/// 2x2 matrix of operator polynomials; products keep left-to-right order.
struct OpMatrix {
    std::array<OpPoly, 4> e; // row-major
    OpPoly& at(int r, int c) { return e[2 * r + c]; }
    const OpPoly& at(int r, int c) const { return e[2 * r + c]; }
    friend OpMatrix operator+(const OpMatrix& a, const OpMatrix& b);
    friend OpMatrix operator*(const OpMatrix& a, const OpMatrix& b);
    friend bool operator==(const OpMatrix& a, const OpMatrix& b) { return a.e == b.e; }
    bool is_zero() const;
};

/// M10 = (D, DN; -N, -N^2 + D) and M11 = (0, -N; 0, 0).
std::pair<OpMatrix, OpMatrix> seed_matrices();

/// M_kj = M10 M_{k-1,j} + M11 M_{k-1,j-1}; zero outside 0 <= j <= k. k <= cap (6).
std::vector<std::vector<OpMatrix>> recursion(int k, int cap = 6);

/// The operator combinations of the iterated expansions, assembled from the
/// recursion entries: N, N^2, N^3, 4D - N^2, 4D + N^2, 6ND - N^3 - 2DN.
std::map<std::string, OpPoly> expansion_coefficient_operators();

/// Evaluate an operator polynomial on a field at a point: D -> sub-Laplacian,
/// N -> boundary operator; leftmost symbol applied last.
double evaluate_op(const OpPoly& p, const ModelSpace& m, const DomainSpec& dom,
                   const ScalarField& phi, const Point& x);

} // namespace subheat
