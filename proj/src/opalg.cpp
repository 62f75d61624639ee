#include "subheat/opalg.hpp"

#include <sstream>
#include <stdexcept>

namespace subheat {

OpPoly OpPoly::term(const OpWord& w, const Rational& c) {
    for (char ch : w)
        if (ch != 'D' && ch != 'N') throw std::invalid_argument("op word: alphabet is {D, N}");
    OpPoly p;
    p.set(w, c);
    return p;
}

Rational OpPoly::coefficient(const OpWord& w) const {
    auto it = terms_.find(w);
    return it == terms_.end() ? Rational(0) : it->second;
}

int OpPoly::max_word_length() const {
    int m = 0;
    for (const auto& [w, c] : terms_) m = std::max(m, static_cast<int>(w.size()));
    return m;
}

void OpPoly::set(const OpWord& w, const Rational& c) {
    if (c == 0)
        terms_.erase(w);
    else
        terms_[w] = c;
}

OpPoly& OpPoly::operator+=(const OpPoly& o) {
    for (const auto& [w, c] : o.terms_) set(w, coefficient(w) + c);
    return *this;
}

OpPoly& OpPoly::operator-=(const OpPoly& o) {
    for (const auto& [w, c] : o.terms_) set(w, coefficient(w) - c);
    return *this;
}

OpPoly operator*(const OpPoly& a, const OpPoly& b) {
    OpPoly r;
    for (const auto& [wa, ca] : a.terms_)
        for (const auto& [wb, cb] : b.terms_) r.set(wa + wb, r.coefficient(wa + wb) + ca * cb);
    return r;
}

OpPoly operator*(const Rational& s, const OpPoly& a) {
    OpPoly r;
    if (s == 0) return r;
    for (const auto& [w, c] : a.terms_) r.set(w, s * c);
    return r;
}

namespace {

std::string word_pretty(const OpWord& w) {
    if (w.empty()) return "1";
    std::string out;
    std::size_t i = 0;
    while (i < w.size()) {
        std::size_t j = i;
        while (j < w.size() && w[j] == w[i]) ++j;
        out += w[i];
        if (j - i > 1) out += "^" + std::to_string(j - i);
        i = j;
    }
    return out;
}

std::string rational_pretty(const Rational& q) {
    std::ostringstream os;
    os << q;
    return os.str();
}

} // namespace

std::string OpPoly::pretty() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [w, c] : terms_) {
        const bool neg = c < 0;
        Rational mag = neg ? Rational(-c) : c;
        if (first) {
            if (neg) out += "-";
            first = false;
        } else {
            out += neg ? " - " : " + ";
        }
        if (mag != 1 || w.empty()) {
            out += rational_pretty(mag);
            if (!w.empty()) out += "*";
        }
        if (!w.empty()) out += word_pretty(w);
    }
    return out;
}

OpMatrix operator+(const OpMatrix& a, const OpMatrix& b) {
    OpMatrix r;
    for (int i = 0; i < 4; ++i) r.e[i] = a.e[i] + b.e[i];
    return r;
}

OpMatrix operator*(const OpMatrix& a, const OpMatrix& b) {
    OpMatrix r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r.at(i, j) = a.at(i, 0) * b.at(0, j) + a.at(i, 1) * b.at(1, j);
    return r;
}

bool OpMatrix::is_zero() const {
    for (const OpPoly& p : e)
        if (!p.is_zero()) return false;
    return true;
}

std::pair<OpMatrix, OpMatrix> seed_matrices() {
    const OpPoly D = OpPoly::symbol_D();
    const OpPoly N = OpPoly::symbol_N();
    OpMatrix m10;
    m10.at(0, 0) = D;
    m10.at(0, 1) = D * N;
    m10.at(1, 0) = Rational(-1) * N;
    m10.at(1, 1) = Rational(-1) * (N * N) + D;
    OpMatrix m11;
    m11.at(0, 1) = Rational(-1) * N;
    return {m10, m11};
}

std::vector<std::vector<OpMatrix>> recursion(int k, int cap) {
    if (k < 1) throw std::invalid_argument("recursion: k must be >= 1");
    if (k > cap)
        throw std::invalid_argument("recursion: k exceeds the word-length growth cap (" +
                                    std::to_string(cap) + ")");
    auto [m10, m11] = seed_matrices();
    std::vector<std::vector<OpMatrix>> rows;
    rows.push_back({m10, m11}); // k = 1
    for (int kk = 2; kk <= k; ++kk) {
        std::vector<OpMatrix> row(kk + 1);
        const auto& prev = rows.back();
        for (int j = 0; j <= kk; ++j) {
            OpMatrix acc;
            if (j <= kk - 1) acc = acc + m10 * prev[j];
            if (j >= 1 && j - 1 <= kk - 1) acc = acc + m11 * prev[j - 1];
            row[j] = acc;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::map<std::string, OpPoly> expansion_coefficient_operators() {
    auto [m10, m11] = seed_matrices();
    const OpPoly N = Rational(-1) * m10.at(1, 0);                 // N = -P10
    const OpPoly fourD_minus_N2 = Rational(3) * m10.at(0, 0) + m10.at(1, 1); // 3 Q10 + R10
    const OpPoly fourD_plus_N2 = Rational(5) * m10.at(0, 0) - m10.at(1, 1);  // 5 Q10 - R10
    std::map<std::string, OpPoly> ops;
    ops["N"] = N;
    ops["N^2"] = N * N;
    ops["N^3"] = N * N * N;
    ops["4D-N^2"] = fourD_minus_N2;
    ops["4D+N^2"] = fourD_plus_N2;
    // 6ND - N^3 - 2DN = (3/2) N (4D - N^2) - (1/2) (4D - N^2) N
    ops["6ND-N^3-2DN"] = Rational(3, 2) * (N * fourD_minus_N2) -
                         Rational(1, 2) * (fourD_minus_N2 * N);
    return ops;
}

double evaluate_op(const OpPoly& p, const ModelSpace& m, const DomainSpec& dom,
                   const ScalarField& phi, const Point& x) {
    double acc = 0.0;
    for (const auto& [w, c] : p.terms()) {
        ScalarField f = phi;
        for (auto it = w.rbegin(); it != w.rend(); ++it) {
            if (*it == 'D')
                f = laplacian_field(m, f);
            else
                f = n_operator_field(dom, f);
        }
        acc += static_cast<double>(c) * f.value(x);
    }
    return acc;
}

} // namespace subheat
