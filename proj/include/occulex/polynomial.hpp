#pragma once

#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "numeric.hpp"

namespace occulex {

// Polynomial in x with big-integer coefficients, constant term first.
// Trailing zeros are stripped, so the zero polynomial has no coefficients.
class IntPolynomial {
public:
    IntPolynomial() = default;
    IntPolynomial(std::initializer_list<long long> coeffs) {
        for (long long c : coeffs) c_.emplace_back(c);
        trim();
    }
    explicit IntPolynomial(std::vector<BigInt> coeffs) : c_(std::move(coeffs)) { trim(); }
    static IntPolynomial constant(const BigInt& c) { return IntPolynomial(std::vector<BigInt>{c}); }
    // 1 - lambda x
    static IntPolynomial one_minus(long long lambda) { return IntPolynomial(std::vector<BigInt>{1, -lambda}); }
    static IntPolynomial monomial(const BigInt& c, std::size_t degree) {
        std::vector<BigInt> v(degree + 1, 0);
        v[degree] = c;
        return IntPolynomial(std::move(v));
    }

    bool is_zero() const noexcept { return c_.empty(); }
    // Degree of the zero polynomial is reported as -1.
    long degree() const noexcept { return static_cast<long>(c_.size()) - 1; }
    const std::vector<BigInt>& coeffs() const noexcept { return c_; }
    BigInt coeff(std::size_t i) const { return i < c_.size() ? c_[i] : BigInt(0); }
    const BigInt& leading() const {
        if (c_.empty()) throw invalid_argument("zero polynomial has no leading coefficient");
        return c_.back();
    }

    Rational eval(const Rational& x) const {
        Rational acc = 0;
        for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + Rational(c_[i]);
        return acc;
    }
    double eval(double x) const {
        double acc = 0;
        for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + to_double(Rational(c_[i]));
        return acc;
    }

    IntPolynomial& operator+=(const IntPolynomial& o) {
        if (c_.size() < o.c_.size()) c_.resize(o.c_.size(), 0);
        for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
        trim();
        return *this;
    }
    IntPolynomial& operator-=(const IntPolynomial& o) {
        if (c_.size() < o.c_.size()) c_.resize(o.c_.size(), 0);
        for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
        trim();
        return *this;
    }
    IntPolynomial& operator*=(const BigInt& s) {
        for (auto& c : c_) c *= s;
        trim();
        return *this;
    }
    friend IntPolynomial operator+(IntPolynomial a, const IntPolynomial& b) { return a += b; }
    friend IntPolynomial operator-(IntPolynomial a, const IntPolynomial& b) { return a -= b; }
    friend IntPolynomial operator-(IntPolynomial a) {
        for (auto& c : a.c_) c = -c;
        return a;
    }
    friend IntPolynomial operator*(IntPolynomial a, const BigInt& s) { return a *= s; }
    friend IntPolynomial operator*(const IntPolynomial& a, const IntPolynomial& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<BigInt> out(a.c_.size() + b.c_.size() - 1, 0);
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if (a.c_[i] == 0) continue;
            for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
        }
        return IntPolynomial(std::move(out));
    }
    IntPolynomial& operator*=(const IntPolynomial& o) { return *this = *this * o; }
    friend bool operator==(const IntPolynomial&, const IntPolynomial&) = default;

    IntPolynomial pow(unsigned e) const {
        IntPolynomial result = constant(1);
        IntPolynomial base = *this;
        while (e) {
            if (e & 1U) result *= base;
            base *= base;
            e >>= 1U;
        }
        return result;
    }

    // Divides every coefficient by s; throws unless all divisions are exact.
    IntPolynomial divide_exact(const BigInt& s) const {
        if (s == 0) throw invalid_argument("division by zero");
        std::vector<BigInt> out = c_;
        for (auto& c : out) {
            if (c % s != 0) throw invariant_violation("inexact scalar division");
            c /= s;
        }
        return IntPolynomial(std::move(out));
    }

    // Exact polynomial quotient; std::nullopt-like failure signalled by `ok`.
    std::pair<IntPolynomial, bool> try_divide(const IntPolynomial& d) const {
        if (d.is_zero()) throw invalid_argument("division by zero polynomial");
        if (is_zero()) return {{}, true};
        if (degree() < d.degree()) return {{}, false};
        std::vector<BigInt> rem = c_;
        std::vector<BigInt> q(c_.size() - d.c_.size() + 1, 0);
        const BigInt& lead = d.c_.back();
        for (std::size_t i = q.size(); i-- > 0;) {
            const BigInt& top = rem[i + d.c_.size() - 1];
            if (top == 0) continue;
            if (top % lead != 0) return {{}, false};
            q[i] = top / lead;
            for (std::size_t j = 0; j < d.c_.size(); ++j) rem[i + j] -= q[i] * d.c_[j];
        }
        for (const auto& c : rem)
            if (c != 0) return {{}, false};
        return {IntPolynomial(std::move(q)), true};
    }

    IntPolynomial divide_exact(const IntPolynomial& d) const {
        auto [q, ok] = try_divide(d);
        if (!ok) throw invariant_violation("inexact polynomial division");
        return q;
    }

    // lc(d)^(deg a - deg d + 1) * a mod d, computed without fractions.
    IntPolynomial pseudo_remainder(const IntPolynomial& d) const {
        if (d.is_zero()) throw invalid_argument("pseudo-remainder by zero polynomial");
        IntPolynomial r = *this;
        if (r.degree() < d.degree()) return r;
        const long e = r.degree() - d.degree() + 1;
        const BigInt& lead = d.leading();
        long used = 0;
        while (!r.is_zero() && r.degree() >= d.degree()) {
            const std::size_t shift = static_cast<std::size_t>(r.degree() - d.degree());
            const BigInt top = r.leading();
            r *= lead;
            r -= monomial(top, shift) * d;
            ++used;
        }
        if (used < e) r *= ipow(lead, static_cast<unsigned long long>(e - used));
        return r;
    }

    BigInt content() const {
        BigInt g = 0;
        for (const auto& c : c_) g = boost::multiprecision::gcd(g, c);
        return g;
    }

    IntPolynomial primitive_part() const {
        if (is_zero()) return {};
        BigInt g = content();
        if (leading() < 0) g = -g;
        return divide_exact(g);
    }

    // Human-readable form with the highest power first, e.g. "x^4 - 8x^3 + 1".
    std::string str(const std::string& var = "x") const {
        if (is_zero()) return "0";
        std::string out;
        for (std::size_t i = c_.size(); i-- > 0;) {
            const BigInt& c = c_[i];
            if (c == 0) continue;
            const BigInt mag = c < 0 ? BigInt(-c) : c;
            if (out.empty())
                out += c < 0 ? "-" : "";
            else
                out += c < 0 ? " - " : " + ";
            if (i == 0 || mag != 1) out += mag.str();
            if (i >= 1) out += var;
            if (i >= 2) out += "^" + std::to_string(i);
        }
        return out;
    }

private:
    void trim() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }

    std::vector<BigInt> c_;
};

// Greatest common divisor over Z[x] by the subresultant remainder sequence;
// normalized to a positive leading coefficient.
inline IntPolynomial polynomial_gcd(IntPolynomial a, IntPolynomial b) {
    if (a.is_zero()) return b.primitive_part() * b.content();
    if (b.is_zero()) return a.primitive_part() * a.content();
    if (a.degree() < b.degree()) std::swap(a, b);
    const BigInt d = boost::multiprecision::gcd(a.content(), b.content());
    a = a.primitive_part();
    b = b.primitive_part();
    BigInt g = 1;
    BigInt h = 1;
    while (true) {
        const long delta = a.degree() - b.degree();
        IntPolynomial r = a.pseudo_remainder(b);
        if (r.is_zero()) break;
        if (r.degree() == 0) return IntPolynomial::constant(d);
        a = b;
        b = r.divide_exact(g * ipow(h, static_cast<unsigned long long>(delta)));
        g = a.leading();
        if (delta == 0) {
            // h unchanged
        } else {
            h = ipow(g, static_cast<unsigned long long>(delta)) / ipow(h, static_cast<unsigned long long>(delta - 1));
        }
    }
    return b.primitive_part() * d;
}

} // namespace occulex
