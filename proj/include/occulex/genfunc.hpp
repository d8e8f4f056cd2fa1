#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "counting.hpp"
#include "polynomial.hpp"

namespace occulex {

// numerator / (prod (1 - lambda x)^m * residual). Loop-count factors are kept
// apart from the rest of the denominator so poles can be read off exactly.
class RationalFunction {
public:
    RationalFunction() : residual_(IntPolynomial::constant(1)) {}
    RationalFunction(IntPolynomial numerator, std::map<long long, int> factors,
                     IntPolynomial residual = IntPolynomial::constant(1))
        : num_(std::move(numerator)), residual_(std::move(residual)) {
        if (residual_.is_zero()) throw invalid_argument("zero denominator");
        for (auto [lambda, m] : factors)
            if (m > 0 && lambda != 0) factors_[lambda] += m;
        reduce();
    }

    const IntPolynomial& numerator() const noexcept { return num_; }
    const std::map<long long, int>& factors() const noexcept { return factors_; }
    const IntPolynomial& residual() const noexcept { return residual_; }

    IntPolynomial denominator() const {
        IntPolynomial d = residual_;
        for (auto [lambda, m] : factors_) d *= IntPolynomial::one_minus(lambda).pow(static_cast<unsigned>(m));
        return d;
    }

    Rational eval(const Rational& x) const {
        const Rational den = denominator().eval(x);
        if (den == 0) throw invalid_argument("evaluation at a pole");
        return num_.eval(x) / den;
    }

    // Text "num / den"; factored form keeps the (1 - lambda x)^m blocks.
    std::string str(bool factored = true) const {
        std::string out = "(" + num_.str() + ") / ";
        if (!factored) return out + "(" + denominator().str() + ")";
        std::string den;
        for (auto it = factors_.rbegin(); it != factors_.rend(); ++it) {
            den += "(1 - " + (it->first == 1 ? std::string() : std::to_string(it->first)) + "x)";
            if (it->second > 1) den += "^" + std::to_string(it->second);
        }
        if (residual_.degree() > 0) den += "(" + residual_.str() + ")";
        if (den.empty()) den = "1";
        return out + den;
    }

    friend bool operator==(const RationalFunction& a, const RationalFunction& b) {
        // Canonical after reduction; compare cross products to be safe.
        return a.num_ * b.denominator() == b.num_ * a.denominator();
    }

    friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) {
        std::map<long long, int> lcm = a.factors_;
        for (auto [lambda, m] : b.factors_) lcm[lambda] = std::max(lcm[lambda], m);
        auto cofactor = [&](const RationalFunction& f, const IntPolynomial& other_residual) {
            IntPolynomial c = other_residual;
            for (auto [lambda, m] : lcm) {
                auto it = f.factors_.find(lambda);
                const int have = it == f.factors_.end() ? 0 : it->second;
                c *= IntPolynomial::one_minus(lambda).pow(static_cast<unsigned>(m - have));
            }
            return c;
        };
        return RationalFunction(a.num_ * cofactor(a, b.residual_) - b.num_ * cofactor(b, a.residual_), lcm,
                                a.residual_ * b.residual_);
    }

private:
    void reduce() {
        for (auto& [lambda, m] : factors_) {
            const auto f = IntPolynomial::one_minus(lambda);
            while (m > 0) {
                auto [q, ok] = num_.try_divide(f);
                if (!ok) break;
                num_ = std::move(q);
                --m;
            }
        }
        std::erase_if(factors_, [](const auto& kv) { return kv.second == 0; });
        if (residual_.degree() > 0) {
            const auto g = polynomial_gcd(num_, residual_);
            if (g.degree() > 0) {
                num_ = num_.divide_exact(g);
                residual_ = residual_.divide_exact(g);
            }
        }
        // Residual constant part folds into the numerator when it divides.
        if (residual_.degree() == 0) {
            const BigInt c = residual_.leading();
            if (num_.is_zero() || num_.content() % c == 0) {
                num_ = num_.is_zero() ? num_ : num_.divide_exact(c);
                residual_ = IntPolynomial::constant(1);
            }
        }
        if (residual_.coeff(0) < 0) {
            num_ = -num_;
            residual_ = -residual_;
        }
        if (num_.is_zero()) {
            factors_.clear();
            residual_ = IntPolynomial::constant(1);
        }
    }

    IntPolynomial num_;
    std::map<long long, int> factors_;
    IntPolynomial residual_;
};

// Determinant over Z[x] by fraction-free (Bareiss) elimination with row swaps.
inline IntPolynomial bareiss_determinant(std::vector<std::vector<IntPolynomial>> m) {
    const std::size_t n = m.size();
    if (n == 0) return IntPolynomial::constant(1);
    IntPolynomial prev = IntPolynomial::constant(1);
    bool negate = false;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k].is_zero()) {
            std::size_t swap = k + 1;
            while (swap < n && m[swap][k].is_zero()) ++swap;
            if (swap == n) return {};
            std::swap(m[k], m[swap]);
            negate = !negate;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                IntPolynomial t = m[k][k] * m[i][j];
                if (!m[i][k].is_zero()) t -= m[i][k] * m[k][j];
                m[i][j] = t.divide_exact(prev);
            }
            m[i][k] = IntPolynomial();
        }
        prev = m[k][k];
    }
    return negate ? -m[n - 1][n - 1] : m[n - 1][n - 1];
}

// Bareiss elimination specialised to upper Hessenberg matrices. Rows below
// the next one still hold their original entries scaled by the running
// pivot, so each step updates a single row and the exact divisions cancel.
inline IntPolynomial hessenberg_determinant(const std::vector<std::vector<IntPolynomial>>& a) {
    const std::size_t n = a.size();
    if (n == 0) return IntPolynomial::constant(1);
    for (std::size_t i = 2; i < n; ++i)
        for (std::size_t j = 0; j + 1 < i; ++j)
            if (!a[i][j].is_zero()) throw invalid_argument("matrix is not upper Hessenberg");
    std::vector<IntPolynomial> row = a[0];
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const IntPolynomial pivot = row[k];
        const IntPolynomial& sub = a[k + 1][k];
        std::vector<IntPolynomial> next(n);
        for (std::size_t j = k + 1; j < n; ++j) {
            next[j] = pivot * a[k + 1][j];
            if (!sub.is_zero()) next[j] -= sub * row[j];
        }
        row = std::move(next);
    }
    return row[n - 1];
}

// B(x) is I - xT with its first column replaced by ones.
inline std::vector<std::vector<IntPolynomial>> numerator_matrix(const TransitionMatrix& t) {
    const std::size_t p = t.size();
    std::vector<std::vector<IntPolynomial>> b(p, std::vector<IntPolynomial>(p));
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) {
            if (j == 0)
                b[i][j] = IntPolynomial::constant(1);
            else
                b[i][j] = IntPolynomial(std::vector<BigInt>{i == j ? 1 : 0, -t(i, j)});
        }
    return b;
}

// G_r(x) = sum_n g_r(k, n) x^n = det B(x) / prod (1 - lambda_i x).
// Moving the column of ones to the end leaves B upper Hessenberg (the
// transition matrix is triangular), at the cost of a sign (-1)^(p-1).
inline RationalFunction generating_function(const Automaton& a) {
    const auto t = transition_matrix(a);
    auto b = numerator_matrix(t);
    for (auto& row : b) std::rotate(row.begin(), row.begin() + 1, row.end());
    IntPolynomial det = hessenberg_determinant(b);
    if (t.size() % 2 == 0) det = -det;
    std::map<long long, int> factors;
    for (int lambda : t.loops) ++factors[lambda];
    return RationalFunction(std::move(det), factors);
}

// F_r = G_r - G_{r-1}, with G_{-1} = 0.
inline RationalFunction f_generating_function(const Pattern& v, int r, int k, const BuildOptions& opt = {}) {
    auto g = generating_function(build_automaton(v, r, k, opt));
    if (r == 0) return g;
    return g - generating_function(build_automaton(v, r - 1, k, opt));
}

// Taylor coefficients 0..n_max from the denominator recurrence.
inline std::vector<BigInt> series_coefficients(const RationalFunction& rf, std::size_t n_max) {
    const auto den = rf.denominator();
    const BigInt d0 = den.coeff(0);
    if (d0 == 0) throw invalid_argument("rational function has a pole at 0");
    std::vector<BigInt> out(n_max + 1, 0);
    for (std::size_t n = 0; n <= n_max; ++n) {
        BigInt acc = rf.numerator().coeff(n);
        const std::size_t top = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(0L, den.degree())));
        for (std::size_t i = 1; i <= top; ++i) acc -= den.coeffs()[i] * out[n - i];
        if (acc % d0 != 0) throw invariant_violation("series coefficient is not an integer");
        out[n] = acc / d0;
    }
    return out;
}

struct PoleReport {
    long long base = 0; // reciprocal of the smallest pole
    int order = 0;
    bool matches_d_minus_1 = false;
    bool residual_unanalysed = false; // denominator has a factor other than (1 - lambda x)
};

inline void require_nontrivial(int d) {
    if (d <= 1) throw unsupported_pattern("asymptotics need at least two distinct pattern letters");
}

inline PoleReport pole_analysis(const RationalFunction& rf, int d) {
    require_nontrivial(d);
    PoleReport rep;
    rep.residual_unanalysed = rf.residual().degree() > 0;
    if (!rf.factors().empty()) {
        rep.base = rf.factors().rbegin()->first;
        rep.order = rf.factors().rbegin()->second;
    }
    rep.matches_d_minus_1 = rep.base == d - 1;
    return rep;
}

// Largest number of states with d - 1 loops on a path from the initial state.
inline int compute_Mr(const Automaton& a) {
    const int d = a.pattern().distinct();
    require_nontrivial(d);
    const std::size_t p = a.size();
    std::vector<int> best(p, -1);
    best[0] = a.state(0).loops == d - 1 ? 1 : 0;
    int top = best[0];
    for (std::size_t i = 0; i < p; ++i) {
        if (best[i] < 0) continue;
        top = std::max(top, best[i]);
        for (int c = 1; c <= a.k(); ++c) {
            const int j = a.next(i, c);
            if (j == Automaton::kAbsorbed || j == static_cast<int>(i)) continue;
            best[j] = std::max(best[j], best[i] + (a.state(j).loops == d - 1 ? 1 : 0));
        }
    }
    return top;
}

struct RatioTrend {
    int exponent = 0;        // polynomial power used in the normalization
    double last = 0;         // value at n_max
    double half = 0;         // value at n_max / 2
    double richardson = 0;   // 2 a(n) - a(n/2), cancels a 1/n correction
    double error_bar = 0;    // |richardson - last|
    std::vector<std::pair<std::size_t, double>> samples;
};

struct AsymptoticReport {
    Pattern v;
    int r = 0;
    int k = 0;
    long long base = 0;
    int M_r = 0;
    int g_pole_order = 0;
    int f_pole_order = 0;
    RatioTrend C;          // g_r / (n^(M_r - 1) (d-1)^n)
    RatioTrend K;          // f_r / (n^(M_r - 1) (d-1)^n)
    RatioTrend C_literal;  // g_r / (n^M_r (d-1)^n)
    std::vector<std::pair<std::size_t, double>> f_root;
    std::vector<std::pair<std::size_t, double>> g_root;
    bool possible_K_zero = false;
};

namespace detail {

inline double normalized(const BigInt& value, std::size_t n, int exponent, long long base) {
    if (value == 0) return 0.0;
    const double logv = log_big(value) - exponent * std::log(static_cast<double>(std::max<std::size_t>(n, 1))) -
                        static_cast<double>(n) * std::log(static_cast<double>(base));
    return std::exp(logv);
}

inline double nth_root(const BigInt& value, std::size_t n) {
    if (value <= 0 || n == 0) return 0.0;
    return std::exp(log_big(value) / static_cast<double>(n));
}

inline RatioTrend trend(const std::vector<BigInt>& series, std::size_t n_max, int exponent, long long base) {
    RatioTrend t;
    t.exponent = exponent;
    t.last = normalized(series[n_max], n_max, exponent, base);
    t.half = normalized(series[n_max / 2], n_max / 2, exponent, base);
    t.richardson = 2 * t.last - t.half;
    t.error_bar = std::abs(t.richardson - t.last);
    for (std::size_t n = std::max<std::size_t>(1, n_max / 16); n <= n_max; n *= 2)
        t.samples.emplace_back(n, normalized(series[n], n, exponent, base));
    return t;
}

} // namespace detail

inline AsymptoticReport asymptotic_constants(const Pattern& v, int r, int k, std::size_t n_max,
                                             const BuildOptions& opt = {}) {
    const int d = v.distinct();
    require_nontrivial(d);
    if (n_max < 4) throw invalid_argument("n range too short for a trend");
    const auto au = build_automaton(v, r, k, opt);
    const auto G = generating_function(au);
    const auto F = r == 0 ? G : G - generating_function(build_automaton(v, r - 1, k, opt));
    const auto g = series_coefficients(G, n_max);
    const auto f = series_coefficients(F, n_max);

    AsymptoticReport rep;
    rep.v = v;
    rep.r = r;
    rep.k = k;
    rep.base = d - 1;
    rep.M_r = compute_Mr(au);
    rep.g_pole_order = pole_analysis(G, d).order;
    rep.f_pole_order = pole_analysis(F, d).order;
    // With a pole of order m at 1/(d-1) the coefficients grow like n^(m-1) (d-1)^n.
    rep.C = detail::trend(g, n_max, rep.M_r - 1, rep.base);
    rep.K = detail::trend(f, n_max, rep.M_r - 1, rep.base);
    rep.C_literal = detail::trend(g, n_max, rep.M_r, rep.base);
    for (std::size_t n = std::max<std::size_t>(1, n_max / 16); n <= n_max; n *= 2) {
        rep.f_root.emplace_back(n, detail::nth_root(f[n], n));
        rep.g_root.emplace_back(n, detail::nth_root(g[n], n));
    }
    rep.f_root.emplace_back(n_max, detail::nth_root(f[n_max], n_max));
    rep.g_root.emplace_back(n_max, detail::nth_root(g[n_max], n_max));
    rep.possible_K_zero = rep.f_pole_order < rep.M_r;
    return rep;
}

} // namespace occulex
