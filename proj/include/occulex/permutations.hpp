#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "occurrence.hpp"

namespace occulex {

// A permutation of [n] in one-line notation.
class Permutation {
public:
    Permutation() = default;
    explicit Permutation(std::vector<Letter> values) : p_(std::move(values)) {
        std::vector<bool> seen(p_.size() + 1, false);
        for (Letter a : p_) {
            if (a < 1 || a > static_cast<Letter>(p_.size()) || seen[a])
                throw invalid_argument("not a permutation of [" + std::to_string(p_.size()) + "]");
            seen[a] = true;
        }
    }
    static Permutation parse(std::string_view text) { return Permutation(parse_letters(text)); }
    static Permutation identity(std::size_t n) {
        std::vector<Letter> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<Letter>(i + 1);
        return Permutation(std::move(v));
    }

    std::size_t size() const noexcept { return p_.size(); }
    Letter operator[](std::size_t i) const { return p_[i]; }
    std::span<const Letter> values() const noexcept { return p_; }
    std::string str() const { return format_letters(p_); }

    Permutation reverse() const { return Permutation(std::vector<Letter>(p_.rbegin(), p_.rend())); }
    Permutation complement() const {
        std::vector<Letter> v(p_);
        for (auto& a : v) a = static_cast<Letter>(p_.size()) + 1 - a;
        return Permutation(std::move(v));
    }
    Permutation inverse() const {
        std::vector<Letter> v(p_.size());
        for (std::size_t i = 0; i < p_.size(); ++i) v[p_[i] - 1] = static_cast<Letter>(i + 1);
        return Permutation(std::move(v));
    }
    // This permutation on the low values followed by `o` shifted above them.
    Permutation direct_sum(const Permutation& o) const {
        std::vector<Letter> v(p_);
        for (Letter a : o.p_) v.push_back(a + static_cast<Letter>(p_.size()));
        return Permutation(std::move(v));
    }
    // This permutation shifted above `o`, followed by `o`.
    Permutation skew_sum(const Permutation& o) const {
        std::vector<Letter> v;
        for (Letter a : p_) v.push_back(a + static_cast<Letter>(o.size()));
        v.insert(v.end(), o.p_.begin(), o.p_.end());
        return Permutation(std::move(v));
    }

    friend bool operator==(const Permutation&, const Permutation&) = default;

private:
    std::vector<Letter> p_;
};

// Occurrences of xi in pi. Entries are distinct, so order isomorphism of
// words and of permutations coincide and the word matcher applies directly.
inline BigInt occ_perm(const Permutation& xi, const Permutation& pi) {
    if (xi.size() == 0) throw invalid_argument("empty pattern");
    if (xi.size() > pi.size()) return 0;
    return OccurrenceMatcher(Pattern(std::vector<Letter>(xi.values().begin(), xi.values().end())),
                             static_cast<int>(pi.size()))
        .count<BigInt>(pi.values());
}

struct PermProfile {
    Permutation xi;
    std::size_t n = 0;
    std::vector<BigInt> counts; // counts[r] = f_r(n)

    BigInt f(std::size_t r) const { return r < counts.size() ? counts[r] : BigInt(0); }
    BigInt total() const {
        BigInt t = 0;
        for (const auto& c : counts) t += c;
        return t;
    }
};

struct PermOptions {
    double max_perms = 3628800; // 10!
    unsigned workers = 1;
};

namespace detail {

inline void perm_walk(const OccurrenceMatcher& m, std::vector<std::uint64_t>& counts, std::uint64_t occ,
                      std::vector<bool>& used, std::size_t depth, std::size_t n, std::vector<std::uint64_t>& hist) {
    if (depth == n) {
        if (hist.size() <= occ) hist.resize(occ + 1, 0);
        ++hist[occ];
        return;
    }
    std::vector<std::uint64_t> next;
    for (std::size_t a = 1; a <= n; ++a) {
        if (used[a]) continue;
        used[a] = true;
        next = counts;
        const std::uint64_t done = m.step(next, static_cast<Letter>(a));
        perm_walk(m, next, occ + done, used, depth + 1, n, hist);
        used[a] = false;
    }
}

} // namespace detail

// Exact histogram over S_n, walking permutations in lexicographic order;
// work is split by first entry and merged in a fixed order.
inline PermProfile perm_profile(const Permutation& xi, std::size_t n, const PermOptions& opt = {}) {
    if (xi.size() == 0) throw invalid_argument("empty pattern");
    if (std::tgamma(static_cast<double>(n) + 1) > opt.max_perms * (1 + 1e-9))
        throw budget_exceeded(std::to_string(n) + "! permutations exceed budget");
    PermProfile out{xi, n, {}};
    if (xi.size() > n) {
        out.counts = {factorial(static_cast<long long>(n))};
        return out;
    }
    if (n == 0) {
        out.counts = {BigInt(1)};
        return out;
    }
    const OccurrenceMatcher m(Pattern(std::vector<Letter>(xi.values().begin(), xi.values().end())),
                              static_cast<int>(n));
    std::vector<std::vector<std::uint64_t>> parts(n);
    auto work = [&](std::size_t first) {
        std::vector<bool> used(n + 1, false);
        used[first] = true;
        auto counts = m.initial_counts<std::uint64_t>();
        const std::uint64_t done = m.step(counts, static_cast<Letter>(first));
        detail::perm_walk(m, counts, done, used, 1, n, parts[first - 1]);
    };
    const unsigned workers = std::max(1U, std::min<unsigned>(opt.workers, static_cast<unsigned>(n)));
    if (workers == 1) {
        for (std::size_t a = 1; a <= n; ++a) work(a);
    } else {
        for (std::size_t base = 1; base <= n; base += workers) {
            std::vector<std::thread> pool;
            for (std::size_t a = base; a < base + workers && a <= n; ++a) pool.emplace_back(work, a);
            for (auto& t : pool) t.join();
        }
    }
    for (const auto& part : parts) {
        if (out.counts.size() < part.size()) out.counts.resize(part.size(), 0);
        for (std::size_t r = 0; r < part.size(); ++r) out.counts[r] += part[r];
    }
    return out;
}

inline Rational perm_partition(const PermProfile& p, const Rational& x) {
    if (x < 0 || x > 1) throw invalid_argument("x must lie in [0, 1]");
    const Rational q = 1 - x;
    Rational acc = 0;
    for (std::size_t r = p.counts.size(); r-- > 0;) acc = acc * q + Rational(p.counts[r]);
    return acc;
}

inline Rational perm_partition(const Permutation& xi, std::size_t n, const Rational& x, const PermOptions& opt = {}) {
    return perm_partition(perm_profile(xi, n, opt), x);
}

// Coefficients of prod_{j=1}^{n} (1 + q + ... + q^{j-1}): permutations by inversions.
inline std::vector<BigInt> mahonian_numbers(std::size_t n) {
    std::vector<BigInt> c{BigInt(1)};
    for (std::size_t j = 2; j <= n; ++j) {
        std::vector<BigInt> next(c.size() + j - 1, 0);
        for (std::size_t i = 0; i < c.size(); ++i)
            for (std::size_t s = 0; s < j; ++s) next[i + s] += c[i];
        c = std::move(next);
    }
    return c;
}

// prod_{j=1}^{n} (1 - (1-x)^j) / x, with the x = 0 limit n!.
inline Rational mahonian_partition(std::size_t n, const Rational& x) {
    if (x < 0 || x > 1) throw invalid_argument("x must lie in [0, 1]");
    if (x == 0) return Rational(factorial(static_cast<long long>(n)));
    const Rational q = 1 - x;
    Rational prod = 1;
    Rational qj = 1;
    for (std::size_t j = 1; j <= n; ++j) {
        qj *= q;
        prod *= (1 - qj) / x;
    }
    return prod;
}

struct SupermultiplicativityCheck {
    std::size_t n = 0, m = 0;
    Rational x;
    Rational c_n, c_m, c_nm;
    bool holds = false; // c(n+m) >= c(n) c(m)
};

inline SupermultiplicativityCheck supermultiplicativity_check(const Permutation& xi, std::size_t n, std::size_t m,
                                                              const Rational& x, const PermOptions& opt = {}) {
    SupermultiplicativityCheck c;
    c.n = n;
    c.m = m;
    c.x = x;
    c.c_n = perm_partition(xi, n, x, opt);
    c.c_m = m == n ? c.c_n : perm_partition(xi, m, x, opt);
    c.c_nm = perm_partition(xi, n + m, x, opt);
    c.holds = c.c_nm >= c.c_n * c.c_m;
    return c;
}

struct RootPoint {
    std::size_t n = 0;
    BigInt f_r;
    BigInt f_0;
    double root_r = 0; // f_r^{1/n}
    double root_0 = 0;
    double gap = 0;
};

struct PermRootTrend {
    Permutation xi;
    int r = 0;
    std::vector<RootPoint> points;
    bool gap_shrinking = true; // over points with f_r > 0
};

inline double nth_root(const BigInt& f, std::size_t n) {
    if (f == 0 || n == 0) return 0;
    return std::exp(log_big(f) / static_cast<double>(n));
}

inline PermRootTrend perm_sw_trend(const Permutation& xi, int r, std::size_t n_lo, std::size_t n_hi,
                                   const PermOptions& opt = {}) {
    if (r < 0) throw invalid_argument("r must be non-negative");
    if (n_lo < 1 || n_lo > n_hi) throw invalid_argument("need 1 <= n_lo <= n_hi");
    PermRootTrend t{xi, r, {}, true};
    for (std::size_t n = n_lo; n <= n_hi; ++n) {
        const auto prof = perm_profile(xi, n, opt);
        RootPoint pt;
        pt.n = n;
        pt.f_r = prof.f(static_cast<std::size_t>(r));
        pt.f_0 = prof.f(0);
        pt.root_r = nth_root(pt.f_r, n);
        pt.root_0 = nth_root(pt.f_0, n);
        pt.gap = std::abs(pt.root_r - pt.root_0);
        t.points.push_back(pt);
    }
    double prev = -1;
    for (const auto& pt : t.points) {
        if (pt.f_r == 0) continue;
        if (prev >= 0 && !(pt.gap < prev)) t.gap_shrinking = false;
        prev = pt.gap;
    }
    return t;
}

} // namespace occulex
