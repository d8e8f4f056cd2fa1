#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <thread>
#include <vector>

#include "automaton.hpp"

namespace occulex {

// g_r(k, m) for m = 0..n, by pushing the state occupancy vector through the
// automaton n times.
inline std::vector<BigInt> count_at_most_series(const Automaton& a, std::size_t n) {
    std::vector<BigInt> out;
    out.reserve(n + 1);
    std::vector<BigInt> occ(a.size(), 0);
    std::vector<BigInt> next(a.size(), 0);
    occ[0] = 1;
    out.push_back(1);
    for (std::size_t m = 1; m <= n; ++m) {
        for (auto& x : next) x = 0;
        for (std::size_t s = 0; s < a.size(); ++s) {
            if (occ[s] == 0) continue;
            for (int c = 1; c <= a.k(); ++c)
                if (const int t = a.next(s, c); t != Automaton::kAbsorbed) next[t] += occ[s];
        }
        occ.swap(next);
        BigInt total = 0;
        for (const auto& x : occ) total += x;
        out.push_back(std::move(total));
    }
    return out;
}

inline BigInt count_at_most(const Automaton& a, std::size_t n) { return count_at_most_series(a, n).back(); }

// f_r(k, m) for m = 0..n as g_r - g_{r-1}.
inline std::vector<BigInt> count_exact_series(const Pattern& v, int r, int k, std::size_t n,
                                              const BuildOptions& opt = {}) {
    auto g = count_at_most_series(build_automaton(v, r, k, opt), n);
    if (r == 0) return g;
    const auto below = count_at_most_series(build_automaton(v, r - 1, k, opt), n);
    for (std::size_t m = 0; m <= n; ++m) g[m] -= below[m];
    return g;
}

inline BigInt count_exact(const Pattern& v, int r, int k, std::size_t n, const BuildOptions& opt = {}) {
    return count_exact_series(v, r, k, n, opt).back();
}

struct CountRow {
    std::size_t n = 0;
    int r = 0;
    BigInt f;
    BigInt g;
};

struct CountTable {
    Pattern v;
    int k = 0;
    std::vector<CountRow> rows;
};

inline CountTable count_table(const Pattern& v, int r, int k, std::size_t n_lo, std::size_t n_hi,
                              const BuildOptions& opt = {}) {
    if (n_lo > n_hi) throw invalid_argument("empty n range");
    const auto g = count_at_most_series(build_automaton(v, r, k, opt), n_hi);
    std::vector<BigInt> below(n_hi + 1, 0);
    if (r > 0) below = count_at_most_series(build_automaton(v, r - 1, k, opt), n_hi);
    CountTable table{v, k, {}};
    for (std::size_t n = n_lo; n <= n_hi; ++n) table.rows.push_back({n, r, g[n] - below[n], g[n]});
    return table;
}

// Histogram r -> f_r(k, n); counts[r] for r = 0..max occurring.
struct OccurrenceProfile {
    Pattern v;
    int k = 0;
    std::size_t n = 0;
    std::vector<BigInt> counts;

    BigInt f(std::size_t r) const { return r < counts.size() ? counts[r] : BigInt(0); }
    BigInt total() const {
        BigInt t = 0;
        for (const auto& c : counts) t += c;
        return t;
    }
};

struct ProfileOptions {
    double max_words = 1e8;
    unsigned workers = 1;
};

namespace detail {

using Histograms = std::vector<std::vector<std::uint64_t>>;

inline void bump(std::vector<std::uint64_t>& h, std::uint64_t r) {
    if (h.size() <= r) h.resize(r + 1, 0);
    ++h[r];
}

// Depth-first walk over all words extending the current prefix, recording
// the occurrence count of every prefix length it passes.
inline void profile_walk(const OccurrenceMatcher& m, std::vector<std::uint64_t>& counts, std::uint64_t occ,
                         std::size_t depth, std::size_t n_max, Histograms& out) {
    bump(out[depth], occ);
    if (depth == n_max) return;
    std::vector<std::uint64_t> next;
    for (int a = 1; a <= m.k(); ++a) {
        next = counts;
        const std::uint64_t done = m.step(next, a);
        profile_walk(m, next, occ + done, depth + 1, n_max, out);
    }
}

} // namespace detail

// Exact profiles for every length 0..n_max by enumerating [k]^{n_max}.
// Work is split by first letter; results do not depend on the worker count.
inline std::vector<OccurrenceProfile> brute_profiles_upto(const Pattern& v, int k, std::size_t n_max,
                                                          const ProfileOptions& opt = {}) {
    v.require_alphabet(k);
    if (std::pow(static_cast<double>(k), static_cast<double>(n_max)) > opt.max_words)
        throw budget_exceeded("word space " + std::to_string(k) + "^" + std::to_string(n_max) + " exceeds budget");
    const OccurrenceMatcher m(v, k);

    detail::Histograms total(n_max + 1);
    detail::bump(total[0], 0);
    if (n_max > 0) {
        std::vector<detail::Histograms> parts(k, detail::Histograms(n_max + 1));
        auto work = [&](int a) {
            auto counts = m.initial_counts<std::uint64_t>();
            const std::uint64_t done = m.step(counts, a);
            detail::profile_walk(m, counts, done, 1, n_max, parts[a - 1]);
        };
        const unsigned workers = std::max(1U, std::min<unsigned>(opt.workers, static_cast<unsigned>(k)));
        if (workers == 1) {
            for (int a = 1; a <= k; ++a) work(a);
        } else {
            for (int base = 1; base <= k; base += static_cast<int>(workers)) {
                std::vector<std::thread> pool;
                for (int a = base; a < base + static_cast<int>(workers) && a <= k; ++a) pool.emplace_back(work, a);
                for (auto& t : pool) t.join();
            }
        }
        for (const auto& part : parts)
            for (std::size_t len = 1; len <= n_max; ++len) {
                if (total[len].size() < part[len].size()) total[len].resize(part[len].size(), 0);
                for (std::size_t r = 0; r < part[len].size(); ++r) total[len][r] += part[len][r];
            }
    }

    std::vector<OccurrenceProfile> out;
    for (std::size_t len = 0; len <= n_max; ++len) {
        OccurrenceProfile p{v, k, len, {}};
        for (auto c : total[len]) p.counts.emplace_back(c);
        out.push_back(std::move(p));
    }
    return out;
}

inline OccurrenceProfile brute_profile(const Pattern& v, int k, std::size_t n, const ProfileOptions& opt = {}) {
    return brute_profiles_upto(v, k, n, opt).back();
}

// Exact profiles for n = 0..n_max without enumerating words: words that leave
// the matcher with identical per-state tuple counts have identical futures,
// so they are merged and only their occurrence histogram is kept.
inline std::vector<OccurrenceProfile> merged_profiles_upto(const Pattern& v, int k, std::size_t n_max,
                                                           std::size_t max_classes = 2'000'000) {
    const OccurrenceMatcher m(v, k);
    using Key = std::vector<std::uint64_t>;
    std::map<Key, std::vector<BigInt>> cur, nxt;
    cur[m.initial_counts<std::uint64_t>()] = {BigInt(1)};
    std::vector<OccurrenceProfile> out;
    out.push_back({v, k, 0, {BigInt(1)}});
    for (std::size_t len = 1; len <= n_max; ++len) {
        nxt.clear();
        for (const auto& [key, hist] : cur)
            for (int a = 1; a <= k; ++a) {
                Key moved = key;
                const std::uint64_t done = m.step(moved, a);
                auto& h = nxt[std::move(moved)];
                if (h.size() < hist.size() + done) h.resize(hist.size() + done, 0);
                for (std::size_t r = 0; r < hist.size(); ++r)
                    if (hist[r] != 0) h[r + done] += hist[r];
            }
        if (nxt.size() > max_classes)
            throw budget_exceeded("more than " + std::to_string(max_classes) + " merged prefix classes at length " +
                                  std::to_string(len));
        cur.swap(nxt);
        OccurrenceProfile p{v, k, len, {}};
        for (const auto& [key, hist] : cur) {
            if (p.counts.size() < hist.size()) p.counts.resize(hist.size(), 0);
            for (std::size_t r = 0; r < hist.size(); ++r) p.counts[r] += hist[r];
        }
        while (!p.counts.empty() && p.counts.back() == 0) p.counts.pop_back();
        out.push_back(std::move(p));
    }
    return out;
}

inline OccurrenceProfile merged_profile(const Pattern& v, int k, std::size_t n, std::size_t max_classes = 2'000'000) {
    return merged_profiles_upto(v, k, n, max_classes).back();
}

// Exact profiles by whichever route is cheaper: enumeration while k^n_max
// stays below `enumerate_below`, merged prefix classes beyond that.
inline std::vector<OccurrenceProfile> exact_profiles_upto(const Pattern& v, int k, std::size_t n_max,
                                                          std::size_t max_classes = 2'000'000,
                                                          double enumerate_below = 2e7) {
    v.require_alphabet(k);
    if (std::pow(static_cast<double>(k), static_cast<double>(n_max)) <= enumerate_below) {
        ProfileOptions opt;
        opt.max_words = enumerate_below;
        return brute_profiles_upto(v, k, n_max, opt);
    }
    return merged_profiles_upto(v, k, n_max, max_classes);
}

inline OccurrenceProfile exact_profile(const Pattern& v, int k, std::size_t n, std::size_t max_classes = 2'000'000) {
    return exact_profiles_upto(v, k, n, max_classes).back();
}

} // namespace occulex
