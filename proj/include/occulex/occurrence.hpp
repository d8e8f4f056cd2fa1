#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <type_traits>
#include <vector>

#include "numeric.hpp"
#include "word.hpp"

namespace occulex {

// Reference counter: enumerates every index tuple and tests order isomorphism.
inline BigInt occ_oracle(const Pattern& v, std::span<const Letter> w) {
    const std::size_t l = v.length();
    const std::size_t n = w.size();
    if (l > n) return 0;
    BigInt total = 0;
    std::vector<std::size_t> idx(l);
    for (std::size_t i = 0; i < l; ++i) idx[i] = i;
    std::vector<Letter> sub(l);
    while (true) {
        for (std::size_t i = 0; i < l; ++i) sub[i] = w[idx[i]];
        if (is_order_isomorphic(sub, v.letters())) ++total;
        std::size_t i = l;
        while (i > 0 && idx[i - 1] == n - l + i - 1) --i;
        if (i == 0) break;
        ++idx[i - 1];
        for (std::size_t j = i; j < l; ++j) idx[j] = idx[j - 1] + 1;
    }
    return total;
}

inline BigInt occ_oracle(const Pattern& v, const Word& w) { return occ_oracle(v, w.letters()); }

namespace detail {

template <class Count>
inline void add_to(Count& target, const Count& value) {
    if constexpr (std::is_same_v<Count, std::uint64_t>) {
        if (__builtin_add_overflow(target, value, &target))
            throw budget_exceeded("occurrence count overflowed 64 bits; use an arbitrary-precision counter");
    } else {
        target += value;
    }
}

} // namespace detail

// Deterministic prefix matcher for a pattern over [k].
//
// A state is a matched pattern prefix v(1..p) together with the concrete
// values assigned to the distinct pattern letters seen in that prefix. Values
// are assigned in order of first appearance and must leave room for the
// unseen ranks, so every state extends to at least one full occurrence.
// Counting occurrences in a word is then a forward pass keeping, per state,
// the number of index tuples currently sitting in it.
class OccurrenceMatcher {
public:
    static constexpr int kNone = -1;
    static constexpr int kComplete = -2;

    OccurrenceMatcher(const Pattern& v, int k) : pattern_(v), k_(k) {
        v.require_alphabet(k);
        const int d = v.distinct();
        rank_slot_.assign(d, -1);
        for (std::size_t j = 0; j < v.first_seen().size(); ++j) rank_slot_[v.first_seen()[j]] = static_cast<int>(j);

        std::map<std::pair<int, std::vector<std::uint8_t>>, int> index;
        prefix_.push_back(0);
        assigned_.emplace_back();
        index[{0, {}}] = 0;
        for (std::size_t s = 0; s < prefix_.size(); ++s) {
            const int p = prefix_[s];
            for (int a = 1; a <= k; ++a) {
                int target = kNone;
                auto vals = assigned_[s];
                if (extend(p, vals, a)) {
                    if (p + 1 == static_cast<int>(v.length())) {
                        target = kComplete;
                    } else {
                        auto key = std::make_pair(p + 1, vals);
                        auto it = index.find(key);
                        if (it == index.end()) {
                            target = static_cast<int>(prefix_.size());
                            index.emplace(std::move(key), target);
                            prefix_.push_back(p + 1);
                            assigned_.push_back(std::move(vals));
                        } else {
                            target = it->second;
                        }
                    }
                }
                next_.push_back(target);
            }
        }
        // States were discovered breadth-first, so prefix lengths are
        // non-decreasing in state id; a reverse sweep never chains one letter
        // through two pattern positions.
    }

    const Pattern& pattern() const noexcept { return pattern_; }
    int k() const noexcept { return k_; }
    std::size_t state_count() const noexcept { return prefix_.size(); }
    int prefix_length(std::size_t s) const { return prefix_[s]; }
    int next(std::size_t s, Letter a) const { return next_[s * k_ + (a - 1)]; }

    // Advances per-state tuple counts by one letter; returns the number of
    // occurrences completed at this letter.
    template <class Count>
    Count step(std::vector<Count>& counts, Letter a) const {
        Count completed{};
        for (std::size_t s = counts.size(); s-- > 0;) {
            if (counts[s] == Count{}) continue;
            const int t = next_[s * k_ + (a - 1)];
            if (t == kComplete)
                detail::add_to(completed, counts[s]);
            else if (t >= 0)
                detail::add_to(counts[t], counts[s]);
        }
        return completed;
    }

    // Same update with every count capped at `cap`.
    void step_capped(std::vector<std::uint8_t>& counts, std::uint8_t& completed, Letter a, std::uint8_t cap) const {
        for (std::size_t s = counts.size(); s-- > 0;) {
            if (counts[s] == 0) continue;
            const int t = next_[s * k_ + (a - 1)];
            if (t == kComplete)
                completed = static_cast<std::uint8_t>(std::min<int>(cap, completed + counts[s]));
            else if (t >= 0)
                counts[t] = static_cast<std::uint8_t>(std::min<int>(cap, counts[t] + counts[s]));
        }
    }

    template <class Count>
    std::vector<Count> initial_counts() const {
        std::vector<Count> counts(state_count(), Count{});
        counts[0] = Count{1};
        return counts;
    }

    template <class Count = BigInt>
    Count count(std::span<const Letter> w) const {
        auto counts = initial_counts<Count>();
        Count total{};
        for (Letter a : w) {
            check_letter(a);
            detail::add_to(total, step(counts, a));
        }
        return total;
    }

    // Number of occurrences whose index tuple contains position `pos` (0-based).
    template <class Count = BigInt>
    Count count_through(std::span<const Letter> w, std::size_t pos) const {
        if (pos >= w.size()) throw invalid_argument("position outside word");
        auto counts = initial_counts<Count>();
        Count total{};
        for (std::size_t i = 0; i < w.size(); ++i) {
            check_letter(w[i]);
            if (i < pos) {
                step(counts, w[i]);
            } else if (i == pos) {
                // Only tuples that consume this position survive.
                std::vector<Count> moved(counts.size(), Count{});
                for (std::size_t s = 0; s < counts.size(); ++s) {
                    if (counts[s] == Count{}) continue;
                    const int t = next_[s * k_ + (w[i] - 1)];
                    if (t == kComplete)
                        detail::add_to(total, counts[s]);
                    else if (t >= 0)
                        detail::add_to(moved[t], counts[s]);
                }
                counts = std::move(moved);
            } else {
                detail::add_to(total, step(counts, w[i]));
            }
        }
        return total;
    }

private:
    void check_letter(Letter a) const {
        if (a < 1 || a > k_) throw invalid_argument("letter outside alphabet");
    }

    // Tries to match pattern position p with letter a under the current
    // assignment; on success `vals` holds the extended assignment.
    bool extend(int p, std::vector<std::uint8_t>& vals, Letter a) const {
        const int rank = pattern_.rank(static_cast<std::size_t>(p));
        const int slot = rank_slot_[rank];
        if (slot < static_cast<int>(vals.size())) return vals[slot] == a;
        vals.push_back(static_cast<std::uint8_t>(a));
        return feasible(vals);
    }

    // Assigned values must be strictly increasing in rank and leave enough
    // distinct values for every unassigned rank.
    bool feasible(const std::vector<std::uint8_t>& vals) const {
        const int d = pattern_.distinct();
        std::vector<std::pair<int, int>> byRank;
        byRank.reserve(vals.size());
        for (std::size_t j = 0; j < vals.size(); ++j) byRank.emplace_back(pattern_.first_seen()[j], vals[j]);
        std::sort(byRank.begin(), byRank.end());
        if (byRank.front().second < byRank.front().first + 1) return false;
        if (k_ - byRank.back().second < (d - 1) - byRank.back().first) return false;
        for (std::size_t j = 1; j < byRank.size(); ++j)
            if (byRank[j].second - byRank[j - 1].second < byRank[j].first - byRank[j - 1].first) return false;
        return true;
    }

    Pattern pattern_;
    int k_;
    std::vector<int> rank_slot_;
    std::vector<int> prefix_;
    std::vector<std::vector<std::uint8_t>> assigned_;
    std::vector<int> next_;
};

inline BigInt occ_fast(const Pattern& v, std::span<const Letter> w, int k) {
    return OccurrenceMatcher(v, k).count<BigInt>(w);
}

inline BigInt occ_fast(const Pattern& v, const Word& w) { return occ_fast(v, w.letters(), w.k()); }

} // namespace occulex
