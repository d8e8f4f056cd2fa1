#include <gtest/gtest.h>

#include <occulex/counting.hpp>

using namespace occulex;

namespace {

// f_r histogram by testing every word with the brute-force counter.
std::vector<BigInt> oracle_histogram(const Pattern& v, int k, std::size_t n) {
    std::vector<BigInt> hist;
    std::vector<Letter> w(n, 1);
    while (true) {
        const auto r = static_cast<std::size_t>(occ_oracle(v, w));
        if (hist.size() <= r) hist.resize(r + 1, 0);
        ++hist[r];
        std::size_t i = n;
        while (i > 0 && w[i - 1] == k) w[--i] = 1;
        if (i == 0) break;
        ++w[i - 1];
    }
    return hist;
}

std::vector<Pattern> patterns_upto(std::size_t l, int k) {
    std::vector<Pattern> out;
    std::vector<std::vector<Letter>> frontier{{}};
    for (std::size_t len = 1; len <= l; ++len) {
        std::vector<std::vector<Letter>> next;
        for (const auto& w : frontier)
            for (int a = 1; a <= k; ++a) {
                auto x = w;
                x.push_back(a);
                out.emplace_back(x);
                next.push_back(std::move(x));
            }
        frontier = std::move(next);
    }
    return out;
}

} // namespace

TEST(CountAtMost, SmallValues) {
    const auto a = build_automaton(Pattern::parse("123"), 1, 3);
    EXPECT_EQ(count_at_most(a, 0), 1);
    EXPECT_EQ(count_at_most(a, 3), 27);
    EXPECT_EQ(count_exact(Pattern::parse("123"), 1, 3, 3), 1);
}

TEST(CountAtMost, MatchesOracleEnumeration) {
    for (int k = 1; k <= 3; ++k)
        for (const auto& v : patterns_upto(3, k))
            for (int r = 0; r <= 2; ++r) {
                const auto g = count_at_most_series(build_automaton(v, r, k), 7);
                for (std::size_t n = 0; n <= 7; ++n) {
                    if (std::pow(k, n) > 3000) break;
                    const auto hist = oracle_histogram(v, k, n);
                    BigInt expect = 0;
                    for (std::size_t j = 0; j <= static_cast<std::size_t>(r) && j < hist.size(); ++j) expect += hist[j];
                    ASSERT_EQ(g[n], expect) << v.str() << " r=" << r << " k=" << k << " n=" << n;
                }
            }
}

TEST(CountExact, InversionAvoiders) {
    for (int k = 2; k <= 5; ++k) {
        const auto f = count_exact_series(Pattern::parse("21"), 0, k, 30);
        for (std::size_t n = 0; n <= 30; ++n) EXPECT_EQ(f[n], binomial(static_cast<long long>(n) + k - 1, k - 1));
    }
}

TEST(CountExact, SeriesOf123OneOccurrence) {
    // x^3 / ((1-2x)^2 (1-x)^2) expanded by hand: 1, 6, 23, 72, 201 from n = 3.
    const auto f = count_exact_series(Pattern::parse("123"), 1, 3, 7);
    EXPECT_EQ(f, (std::vector<BigInt>{0, 0, 0, 1, 6, 23, 72, 201}));
}

TEST(BruteProfile, SmallHistogram) {
    const auto p = brute_profile(Pattern::parse("12"), 2, 2);
    EXPECT_EQ(p.counts, (std::vector<BigInt>{3, 1}));
}

TEST(BruteProfile, AgreesWithOracleAndSums) {
    for (int k = 1; k <= 3; ++k)
        for (const auto& v : patterns_upto(3, k)) {
            std::size_t n_max = k == 1 ? 9 : k == 2 ? 8 : 5;
            const auto profiles = brute_profiles_upto(v, k, n_max);
            for (std::size_t n = 0; n <= n_max; ++n) {
                ASSERT_EQ(profiles[n].counts, oracle_histogram(v, k, n)) << v.str() << " k=" << k << " n=" << n;
                EXPECT_EQ(profiles[n].total(), ipow(k, n));
                EXPECT_LE(profiles[n].counts.size(), static_cast<std::size_t>(binomial(n, v.length())) + 1);
            }
        }
}

TEST(BruteProfile, MatchesAutomatonCounts) {
    const Pattern v = Pattern::parse("123");
    const auto profiles = brute_profiles_upto(v, 3, 10);
    const auto f0 = count_exact_series(v, 0, 3, 10);
    const auto f1 = count_exact_series(v, 1, 3, 10);
    for (std::size_t n = 0; n <= 10; ++n) {
        EXPECT_EQ(profiles[n].f(0), f0[n]);
        EXPECT_EQ(profiles[n].f(1), f1[n]);
    }
}

TEST(BruteProfile, WorkerCountDoesNotChangeResult) {
    ProfileOptions many;
    many.workers = 3;
    EXPECT_EQ(brute_profile(Pattern::parse("132"), 3, 7).counts, brute_profile(Pattern::parse("132"), 3, 7, many).counts);
}

TEST(BruteProfile, Budget) {
    ProfileOptions tiny;
    tiny.max_words = 100;
    EXPECT_THROW(brute_profile(Pattern::parse("12"), 2, 7, tiny), budget_exceeded);
}

TEST(CountTable, MonotoneAndGrowthBounds) {
    const Pattern v = Pattern::parse("132");
    const int k = 3;
    std::vector<std::vector<BigInt>> g;
    for (int r = 0; r <= 3; ++r) g.push_back(count_at_most_series(build_automaton(v, r, k), 20));
    for (std::size_t n = 0; n <= 20; ++n) {
        for (int r = 1; r <= 3; ++r) EXPECT_LE(g[r - 1][n], g[r][n]);
        EXPECT_LE(g[3][n], ipow(k, n));
        if (n < 20) {
            for (int r = 0; r <= 3; ++r) EXPECT_LE(g[r][n + 1], k * g[r][n]);
        }
    }
    // Once r reaches binomial(n, l) every word is counted.
    const auto full = count_at_most_series(build_automaton(Pattern::parse("12"), 6, 2), 4);
    EXPECT_EQ(full[4], 16);
    const auto t = count_table(v, 2, k, 3, 6);
    ASSERT_EQ(t.rows.size(), 4U);
    for (const auto& row : t.rows) EXPECT_EQ(row.g, g[2][row.n]);
}

TEST(CountTable, ExactGrowthAtLeastDMinusOne) {
    // f_r(k, n+1) / f_r(k, n) stays above (d-1)/C for a modest C over the computed range.
    const auto f = count_exact_series(Pattern::parse("123"), 1, 3, 60);
    for (std::size_t n = 10; n < 60; ++n) EXPECT_GE(f[n + 1], 2 * f[n]);
}

TEST(MergedProfile, AgreesWithEnumeration) {
    for (const char* s : {"12", "21", "11", "123", "121", "1221", "2132", "312"})
        for (int k = 3; k <= 4; ++k) {
            const Pattern v = Pattern::parse(s);
            if (k < v.max_letter()) continue;
            const std::size_t n_max = k == 3 ? 9 : 7;
            const auto brute = brute_profiles_upto(v, k, n_max);
            const auto merged = merged_profiles_upto(v, k, n_max);
            ASSERT_EQ(brute.size(), merged.size());
            for (std::size_t n = 0; n <= n_max; ++n) EXPECT_EQ(brute[n].counts, merged[n].counts) << s << " n=" << n;
        }
}

TEST(MergedProfile, ZeroColumnMatchesAutomaton) {
    const Pattern v = Pattern::parse("21");
    const auto prof = merged_profile(v, 3, 30);
    EXPECT_EQ(prof.f(0), binomial(32, 2));
    EXPECT_EQ(prof.total(), ipow(BigInt(3), 30));
    EXPECT_EQ(prof.f(1), count_exact(v, 1, 3, 30));
    EXPECT_THROW(merged_profile(Pattern::parse("123"), 3, 20, 50), budget_exceeded);
}
