#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "occulex/randomwords.hpp"
#include "occulex/weakavoid.hpp"

using namespace occulex;

namespace {

Pattern P(const char* s) { return Pattern::parse(s); }
Rational R(long long p, long long q = 1) { return Rational(p, q); }

// sum over all words of (1 - x)^{occ}, through the brute-force counter.
Rational enumerated_partition(const Pattern& v, int k, std::size_t n, const Rational& x) {
    std::vector<Letter> w(n, 1);
    Rational total = 0;
    const Rational q = 1 - x;
    while (true) {
        total += rpow(q, static_cast<unsigned long long>(occ_oracle(v, std::span<const Letter>(w))));
        std::size_t i = n;
        while (i > 0 && w[i - 1] == k) w[--i] = 1;
        if (i == 0) break;
        ++w[i - 1];
    }
    return total;
}

// (q; q)_m
Rational qpoch(const Rational& q, std::size_t m) {
    Rational p = 1;
    Rational qj = 1;
    for (std::size_t j = 1; j <= m; ++j) {
        qj *= q;
        p *= 1 - qj;
    }
    return p;
}

// Inversion partition function as a sum of q-multinomial coefficients.
Rational macmahon_21(int k, std::size_t n, const Rational& x) {
    const Rational q = 1 - x;
    const Rational top = qpoch(q, n);
    Rational total = 0;
    std::function<void(int, std::size_t, Rational)> rec = [&](int i, std::size_t left, Rational den) {
        if (i == k - 1) {
            total += top / (den * qpoch(q, left));
            return;
        }
        for (std::size_t a = 0; a <= left; ++a) rec(i + 1, left - a, den * qpoch(q, a));
    };
    rec(0, n, Rational(1));
    return total;
}

} // namespace

TEST(Partition, MatchesEnumeration) {
    for (const char* s : {"12", "21", "11", "123", "132", "1212", "2132"})
        for (int k = 2; k <= 4; ++k) {
            const Pattern v = P(s);
            if (k < v.max_letter()) continue;
            const std::size_t n_max = k == 2 ? 10 : (k == 3 ? 7 : 6);
            for (std::size_t n = 0; n <= n_max; n += 2)
                for (const Rational& x : {R(0), R(1, 4), R(1, 2), R(3, 4), R(1)})
                    EXPECT_EQ(partition_function(v, k, n, x).value, enumerated_partition(v, k, n, x))
                        << s << " k=" << k << " n=" << n << " x=" << to_string(x);
        }
}

TEST(Partition, EndpointsAndMonotonicity) {
    for (const char* s : {"12", "123", "1221"}) {
        const Pattern v = P(s);
        const int k = 3;
        for (std::size_t n : {4u, 8u, 12u}) {
            EXPECT_EQ(partition_function(v, k, n, R(0)).value, Rational(ipow(BigInt(k), n)));
            EXPECT_EQ(partition_function(v, k, n, R(1)).value, Rational(count_exact(v, 0, k, n)));
            Rational prev = partition_function(v, k, n, R(0)).value;
            for (const Rational& x : {R(1, 4), R(1, 2), R(3, 4), R(1)}) {
                const Rational c = partition_function(v, k, n, x).value;
                EXPECT_LE(c, prev);
                prev = c;
            }
        }
    }
}

TEST(Partition, TruncatedWithinBound) {
    const Pattern v = P("123");
    const std::size_t n = 10;
    const Rational x(2, 3);
    const Rational exact = partition_function(v, 3, n, x).value;
    for (int R = 0; R <= 4; ++R) {
        PartitionMode mode;
        mode.kind = PartitionMode::Kind::truncated;
        mode.R = R;
        const auto t = partition_function(v, 3, n, x, mode);
        EXPECT_FALSE(t.exact);
        EXPECT_EQ(t.R, R);
        EXPECT_LE(exact - t.value, t.error_bound);
        EXPECT_GE(exact - t.value, 0);
    }
    PartitionMode adaptive = PartitionMode::parse("trunc");
    adaptive.rel_tol = Rational(1, 100);
    const auto a = partition_function(v, 3, n, x, adaptive);
    EXPECT_LE(a.error_bound, a.value / 100);
    EXPECT_LE(exact - a.value, a.error_bound);
    EXPECT_EQ(PartitionMode::parse("trunc:3").R, 3);
    EXPECT_THROW(PartitionMode::parse("trunc:x"), invalid_argument);
    EXPECT_THROW(PartitionMode::parse("fast"), invalid_argument);
    adaptive.max_R = 1;
    adaptive.rel_tol = Rational(1, 1000000000);
    EXPECT_THROW(partition_function(v, 3, n, x, adaptive), budget_exceeded);
    EXPECT_THROW(partition_function(v, 3, n, R(3, 2)), invalid_argument);
}

TEST(Submultiplicativity, Examples) {
    const auto half = submultiplicativity_check(P("12"), 2, 4, 4, R(1, 2));
    EXPECT_TRUE(half.holds);
    EXPECT_TRUE(half.bracket);
    EXPECT_EQ(half.c_nm, enumerated_partition(P("12"), 2, 8, R(1, 2)));
    const auto zero = submultiplicativity_check(P("123"), 3, 3, 5, R(0));
    EXPECT_EQ(zero.c_nm, zero.c_n * zero.c_m);
    const auto one = submultiplicativity_check(P("132"), 3, 5, 6, R(1));
    EXPECT_TRUE(one.holds);
    EXPECT_EQ(one.c_nm, Rational(count_exact(P("132"), 0, 3, 11)));
    for (const char* s : {"12", "121", "1234", "2121"})
        for (std::size_t n = 1; n <= 5; ++n)
            for (std::size_t m = n; n + m <= 10; ++m)
                for (const Rational& x : {R(1, 4), R(1, 2), R(1)}) {
                    const auto c = submultiplicativity_check(P(s), 4, n, m, x);
                    EXPECT_TRUE(c.holds) << s << " " << n << "+" << m;
                    EXPECT_TRUE(c.bracket);
                }
}

TEST(ExactMeasure, SmallCases) {
    const auto m = exact_measure(P("12"), 2, 2, R(1, 2));
    EXPECT_EQ(m.normalizer, Rational(7, 2));
    EXPECT_EQ(m.probability[word_index(std::vector<Letter>{1, 2}, 2)], Rational(1, 7));
    EXPECT_EQ(m.probability[word_index(std::vector<Letter>{2, 1}, 2)], Rational(2, 7));
    const auto u = exact_measure(P("123"), 3, 5, R(0));
    for (const auto& p : u.probability) EXPECT_EQ(p, Rational(1, 243));
    const auto s = exact_measure(P("1213"), 3, 7, R(1, 3));
    Rational total = 0;
    for (const auto& p : s.probability) total += p;
    EXPECT_EQ(total, Rational(1));
    EXPECT_EQ(s.normalizer, partition_function(P("1213"), 3, 7, R(1, 3)).value);
    EXPECT_THROW(exact_measure(P("12"), 2, 21, R(1, 2)), budget_exceeded);
}

TEST(WordIndex, RoundTrip) {
    for (std::uint64_t i = 0; i < 81; ++i) EXPECT_EQ(word_index(word_at(i, 3, 4), 3), i);
    EXPECT_EQ(word_at(5, 2, 3), (std::vector<Letter>{2, 1, 2}));
}

TEST(Metropolis, DetailedBalanceExact) {
    const Pattern v = P("132");
    const int k = 3;
    const std::size_t n = 6;
    const Rational x(2, 5);
    const OccurrenceMatcher m(v, k);
    const auto meas = exact_measure(v, k, n, x);
    Stream rng(17, 0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto i = rng.below(meas.probability.size());
        auto w = word_at(i, k, n);
        auto w2 = w;
        const auto pos = rng.below(n);
        w2[pos] = static_cast<Letter>((w2[pos] % k) + 1);
        const auto j = word_index(w2, k);
        EXPECT_EQ(meas.probability[i] * metropolis_probability(m, x, w, w2),
                  meas.probability[j] * metropolis_probability(m, x, w2, w));
    }
    // Rows sum to one.
    const auto w = word_at(100, k, n);
    Rational row = metropolis_probability(m, x, w, w);
    for (std::size_t pos = 0; pos < n; ++pos)
        for (int a = 1; a <= k; ++a) {
            if (a == w[pos]) continue;
            auto w2 = w;
            w2[pos] = a;
            row += metropolis_probability(m, x, w, w2);
        }
    EXPECT_EQ(row, Rational(1));
    auto far = w;
    far[0] = far[0] % k + 1;
    far[1] = far[1] % k + 1;
    EXPECT_EQ(metropolis_probability(m, x, w, far), Rational(0));
}

TEST(Mcmc, UniformAtZero) {
    ChainOptions opt;
    opt.steps = 200000;
    opt.seed = 4;
    opt.thinning = 1;
    const auto run = mcmc_sample(P("12"), 3, 5, 0.0, opt, true);
    EXPECT_DOUBLE_EQ(run.acceptance_rate, 1.0);
    std::vector<double> freq(3, 0);
    double total = 0;
    for (const auto& w : run.words)
        for (Letter a : w) {
            ++freq[a - 1];
            ++total;
        }
    for (double f : freq) EXPECT_NEAR(f / total, 1.0 / 3, 4 * std::sqrt((1.0 / 3) * (2.0 / 3) / (total / 5)));
}

TEST(Mcmc, OccurrenceTrackingIsExact) {
    BoltzmannChain chain(P("2132"), 3, 9, 0.3, 8);
    const OccurrenceMatcher m(P("2132"), 3);
    for (int i = 0; i < 2000; ++i) {
        chain.step();
        ASSERT_EQ(chain.occurrences(), m.count<std::uint64_t>(chain.word()));
    }
}

TEST(Mcmc, ConvergesToExactMeasure) {
    const Pattern v = P("12");
    const auto exact = exact_measure(v, 2, 6, R(1, 2));
    ChainOptions opt;
    opt.steps = 1'000'000;
    opt.seed = 3;
    const auto run = mcmc_sample(v, 2, 6, 0.5, opt);
    EXPECT_EQ(run.burn_in, 120u);
    EXPECT_EQ(run.thinning, 6u);
    EXPECT_LT(total_variation(run, exact), 0.02);
    // Every word within 4 sigma of its exact mass (iid approximation, thinned chain).
    const double N = static_cast<double>(run.occurrences.size());
    for (std::size_t i = 0; i < exact.probability.size(); ++i) {
        const double p = to_double(exact.probability[i]);
        const auto it = run.word_counts.find(i);
        const double e = it == run.word_counts.end() ? 0.0 : static_cast<double>(it->second) / N;
        EXPECT_NEAR(e, p, 4 * std::sqrt(p * (1 - p) / N) + 1e-3) << i;
    }
}

TEST(Mcmc, Rejections) {
    ChainOptions opt;
    EXPECT_THROW(mcmc_sample(P("12"), 2, 6, 1.0, opt), invalid_argument);
    EXPECT_THROW(mcmc_sample(P("12"), 2, 6, -0.1, opt), invalid_argument);
    opt.steps = 0;
    EXPECT_THROW(mcmc_sample(P("12"), 2, 6, 0.5, opt), invalid_argument);
}

TEST(RhoSchedule, Parsing) {
    const auto a = RhoSchedule::parse("n^3");
    EXPECT_DOUBLE_EQ(a.gamma(2), 0.0);
    EXPECT_DOUBLE_EQ(a.x_at(2), 1.0 / 8);
    const auto b = RhoSchedule::parse("4*n^2");
    EXPECT_DOUBLE_EQ(b.gamma(2), 0.25);
    EXPECT_THROW(b.gamma(3), invalid_argument);
    const auto c = RhoSchedule::parse("inf");
    EXPECT_DOUBLE_EQ(c.x_at(10), 0.0);
    EXPECT_DOUBLE_EQ(c.gamma(5), 0.0);
    EXPECT_THROW(RhoSchedule::parse("m^3"), invalid_argument);
    EXPECT_THROW(RhoSchedule::parse("0*n^3"), invalid_argument);
    EXPECT_THROW(RhoSchedule::parse("1/4*n^1").x_at(2), invalid_argument);
}

TEST(WeakLimit, UniformReductionMatchesMean) {
    const Pattern v = P("12");
    const auto rep = weak_limit_report(v, 2, RhoSchedule::parse("inf"), {1.0}, {6, 8, 10, 12});
    EXPECT_DOUBLE_EQ(rep.mean_target, 1.0 / 8);
    for (const auto& pt : rep.points) {
        EXPECT_TRUE(pt.exact);
        const double mu = to_double(exact_moments(v, 2, pt.n).mu);
        EXPECT_NEAR(pt.mean_scaled, mu / (pt.n * pt.n), 1e-12);
        ASSERT_TRUE(pt.entropy.has_value());
        EXPECT_NEAR(*pt.entropy, entropy_exact(v, 2, pt.n), 1e-9);
    }
}

TEST(WeakLimit, GammaZeroApproachesTarget) {
    const auto rep = weak_limit_report(P("12"), 2, RhoSchedule::parse("n^3"), {1.0, 2.0}, {6, 8, 10, 12, 20, 40});
    EXPECT_NEAR(rep.mgf_target[0], std::exp(0.125), 1e-15);
    EXPECT_TRUE(rep.mgf_gap_shrinking[0]);
    EXPECT_TRUE(rep.mgf_gap_shrinking[1]);
    EXPECT_LT(rep.points.back().mgf_gap[0], 0.01);
    for (const auto& pt : rep.points) {
        EXPECT_GE(*pt.entropy, 0.0);
        EXPECT_GT(pt.mgf[0], 1.0);
    }
}

TEST(WeakLimit, ExactAndMcmcAgree) {
    WeakLimitOptions opt;
    opt.samples = 100000;
    opt.seed = 5;
    const auto exact = weak_limit_report(P("12"), 2, RhoSchedule::parse("n^2"), {1.0}, {8}, opt);
    opt.max_classes = 1;
    opt.enumerate_below = 1;
    const auto mc = weak_limit_report(P("12"), 2, RhoSchedule::parse("n^2"), {1.0}, {8}, opt);
    ASSERT_TRUE(exact.points[0].exact);
    ASSERT_FALSE(mc.points[0].exact);
    EXPECT_NEAR(mc.points[0].mean_scaled, exact.points[0].mean_scaled, 0.01);
    EXPECT_NEAR(mc.points[0].mgf[0], exact.points[0].mgf[0], 0.01);
}

TEST(EulerPhi, KnownValue) {
    const auto e = euler_phi(0.5);
    EXPECT_NEAR(e.value, 3.462746619455064, 1e-12);
    EXPECT_LT(e.tail_bound, 1e-17);
    EXPECT_THROW(euler_phi(1.0), invalid_argument);
}

TEST(InversionSandwich, PartitionMatchesMacMahon) {
    for (int k = 2; k <= 4; ++k)
        for (const Rational& x : {R(1, 4), R(1, 2), R(3, 4)}) {
            const auto s = inversion_sandwich(k, x, {1, 2, 5, 9});
            for (const auto& row : s.rows) EXPECT_EQ(row.c, macmahon_21(k, row.n, x)) << k << " " << row.n;
        }
}

TEST(InversionSandwich, LowerBoundHoldsBeyondOneLetter) {
    for (int k = 2; k <= 4; ++k)
        for (const Rational& x : {R(1, 4), R(1, 2), R(3, 4)}) {
            const auto s = inversion_sandwich(k, x, {1, 2, 3, 6, 12});
            // A single letter has no inversion, so c = C(k, k-1) there and strictness fails.
            EXPECT_FALSE(s.rows[0].lower_ok);
            EXPECT_EQ(s.rows[0].c, Rational(k));
            for (std::size_t i = 1; i < s.rows.size(); ++i) EXPECT_TRUE(s.rows[i].lower_ok);
        }
}

TEST(InversionSandwich, ScaledValueTendsToEulerPower) {
    // c / n^{k-1} -> phi(1-x)^{k-1} / (k-1)! with the gap shrinking.
    const auto s = inversion_sandwich(2, R(1, 2), {10, 40, 160});
    EXPECT_NEAR(s.limit_lower, 3.462746619455064, 1e-12);
    double prev = 1e9;
    for (const auto& row : s.rows) {
        const double gap = std::abs(row.scaled - s.limit_lower);
        EXPECT_LT(gap, prev);
        prev = gap;
    }
    EXPECT_LT(prev, 0.05);
    // For k = 2, x = 1/2 that limit exceeds 2 = 1/x, so c overtakes 2(n+1) once n >= 7.
    const auto t = inversion_sandwich(2, R(1, 2), {6, 7});
    EXPECT_TRUE(t.rows[0].upper_ok);
    EXPECT_FALSE(t.rows[1].upper_ok);
    EXPECT_EQ(t.rows[1].c, macmahon_21(2, 7, R(1, 2)));
}
