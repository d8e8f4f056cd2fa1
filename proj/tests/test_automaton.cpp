#include <gtest/gtest.h>

#include <map>
#include <random>
#include <regex>

#include <occulex/automaton.hpp>

using namespace occulex;

namespace {

std::vector<std::vector<Letter>> words_upto(std::size_t n, int k) {
    std::vector<std::vector<Letter>> out{{}};
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i].size() == n) continue;
        for (int a = 1; a <= k; ++a) {
            auto w = out[i];
            w.push_back(a);
            out.push_back(std::move(w));
        }
    }
    return out;
}

// Capped counts of w*u over every u with |u| <= depth, using the brute-force counter.
std::vector<int> oracle_signature(const Pattern& v, const std::vector<Letter>& w, int r, int k, int depth) {
    std::vector<int> sig;
    for (const auto& u : words_upto(static_cast<std::size_t>(depth), k)) {
        auto wu = w;
        wu.insert(wu.end(), u.begin(), u.end());
        sig.push_back(static_cast<int>(std::min<BigInt>(occ_oracle(v, wu), r + 1)));
    }
    return sig;
}

std::vector<std::vector<int>> matrix_of(const Automaton& a) { return transition_matrix(a).entries; }

} // namespace

TEST(Automaton, Example123r1k3) {
    const auto a = build_automaton(Pattern::parse("123"), 1, 3);
    ASSERT_EQ(a.size(), 6U);
    std::vector<std::string> witnesses;
    for (std::size_t i = 0; i < a.size(); ++i) witnesses.push_back(format_letters(a.state(i).witness));
    EXPECT_EQ(witnesses, (std::vector<std::string>{"", "1", "11", "12", "112", "123"}));
    const std::vector<std::vector<int>> expected{{2, 1, 0, 0, 0, 0}, {0, 1, 1, 1, 0, 0}, {0, 0, 2, 0, 1, 0},
                                                 {0, 0, 0, 1, 1, 1}, {0, 0, 0, 0, 2, 0}, {0, 0, 0, 0, 0, 2}};
    EXPECT_EQ(matrix_of(a), expected);
    EXPECT_EQ(loop_profile(a), (std::vector<int>{2, 1, 2, 1, 2, 2}));
    EXPECT_TRUE(a.state(0).initial);
}

TEST(Automaton, IdentityPatternAvoidanceHasKStates) {
    for (int k = 2; k <= 7; ++k) {
        std::vector<Letter> id(k);
        for (int i = 0; i < k; ++i) id[i] = i + 1;
        const auto a = build_automaton(Pattern(id), 0, k);
        ASSERT_EQ(a.size(), static_cast<std::size_t>(k));
        const auto t = matrix_of(a);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) EXPECT_EQ(t[i][j], i == j ? k - 1 : j == i + 1 ? 1 : 0);
        for (int i = 0; i + 1 < k; ++i) EXPECT_EQ(a.state(i + 1).witness, std::vector<Letter>(id.begin(), id.begin() + i + 1));
    }
}

TEST(Automaton, IdentityPatternOneOccurrenceHas2kStates) {
    for (int k = 2; k <= 6; ++k) {
        std::vector<Letter> id(k);
        for (int i = 0; i < k; ++i) id[i] = i + 1;
        EXPECT_EQ(build_automaton(Pattern(id), 1, k).size(), static_cast<std::size_t>(2 * k)) << "k=" << k;
    }
}

TEST(Automaton, SignatureAndRefinementAgree) {
    for (int k = 1; k <= 3; ++k)
        for (const auto& w : words_upto(3, k)) {
            if (w.empty()) continue;
            const Pattern v(w);
            for (int r = 0; r <= 2; ++r) {
                BuildOptions sig;
                sig.method = BuildMethod::signature;
                const auto a = build_automaton(v, r, k);
                const auto b = build_automaton(v, r, k, sig);
                ASSERT_TRUE(a == b) << v.str() << " r=" << r << " k=" << k;
            }
        }
}

TEST(Automaton, StatesMatchOracleEquivalenceClasses) {
    struct Case {
        const char* v;
        int r;
        int k;
        std::size_t len;
    };
    for (const Case c : {Case{"12", 1, 2, 7}, Case{"121", 1, 2, 6}, Case{"123", 1, 3, 4}, Case{"21", 2, 2, 6}}) {
        const Pattern v = Pattern::parse(c.v);
        const auto a = build_automaton(v, c.r, c.k);
        const int depth = signature_depth(v, c.r);
        std::map<std::vector<int>, int> state_of_signature;
        std::map<int, std::vector<int>> signature_of_state;
        for (const auto& w : words_upto(c.len, c.k)) {
            const int s = a.run(w);
            const bool sink = occ_oracle(v, w) > c.r;
            ASSERT_EQ(s == Automaton::kAbsorbed, sink) << format_letters(w);
            if (sink) continue;
            const auto sig = oracle_signature(v, w, c.r, c.k, depth);
            auto [it, fresh] = state_of_signature.emplace(sig, s);
            ASSERT_EQ(it->second, s) << "equivalent words in different states: " << format_letters(w);
            auto [jt, fresh2] = signature_of_state.emplace(s, sig);
            ASSERT_EQ(jt->second, sig) << "inequivalent words share a state: " << format_letters(w);
        }
        EXPECT_EQ(signature_of_state.size(), a.size()) << c.v;
    }
}

TEST(Automaton, TriangularAndCoverage) {
    for (int k = 1; k <= 4; ++k)
        for (const auto& w : words_upto(3, std::min(k, 3))) {
            if (w.empty()) continue;
            const Pattern v(w);
            for (int r = 0; r <= 2; ++r) {
                const auto a = build_automaton(v, r, k);
                EXPECT_EQ(a.transition_count() + a.absorbed_count(), a.size() * static_cast<std::size_t>(k));
                const auto t = transition_matrix(a);
                for (std::size_t i = 0; i < a.size(); ++i) {
                    int row = 0;
                    int absorbed = 0;
                    for (std::size_t j = 0; j < a.size(); ++j) {
                        row += t(i, j);
                        if (j < i) {
                            EXPECT_EQ(t(i, j), 0);
                        }
                    }
                    for (int c = 1; c <= k; ++c) absorbed += a.absorbed(i, c);
                    EXPECT_EQ(row + absorbed, k);
                    EXPECT_EQ(t.loops[i], a.state(i).loops);
                }
                const auto loops = loop_profile(a);
                EXPECT_EQ(loops.front(), v.distinct() - 1);
                if (v.distinct() == 2) {
                    EXPECT_LE(*std::max_element(loops.begin(), loops.end()), 1);
                }
            }
        }
}

TEST(Automaton, StatesDetermineOccurrenceCount) {
    const Pattern v = Pattern::parse("122");
    const auto a = build_automaton(v, 2, 2);
    std::map<int, BigInt> occ_of_state;
    for (const auto& w : words_upto(9, 2)) {
        const int s = a.run(w);
        if (s == Automaton::kAbsorbed) continue;
        auto [it, fresh] = occ_of_state.emplace(s, occ_oracle(v, w));
        ASSERT_EQ(it->second, occ_oracle(v, w));
    }
}

TEST(Automaton, SingleStateDegenerateCase) {
    const auto a = build_automaton(Pattern::parse("1"), 0, 1);
    ASSERT_EQ(a.size(), 1U);
    EXPECT_EQ(matrix_of(a), (std::vector<std::vector<int>>{{0}}));
    EXPECT_EQ(loop_profile(a), (std::vector<int>{0}));
    // Alphabet smaller than the pattern's largest letter is rejected.
    EXPECT_THROW(build_automaton(Pattern::parse("12"), 0, 1), invalid_argument);
}

TEST(Automaton, ConstantPatternLoops) {
    const auto a = build_automaton(Pattern::parse("11"), 1, 3);
    EXPECT_EQ(loop_profile(a).front(), 0);
}

TEST(Automaton, SignatureBudget) {
    BuildOptions sig;
    sig.method = BuildMethod::signature;
    sig.max_signature_entries = 1000;
    EXPECT_THROW(build_automaton(Pattern::parse("123"), 1, 3, sig), budget_exceeded);
    BuildOptions states;
    states.max_states = 3;
    EXPECT_THROW(build_automaton(Pattern::parse("123"), 1, 3, states), budget_exceeded);
    EXPECT_THROW(build_automaton(Pattern::parse("12"), -1, 2), invalid_argument);
}

TEST(StateSignature, EmptyExtensionIsCappedCount) {
    const Pattern v = Pattern::parse("12");
    const OccurrenceMatcher m(v, 2);
    const std::vector<Letter> w{1, 2, 2};
    const StateSignature s(m, w, 1, signature_depth(v, 1));
    EXPECT_EQ(s.at({}), 2);
    const StateSignature t(m, w, 3, 2);
    EXPECT_EQ(t.at({}), 2);
    const std::vector<Letter> u{2};
    EXPECT_EQ(t.at(u), 3);
}

TEST(StateSignature, EquivalenceIsConsistent) {
    // Equality of signatures is an equivalence relation; spot-check transitivity on random triples.
    const Pattern v = Pattern::parse("12");
    const OccurrenceMatcher m(v, 2);
    std::mt19937_64 gen(9);
    std::uniform_int_distribution<int> letter(1, 2);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::vector<Letter>> ws(3);
        for (auto& w : ws)
            for (int i = 0; i < 4; ++i) w.push_back(letter(gen));
        const StateSignature a(m, ws[0], 1, 4), b(m, ws[1], 1, 4), c(m, ws[2], 1, 4);
        EXPECT_TRUE(a == a);
        EXPECT_EQ(a == b, b == a);
        if (a == b && b == c) {
            EXPECT_TRUE(a == c);
        }
    }
}

TEST(ExportDot, StructureAndDeterminism) {
    const auto a = build_automaton(Pattern::parse("123"), 1, 3);
    const auto dot = export_dot(a);
    EXPECT_EQ(dot, export_dot(build_automaton(Pattern::parse("123"), 1, 3)));
    const std::regex node(R"(\n  s\d+ \[label)");
    const std::regex edge(R"(\n  s\d+ -> s\d+)");
    const auto count = [&](const std::regex& re) {
        return static_cast<std::size_t>(std::distance(std::sregex_iterator(dot.begin(), dot.end(), re), std::sregex_iterator()));
    };
    EXPECT_EQ(count(node), a.size());
    const auto t = transition_matrix(a);
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < t.size(); ++i)
        for (std::size_t j = 0; j < t.size(); ++j) pairs += t(i, j) > 0;
    EXPECT_EQ(count(edge), pairs);
    EXPECT_NE(dot.find("s3 -> s5 [label=\"3\"]"), std::string::npos);
}
