#include <gtest/gtest.h>

#include <occulex/word.hpp>

using namespace occulex;

TEST(Word, ParsesCompactAndCommaForms) {
    EXPECT_EQ(parse_letters("1332"), (std::vector<Letter>{1, 3, 3, 2}));
    EXPECT_EQ(parse_letters("1,3,3,2"), (std::vector<Letter>{1, 3, 3, 2}));
    EXPECT_EQ(parse_letters("10,2"), (std::vector<Letter>{10, 2}));
    EXPECT_TRUE(parse_letters("").empty());
    EXPECT_TRUE(parse_letters("eps").empty());
    EXPECT_THROW(parse_letters("1a"), invalid_argument);
    EXPECT_THROW(parse_letters("1,,2"), invalid_argument);
    EXPECT_THROW(parse_letters("102"), invalid_argument);
}

TEST(Word, FormatsByAlphabetSize) {
    EXPECT_EQ(Word::parse("1332", 3).str(), "1332");
    EXPECT_EQ(Word::parse("1,3,3,2", 12).str(), "1,3,3,2");
    EXPECT_EQ(Word({}, 2).str(), "");
}

TEST(Word, RejectsLettersOutsideAlphabet) {
    EXPECT_THROW(Word::parse("14", 3), invalid_argument);
    EXPECT_THROW(Word({1}, 0), invalid_argument);
    EXPECT_NO_THROW(Word::parse("", 1));
}

TEST(Word, Concatenation) {
    auto w = Word::parse("12", 3).concat(Word::parse("31", 3));
    EXPECT_EQ(w.str(), "1231");
    EXPECT_EQ(w.size(), 4U);
}

TEST(Pattern, DistinctLettersAndRanks) {
    auto v = Pattern::parse("1332");
    EXPECT_EQ(v.length(), 4U);
    EXPECT_EQ(v.distinct(), 3);
    EXPECT_EQ(std::vector<int>(v.ranks().begin(), v.ranks().end()), (std::vector<int>{0, 2, 2, 1}));
    EXPECT_EQ(std::vector<int>(v.first_seen().begin(), v.first_seen().end()), (std::vector<int>{0, 2, 1}));
    EXPECT_EQ(Pattern::parse("11").distinct(), 1);
    EXPECT_THROW(Pattern::parse(""), invalid_argument);
}

TEST(Pattern, AlphabetRequirement) {
    EXPECT_NO_THROW(Pattern::parse("123").require_alphabet(3));
    EXPECT_THROW(Pattern::parse("123").require_alphabet(2), invalid_argument);
}

TEST(OrderIsomorphism, Examples) {
    auto iso = [](const char* a, const char* b) { return is_order_isomorphic(parse_letters(a), parse_letters(b)); };
    EXPECT_TRUE(iso("132", "132"));
    EXPECT_TRUE(iso("253", "132"));
    EXPECT_TRUE(iso("1554", "1332"));
    EXPECT_FALSE(iso("1544", "1332"));
    EXPECT_FALSE(iso("12", "11"));
    EXPECT_THROW(iso("12", "123"), invalid_argument);
}
