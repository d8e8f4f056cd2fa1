#include <gtest/gtest.h>

#include <random>

#include <occulex/polynomial.hpp>

using namespace occulex;

namespace {

IntPolynomial random_poly(std::mt19937_64& gen, int degree) {
    std::uniform_int_distribution<int> coeff(-9, 9);
    std::vector<BigInt> c;
    for (int i = 0; i <= degree; ++i) c.emplace_back(coeff(gen));
    if (c.back() == 0) c.back() = 1;
    return IntPolynomial(c);
}

} // namespace

TEST(IntPolynomial, CanonicalForm) {
    EXPECT_TRUE(IntPolynomial({0, 0}).is_zero());
    EXPECT_EQ(IntPolynomial({1, 2, 0}).degree(), 1);
    EXPECT_EQ(IntPolynomial().degree(), -1);
    EXPECT_EQ(IntPolynomial({1, -5, 10, -8, 1}).str(), "x^4 - 8x^3 + 10x^2 - 5x + 1");
    EXPECT_EQ(IntPolynomial({0, -1}).str(), "-x");
    EXPECT_EQ(IntPolynomial().str(), "0");
}

TEST(IntPolynomial, Arithmetic) {
    const IntPolynomial a{1, -2};
    const IntPolynomial b{1, -1};
    EXPECT_EQ(a * b, IntPolynomial({1, -3, 2}));
    EXPECT_EQ(a + b, IntPolynomial({2, -3}));
    EXPECT_EQ(a - a, IntPolynomial());
    EXPECT_EQ(a.pow(3), IntPolynomial({1, -6, 12, -8}));
    EXPECT_EQ((a * b).divide_exact(b), a);
    EXPECT_THROW(IntPolynomial({1, 0, 1}).divide_exact(b), invariant_violation);
    EXPECT_EQ(IntPolynomial({1, -3, 2}).eval(Rational(1, 2)), 0);
}

TEST(IntPolynomial, ContentAndPrimitivePart) {
    const IntPolynomial p{-6, 4, -2};
    EXPECT_EQ(p.content(), 2);
    EXPECT_EQ(p.primitive_part(), IntPolynomial({3, -2, 1}));
}

TEST(IntPolynomial, PseudoRemainderIdentity) {
    std::mt19937_64 gen(1);
    for (int trial = 0; trial < 100; ++trial) {
        const auto a = random_poly(gen, 6);
        const auto b = random_poly(gen, 3);
        const auto r = a.pseudo_remainder(b);
        EXPECT_LT(r.degree(), b.degree());
        // lc(b)^(deg a - deg b + 1) a - r is divisible by b.
        const auto scaled = a * ipow(b.leading(), static_cast<unsigned long long>(a.degree() - b.degree() + 1));
        EXPECT_TRUE((scaled - r).try_divide(b).second);
    }
}

TEST(PolynomialGcd, RecoversCommonFactor) {
    std::mt19937_64 gen(2);
    for (int trial = 0; trial < 100; ++trial) {
        const auto g = random_poly(gen, 2).primitive_part();
        const auto a = random_poly(gen, 3);
        const auto b = random_poly(gen, 2);
        const auto found = polynomial_gcd(a * g, b * g);
        // found must be a multiple of g and divide both products.
        EXPECT_TRUE(found.try_divide(g).second);
        EXPECT_TRUE((a * g).try_divide(found).second);
        EXPECT_TRUE((b * g).try_divide(found).second);
    }
    EXPECT_EQ(polynomial_gcd(IntPolynomial({1, -3, 2}), IntPolynomial({1, -2})), IntPolynomial({-1, 2}));
    EXPECT_EQ(polynomial_gcd(IntPolynomial({1, 1}), IntPolynomial({1, -1})), IntPolynomial::constant(1));
}
