#include <gtest/gtest.h>

#include "support/random_inputs.hpp"
#include "torsflow/error.hpp"
#include "torsflow/representation.hpp"

using namespace torsflow;

TEST(Word, ParsesPowersAndDropsZero) {
    const Word w = parse_word("a  b^-1 c^3 d^0");
    ASSERT_EQ(w.size(), 3u);
    EXPECT_EQ(w[0].generator, "a");
    EXPECT_EQ(w[0].power, 1);
    EXPECT_EQ(w[1].power, -1);
    EXPECT_EQ(w[2].power, 3);
    EXPECT_TRUE(parse_word("").empty());
    EXPECT_EQ(format_word(w), "a b^-1 c^3");
}

TEST(Word, RejectsMalformedLetters) {
    for (const char* bad : {"a^", "^2", "a^x", "a^-"}) {
        try {
            parse_word(bad);
            FAIL() << bad;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::InvalidInput) << bad;
        }
    }
}

TEST(Representation, EvaluatesLeftToRight) {
    CMatrix a(2, 2), b(2, 2);
    a << 0.0, 1.0, 1.0, 0.0;
    b << 1.0, 0.0, 0.0, Complex(0.0, 1.0);
    const Representation rep(2, {{"a", a}, {"b", b}});
    EXPECT_TRUE(rep.evaluate("a b").isApprox(a * b));
    EXPECT_TRUE(rep.evaluate("b^-1").isApprox(b.adjoint()));
    EXPECT_TRUE(rep.evaluate("b^3 a").isApprox(b * b * b * a));
    EXPECT_TRUE(rep.evaluate("").isApprox(CMatrix::Identity(2, 2)));
}

TEST(Representation, UnknownGenerator) {
    const Representation rep = Representation::character("t", -1.0);
    try {
        rep.evaluate("s");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownGenerator);
    }
}

TEST(Representation, RejectsNonUnitaryAndBadShapes) {
    EXPECT_THROW(Representation(1, {{"t", CMatrix::Constant(1, 1, 2.0)}}), Error);
    EXPECT_THROW(Representation(2, {{"t", CMatrix::Identity(1, 1)}}), Error);
    CMatrix nan = CMatrix::Identity(1, 1);
    nan(0, 0) = std::nan("");
    EXPECT_THROW(Representation(1, {{"t", nan}}), Error);
}

TEST(Representation, ConjugationPreservesRelations) {
    std::mt19937_64 rng(41);
    const CMatrix a = torsflow::testing::random_unitary(rng, 3), b = torsflow::testing::random_unitary(rng, 3);
    const CMatrix v = torsflow::testing::random_unitary(rng, 3);
    const Representation rep(3, {{"a", a}, {"b", b}});
    const Representation c = rep.conjugated(v);
    EXPECT_TRUE(c.evaluate("a b a^-1").isApprox(v * a * b * a.adjoint() * v.adjoint(), 1e-12));
}
