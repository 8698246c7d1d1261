#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "support/random_inputs.hpp"
#include "torsflow/error.hpp"
#include "torsflow/linalg.hpp"

using namespace torsflow;
using torsflow::testing::gaussian;
using torsflow::testing::random_unitary;

namespace {

/// Largest deviation of V^H V from the identity.
double orthonormality_defect(const CMatrix& v) {
    return max_abs(v.adjoint() * v - CMatrix::Identity(v.cols(), v.cols()));
}

}  // namespace

TEST(RankNullspace, DiagonalWithZero) {
    CMatrix a = CMatrix::Zero(2, 2);
    a(0, 0) = 2.0;
    const RankResult r = rank_nullspace(a, 1e-10);
    EXPECT_EQ(r.rank, 1);
    ASSERT_EQ(r.kernel_basis.cols(), 1);
    ASSERT_EQ(r.cokernel_basis.cols(), 1);
    EXPECT_NEAR(std::abs(r.kernel_basis(1, 0)), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(r.cokernel_basis(1, 0)), 1.0, 1e-12);
    EXPECT_FALSE(r.ambiguous_rank);
}

TEST(RankNullspace, Identity) {
    const RankResult r = rank_nullspace(CMatrix::Identity(3, 3));
    EXPECT_EQ(r.rank, 3);
    EXPECT_EQ(r.kernel_basis.cols(), 0);
    EXPECT_EQ(r.cokernel_basis.cols(), 0);
}

TEST(RankNullspace, RankOneSymmetric) {
    CMatrix a(2, 2);
    a << 1.0, -1.0, -1.0, 1.0;
    const RankResult r = rank_nullspace(a);
    EXPECT_EQ(r.rank, 1);
    EXPECT_NEAR(r.singular_values(0), 2.0, 1e-12);
    EXPECT_NEAR(r.singular_values(1), 0.0, 1e-12);
    ASSERT_EQ(r.kernel_basis.cols(), 1);
    // phase fixed: largest entry real positive, so (1, 1) / sqrt 2 exactly
    EXPECT_NEAR(std::abs(r.kernel_basis(0, 0) - 1.0 / std::sqrt(2.0)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(r.kernel_basis(1, 0) - 1.0 / std::sqrt(2.0)), 0.0, 1e-12);
}

TEST(RankNullspace, ZeroMatrixUsesAbsoluteThreshold) {
    const RankResult r = rank_nullspace(CMatrix::Zero(2, 3), 1e-10);
    EXPECT_EQ(r.rank, 0);
    EXPECT_DOUBLE_EQ(r.tolerance_used, 1e-10);
    EXPECT_EQ(r.kernel_basis.cols(), 3);
    EXPECT_EQ(r.cokernel_basis.cols(), 2);
}

TEST(RankNullspace, ThresholdRule) {
    CMatrix a = CMatrix::Zero(3, 3);
    a(0, 0) = 1.0;
    a(1, 1) = 1e-9;
    a(2, 2) = 1e-12;
    const RankResult r = rank_nullspace(a, 1e-10);
    EXPECT_DOUBLE_EQ(r.tolerance_used, 1e-10 * 3 * 1.0);
    EXPECT_EQ(r.rank, 2);
}

TEST(RankNullspace, AmbiguousRankFlagged) {
    CMatrix a = CMatrix::Zero(2, 2);
    a(0, 0) = 1.0;
    a(1, 1) = 5e-10;  // within a factor 10 of the 2e-10 threshold
    const RankResult r = rank_nullspace(a, 1e-10);
    EXPECT_TRUE(r.ambiguous_rank);
}

TEST(RankNullspace, NonFiniteRejected) {
    CMatrix a = CMatrix::Identity(2, 2);
    a(0, 1) = Complex(std::nan(""), 0.0);
    try {
        rank_nullspace(a);
        FAIL() << "expected InvalidInput";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidInput);
    }
}

TEST(RankNullspace, RandomUnitaryHasFullRank) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const CMatrix u = random_unitary(rng, 1 + trial % 6);
        const RankResult r = rank_nullspace(u);
        EXPECT_EQ(r.rank, u.cols());
        EXPECT_EQ(r.kernel_basis.cols(), 0);
        EXPECT_LT(unitarity_defect(u), 1e-12);
    }
}

TEST(RankNullspace, RankPropertiesOnRandomLowRank) {
    std::mt19937_64 rng(12);
    std::uniform_int_distribution<int> dim(1, 7);
    for (int trial = 0; trial < 50; ++trial) {
        const Index rows = dim(rng), cols = dim(rng), k = std::min<Index>(dim(rng), std::min(rows, cols));
        const CMatrix a = gaussian(rng, rows, k) * gaussian(rng, k, cols);
        const RankResult r = rank_nullspace(a);
        const RankResult rh = rank_nullspace(CMatrix(a.adjoint()));
        EXPECT_EQ(r.rank, k);
        EXPECT_EQ(r.rank, rh.rank);
        EXPECT_EQ(r.kernel_basis.cols() - r.cokernel_basis.cols(), cols - rows);
        EXPECT_EQ(r.rank + r.kernel_basis.cols(), cols);
        EXPECT_EQ(r.rank + r.cokernel_basis.cols(), rows);
        if (r.kernel_basis.cols() > 0) {
            EXPECT_LT(max_abs(a * r.kernel_basis), 1e-10 * r.singular_values(0));
            EXPECT_LT(orthonormality_defect(r.kernel_basis), 1e-12);
        }
        if (r.cokernel_basis.cols() > 0) {
            EXPECT_LT(max_abs(r.cokernel_basis.adjoint() * a), 1e-10 * r.singular_values(0));
            EXPECT_LT(orthonormality_defect(r.cokernel_basis), 1e-12);
        }
        for (Index i = 1; i < r.singular_values.size(); ++i)
            EXPECT_LE(r.singular_values(i), r.singular_values(i - 1));
    }
}

TEST(DetModulus, Examples) {
    EXPECT_DOUBLE_EQ(det_modulus(CMatrix::Identity(4, 4)), 1.0);
    EXPECT_DOUBLE_EQ(det_modulus(CMatrix::Constant(1, 1, 2.0)), 2.0);
    const Complex zeta = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
    EXPECT_NEAR(det_modulus(CMatrix::Constant(1, 1, 1.0 - zeta)), std::sqrt(3.0), 1e-14);
    EXPECT_DOUBLE_EQ(det_modulus(CMatrix(0, 0)), 1.0);
}

TEST(DetModulus, SingularIsExactlyZero) {
    CMatrix a(2, 2);
    a << 1.0, 2.0, 2.0, 4.0;
    EXPECT_EQ(det_modulus(a), 0.0);
}

TEST(DetModulus, NonSquareRejected) {
    try {
        det_modulus(CMatrix::Zero(2, 3));
        FAIL() << "expected InvalidInput";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidInput);
    }
}

TEST(DetModulus, Multiplicative) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 30; ++trial) {
        const CMatrix a = gaussian(rng, 6, 6) + 4.0 * CMatrix::Identity(6, 6);
        const CMatrix b = gaussian(rng, 6, 6) + 4.0 * CMatrix::Identity(6, 6);
        const double lhs = det_modulus(a * b);
        const double rhs = det_modulus(a) * det_modulus(b);
        EXPECT_LT(std::abs(lhs / rhs - 1.0), 1e-10);
    }
}

TEST(LeastSquares, SolvesConsistentSystem) {
    std::mt19937_64 rng(14);
    const CMatrix a = gaussian(rng, 5, 3);
    const CMatrix x = gaussian(rng, 3, 2);
    const CMatrix sol = least_squares(a, a * x, RankOptions{});
    EXPECT_LT(max_abs(sol - x), 1e-10);
}

TEST(SpanBasis, OrthonormalAndSpanning) {
    std::mt19937_64 rng(15);
    const CMatrix v = gaussian(rng, 6, 2) * gaussian(rng, 2, 4);
    const CMatrix b = span_basis(v, RankOptions{});
    EXPECT_EQ(b.cols(), 2);
    EXPECT_LT(orthonormality_defect(b), 1e-12);
    EXPECT_LT(max_abs(v - b * (b.adjoint() * v)), 1e-10);
}
