#include <gtest/gtest.h>

#include <numbers>

#include "support/random_inputs.hpp"
#include "torsflow/cw_complex.hpp"

using namespace torsflow;

namespace {

Representation character(Complex z) { return Representation::character("t", z); }

Complex root(int p, int k) { return std::polar(1.0, 2.0 * std::numbers::pi * k / p); }

int euler(const CWComplex& k) {
    int chi = 0;
    for (int i = 0; i < 4; ++i) chi += (i % 2 ? -1 : 1) * static_cast<int>(k.cells[static_cast<std::size_t>(i)].size());
    return chi;
}

}  // namespace

TEST(CWComplex, PointHasTrivialCohomology) {
    const CWTorsion r = cw_torsion(point_complex(), Representation::trivial(1, {}));
    EXPECT_EQ(r.dims, (std::vector<Index>{1}));
    EXPECT_NEAR(r.torsion.modulus(), 1.0, 1e-14);
}

TEST(CWComplex, CircleWithMinusOne) {
    const BasedComplex c = twisted_cochain(circle_complex(), character(-1.0));
    ASSERT_EQ(c.top_degree(), 1);
    EXPECT_NEAR(std::abs(c.d(0)(0, 0)), 2.0, 1e-15);
    const CWTorsion r = cw_torsion(circle_complex(), character(-1.0));
    EXPECT_TRUE(r.acyclic);
    EXPECT_NEAR(r.torsion.modulus(), 2.0, 1e-14);
}

TEST(CWComplex, TorusAndKleinDims) {
    const CWTorsion t = cw_torsion(torus_complex(), Representation::trivial(1, {"a", "b"}));
    EXPECT_EQ(t.dims, (std::vector<Index>{1, 2, 1}));
    const CWTorsion k = cw_torsion(klein_bottle_complex(), Representation::trivial(1, {"a", "b"}));
    EXPECT_EQ(k.dims, (std::vector<Index>{1, 1, 0}));
}

TEST(CWComplex, ProjectiveSpace) {
    const CWTorsion r = cw_torsion(rp3_complex(), character(-1.0));
    EXPECT_TRUE(r.acyclic);
    EXPECT_NEAR(r.torsion.modulus(), 4.0, 1e-10);
    const CWTorsion trivial = cw_torsion(rp3_complex(), character(1.0));
    EXPECT_EQ(trivial.dims, (std::vector<Index>{1, 0, 0, 1}));
}

TEST(CWComplex, LensClosedForm) {
    for (auto [p, q] : {std::pair{3, 1}, {5, 1}, {5, 2}, {7, 1}, {7, 3}}) {
        const int qs = lens_inverse(p, q);
        EXPECT_EQ((q * qs) % p, 1);
        for (int k = 1; k < p; ++k) {
            const Complex z = root(p, k);
            const double expected = std::abs(z - 1.0) * std::abs(std::pow(z, qs) - 1.0);
            const CWTorsion r = cw_torsion(lens_space(p, q), character(z));
            EXPECT_NEAR(r.torsion.modulus() / expected, 1.0, 1e-10) << p << "," << q << " k=" << k;
        }
    }
}

TEST(CWComplex, LensRejectsNonCoprime) {
    try {
        lens_space(4, 2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidInput);
    }
    EXPECT_THROW(lens_inverse(1, 1), Error);
}

TEST(CWComplex, ElementaryExpansionKeepsTorsion) {
    for (const CWComplex& k : corpus()) {
        const auto gens = k.name == "torus" || k.name == "klein" ? std::vector<std::string>{"a", "b"}
                          : k.name == "point"                   ? std::vector<std::string>{}
                                                                : std::vector<std::string>{"t"};
        std::map<std::string, CMatrix> values;
        for (const auto& g : gens) values[g] = CMatrix::Constant(1, 1, g == "b" ? -1.0 : root(7, 3));
        if (k.name == "klein") values["a"] = CMatrix::Constant(1, 1, -1.0);
        if (k.name.rfind("L(", 0) == 0 || k.name == "rp3") {
            const int p = k.name == "rp3" ? 2 : std::stoi(k.name.substr(2));
            values["t"] = CMatrix::Constant(1, 1, root(p, 1));
        }
        const Representation rep(1, values);
        const CWTorsion base = cw_torsion(k, rep);
        for (int dim = 0; dim < k.top_dimension(); ++dim) {
            const CWComplex e = elementary_expansion(k, dim, 0);
            EXPECT_EQ(euler(e), euler(k));
            const CWTorsion r = cw_torsion(e, rep);
            EXPECT_EQ(r.dims, std::vector<Index>(base.dims.begin(), base.dims.end())) << k.name;
            if (base.acyclic) EXPECT_NEAR(r.torsion.log_modulus, base.torsion.log_modulus, 1e-10) << k.name;
        }
    }
}

TEST(CWComplex, EulerCharacteristicMatchesCohomology) {
    for (const CWComplex& k : corpus()) {
        std::vector<std::string> gens;
        for (const auto& cells : k.cells)
            for (const auto& c : cells)
                for (const auto& f : c.boundary)
                    for (const auto& l : f.path) gens.push_back(l.generator);
        const CWTorsion r = cw_torsion(k, Representation::trivial(2, gens));
        int chi = 0;
        for (std::size_t i = 0; i < r.dims.size(); ++i) chi += (i % 2 ? -1 : 1) * static_cast<int>(r.dims[i]);
        EXPECT_EQ(chi, 2 * euler(k)) << k.name;
    }
}

TEST(CWComplex, ConjugateCharacterGivesSameModulus) {
    for (int k = 1; k < 5; ++k) {
        const Complex z = root(5, k);
        const double a = cw_torsion(lens_space(5, 2), character(z)).torsion.log_modulus;
        const double b = cw_torsion(lens_space(5, 2), character(std::conj(z))).torsion.log_modulus;
        EXPECT_NEAR(a, b, 1e-10);
    }
}

TEST(CWComplex, RejectsBadCells) {
    CWComplex k = circle_complex();
    k.cells[1][0].boundary.push_back({"nope", 1, {}});
    try {
        twisted_cochain(k, character(-1.0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidCW);
    }
    // t - 1 followed by a 2-cell with boundary e1 breaks d^2 = 0
    CWComplex bad = circle_complex();
    bad.cells[2].push_back(Cell{"e2", {{bad.cells[1][0].id, 1, {}}}});
    EXPECT_THROW(twisted_cochain(bad, character(-1.0)), Error);
}
