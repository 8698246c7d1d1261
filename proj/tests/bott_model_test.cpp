#include <gtest/gtest.h>

#include "support/random_inputs.hpp"
#include "torsflow/bott_model.hpp"

using namespace torsflow;
using namespace torsflow::testing;

namespace {

ErrorCode first_code(const BottModel& m) {
    const auto d = validate_model(m);
    EXPECT_FALSE(d.empty());
    return d.empty() ? ErrorCode::InvalidInput : d.front().code;
}

}  // namespace

TEST(BottModel, KovalevskayaIsValid) {
    const BottModel m = kovalevskaya(Complex(-1.0));
    EXPECT_TRUE(validate_model(m).empty());
    EXPECT_TRUE(model_warnings(m).empty());
}

TEST(BottModel, TiersAndLevels) {
    const auto min_c = circle("a", 0, 1, "", 0), sad = circle("b", 1, -1, "", 1), max_c = circle("c", 2, 1, "", 2);
    const auto min_t = torus("d", BlockKind::Torus, Extremal::Min, "", "", 0);
    const auto max_k = torus("e", BlockKind::Klein, Extremal::Max, "", "", 2);
    EXPECT_EQ(min_c.tier(), 0);
    EXPECT_EQ(min_t.tier(), 1);
    EXPECT_EQ(sad.tier(), 2);
    EXPECT_EQ(max_k.tier(), 3);
    EXPECT_EQ(max_c.tier(), 4);
    EXPECT_EQ(min_t.level(), 0);
    EXPECT_EQ(sad.level(), 1);
    EXPECT_EQ(max_k.level(), 2);
    EXPECT_EQ(min_t.degree(), 1);
    EXPECT_EQ(max_k.degree(), 2);
    EXPECT_EQ(max_k.labels(), (std::vector<std::string>{"p", "q", "r", "s"}));
    EXPECT_EQ(*max_k.point_index("p"), 1);
    EXPECT_EQ(*max_k.point_index("s"), 3);
    EXPECT_EQ(*sad.point_index("z"), 2);
    EXPECT_FALSE(sad.point_index("p").has_value());
}

TEST(BottModel, MaximumBeforeSaddleIsOrderError) {
    BottModel m = kovalevskaya(Complex(-1.0));
    std::swap(m.blocks[4], m.blocks[5]);
    EXPECT_EQ(first_code(m), ErrorCode::ModelOrderError);
}

TEST(BottModel, DecreasingCriticalValueIsOrderError) {
    BottModel m = kovalevskaya(Complex(-1.0));
    m.blocks[5].critical_value = 0.5;
    EXPECT_EQ(first_code(m), ErrorCode::ModelOrderError);
}

TEST(BottModel, SaddleToSaddleViolatesAssumption) {
    BottModel m = kovalevskaya(Complex(-1.0));
    m.connections.push_back(connect("r1.z", "r2.w", {{1, {}}}));
    EXPECT_EQ(first_code(m), ErrorCode::AssumptionViolated);
    try {
        require_valid(m);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::AssumptionViolated);
    }
}

TEST(BottModel, StructuralErrors) {
    BottModel m = kovalevskaya(Complex(-1.0));
    m.blocks[1].id = "m1";
    EXPECT_EQ(first_code(m), ErrorCode::InvalidModel);

    m = kovalevskaya(Complex(-1.0));
    m.blocks[2].index = 3;
    EXPECT_EQ(first_code(m), ErrorCode::InvalidModel);

    m = kovalevskaya(Complex(-1.0));
    m.blocks[2].holonomy = parse_word("s");
    EXPECT_EQ(first_code(m), ErrorCode::UnknownGenerator);

    m = kovalevskaya(Complex(-1.0));
    m.connections.push_back(connect("n.w", "m1.w", {{1, {}}}));  // index 2 -> 0
    EXPECT_EQ(first_code(m), ErrorCode::InvalidModel);

    m = kovalevskaya(Complex(-1.0));
    m.connections.front().orbits.front().sign = 2;
    EXPECT_EQ(first_code(m), ErrorCode::InvalidModel);
}

TEST(BottModel, NonCommutingHolonomyWarns) {
    CMatrix a(2, 2), b(2, 2);
    a << 0.0, 1.0, 1.0, 0.0;
    b << 1.0, 0.0, 0.0, -1.0;
    BottModel m;
    m.representation = Representation(2, {{"a", a}, {"b", b}});
    m.blocks = {torus("T", BlockKind::Torus, Extremal::Min, "a", "b", 0.0)};
    EXPECT_TRUE(validate_model(m).empty());
    const auto w = model_warnings(m);
    ASSERT_EQ(w.size(), 1u);
    EXPECT_EQ(w.front().rfind("NonCommutingHolonomy", 0), 0u);
}

TEST(BottModel, MorseExpansionFollowsBlockOrder) {
    BottModel m = kovalevskaya(Complex(-1.0));
    const MorseData d = expand_morse(m);
    EXPECT_EQ(d.cells[0].size(), 2u);  // m1.w m2.w
    EXPECT_EQ(d.cells[1].size(), 5u);  // m1.z m2.z r1.w r2.w r3.w
    EXPECT_EQ(d.cells[2].size(), 4u);  // r1.z r2.z r3.z n.w
    EXPECT_EQ(d.cells[3].size(), 1u);  // n.z
    EXPECT_EQ(d.cells[1][2].label, "w");
    EXPECT_EQ(d.cells[1][2].block, 2u);
    EXPECT_EQ(d.cells[1][2].level, 1);
    const auto loc = d.locate(5, "z");
    ASSERT_TRUE(loc.has_value());
    EXPECT_EQ(loc->first, 3);
    EXPECT_EQ(loc->second, 0u);

    m.blocks.insert(m.blocks.begin() + 5, torus("K", BlockKind::Klein, Extremal::Max, "t", "t", 2.0));
    const MorseData e = expand_morse(m);
    EXPECT_EQ(e.cells[1].size(), 6u);
    EXPECT_EQ(e.cells[2].size(), 6u);
    EXPECT_EQ(e.cells[3].size(), 2u);
}
