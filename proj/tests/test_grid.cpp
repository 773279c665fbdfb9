#include "doctest.h"

#include "shapes/grid.hpp"
#include "shapes/gs1.hpp"
#include "shapes/perimeter.hpp"
#include "shapes/rng.hpp"
#include "oracles.hpp"

#include <sstream>

using namespace shapes;

TEST_CASE("volume is count times exact cell volume") {
    CHECK(volume(GridShape(Grid(2, 0.5))) == 0.0);

    GridShape four = GridShape::from_cells(Grid(2, 0.5), {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}});
    CHECK(volume(four) == 1.0);

    std::vector<CellIndex> run;
    for (int i = 0; i < 10; ++i) run.push_back({i, 0, 0});
    CHECK(volume(GridShape::from_cells(Grid(1, 0.1), run)) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("from_cells sorts and deduplicates") {
    GridShape s = GridShape::from_cells(Grid(2, 1.0), {{3, 1, 0}, {0, 0, 0}, {3, 1, 0}});
    CHECK(s.cell_count() == 2);
    CHECK(s.cells()[0] == CellIndex{0, 0, 0});
    CHECK(s.contains({3, 1, 0}));
}

TEST_CASE("symdiff identities") {
    Grid g(2, 1.0);
    GridShape a = GridShape::from_cells(g, {{0, 0, 0}, {1, 0, 0}});
    GridShape b = GridShape::from_cells(g, {{5, 5, 0}, {6, 5, 0}, {7, 5, 0}});
    GridShape nested = GridShape::from_cells(g, {{0, 0, 0}});

    CHECK(symdiff(a, a).empty());
    CHECK(volume(symdiff(a, b)) == volume(a) + volume(b));
    CHECK(volume(symdiff(nested, a)) == volume(a) - volume(nested));

    GridShape other_grid = GridShape::from_cells(Grid(2, 0.5), {{0, 0, 0}});
    CHECK_THROWS_AS(symdiff(a, other_grid), GridMismatch);
}

TEST_CASE("symdiff satisfies |a^b| = |a| + |b| - 2|a&b| on random shapes") {
    SplitMix64 rng(7);
    Grid g(2, 0.25);
    for (int trial = 0; trial < 30; ++trial) {
        GridShape a = testing::random_blob(rng, g, 20);
        GridShape b = translate(testing::random_blob(rng, g, 15), {2, 1, 0});
        const double lhs = volume(symdiff(a, b));
        const double rhs = volume(a) + volume(b) - 2.0 * volume(intersect(a, b));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-15));
    }
}

TEST_CASE("translate preserves volume and perimeter") {
    SplitMix64 rng(11);
    GridShape s = testing::random_blob(rng, Grid(2, 1.0), 25);
    CHECK(translate(s, {0, 0, 0}) == s);
    const GridShape t = translate(s, {100, 0, 0});
    CHECK(volume(t) == volume(s));
    CHECK(perimeter(t).value == perimeter(s).value);
    const GridShape back = translate(translate(s, {3, -7, 0}), {-3, 7, 0});
    CHECK(back == s);
}

TEST_CASE("refine subdivides exactly") {
    Grid g(2, 1.0);
    GridShape one = GridShape::from_cells(g, {{0, 0, 0}});
    CHECK(refine(one, 1) == one);

    const GridShape fine = refine(one, 2);
    CHECK(fine.cell_count() == 4);
    CHECK(volume(fine) == volume(one));
    CHECK(fine.grid().spacing == 0.5);

    SplitMix64 rng(3);
    GridShape blob = testing::random_blob(rng, g, 12);
    CHECK(volume(refine(blob, 4)) == volume(blob));
}

TEST_CASE("rescale_spacing scales volume by r^n") {
    SplitMix64 rng(5);
    GridShape blob = testing::random_blob(rng, Grid(2, 1.0), 9);
    const GridShape scaled = rescale_spacing(blob, 2.0);
    CHECK(volume(scaled) == 4.0 * volume(blob));
    CHECK(scaled.cell_count() == blob.cell_count());
}

TEST_CASE("bounding_window") {
    Grid g(2, 1.0);
    GridShape one = GridShape::from_cells(g, {{2, 3, 0}});
    const Region r0 = bounding_window(one, 0);
    CHECK(r0.cell_count() == 1);
    CHECK(r0.contains({2, 3, 0}));

    const Region r2 = bounding_window(one, 2);
    CHECK(r2.cell_count() == 25);

    const Region r3 = bounding_window(one, 3);
    CHECK(r3.contains_region(r2));

    CHECK_THROWS_AS(bounding_window(GridShape(g), 1), EmptyShape);
}

TEST_CASE("region rim detection") {
    Region r{Grid(2, 1.0), {0, 0, 0}, {4, 4, 0}};
    r.hi[2] = 1;
    CHECK(r.on_rim({0, 2, 0}));
    CHECK(r.on_rim({3, 3, 0}));
    CHECK(!r.on_rim({2, 2, 0}));
}

TEST_CASE("gs1 round trip and deterministic emission") {
    SplitMix64 rng(13);
    GridShape s = testing::random_blob(rng, Grid(2, 0.125), 17);
    const std::string text = write_gs1(s);
    CHECK(read_gs1_string(text) == s);
    CHECK(write_gs1(read_gs1_string(text)) == text);

    const GridShape empty(Grid(3, 2.0, {1.0, 2.0, 3.0}));
    CHECK(read_gs1_string(write_gs1(empty)) == empty);
}

TEST_CASE("gs1 golden header") {
    GridShape s = GridShape::from_cells(Grid(2, 0.5, {1.5, -2.0, 0.0}), {{1, 2, 0}, {0, 0, 0}});
    CHECK(write_gs1(s) == "GS1 2 0.5 1.5 -2\n0 0\n1 2\n");
}

TEST_CASE("gs1 parse errors carry line numbers") {
    CHECK_THROWS_AS(read_gs1_string(""), ParseError);
    CHECK_THROWS_AS(read_gs1_string("GS2 2 1.0 0 0\n"), ParseError);
    CHECK_THROWS_AS(read_gs1_string("GS1 2 -1 0 0\n"), ParseError);

    try {
        read_gs1_string("GS1 2 1 0 0\n0 0\n1 x\n");
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(e.line == 3);
    }

    try {
        read_gs1_string("GS1 2 1 0 0\n0 0 7\n");
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
    }
}
