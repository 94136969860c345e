#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "attractors/tessellation.hpp"

using namespace attractors;

TEST_SUITE("tessellation") {

TEST_CASE("cells are half-open and the upper face is outside") {
    Tessellation grid(StateSpaceBox::cube(2, -1.0, 1.0), 4);
    CellIndex c;
    Vector u(2);
    u << -1.0, -1.0;
    REQUIRE(grid.locate(u, c));
    CHECK(c == CellIndex{0, 0});
    u << -0.5, 0.0;  // exactly on inner faces: belongs to the upper cell
    REQUIRE(grid.locate(u, c));
    CHECK(c == CellIndex{1, 2});
    u << 0.999999, 0.25;
    REQUIRE(grid.locate(u, c));
    CHECK(c == CellIndex{3, 2});
    u << 1.0, 0.0;
    CHECK_FALSE(grid.locate(u, c));
    u << 0.0, -1.0000001;
    CHECK_FALSE(grid.cell_index(u).has_value());
    u << std::nan(""), 0.0;
    CHECK_FALSE(grid.cell_index(u).has_value());
}

TEST_CASE("cell centers locate back to their cell") {
    Vector lo(3), hi(3);
    lo << -3, 0, 10;
    hi << 3, 1, 12;
    Tessellation grid(StateSpaceBox(lo, hi), std::vector<std::int32_t>{7, 13, 200});
    CHECK(grid.total_cells() == 7.0 * 13 * 200);
    std::mt19937_64 rng(3);
    for (int t = 0; t < 500; ++t) {
        CellIndex c{static_cast<std::int32_t>(rng() % 7), static_cast<std::int32_t>(rng() % 13),
                    static_cast<std::int32_t>(rng() % 200)};
        CHECK(grid.cell_index(grid.cell_center(c)) == c);
    }
}

TEST_CASE("invalid grids are rejected") {
    const auto box = StateSpaceBox::cube(2, 0.0, 1.0);
    CHECK_THROWS_AS(Tessellation(box, 0), ConfigError);
    CHECK_THROWS_AS(Tessellation(box, std::vector<std::int32_t>{3}), ConfigError);
    CHECK_THROWS_AS(Tessellation(box, std::vector<std::int32_t>{3, -1}), ConfigError);
}

TEST_CASE("visit registry reports the status before each visit") {
    VisitRegistry reg;
    const CellIndex a{1, 2}, b{3, 4};
    reg.begin_search();
    CHECK(reg.visit(a).status == VisitRegistry::Status::unvisited);
    CHECK(reg.visit(a).status == VisitRegistry::Status::visited);
    CHECK(reg.peek(b).status == VisitRegistry::Status::unvisited);
    CHECK(reg.size() == 1);

    // A new search forgets visit marks but keeps the entry.
    reg.begin_search();
    CHECK(reg.visit(a).status == VisitRegistry::Status::unvisited);
    CHECK(reg.size() == 1);

    reg.assign_label(b, 3);
    reg.begin_search();
    const auto v = reg.visit(b);
    CHECK(v.status == VisitRegistry::Status::labeled);
    CHECK(v.label == 3);
    CHECK(reg.labeled_cells() == 1);
    reg.assign_label(b, 3);
    CHECK_THROWS(reg.assign_label(b, 4));

    reg.clear();
    CHECK(reg.size() == 0);
    CHECK(reg.labeled_cells() == 0);
    CHECK(reg.peek(b).status == VisitRegistry::Status::unvisited);
}

TEST_CASE("labels survive any number of searches") {
    VisitRegistry reg;
    std::mt19937_64 rng(11);
    std::map<CellIndex, int> labels;
    for (int step = 0; step < 2000; ++step) {
        if (step % 50 == 0)
            reg.begin_search();
        CellIndex c{static_cast<std::int32_t>(rng() % 40), static_cast<std::int32_t>(rng() % 40)};
        if (rng() % 7 == 0 && !labels.count(c)) {
            const int l = 1 + static_cast<int>(rng() % 5);
            reg.assign_label(c, l);
            labels[c] = l;
        } else {
            reg.visit(c);
        }
    }
    for (const auto& [c, l] : labels) {
        const auto v = reg.peek(c);
        CHECK(v.status == VisitRegistry::Status::labeled);
        CHECK(v.label == l);
    }
    CHECK(reg.labeled_cells() == labels.size());
}

}
