#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qlbm/lattice.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <vector>

using namespace qlbm;

TEST_CASE("velocity sets match the frozen listings") {
    const std::vector<IVec> d1 = build_velocity_set(1);
    const std::vector<IVec> d1_expected = {{0, 0, 0}, {1, 0, 0}, {-1, 0, 0}};
    CHECK(d1 == d1_expected);

    const std::vector<IVec> d2 = build_velocity_set(2);
    const std::vector<IVec> d2_expected = {
        {0, 0, 0},
        {1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0},
        {1, 1, 0}, {-1, 1, 0}, {-1, -1, 0}, {1, -1, 0},
    };
    CHECK(d2 == d2_expected);

    const std::vector<IVec> d3 = build_velocity_set(3);
    REQUIRE(d3.size() == 27);
    CHECK(d3[0] == IVec{0, 0, 0});
    const std::vector<IVec> d3_shell1 = {
        {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {-1, 0, 0}, {0, -1, 0}, {0, 0, -1},
    };
    for (std::size_t k = 0; k < d3_shell1.size(); ++k)
        CHECK(d3[1 + k] == d3_shell1[k]);
}

TEST_CASE("velocity vectors are distinct and complete") {
    for (int d = 1; d <= 3; ++d) {
        const std::vector<IVec> vel = build_velocity_set(d);
        int q = 1;
        for (int j = 0; j < d; ++j)
            q *= 3;
        REQUIRE(static_cast<int>(vel.size()) == q);
        const std::set<IVec> unique(vel.begin(), vel.end());
        CHECK(unique.size() == vel.size());
        for (const IVec& v : vel)
            for (int j = 0; j < 3; ++j)
                CHECK((v[j] >= -1 && v[j] <= 1 && (j < d || v[j] == 0)));
    }
}

TEST_CASE("shell sizes follow the binomial pattern") {
    const std::vector<IVec> d3 = build_velocity_set(3);
    std::vector<int> shell_count(4, 0);
    for (const IVec& v : d3) {
        int s = 0;
        for (int j = 0; j < 3; ++j)
            s += (v[j] != 0);
        ++shell_count[s];
    }
    CHECK(shell_count == std::vector<int>{1, 6, 12, 8});
}

TEST_CASE("opposite map negates velocities and is an involution") {
    for (int d = 1; d <= 3; ++d) {
        std::vector<int> extents(d, 4);
        const LatticeDescriptor lat(d, extents);
        CHECK(lat.opposite(0) == 0);
        for (int i = 0; i < lat.num_velocities(); ++i) {
            const int o = lat.opposite(i);
            CHECK(lat.opposite(o) == i);
            for (int j = 0; j < d; ++j)
                CHECK(lat.velocity(o)[j] == -lat.velocity(i)[j]);
        }
    }
}

TEST_CASE("cell indexing matches the mixed-radix formula and round-trips") {
    const LatticeDescriptor lat(2, {4, 8});
    CHECK(lat.num_cells() == 32);
    CHECK(lat.extent_bits(0) == 2);
    CHECK(lat.extent_bits(1) == 3);
    for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 4; ++x) {
            const IVec p{x, y, 0};
            const std::int64_t idx = lat.cell_index(p);
            CHECK(idx == x + 4 * y);
            CHECK(lat.cell_coords(idx) == p);
        }
    }
}

TEST_CASE("advection wraps periodically") {
    const LatticeDescriptor lat(2, {4, 4});
    CHECK(lat.advect({0, 0, 0}, {-1, 0, 0}) == IVec{3, 0, 0});
    CHECK(lat.advect({3, 3, 0}, {1, 1, 0}) == IVec{0, 0, 0});
    CHECK(lat.advect({2, 1, 0}, {0, -1, 0}) == IVec{2, 0, 0});
    CHECK(lat.advect({2, 1, 0}, {0, 0, 0}) == IVec{2, 1, 0});
}

TEST_CASE("lattice construction rejects bad extents") {
    CHECK_THROWS_AS(LatticeDescriptor(1, {3}), std::invalid_argument);
    CHECK_THROWS_AS(LatticeDescriptor(1, {1}), std::invalid_argument);
    CHECK_THROWS_AS(LatticeDescriptor(1, {0}), std::invalid_argument);
    CHECK_THROWS_AS(LatticeDescriptor(2, {4}), std::invalid_argument);
    CHECK_THROWS_AS(LatticeDescriptor(4, {4, 4, 4, 4}), std::invalid_argument);
    CHECK_NOTHROW(LatticeDescriptor(3, {2, 4, 8}));
}

TEST_CASE("geometry rejects boxes touching the seam or each other") {
    const LatticeDescriptor lat(2, {8, 8});
    CHECK_THROWS_AS(DomainGeometry(lat, {{{0, 2, 0}, {1, 3, 0}}}), std::invalid_argument);
    CHECK_THROWS_AS(DomainGeometry(lat, {{{2, 2, 0}, {7, 3, 0}}}), std::invalid_argument);
    CHECK_THROWS_AS(DomainGeometry(lat, {{{3, 3, 0}, {2, 4, 0}}}), std::invalid_argument);
    // Diagonally adjacent boxes share a corner ring: rejected.
    CHECK_THROWS_AS(DomainGeometry(lat, {{{1, 1, 0}, {2, 2, 0}}, {{3, 3, 0}, {4, 4, 0}}}),
                    std::invalid_argument);
    // A full one-cell fluid gap in one dimension is enough.
    CHECK_NOTHROW(DomainGeometry(lat, {{{1, 1, 0}, {2, 2, 0}}, {{4, 1, 0}, {5, 6, 0}}}));
}

TEST_CASE("solid mask agrees with box membership") {
    const LatticeDescriptor lat(2, {8, 4});
    const DomainGeometry geo(lat, {{{2, 1, 0}, {4, 2, 0}}, {{6, 1, 0}, {6, 1, 0}}});
    for (std::int64_t c = 0; c < lat.num_cells(); ++c) {
        const IVec x = lat.cell_coords(c);
        bool expect = false;
        for (const ObstacleBox& box : geo.obstacles())
            expect = expect || box.contains(x, 2);
        CHECK(geo.solid_at(c) == expect);
        CHECK(geo.solid(x) == expect);
    }
}

TEST_CASE("boundary links match brute-force enumeration") {
    const LatticeDescriptor lat(2, {8, 8});
    const DomainGeometry geo(lat, {{{2, 2, 0}, {2, 5, 0}}, {{5, 4, 0}, {6, 5, 0}}});

    std::vector<BoundaryLink> expected;
    for (std::int64_t c = 0; c < lat.num_cells(); ++c) {
        if (geo.solid_at(c))
            continue;
        const IVec x = lat.cell_coords(c);
        for (int i = 1; i < lat.num_velocities(); ++i)
            if (geo.solid(lat.advect(x, lat.velocity(i))))
                expected.push_back({x, i});
    }

    const std::vector<BoundaryLink> actual = boundary_links(geo);
    REQUIRE(actual.size() == expected.size());
    for (std::size_t k = 0; k < actual.size(); ++k) {
        CHECK(actual[k].x_f == expected[k].x_f);
        CHECK(actual[k].i == expected[k].i);
    }
}

TEST_CASE("a one-cell obstacle on a line has exactly two boundary links") {
    const LatticeDescriptor lat(1, {4});
    const DomainGeometry geo(lat, {{{2, 0, 0}, {2, 0, 0}}});
    const std::vector<BoundaryLink> links = boundary_links(geo);
    REQUIRE(links.size() == 2);
    CHECK(links[0].x_f == IVec{1, 0, 0});
    CHECK(links[0].i == 1);
    CHECK(links[1].x_f == IVec{3, 0, 0});
    CHECK(links[1].i == 2);
}

TEST_CASE("no obstacles means no links") {
    const LatticeDescriptor lat(2, {4, 4});
    const DomainGeometry geo(lat, {});
    CHECK(boundary_links(geo).empty());
}
