#include "oracles.hpp"

#include "pplap/errors.hpp"
#include "pplap/mesh.hpp"

#include <doctest.h>

#include <numbers>
#include <random>

using namespace pplap;

TEST_CASE("circle built from the torus factory") {
    auto dom = Domain::torus(1, 8, 2 * std::numbers::pi);
    CHECK(dom->kind() == DomainKind::Circle);
    CHECK(dom->num_vertices() == 8);
    for (double m : dom->measure()) CHECK(m == doctest::Approx(2 * std::numbers::pi / 8).epsilon(1e-15));
    CHECK(dom->total_measure() == doctest::Approx(2 * std::numbers::pi).epsilon(1e-15));
    CHECK(dom->N() == 2.0);
    CHECK(dom->K() == 0.0);
}

TEST_CASE("2-torus measure and diameter") {
    auto dom = Domain::torus(2, 16, 1.0);
    CHECK(dom->num_vertices() == 256);
    double total = 0.0;
    for (double m : dom->measure()) total += m;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(dom->N() == 2.0);

    double brute = 0.0;
    for (int a = 0; a < 256; ++a)
        for (int b = 0; b < 256; ++b) brute = std::max(brute, oracle::torus_distance(2, 16, 1.0, a, b));
    CHECK(dom->diameter() == doctest::Approx(brute).epsilon(1e-14));
    CHECK(dom->diameter() == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-14));
}

TEST_CASE("3-torus defaults N = d") {
    auto dom = Domain::torus(3, 4, 2.0);
    CHECK(dom->N() == 3.0);
    CHECK(dom->num_vertices() == 64);
    CHECK(dom->total_measure() == doctest::Approx(8.0));
}

TEST_CASE("constructor preconditions") {
    CHECK_THROWS_AS(Domain::torus(0, 8, 1.0), ParameterError);
    CHECK_THROWS_AS(Domain::torus(4, 8, 1.0), ParameterError);
    CHECK_THROWS_AS(Domain::torus(2, 3, 1.0), ParameterError);
    CHECK_THROWS_AS(Domain::torus(2, 8, 0.0), ParameterError);
    CHECK_THROWS_AS(Domain::graph({1.0, 1.0}, {{0, 1, -1.0, 1.0}}), ParameterError);
    CHECK_THROWS_AS(Domain::graph({1.0, 1.0, 1.0}, {{0, 1, 1.0, 1.0}}), ParameterError);  // disconnected
}

TEST_CASE("periodic neighbour tables") {
    auto dom = Domain::torus(2, 5, 1.0);
    for (std::size_t v = 0; v < dom->num_vertices(); ++v) {
        for (int axis = 0; axis < 2; ++axis) {
            CHECK(dom->step(dom->step(v, axis, +1), axis, -1) == v);
            const std::size_t up = dom->step(v, axis, +1);
            CHECK(dom->coord(up, axis) == (dom->coord(v, axis) + 1) % 5);
            CHECK(dom->coord(up, 1 - axis) == dom->coord(v, 1 - axis));
        }
    }
}

TEST_CASE("balls on the circle") {
    auto dom = Domain::torus(1, 8, 2 * std::numbers::pi);
    auto b0 = ball(*dom, 0, 0.0);
    CHECK(b0.members == std::vector<std::size_t>{0});
    auto all = ball(*dom, 0, std::numbers::pi);
    CHECK(all.size() == 8);
    CHECK(whole_domain(*dom, 3).size() == 8);
}

TEST_CASE("ball on the 2-torus matches brute force") {
    auto dom = Domain::torus(2, 16, 1.0);
    for (std::size_t center : {0u, 17u, 255u}) {
        auto b = ball(*dom, center, 0.25);
        std::vector<std::size_t> expected;
        for (int v = 0; v < 256; ++v)
            if (oracle::torus_distance(2, 16, 1.0, static_cast<int>(center), v) <= 0.25) expected.push_back(v);
        CHECK(b.members == expected);
    }
}

TEST_CASE("ball monotone in radius and translation invariant") {
    auto dom = Domain::torus(2, 12, 1.0);
    std::size_t prev = 0;
    for (double r = 0.0; r <= dom->diameter(); r += 0.05) {
        auto b = ball(*dom, 0, r);
        CHECK(b.size() >= prev);
        prev = b.size();
    }
    // Translating the center translates the member set.
    auto b0 = ball(*dom, 0, 0.3);
    const std::size_t shift = 5 + 12 * 7;
    auto bs = ball(*dom, shift, 0.3);
    CHECK(b0.size() == bs.size());
    for (std::size_t v : b0.members) {
        const int i = dom->coord(v, 0), j = dom->coord(v, 1);
        const std::size_t moved = static_cast<std::size_t>((i + 5) % 12 + 12 * ((j + 7) % 12));
        CHECK(bs.contains(moved));
    }
}

TEST_CASE("graph spec parsing and shortest paths") {
    const std::string text = R"(# a weighted 5-cycle with a chord
vertex 0 1.0
vertex 1 0.5
vertex 2 2.0
vertex 3 1.0
vertex 4 1.5
edge 0 1 1.0 1.0
edge 1 2 2.0 0.5
edge 2 3 1.0 2.0
edge 3 4 1.0 1.0
edge 4 0 3.0 1.5
edge 0 2 1.0 4.0
K -1
N 3
)";
    auto dom = parse_graph_spec(text);
    CHECK(dom->kind() == DomainKind::WeightedGraph);
    CHECK(dom->num_vertices() == 5);
    CHECK(dom->K() == -1.0);
    CHECK(dom->K_minus() == 1.0);
    CHECK(dom->N() == 3.0);
    CHECK(dom->total_measure() == doctest::Approx(6.0));
    CHECK(dom->distance(0, 2) == doctest::Approx(1.5));  // 0-1-2
    CHECK(dom->distance(0, 3) == doctest::Approx(2.5));  // 0-4-3
    // Triangle inequality on all triples.
    for (std::size_t a = 0; a < 5; ++a)
        for (std::size_t b = 0; b < 5; ++b)
            for (std::size_t c = 0; c < 5; ++c)
                CHECK(dom->distance(a, c) <= dom->distance(a, b) + dom->distance(b, c) + 1e-12);
    CHECK(dom->diameter() == doctest::Approx(3.0));  // attained by the pair (2, 4)
}

TEST_CASE("graph spec errors carry line numbers") {
    try {
        parse_graph_spec("vertex 0 1\nvertex 1 1\nedge 0 1 1\nbogus 1 2\n");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 4);
    }
    CHECK_THROWS_AS(parse_graph_spec("vertex 0 1\nvertex 2 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_graph_spec("vertex 0 1\nvertex 1 1\nedge 0 1 x\n"), ConfigError);
}

TEST_CASE("random graph triangle inequality") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.1, 2.0);
    const std::size_t n = 30;
    std::vector<double> m(n);
    for (double& x : m) x = U(rng);
    std::vector<GraphEdge> edges;
    for (std::size_t i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, U(rng), U(rng)});
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (int k = 0; k < 40; ++k) {
        std::size_t a = pick(rng), b = pick(rng);
        if (a != b) edges.push_back({a, b, U(rng), U(rng)});
    }
    auto dom = Domain::graph(m, edges);
    for (int k = 0; k < 500; ++k) {
        std::size_t a = pick(rng), b = pick(rng), c = pick(rng);
        CHECK(dom->distance(a, c) <= dom->distance(a, b) + dom->distance(b, c) + 1e-12);
        CHECK(dom->distance(a, b) == doctest::Approx(dom->distance(b, a)));
    }
}
