#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "relucert/domain.hpp"
#include "relucert/errors.hpp"
#include "relucert/experiments.hpp"
#include "relucert/polytope.hpp"
#include "relucert/rng.hpp"

using namespace relucert;

TEST_CASE("triangle facets") {
    FacetStructure fs = enumerate_facets(triangle_frame());
    REQUIRE(fs.facets.size() == 3);
    CHECK(fs.simplicial);
    std::set<IndexSet> keys;
    for (const auto& f : fs.facets) keys.insert(f.vertices);
    CHECK(keys == std::set<IndexSet>{{0, 1}, {1, 2}, {0, 2}});
    for (const auto& f : fs.facets) CHECK(f.offset == doctest::Approx(0.5));
}

TEST_CASE("tetrahedron facets: each omits one vertex") {
    FacetStructure fs = enumerate_facets(tetrahedron_frame());
    REQUIRE(fs.facets.size() == 4);
    CHECK(fs.simplicial);
    std::set<int> omitted;
    for (const auto& f : fs.facets) {
        REQUIRE(f.vertices.size() == 3);
        for (int v = 0; v < 4; ++v)
            if (std::find(f.vertices.begin(), f.vertices.end(), v) == f.vertices.end())
                omitted.insert(v);
    }
    CHECK(omitted == std::set<int>{0, 1, 2, 3});
}

TEST_CASE("square frame: 4 edges, every vertex in exactly 2") {
    FacetStructure fs = enumerate_facets(square_frame());
    REQUIRE(fs.facets.size() == 4);
    auto incidence = fs.vertex_to_facets(4);
    for (const auto& inc : incidence) CHECK(inc.size() == 2);
}

TEST_CASE("facet half-space invariant on the enumerated structures") {
    for (const Frame& frame :
         {triangle_frame(), tetrahedron_frame(), icosahedron_frame(), random_unit_frame(14, 3, 8)}) {
        FacetStructure fs = enumerate_facets(frame);
        for (const auto& f : fs.facets) {
            CHECK(std::abs(norm2(f.normal) - 1.0) < 1e-12);
            for (int i = 0; i < frame.m; ++i) {
                double d = dot(f.normal, frame.row(i)) - f.offset;
                bool on = std::find(f.vertices.begin(), f.vertices.end(), i) != f.vertices.end();
                if (on)
                    CHECK(std::abs(d) <= kFaceTol);
                else
                    CHECK(d < kFaceTol);
            }
        }
        // every frame index appears in at least one facet
        auto incidence = fs.vertex_to_facets(frame.m);
        for (const auto& inc : incidence) CHECK_FALSE(inc.empty());
    }
}

TEST_CASE("omnidirectionality") {
    CHECK(is_omnidirectional(triangle_frame()));
    CHECK_FALSE(is_omnidirectional(standard_basis(2)));
    CHECK_FALSE(is_omnidirectional(standard_basis(3)));
    // (Phi, -Phi) is omnidirectional for any frame
    Frame pm = random_unit_frame(5, 3, 21);
    Frame sym = pm;
    sym.m = 10;
    for (int i = 0; i < 5; ++i) {
        auto r = pm.row(i);
        for (int j = 0; j < 3; ++j) sym.data.push_back(-r[j]);
    }
    CHECK(is_omnidirectional(sym));
}

TEST_CASE("make_omnidirectional") {
    Frame basis = standard_basis(2);
    Frame fixed = make_omnidirectional(basis);
    REQUIRE(fixed.m == 3);
    CHECK(fixed.row(2)[0] == doctest::Approx(-1.0 / std::sqrt(2.0)));
    CHECK(fixed.row(2)[1] == doctest::Approx(-1.0 / std::sqrt(2.0)));
    CHECK(is_omnidirectional(fixed));

    // triangle sums to zero: unchanged
    Frame tri = triangle_frame();
    Frame same = make_omnidirectional(tri);
    CHECK(same.m == 3);

    // random half-space frames become omnidirectional
    CounterRng rng(31);
    for (int trial = 0; trial < 5; ++trial) {
        Frame raw = random_unit_frame(6, 3, 100 + trial);
        for (int i = 0; i < raw.m; ++i) {
            // push everything into the z > 0 half-space
            std::size_t k = static_cast<std::size_t>(i) * 3 + 2;
            raw.data[k] = std::abs(raw.data[k]) + 0.1;
        }
        Frame unit = normalize(raw, Bias(6, 0.0)).frame;
        CHECK_FALSE(is_omnidirectional(unit));
        CHECK(is_omnidirectional(make_omnidirectional(unit)));
    }
}

TEST_CASE("facet_for_point") {
    Frame tet = tetrahedron_frame();
    FacetStructure fs = enumerate_facets(tet);

    // facet centroid direction lands in that facet's cone, interior
    for (std::size_t j = 0; j < fs.facets.size(); ++j) {
        std::vector<double> centroid(3, 0.0);
        for (int v : fs.facets[j].vertices)
            for (int d = 0; d < 3; ++d) centroid[d] += tet.row(v)[d] / 3.0;
        FacetHit hit = facet_for_point(fs, centroid);
        CHECK(hit.facet == static_cast<int>(j));
        CHECK_FALSE(hit.boundary);
        // cones are scale-invariant
        std::vector<double> twice{2 * centroid[0], 2 * centroid[1], 2 * centroid[2]};
        FacetHit hit2 = facet_for_point(fs, twice);
        CHECK(hit2.facet == hit.facet);
    }

    // a vertex lies on several cones: boundary flag
    Frame tri = triangle_frame();
    FacetStructure tfs = enumerate_facets(tri);
    FacetHit vertex_hit = facet_for_point(tfs, std::vector<double>{0.0, 1.0});
    CHECK(vertex_hit.boundary);

    CHECK_THROWS_AS(facet_for_point(tfs, std::vector<double>{0.0, 0.0}), parse_error);
}

TEST_CASE("cones cover all directions for omnidirectional frames") {
    Frame frame = random_unit_frame(10, 3, 17);
    Frame omni = make_omnidirectional(frame);
    Frame unit = normalize(omni, Bias(omni.m, 0.0)).frame;
    FacetStructure fs = enumerate_facets(unit);
    Points dirs = sample_block(DomainSpec::sphere(3), 23, 0, 10000);
    for (std::size_t i = 0; i < dirs.count; ++i) {
        FacetHit hit = facet_for_point(fs, dirs.point(i));
        REQUIRE(hit.facet >= 0);
        // 0 not on the facet: its sub-collection is a frame
        if (i % 100 == 0)
            CHECK(is_subframe(unit, fs.facets[static_cast<std::size_t>(hit.facet)].vertices));
    }
}

TEST_CASE("random spherical frames are simplicial") {
    int simplicial = 0;
    for (int trial = 0; trial < 20; ++trial) {
        Frame frame = random_unit_frame(12, 3, 400 + trial);
        if (enumerate_facets(frame).simplicial) ++simplicial;
    }
    CHECK(simplicial == 20);
}

TEST_CASE("Euler characteristic in R^3") {
    for (const Frame& frame : {tetrahedron_frame(), octahedron_frame(), icosahedron_frame(),
                               random_unit_frame(9, 3, 55)}) {
        FacetStructure fs = enumerate_facets(frame);
        std::set<std::pair<int, int>> edges;
        for (const auto& f : fs.facets) {
            // simplicial facets in R^3 are triangles; every vertex pair is an edge
            for (std::size_t a = 0; a < f.vertices.size(); ++a)
                for (std::size_t b = a + 1; b < f.vertices.size(); ++b)
                    edges.emplace(f.vertices[a], f.vertices[b]);
        }
        int v = frame.m;
        int e = static_cast<int>(edges.size());
        int fcount = static_cast<int>(fs.facets.size());
        CHECK(v - e + fcount == 2);
    }
}

TEST_CASE("degenerate and oversized inputs") {
    // all vertices on one hyperplane
    Frame flat = Frame::from_rows({{1, 0}, {0, 1}});
    CHECK_THROWS_AS(enumerate_facets(flat), infeasible_error);
    Frame big = random_unit_frame(40, 8, 77);
    CHECK_THROWS_AS(enumerate_facets(big, kFaceTol, 1000), infeasible_error);
}

TEST_CASE("coplanar vertices merge into one facet") {
    // square + center-edge point on the hull boundary of a pentagon-ish set
    Frame f = Frame::from_rows({{1, 0}, {0, 1}, {-1, 0}, {0, -1}, {0.5, 0.5}});
    // (0.5, 0.5) lies on the edge between e1 and e2
    FacetStructure fs = enumerate_facets(f);
    bool merged = false;
    for (const auto& facet : fs.facets)
        if (facet.vertices.size() == 3) {
            merged = true;
            CHECK(facet.vertices == IndexSet{0, 1, 4});
        }
    CHECK(merged);
    CHECK_FALSE(fs.simplicial);
}
