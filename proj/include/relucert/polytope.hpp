#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "relucert/frame.hpp"

namespace relucert {

/// Coplanarity / half-space tolerance on <a, phi> - b (unit normals,
/// normalized frame data).
inline constexpr double kFaceTol = 1e-9;

struct Facet {
    IndexSet vertices;           // frame indices lying on the facet
    std::vector<double> normal;  // unit outward normal a
    double offset = 0.0;         // b, with <a, phi_k> = b on the facet
};

/// Vertex-facet incidence of the inscribing polytope P_Phi.
struct FacetStructure {
    std::vector<Facet> facets;
    bool simplicial = true;

    /// Facet ids containing vertex i.
    std::vector<IndexSet> vertex_to_facets(int m) const;
};

/// Brute-force facet enumeration over all n-subsets (merged by supporting
/// hyperplane, outward-oriented against the vertex centroid). Requires a
/// normalized frame; throws infeasible_error on a degenerate hull (all
/// vertices affinely dependent) or when C(m,n) exceeds the cap.
/// Parallelizes over subsets; the result is sorted canonically so the
/// serial reference produces the identical structure.
FacetStructure enumerate_facets(const Frame& frame, double face_tol = kFaceTol,
                                std::size_t cap = kSubsetCap);

namespace serial {
FacetStructure enumerate_facets(const Frame& frame, double face_tol = kFaceTol,
                                std::size_t cap = kSubsetCap);
}

/// Origin strictly interior to every facet half-space (b > face_tol).
/// Affinely degenerate hulls have empty interior and report false.
bool is_omnidirectional(const Frame& frame, double face_tol = kFaceTol,
                        std::size_t cap = kSubsetCap);

/// Appends the negative normalized mean of the frame elements; returns the
/// input unchanged when the mean is zero (already omnidirectional).
Frame make_omnidirectional(const Frame& frame);

struct FacetHit {
    int facet = -1;
    bool boundary = false;  // x sits on a cone boundary within tolerance
};

/// Facet whose cone contains x: argmax_j <a_j, x> / b_j. Ties return the
/// lowest id with the boundary flag set. Requires an omnidirectional
/// structure (all b_j > 0) and x != 0.
FacetHit facet_for_point(const FacetStructure& fs, std::span<const double> x,
                         double tol = kFaceTol);

}  // namespace relucert
