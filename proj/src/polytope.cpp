#include "relucert/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "relucert/errors.hpp"
#include "relucert/parallel.hpp"

namespace relucert {

std::vector<IndexSet> FacetStructure::vertex_to_facets(int m) const {
    std::vector<IndexSet> incidence(static_cast<std::size_t>(m));
    for (std::size_t j = 0; j < facets.size(); ++j)
        for (int v : facets[j].vertices)
            incidence[static_cast<std::size_t>(v)].push_back(static_cast<int>(j));
    return incidence;
}

namespace {

// Affine rank of the vertex set; a hull with interior needs rank n.
int affine_rank(const Frame& frame) {
    if (frame.m < 2) return 0;
    Matrix diff(frame.m - 1, frame.n);
    auto p0 = frame.row(0);
    for (int i = 1; i < frame.m; ++i)
        for (int j = 0; j < frame.n; ++j)
            diff.at(i - 1, j) = frame.row(i)[static_cast<std::size_t>(j)] - p0[static_cast<std::size_t>(j)];
    return numerical_rank(diff);
}

struct HyperplaneFit {
    bool ok = false;
    std::vector<double> normal;
    double offset = 0.0;
};

// Unit normal of the hyperplane through the subset's points; fails when the
// points are affinely dependent (the null direction is then not unique).
HyperplaneFit fit_hyperplane(const Frame& frame, const IndexSet& subset) {
    HyperplaneFit fit;
    int n = frame.n;
    auto p0 = frame.row(subset.front());

    if (n == 1) {
        fit.ok = true;
        fit.normal = {1.0};
        fit.offset = p0[0];
        return fit;
    }

    Matrix diff(n - 1, n);
    for (int r = 1; r < n; ++r) {
        auto pr = frame.row(subset[static_cast<std::size_t>(r)]);
        for (int j = 0; j < n; ++j)
            diff.at(r - 1, j) = pr[static_cast<std::size_t>(j)] - p0[static_cast<std::size_t>(j)];
    }
    EigenResult eig = jacobi_eigen(gram(diff));
    // Affinely independent points leave exactly one near-zero direction.
    double scale = std::sqrt(std::max(0.0, eig.values.back()));
    if (scale == 0.0) return fit;
    double second = std::sqrt(std::max(0.0, eig.values[1]));
    if (second <= kRankTolScale * n * scale) return fit;

    fit.normal.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) fit.normal[static_cast<std::size_t>(i)] = eig.vectors.at(i, 0);
    double nrm = norm2(fit.normal);
    for (double& v : fit.normal) v /= nrm;
    fit.offset = dot(fit.normal, p0);
    fit.ok = true;
    return fit;
}

struct FacetCandidate {
    Facet facet;
    std::size_t generating_rank;  // lexicographic index of the subset that found it
};

using FacetMap = std::map<IndexSet, FacetCandidate>;

void consider_subset(const Frame& frame, const IndexSet& subset, std::size_t rank,
                     double face_tol, FacetMap& out) {
    HyperplaneFit fit = fit_hyperplane(frame, subset);
    if (!fit.ok) return;

    // Supporting test: all remaining vertices on one closed side.
    bool above = false;
    bool below = false;
    IndexSet on_plane;
    std::vector<double> dist(static_cast<std::size_t>(frame.m));
    for (int i = 0; i < frame.m; ++i) {
        double d = dot(frame.row(i), fit.normal) - fit.offset;
        dist[static_cast<std::size_t>(i)] = d;
        if (d > face_tol)
            above = true;
        else if (d < -face_tol)
            below = true;
        else
            on_plane.push_back(i);
    }
    if (above && below) return;  // hyperplane cuts the hull
    if (!above && !below) return;  // whole vertex set coplanar; degenerate hull

    Facet facet;
    facet.vertices = on_plane;
    if (above) {
        // Flip outward: interior lies strictly below the facet plane.
        for (double& v : fit.normal) v = -v;
        fit.offset = -fit.offset;
    }
    facet.normal = std::move(fit.normal);
    facet.offset = fit.offset;

    IndexSet key = facet.vertices;  // copy before the move below
    auto it = out.find(key);
    if (it == out.end()) {
        out.emplace(std::move(key), FacetCandidate{std::move(facet), rank});
    } else if (rank < it->second.generating_rank) {
        it->second = FacetCandidate{std::move(facet), rank};
    }
}

FacetStructure assemble(const Frame& frame, FacetMap&& merged) {
    if (merged.empty())
        throw infeasible_error("facet enumeration found no supporting hyperplane");
    FacetStructure fs;
    fs.facets.reserve(merged.size());
    for (auto& [key, cand] : merged) {
        if (static_cast<int>(cand.facet.vertices.size()) > frame.n) fs.simplicial = false;
        fs.facets.push_back(std::move(cand.facet));
    }
    return fs;
}

void check_enumeration_preconditions(const Frame& frame, std::size_t cap) {
    validate_shape(frame);
    if (binomial_capped(frame.m, frame.n, cap) > cap)
        throw infeasible_error("facet enumeration: C(m,n) exceeds the cap");
    if (affine_rank(frame) < frame.n)
        throw infeasible_error("degenerate hull: vertices lie on a common hyperplane");
}

}  // namespace

FacetStructure enumerate_facets(const Frame& frame, double face_tol, std::size_t cap) {
    check_enumeration_preconditions(frame, cap);

    const int threads = thread_count();
    if (threads <= 1) return serial::enumerate_facets(frame, face_tol, cap);

    std::vector<FacetMap> partial(static_cast<std::size_t>(threads));
#pragma omp parallel for schedule(static) num_threads(threads)
    for (int t = 0; t < threads; ++t) {
        std::size_t rank = 0;
        for_each_subset(frame.m, frame.n, [&](const IndexSet& subset) {
            if (rank % static_cast<std::size_t>(threads) == static_cast<std::size_t>(t))
                consider_subset(frame, subset, rank, face_tol, partial[static_cast<std::size_t>(t)]);
            ++rank;
            return true;
        });
    }

    FacetMap merged;
    for (auto& part : partial) {
        for (auto& [key, cand] : part) {
            auto it = merged.find(key);
            if (it == merged.end())
                merged.emplace(key, std::move(cand));
            else if (cand.generating_rank < it->second.generating_rank)
                it->second = std::move(cand);
        }
    }
    return assemble(frame, std::move(merged));
}

namespace serial {

FacetStructure enumerate_facets(const Frame& frame, double face_tol, std::size_t cap) {
    check_enumeration_preconditions(frame, cap);
    FacetMap merged;
    std::size_t rank = 0;
    for_each_subset(frame.m, frame.n, [&](const IndexSet& subset) {
        consider_subset(frame, subset, rank, face_tol, merged);
        ++rank;
        return true;
    });
    return assemble(frame, std::move(merged));
}

}  // namespace serial

bool is_omnidirectional(const Frame& frame, double face_tol, std::size_t cap) {
    validate_shape(frame);
    if (affine_rank(frame) < frame.n) return false;  // flat hull, empty interior
    FacetStructure fs = enumerate_facets(frame, face_tol, cap);
    for (const Facet& f : fs.facets)
        if (f.offset <= face_tol) return false;
    return true;
}

Frame make_omnidirectional(const Frame& frame) {
    std::vector<double> mean(static_cast<std::size_t>(frame.n), 0.0);
    for (int i = 0; i < frame.m; ++i) {
        auto r = frame.row(i);
        for (int j = 0; j < frame.n; ++j) mean[static_cast<std::size_t>(j)] += r[static_cast<std::size_t>(j)];
    }
    double nrm = norm2(mean);
    if (nrm <= 1e-12 * frame.m) return frame;  // sum is zero: already omnidirectional
    Frame out = frame;
    out.m += 1;
    for (double v : mean) out.data.push_back(-v / nrm);
    return out;
}

FacetHit facet_for_point(const FacetStructure& fs, std::span<const double> x, double tol) {
    if (norm2(x) == 0.0) throw parse_error("facet_for_point: x must be non-zero");
    FacetHit hit;
    double best = -std::numeric_limits<double>::infinity();
    double second = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < fs.facets.size(); ++j) {
        const Facet& f = fs.facets[j];
        if (f.offset <= tol)
            throw infeasible_error("facet_for_point: structure is not omnidirectional");
        double ratio = dot(f.normal, x) / f.offset;
        if (ratio > best) {
            second = best;
            best = ratio;
            hit.facet = static_cast<int>(j);
        } else {
            second = std::max(second, ratio);
        }
    }
    hit.boundary = (best - second) <= tol * std::max(1.0, std::abs(best));
    return hit;
}

}  // namespace relucert
