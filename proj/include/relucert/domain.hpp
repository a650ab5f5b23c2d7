#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "relucert/frame.hpp"
#include "relucert/polytope.hpp"
#include "relucert/rng.hpp"

namespace relucert {

/// Relative tolerance for boundary membership comparisons.
inline constexpr double kMemTol = 1e-12;

enum class DomainKind {
    ball,              // ||x|| <= r
    sphere,            // ||x|| = 1
    donut,             // s <= ||x|| <= r
    nonneg_ball,       // ||x|| <= r, x >= 0
    ball_complement,   // ||x|| >= s
    polytope_boundary, // x on the boundary of P_Phi
    sample_cloud,      // finite point list
    full_space,        // R^n; sampling draws i.i.d. standard normal
};

/// One simplex of the triangulated polytope boundary, with its cumulative
/// normalized surface weight (used by the boundary sampler).
struct BoundarySimplex {
    IndexSet verts;
    double cumulative = 0.0;
};

/// Symbolic input domain K with membership test and seeded sampler.
struct DomainSpec {
    DomainKind kind = DomainKind::ball;
    int n = 0;
    double r = 1.0;
    double s = 0.0;
    std::shared_ptr<const Frame> frame;            // polytope_boundary only
    std::shared_ptr<const FacetStructure> facets;  // polytope_boundary only
    std::shared_ptr<const std::vector<BoundarySimplex>> simplices;  // polytope_boundary only
    std::shared_ptr<const Points> cloud;           // sample_cloud only

    static DomainSpec ball(int n, double r = 1.0);
    static DomainSpec sphere(int n);
    static DomainSpec donut(int n, double r, double s);
    static DomainSpec nonneg_ball(int n, double r = 1.0);
    static DomainSpec ball_complement(int n, double s);
    static DomainSpec polytope_boundary(Frame frame);
    static DomainSpec sample_cloud(Points points);
    static DomainSpec full_space(int n);

    /// Short label for certificate metadata, e.g. "ball:1".
    std::string label() const;

    /// sup_{x in K} ||x||; throws infeasible_error for unbounded domains.
    double sup_norm() const;

    bool bounded() const;
};

bool contains(const DomainSpec& domain, std::span<const double> x, double tol = kMemTol);

/// Deterministic sample sequence; point j is derived from sub-seed
/// split_seed(seed, j), so generation order and thread count never change
/// the result.
struct SampleSequence {
    Points points;
    std::uint64_t seed = 0;
    std::string generator_id;
};

SampleSequence sample(const DomainSpec& domain, std::size_t count, std::uint64_t seed);

/// Points [begin, begin+count) of the sequence defined by `seed`.
Points sample_block(const DomainSpec& domain, std::uint64_t seed, std::size_t begin,
                    std::size_t count);

/// Generates point `index` of the sequence directly (streaming kernels).
void sample_point_at(const DomainSpec& domain, std::uint64_t seed, std::size_t index,
                     std::span<double> out);

/// Correcting term rho*(n, N) = factor * (log N / N)^(1/n).
double covering_radius_proxy(int n, std::size_t n_samples, double factor = 0.05);

/// max over probes of min distance to the sample set (a lower bound of the
/// true covering radius). OpenMP over probes.
double covering_radius_empirical(const Points& samples, const Points& probes);

namespace serial {
double covering_radius_empirical(const Points& samples, const Points& probes);
}

}  // namespace relucert
