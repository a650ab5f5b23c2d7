#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "relucert/domain.hpp"
#include "relucert/frame.hpp"
#include "relucert/polytope.hpp"

namespace relucert {

inline constexpr double kSolverTol = 1e-8;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class EstimateMethod {
    sampling,
    pbe_boundary,
    pbe_sphere,
    pbe_donut,
    pbe_nonneg,
    pbe_complement,
    constant,
};

const char* method_name(EstimateMethod m);

/// A bias vector together with everything needed to reproduce it. Entries
/// are +inf for coordinates that were never updated (sampling) or are free
/// (non-negative-ball case); such coordinates always pass certification.
struct BiasEstimate {
    Bias values;
    EstimateMethod method = EstimateMethod::sampling;
    double correction = 0.0;  // subtracted covering-radius term, 0 for PBE
    std::uint64_t seed = 0;
    std::size_t n_samples = 0;
    std::size_t iterations = 0;
    std::optional<DomainSpec> domain;
    IndexSet free_indices;   // coordinates reported "arbitrary"
    IndexSet flagged;        // coordinates with a non-converged solver
    double frame_scale = 1.0;  // pbe_complement: estimate applies to scale*Phi
};

struct SamplingOptions {
    std::optional<Bias> init;      // default: auto-init (frame elements, else +inf)
    bool assume_full_spark = false;
    double correction_factor = 0.05;
};

/// Monte-Carlo estimation of the maximal bias: per sample, the coordinates of
/// the most correlated basis are min-updated with their coefficients. The
/// update is a pure componentwise-min reduction, so the OpenMP version is
/// bit-identical to sequential processing. Requires a normalized full-spark
/// frame (checked unless assume_full_spark is set).
BiasEstimate sampling_bias_estimate(const Frame& frame, const DomainSpec& domain, std::size_t n,
                                    std::uint64_t seed, const SamplingOptions& opts = {});

/// While-loop variant: processes `steps` samples at a time until the change
/// of the estimate over a block drops to epsilon or max_n is reached.
BiasEstimate stopping_variant(const Frame& frame, const DomainSpec& domain, double epsilon,
                              std::size_t steps, std::uint64_t seed, std::size_t max_n,
                              const SamplingOptions& opts = {});

namespace serial {
/// Sequential reference of the sampling estimator; the parallel kernel must
/// reproduce it bit for bit (min-reduction).
BiasEstimate sampling_bias_estimate(const Frame& frame, const DomainSpec& domain, std::size_t n,
                                    std::uint64_t seed, const SamplingOptions& opts = {});
}  // namespace serial

/// Maximal constant bias approximation: min over samples of the smallest
/// coefficient within the most correlated basis.
double constant_bias_estimate(const Frame& frame, const DomainSpec& domain, std::size_t n,
                              std::uint64_t seed, bool assume_full_spark = false);

struct PbeOptions {
    std::size_t solver_iterations = 10000;
    double solver_tol = kSolverTol;
    std::size_t cross_check_samples = 100000;
    std::uint64_t seed = 20240915;
};

/// PBE on the polytope boundary: min inner product against co-facet vertices.
BiasEstimate pbe_boundary(const Frame& frame, const FacetStructure& fs);

/// PBE on the unit sphere. Coordinates with non-negative boundary values are
/// taken directly; the rest solve the convex cap program, cross-checked by
/// dense sampling of the cap (the smaller value is kept).
BiasEstimate pbe_sphere(const Frame& frame, const FacetStructure& fs, const PbeOptions& opts = {});

/// PBE for the donut D_{r,s} (s = 0 gives the closed ball B_r).
BiasEstimate pbe_donut(const Frame& frame, const FacetStructure& fs, double r, double s,
                       const PbeOptions& opts = {});

/// PBE for the non-negative part of the ball; coordinates whose vertices lie
/// on no facet meeting the positive orthant are free ("arbitrary") and get a
/// +inf sentinel.
BiasEstimate pbe_nonneg_ball(const Frame& frame, const FacetStructure& fs, double r,
                             const PbeOptions& opts = {});

/// PBE for the complement of the open ball of radius s, for the scaled frame
/// s*Phi. Requires the boundary estimate to be non-negative.
BiasEstimate pbe_ball_complement(const Frame& frame, const FacetStructure& fs, double s);

enum class Verdict { injective, not_injective, unknown };

const char* verdict_name(Verdict v);

struct Certificate {
    Verdict verdict = Verdict::unknown;
    std::vector<double> margin;  // estimate values minus the given bias
    EstimateMethod method = EstimateMethod::sampling;
    double correction = 0.0;
    std::uint64_t seed = 0;
    std::size_t n_samples = 0;
    std::string domain_label;
    std::string note;
    Points witnesses;  // two points with equal layer output when not injective
};

struct CertifyOptions {
    std::size_t witness_scan_points = 20000;
    std::uint64_t witness_seed = 77;
};

/// Compares a given bias against an estimate: injective iff the given bias
/// stays below the (correction-adjusted) estimate on every coordinate.
/// Sampling verdicts whose margin sits inside the correction band are
/// downgraded to unknown. When the comparison fails, a seeded witness scan
/// over the estimate's domain tries to produce an actual collision pair;
/// not_injective is only reported with a verified pair.
Certificate certify(const Frame& frame, const Bias& given, const BiasEstimate& estimate,
                    const CertifyOptions& opts = {});

}  // namespace relucert
