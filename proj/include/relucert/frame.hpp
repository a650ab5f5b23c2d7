#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relucert/linalg.hpp"

namespace relucert {

/// Exact >= comparison is the default for active sets; this tolerance only
/// widens tie *detection*, never resolution.
inline constexpr double kTieTol = 1e-9;

/// Enumeration budget shared by spark checks, brute-force basis search and
/// facet enumeration.
inline constexpr std::size_t kSubsetCap = 1000000;

/// m weight vectors of dimension n, stored row-major (rows of the analysis
/// matrix C). The zero vector is never a valid element.
struct Frame {
    int m = 0;
    int n = 0;
    std::vector<double> data;

    std::span<const double> row(int i) const {
        return {data.data() + static_cast<std::size_t>(i) * n, static_cast<std::size_t>(n)};
    }

    Matrix as_matrix() const;

    static Frame from_rows(const std::vector<std::vector<double>>& rows);
};

using Bias = std::vector<double>;

/// Sorted, duplicate-free subset of {0..m-1}.
using IndexSet = std::vector<int>;

struct FrameBounds {
    double lower = 0.0;
    double upper = 0.0;
};

/// Flat point list; every row is one vector of dimension n.
struct Points {
    int n = 0;
    std::size_t count = 0;
    std::vector<double> data;

    std::span<const double> point(std::size_t i) const {
        return {data.data() + i * static_cast<std::size_t>(n), static_cast<std::size_t>(n)};
    }

    void push_back(std::span<const double> x) {
        data.insert(data.end(), x.begin(), x.end());
        ++count;
    }

    static Points from_rows(const std::vector<std::vector<double>>& rows);
};

/// Structural validity: m >= n >= 1 and no zero rows. Throws parse_error.
void validate_shape(const Frame& frame);

/// Spanning test: numerical rank n of the stacked matrix.
bool is_frame(const Frame& frame, double rank_tol = kRankTolScale);

/// Frame coefficients (<x, phi_i>)_i.
std::vector<double> analysis(const Frame& frame, std::span<const double> x);

/// max(0, <x, phi_i> - alpha_i) componentwise.
std::vector<double> relu_layer(const Frame& frame, const Bias& bias, std::span<const double> x);

/// S = sum phi_i phi_i^T.
Matrix frame_operator(const Frame& frame);

/// (lambda_min, lambda_max) of the frame operator; throws infeasible_error
/// when the collection is not a frame.
FrameBounds frame_bounds(const Frame& frame, double rank_tol = kRankTolScale);

/// True iff the sub-collection has numerical rank n.
bool is_subframe(const Frame& frame, const IndexSet& idx, double rank_tol = kRankTolScale);

/// I_x^alpha = { i : <x, phi_i> >= alpha_i }, the comparison exact.
IndexSet active_set(const Frame& frame, const Bias& bias, std::span<const double> x);

/// Indices whose margin |<x, phi_i> - alpha_i| lies within tie_tol; these are
/// the boundary cases the caller may want to treat separately.
IndexSet active_ties(const Frame& frame, const Bias& bias, std::span<const double> x,
                     double tie_tol = kTieTol);

struct CorrelatedBasis {
    IndexSet indices;
    bool unique = true;
};

/// Most correlated basis J*(x). With full_spark set, the n largest
/// coefficients are taken directly; otherwise all basis subsets are searched
/// (capped at kSubsetCap subsets). Non-uniqueness within tie_tol is reported,
/// not resolved: ties pick the lexicographically smallest subset.
CorrelatedBasis most_correlated_basis(const Frame& frame, std::span<const double> x,
                                      bool full_spark = false, double tie_tol = kTieTol,
                                      std::size_t cap = kSubsetCap);

struct RectifyReport {
    bool rectifying = true;
    std::size_t checked = 0;
    std::size_t failures = 0;
    Points failing;  // capped at kMaxWitnessPoints
};

inline constexpr std::size_t kMaxWitnessPoints = 64;

/// alpha-rectifying check over a sample set: every sample's active
/// sub-collection must be a frame. OpenMP over samples.
RectifyReport is_alpha_rectifying_on_samples(const Frame& frame, const Bias& bias,
                                             const Points& samples,
                                             double rank_tol = kRankTolScale);

/// Membership in the maximal domain K*_alpha: the active set contains a basis.
bool in_maximal_domain(const Frame& frame, const Bias& bias, std::span<const double> x,
                       double rank_tol = kRankTolScale);

struct Normalized {
    Frame frame;
    Bias bias;
    std::vector<double> norms;
};

/// Unit-norm frame with bias scaled by the same norms; the rectifying
/// property is preserved exactly.
Normalized normalize(const Frame& frame, const Bias& bias);

/// Every n-subset has rank n. Throws infeasible_error("spark check
/// undecided...") when C(m,n) exceeds the cap.
bool is_full_spark(const Frame& frame, std::size_t cap = kSubsetCap,
                   double rank_tol = kRankTolScale);

/// Counting criterion for frames with known spark: every sample's active set
/// needs at least spark-1 members.
bool spark_rectifying_check(const Frame& frame, int spark, const Bias& bias,
                            const Points& samples);

/// alpha_i' = alpha_i - epsilon * M: the bias slack that absorbs row
/// perturbations up to epsilon on inputs bounded by M.
Bias perturbed_bias(const Bias& bias, double epsilon, double big_m);

namespace serial {

/// Reference implementation kept for testing the parallel kernel.
RectifyReport is_alpha_rectifying_on_samples(const Frame& frame, const Bias& bias,
                                             const Points& samples,
                                             double rank_tol = kRankTolScale);

}  // namespace serial

}  // namespace relucert
