#pragma once

#include <span>
#include <vector>

#include "relucert/domain.hpp"
#include "relucert/frame.hpp"

namespace relucert {

/// Sample-based outer estimates of the ReLU-frame bounds: extremal
/// eigenvalues over the active sub-frames seen in the sample set. Unseen
/// active sets may still worsen the true bounds, hence the distinct-set count.
struct StabilityReport {
    double a_alpha = 0.0;
    double b_alpha = 0.0;
    std::size_t samples = 0;
    std::size_t distinct_active_sets = 0;
    double worst_condition = 0.0;  // max over seen active sets of B_J / A_J
    bool deficient = false;        // some sample's active set is not a frame
    std::vector<double> deficient_witness;
    /// Reported for alpha = 0 only: the global 2m/A_alpha Lipschitz constant
    /// (never asserted as tight).
    double global_zero_bias_constant = 0.0;
};

/// A_alpha = min lambda_min, B_alpha = max lambda_max over the distinct
/// active sub-frames of the samples (eigendata memoized per active set).
StabilityReport relu_frame_bounds(const Frame& frame, const Bias& bias, const Points& samples);

struct LocalStability {
    double constant = 0.0;  // A_J^{-1} for J = active set at x0
    bool strict = true;     // all active inequalities strict: holds at alpha itself
};

/// Local lower-Lipschitz constant near x0; non-strict activity downgrades the
/// guarantee to biases beta < alpha (flag).
LocalStability local_stability(const Frame& frame, const Bias& bias, std::span<const double> x0,
                               double tie_tol = kTieTol);

struct ImageBoundReport {
    double radius = 0.0;       // sqrt(B_alpha) * M
    std::size_t violations = 0;  // sampled outputs outside the ball (reported)
    std::size_t negative_outputs = 0;
    double max_output_norm = 0.0;
};

/// Smallest non-negative ball radius sqrt(B_alpha)*M for the layer image;
/// verifies the sampled outputs and reports (never hides) violations.
ImageBoundReport image_ball_radius(const Frame& frame, const Bias& bias, const DomainSpec& domain,
                                   const Points& samples);

}  // namespace relucert
