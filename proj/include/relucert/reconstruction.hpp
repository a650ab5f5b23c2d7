#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relucert/frame.hpp"

namespace relucert {

/// Dual synthesis vectors for a sub-frame Phi_J: column i of D~_J is
/// S_J^{-1} phi_i. Satisfies D~_J C_J = Id (checked by dual_identity_error).
struct DualSynthesis {
    IndexSet subset;
    Matrix duals;  // |J| rows of dimension n, aligned with subset
};

/// Dual of Phi_J via the sub-frame operator S_J = C_J^T C_J.
DualSynthesis canonical_dual(const Frame& frame, const IndexSet& subset);

/// max-norm of D~_J C_J - Id.
double dual_identity_error(const Frame& frame, const DualSynthesis& dual);

/// ReLU-synthesis: sum over J of (z_i + alpha_i) * dual_i.
std::vector<double> relu_synthesis(const DualSynthesis& dual, std::span<const double> z,
                                   const Bias& bias);

struct ReconstructionResult {
    std::vector<double> x;
    IndexSet used;
    double residual = 0.0;       // ||C_alpha x - z|| (reported, never assumed zero)
    std::size_t iterations = 0;  // iterative path only
    bool ok = false;
    bool ambiguous_zeros = false;  // z has zeros that could be exact thresholds
    std::string note;
};

/// Direct reconstruction from a ReLU layer output: reads the active set off
/// z (z_i > 0), picks the n largest unbiased coefficients forming a frame
/// (full active set as fallback) and applies the dual synthesis.
ReconstructionResult reconstruct(const Frame& frame, const Bias& bias, std::span<const double> z);

/// Exact left-inverse of the PReLU layer (gamma in (0,1]): active
/// coordinates (z_i >= 0) unbias directly, inactive ones unscale by 1/gamma
/// first. The dual must cover the full index set.
std::vector<double> prelu_inverse(const Frame& frame, const Bias& bias, double gamma,
                                  std::span<const double> z, const DualSynthesis& full_dual);

struct FrameAlgorithmOptions {
    std::optional<double> lambda;    // default 2/(A+B) of the full frame
    std::optional<double> lambda0;   // default 2/(A+B); 0 disables the proxy term
    double tol = 1e-12;
    std::size_t max_iterations = 10000;
    /// When set, ||y_k - truth|| is appended per iteration (analysis runs).
    std::vector<double>* error_trace = nullptr;
    std::span<const double> truth;
};

/// Iterative reconstruction: active coefficients drive the classical frame
/// algorithm step, inactive-but-currently-active coordinates of the iterate
/// contribute the bias value as a proxy. Aborts when the update residual
/// grows for 20 consecutive iterations.
ReconstructionResult relu_frame_algorithm(const Frame& frame, const Bias& bias,
                                          std::span<const double> z,
                                          const FrameAlgorithmOptions& opts = {});

}  // namespace relucert
