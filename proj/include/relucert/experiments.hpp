#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relucert/bias_estimation.hpp"
#include "relucert/frame.hpp"

namespace relucert {

/// Classical reference frames used across tests and experiments.
Frame triangle_frame();     // Phi_3: three unit vectors at 120 degrees
Frame square_frame();       // +-e1, +-e2
Frame tetrahedron_frame();  // regular tetrahedron directions in R^3
Frame octahedron_frame();   // +-e1, +-e2, +-e3
Frame icosahedron_frame();  // 12 icosahedron vertices on S^2
Frame standard_basis(int n);
Frame builtin_frame(const std::string& name);

/// Random rows, normalized onto the sphere.
Frame random_unit_frame(int m, int n, std::uint64_t seed);

struct EvolutionConfig {
    int n = 3;
    double q = 2.0;  // redundancy m/n
    std::size_t trials = 20;
    std::size_t max_iterations = 10000;
    std::size_t test_points = 1000;
    std::size_t checkpoints = 40;  // log-spaced up to max_iterations
    std::uint64_t seed = 1;
};

struct EvolutionResult {
    std::vector<std::size_t> iterations;              // checkpoint grid
    std::vector<std::vector<double>> trial_fractions;  // [trial][checkpoint]
};

/// Evolution run: random uniform-ball frames, min-update estimation from a
/// +inf init, and per
/// checkpoint the fraction of a fresh test sequence inside the maximal domain.
EvolutionResult experiment_evolution(const EvolutionConfig& config);

/// Aggregated CSV rows: iteration, fraction of fully-injective trials, mean
/// and variance of the per-trial fractions.
std::string evolution_csv(const EvolutionResult& result);

struct TransitionConfig {
    std::vector<int> n_values = {6, 8, 10};
    int m_step = 0;           // 0: max(1, n/2)
    double q_max = 12.0;      // m up to q_max * n
    int m_max_abs = 0;        // absolute cap on m (0: none)
    std::size_t n_samples = 100000;
    std::size_t trials = 5;
    std::vector<double> sigma2 = {0.0};
    double correction_factor = 0.05;
    std::uint64_t seed = 2;
};

struct TransitionCell {
    double sigma2 = 0.0;
    int n = 0;
    int m = 0;
    double pass_fraction = 0.0;  // mean over trials of passing bias coordinates
};

/// Transition grid: Gaussian frames and samples, the sampling estimate minus the
/// covering correction, compared against Gaussian biases of variance sigma2.
std::vector<TransitionCell> experiment_transition(const TransitionConfig& config);

std::string transition_csv(const std::vector<TransitionCell>& cells);

/// Redundancy where the pass fraction crosses 0.5 (linear interpolation on
/// the m grid) for one n slice; NaN if it never crosses.
double transition_crossing(const std::vector<TransitionCell>& cells, double sigma2, int n);

struct MaxbiasConfig {
    std::size_t iterations = 100000;
    std::uint64_t seed = 3;
};

struct MaxbiasResult {
    std::vector<double> distances;  // distance to the PBE value after k samples
    Bias oracle;                    // PBE sphere estimate of the tetrahedron
};

/// Convergence run on the tetrahedron frame: distance of the sampling
/// estimate to the PBE sphere value over the iterations.
MaxbiasResult experiment_maxbias(const MaxbiasConfig& config);

std::string maxbias_csv(const MaxbiasResult& result);

}  // namespace relucert
