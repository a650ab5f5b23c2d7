#include "relucert/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "relucert/errors.hpp"

namespace relucert {

namespace {

Matrix rows_of(const Frame& frame, const IndexSet& subset) {
    Matrix s(static_cast<int>(subset.size()), frame.n);
    for (std::size_t r = 0; r < subset.size(); ++r) {
        auto row = frame.row(subset[r]);
        std::copy(row.begin(), row.end(), s.data.begin() + r * static_cast<std::size_t>(frame.n));
    }
    return s;
}

}  // namespace

DualSynthesis canonical_dual(const Frame& frame, const IndexSet& subset) {
    if (!is_subframe(frame, subset))
        throw infeasible_error("canonical_dual: subset is not a frame");
    Matrix sub = rows_of(frame, subset);

    // Dual rows are the columns of pinv(C_J) = R^{-1} Q^T. Going through the
    // QR factors instead of the sub-frame operator S_J avoids squaring the
    // condition number, which the normal-equations route cannot keep inside
    // the 1e-10 identity budget on badly conditioned active sets.
    QRResult qr = householder_qr(sub);

    DualSynthesis dual;
    dual.subset = subset;
    dual.duals = Matrix(static_cast<int>(subset.size()), frame.n);
    for (std::size_t r = 0; r < subset.size(); ++r) {
        std::vector<double> d = upper_solve(qr.r, qr.q.row(static_cast<int>(r)));
        std::copy(d.begin(), d.end(),
                  dual.duals.data.begin() + r * static_cast<std::size_t>(frame.n));
    }
    return dual;
}

double dual_identity_error(const Frame& frame, const DualSynthesis& dual) {
    // D~_J C_J = sum_i dual_i phi_i^T, an n x n matrix.
    int n = frame.n;
    Matrix prod(n, n);
    for (std::size_t r = 0; r < dual.subset.size(); ++r) {
        auto d = dual.duals.row(static_cast<int>(r));
        auto phi = frame.row(dual.subset[r]);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                prod.at(i, j) += d[static_cast<std::size_t>(i)] * phi[static_cast<std::size_t>(j)];
    }
    double err = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            err = std::max(err, std::abs(prod.at(i, j) - (i == j ? 1.0 : 0.0)));
    return err;
}

std::vector<double> relu_synthesis(const DualSynthesis& dual, std::span<const double> z,
                                   const Bias& bias) {
    int n = dual.duals.cols;
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    for (std::size_t r = 0; r < dual.subset.size(); ++r) {
        std::size_t i = static_cast<std::size_t>(dual.subset[r]);
        double c = z[i] + bias[i];
        auto d = dual.duals.row(static_cast<int>(r));
        for (int j = 0; j < n; ++j) x[static_cast<std::size_t>(j)] += c * d[static_cast<std::size_t>(j)];
    }
    return x;
}

namespace {

double output_residual(const Frame& frame, const Bias& bias, std::span<const double> x,
                       std::span<const double> z) {
    std::vector<double> zz = relu_layer(frame, bias, x);
    double r2 = 0.0;
    for (std::size_t i = 0; i < zz.size(); ++i) {
        double d = zz[i] - z[i];
        r2 += d * d;
    }
    return std::sqrt(r2);
}

// Greedy rank-augmenting pick of the n largest unbiased coefficients.
IndexSet largest_coefficient_basis(const Frame& frame, const std::vector<double>& unbiased,
                                   const IndexSet& active) {
    std::vector<int> order(active.begin(), active.end());
    std::stable_sort(order.begin(), order.end(), [&unbiased](int a, int b) {
        double ua = unbiased[static_cast<std::size_t>(a)];
        double ub = unbiased[static_cast<std::size_t>(b)];
        if (ua != ub) return ua > ub;
        return a < b;
    });
    IndexSet chosen;
    for (int i : order) {
        IndexSet trial = chosen;
        trial.push_back(i);
        std::sort(trial.begin(), trial.end());
        Matrix sub(static_cast<int>(trial.size()), frame.n);
        for (std::size_t r = 0; r < trial.size(); ++r) {
            auto row = frame.row(trial[r]);
            std::copy(row.begin(), row.end(), sub.data.begin() + r * static_cast<std::size_t>(frame.n));
        }
        if (numerical_rank(sub) == static_cast<int>(trial.size())) chosen = trial;
        if (static_cast<int>(chosen.size()) == frame.n) break;
    }
    return chosen;
}

}  // namespace

ReconstructionResult reconstruct(const Frame& frame, const Bias& bias, std::span<const double> z) {
    if (static_cast<int>(z.size()) != frame.m)
        throw parse_error("reconstruct: output length mismatch");
    ReconstructionResult res;

    IndexSet active;
    for (int i = 0; i < frame.m; ++i) {
        std::size_t ii = static_cast<std::size_t>(i);
        if (z[ii] > 0.0) {
            active.push_back(i);
        } else if (z[ii] == 0.0 && bias[ii] <= 0.0) {
            // Could be an exactly-at-threshold coordinate; excluded from J.
            res.ambiguous_zeros = true;
        }
    }

    if (!is_subframe(frame, active)) {
        res.note = "not invertible from this output: active set contains no frame";
        return res;
    }

    std::vector<double> unbiased(static_cast<std::size_t>(frame.m), 0.0);
    for (int i : active) {
        std::size_t ii = static_cast<std::size_t>(i);
        unbiased[ii] = z[ii] + bias[ii];
    }

    IndexSet chosen = largest_coefficient_basis(frame, unbiased, active);
    if (static_cast<int>(chosen.size()) != frame.n) chosen = active;

    DualSynthesis dual = canonical_dual(frame, chosen);
    res.x = relu_synthesis(dual, z, bias);
    res.used = chosen;
    res.residual = output_residual(frame, bias, res.x, z);
    res.ok = true;

    // Ill-conditioned top-n choice: retry with the full active set.
    if (res.residual > 1e-9 && chosen.size() < active.size()) {
        DualSynthesis full = canonical_dual(frame, active);
        std::vector<double> x2 = relu_synthesis(full, z, bias);
        double r2 = output_residual(frame, bias, x2, z);
        if (r2 < res.residual) {
            res.x = std::move(x2);
            res.used = active;
            res.residual = r2;
        }
    }
    return res;
}

std::vector<double> prelu_inverse(const Frame& frame, const Bias& bias, double gamma,
                                  std::span<const double> z, const DualSynthesis& full_dual) {
    if (!(gamma > 0.0) || gamma > 1.0) throw parse_error("prelu_inverse: gamma must be in (0, 1]");
    if (static_cast<int>(full_dual.subset.size()) != frame.m)
        throw parse_error("prelu_inverse: dual must cover the full index set");

    // PReLU(s) = max(gamma*s, s): outputs >= 0 came from s = z_i, negative
    // ones from s = z_i / gamma. Unbias and run plain dual synthesis.
    int n = frame.n;
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < frame.m; ++i) {
        std::size_t ii = static_cast<std::size_t>(i);
        double s = z[ii] >= 0.0 ? z[ii] : z[ii] / gamma;
        double c = s + bias[ii];
        auto d = full_dual.duals.row(i);
        for (int j = 0; j < n; ++j) x[static_cast<std::size_t>(j)] += c * d[static_cast<std::size_t>(j)];
    }
    return x;
}

ReconstructionResult relu_frame_algorithm(const Frame& frame, const Bias& bias,
                                          std::span<const double> z,
                                          const FrameAlgorithmOptions& opts) {
    if (static_cast<int>(z.size()) != frame.m)
        throw parse_error("relu_frame_algorithm: output length mismatch");
    ReconstructionResult res;

    IndexSet active;
    for (int i = 0; i < frame.m; ++i)
        if (z[static_cast<std::size_t>(i)] > 0.0) active.push_back(i);
    if (active.empty()) {
        res.note = "no active coordinates in the output";
        return res;
    }

    FrameBounds bounds = frame_bounds(frame);
    double lambda = opts.lambda.value_or(2.0 / (bounds.lower + bounds.upper));
    double lambda0 = opts.lambda0.value_or(2.0 / (bounds.lower + bounds.upper));

    // <x, phi_i> = z_i + alpha_i on the active set.
    std::vector<double> target(static_cast<std::size_t>(frame.m), 0.0);
    for (int i : active) {
        std::size_t ii = static_cast<std::size_t>(i);
        target[ii] = z[ii] + bias[ii];
    }

    const int n = frame.n;
    std::vector<double> y(static_cast<std::size_t>(n), 0.0);
    std::vector<double> y_next(static_cast<std::size_t>(n), 0.0);
    std::vector<char> is_active(static_cast<std::size_t>(frame.m), 0);
    for (int i : active) is_active[static_cast<std::size_t>(i)] = 1;

    double prev_step = std::numeric_limits<double>::infinity();
    int growth_streak = 0;
    std::size_t it = 0;
    for (; it < opts.max_iterations; ++it) {
        if (opts.error_trace != nullptr && !opts.truth.empty()) {
            double e2 = 0.0;
            for (int j = 0; j < n; ++j) {
                double d = y[static_cast<std::size_t>(j)] - opts.truth[static_cast<std::size_t>(j)];
                e2 += d * d;
            }
            opts.error_trace->push_back(std::sqrt(e2));
        }
        y_next = y;
        for (int i = 0; i < frame.m; ++i) {
            std::size_t ii = static_cast<std::size_t>(i);
            double yc = dot(frame.row(i), y);
            double w = 0.0;
            if (is_active[ii]) {
                w = lambda * (target[ii] - yc);
            } else if (lambda0 != 0.0 && yc >= bias[ii]) {
                // Inactive for x but active for the iterate: bias proxy term.
                w = lambda0 * (bias[ii] - yc);
            }
            if (w != 0.0) {
                auto phi = frame.row(i);
                for (int j = 0; j < n; ++j)
                    y_next[static_cast<std::size_t>(j)] += w * phi[static_cast<std::size_t>(j)];
            }
        }
        double step = 0.0;
        for (int j = 0; j < n; ++j) {
            double d = y_next[static_cast<std::size_t>(j)] - y[static_cast<std::size_t>(j)];
            step += d * d;
        }
        step = std::sqrt(step);
        y.swap(y_next);
        if (step < opts.tol) {
            ++it;
            break;
        }
        if (step > prev_step) {
            if (++growth_streak >= 20) {
                res.note = "divergence detected: update norm grew for 20 iterations";
                res.x = y;
                res.iterations = it + 1;
                res.residual = output_residual(frame, bias, y, z);
                return res;
            }
        } else {
            growth_streak = 0;
        }
        prev_step = step;
    }

    res.x = std::move(y);
    res.used = active;
    res.iterations = it;
    res.residual = output_residual(frame, bias, res.x, z);
    res.ok = true;
    return res;
}

}  // namespace relucert
