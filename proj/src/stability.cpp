#include "relucert/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "relucert/errors.hpp"
#include "relucert/parallel.hpp"

namespace relucert {

namespace {

std::pair<double, double> active_set_extremes(const Frame& frame, const IndexSet& idx) {
    Matrix sub(static_cast<int>(idx.size()), frame.n);
    for (std::size_t r = 0; r < idx.size(); ++r) {
        auto row = frame.row(idx[r]);
        std::copy(row.begin(), row.end(), sub.data.begin() + r * static_cast<std::size_t>(frame.n));
    }
    std::vector<double> ev = jacobi_eigenvalues(gram(sub));
    return {ev.front(), ev.back()};
}

}  // namespace

StabilityReport relu_frame_bounds(const Frame& frame, const Bias& bias, const Points& samples) {
    if (samples.count == 0) throw parse_error("relu_frame_bounds: samples must be nonempty");
    StabilityReport rep;
    rep.samples = samples.count;

    // Distinct active sets first (parallel), eigendata once per set.
    std::map<IndexSet, std::pair<double, double>> cache;
    const int threads = thread_count();
    std::vector<std::map<IndexSet, std::size_t>> seen(static_cast<std::size_t>(threads));
#pragma omp parallel for schedule(static) num_threads(threads)
    for (int t = 0; t < threads; ++t) {
        std::size_t chunk = (samples.count + threads - 1) / threads;
        std::size_t begin = static_cast<std::size_t>(t) * chunk;
        std::size_t end = std::min(samples.count, begin + chunk);
        for (std::size_t s = begin; s < end; ++s) {
            IndexSet act = active_set(frame, bias, samples.point(s));
            seen[static_cast<std::size_t>(t)].emplace(std::move(act), s);
        }
    }
    std::map<IndexSet, std::size_t> merged;
    for (auto& part : seen)
        for (auto& [k, first] : part) {
            auto it = merged.find(k);
            if (it == merged.end())
                merged.emplace(k, first);
            else
                it->second = std::min(it->second, first);
        }

    rep.distinct_active_sets = merged.size();
    rep.a_alpha = std::numeric_limits<double>::infinity();
    rep.b_alpha = 0.0;
    for (const auto& [idx, first_sample] : merged) {
        if (static_cast<int>(idx.size()) < frame.n || !is_subframe(frame, idx)) {
            rep.deficient = true;
            rep.a_alpha = 0.0;
            auto w = samples.point(first_sample);
            rep.deficient_witness.assign(w.begin(), w.end());
            continue;
        }
        auto [lo, hi] = active_set_extremes(frame, idx);
        rep.a_alpha = std::min(rep.a_alpha, lo);
        rep.b_alpha = std::max(rep.b_alpha, hi);
        if (lo > 0.0) rep.worst_condition = std::max(rep.worst_condition, hi / lo);
    }
    if (!std::isfinite(rep.a_alpha)) rep.a_alpha = 0.0;

    bool zero_bias = std::all_of(bias.begin(), bias.end(), [](double v) { return v == 0.0; });
    if (zero_bias && rep.a_alpha > 0.0)
        rep.global_zero_bias_constant = 2.0 * frame.m / rep.a_alpha;
    return rep;
}

LocalStability local_stability(const Frame& frame, const Bias& bias, std::span<const double> x0,
                               double tie_tol) {
    IndexSet act = active_set(frame, bias, x0);
    if (!is_subframe(frame, act))
        throw infeasible_error("local_stability: active set at x0 is not a frame");
    auto [lo, hi] = active_set_extremes(frame, act);
    (void)hi;
    LocalStability out;
    out.constant = 1.0 / lo;
    // Strictness: every active inequality must clear the tie tolerance,
    // otherwise the constant only covers biases strictly below alpha.
    for (int i : act) {
        double margin = dot(frame.row(i), x0) - bias[static_cast<std::size_t>(i)];
        if (margin <= tie_tol) {
            out.strict = false;
            break;
        }
    }
    return out;
}

ImageBoundReport image_ball_radius(const Frame& frame, const Bias& bias, const DomainSpec& domain,
                                   const Points& samples) {
    StabilityReport bounds = relu_frame_bounds(frame, bias, samples);
    ImageBoundReport rep;
    double big_m = domain.sup_norm();
    rep.radius = std::sqrt(bounds.b_alpha) * big_m;

    for (std::size_t s = 0; s < samples.count; ++s) {
        std::vector<double> z = relu_layer(frame, bias, samples.point(s));
        double nrm = norm2(z);
        rep.max_output_norm = std::max(rep.max_output_norm, nrm);
        if (nrm > rep.radius * (1.0 + 1e-12)) ++rep.violations;
        for (double v : z)
            if (v < 0.0) ++rep.negative_outputs;
    }
    return rep;
}

}  // namespace relucert
