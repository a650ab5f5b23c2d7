#include "relucert/frame.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "relucert/errors.hpp"
#include "relucert/parallel.hpp"

namespace relucert {

Matrix Frame::as_matrix() const {
    Matrix c(m, n);
    c.data = data;
    return c;
}

Frame Frame::from_rows(const std::vector<std::vector<double>>& rows) {
    Frame f;
    f.m = static_cast<int>(rows.size());
    f.n = rows.empty() ? 0 : static_cast<int>(rows.front().size());
    f.data.reserve(static_cast<std::size_t>(f.m) * f.n);
    for (const auto& r : rows) {
        if (static_cast<int>(r.size()) != f.n)
            throw parse_error("frame rows have inconsistent dimension");
        f.data.insert(f.data.end(), r.begin(), r.end());
    }
    validate_shape(f);
    return f;
}

Points Points::from_rows(const std::vector<std::vector<double>>& rows) {
    Points p;
    p.count = rows.size();
    p.n = rows.empty() ? 0 : static_cast<int>(rows.front().size());
    p.data.reserve(p.count * static_cast<std::size_t>(p.n));
    for (const auto& r : rows) {
        if (static_cast<int>(r.size()) != p.n)
            throw parse_error("point rows have inconsistent dimension");
        p.data.insert(p.data.end(), r.begin(), r.end());
    }
    return p;
}

void validate_shape(const Frame& frame) {
    if (frame.n < 1 || frame.m < frame.n)
        throw parse_error("frame requires m >= n >= 1");
    if (frame.data.size() != static_cast<std::size_t>(frame.m) * frame.n)
        throw parse_error("frame data size does not match m x n");
    for (int i = 0; i < frame.m; ++i) {
        if (norm2(frame.row(i)) == 0.0)
            throw parse_error("frame contains the zero vector (row " + std::to_string(i) + ")");
    }
}

bool is_frame(const Frame& frame, double rank_tol) {
    return numerical_rank(frame.as_matrix(), rank_tol) == frame.n;
}

std::vector<double> analysis(const Frame& frame, std::span<const double> x) {
    if (static_cast<int>(x.size()) != frame.n)
        throw parse_error("analysis: input dimension mismatch");
    std::vector<double> c(static_cast<std::size_t>(frame.m));
    for (int i = 0; i < frame.m; ++i) c[static_cast<std::size_t>(i)] = dot(frame.row(i), x);
    return c;
}

std::vector<double> relu_layer(const Frame& frame, const Bias& bias, std::span<const double> x) {
    if (static_cast<int>(bias.size()) != frame.m)
        throw parse_error("relu_layer: bias length mismatch");
    std::vector<double> z = analysis(frame, x);
    for (int i = 0; i < frame.m; ++i) {
        std::size_t k = static_cast<std::size_t>(i);
        z[k] = std::max(0.0, z[k] - bias[k]);
    }
    return z;
}

Matrix frame_operator(const Frame& frame) {
    return gram(frame.as_matrix());
}

FrameBounds frame_bounds(const Frame& frame, double rank_tol) {
    if (!is_frame(frame, rank_tol)) throw infeasible_error("not a frame: rank below n");
    std::vector<double> ev = jacobi_eigenvalues(frame_operator(frame));
    return FrameBounds{ev.front(), ev.back()};
}

namespace {

Matrix submatrix(const Frame& frame, const IndexSet& idx) {
    Matrix s(static_cast<int>(idx.size()), frame.n);
    for (std::size_t r = 0; r < idx.size(); ++r) {
        auto row = frame.row(idx[r]);
        std::copy(row.begin(), row.end(), s.data.begin() + r * static_cast<std::size_t>(frame.n));
    }
    return s;
}

// Rank test specialized for sub-collections: cheap exits for |idx| < n.
bool subset_has_rank_n(const Frame& frame, const IndexSet& idx, double rank_tol) {
    if (static_cast<int>(idx.size()) < frame.n) return false;
    return numerical_rank(submatrix(frame, idx), rank_tol) == frame.n;
}

}  // namespace

bool is_subframe(const Frame& frame, const IndexSet& idx, double rank_tol) {
    if (idx.empty()) return false;
    for (int i : idx)
        if (i < 0 || i >= frame.m) throw parse_error("is_subframe: index out of range");
    return subset_has_rank_n(frame, idx, rank_tol);
}

IndexSet active_set(const Frame& frame, const Bias& bias, std::span<const double> x) {
    if (static_cast<int>(bias.size()) != frame.m)
        throw parse_error("active_set: bias length mismatch");
    IndexSet idx;
    for (int i = 0; i < frame.m; ++i)
        if (dot(frame.row(i), x) >= bias[static_cast<std::size_t>(i)]) idx.push_back(i);
    return idx;
}

IndexSet active_ties(const Frame& frame, const Bias& bias, std::span<const double> x,
                     double tie_tol) {
    IndexSet ties;
    for (int i = 0; i < frame.m; ++i) {
        double margin = dot(frame.row(i), x) - bias[static_cast<std::size_t>(i)];
        if (std::abs(margin) <= tie_tol) ties.push_back(i);
    }
    return ties;
}

CorrelatedBasis most_correlated_basis(const Frame& frame, std::span<const double> x,
                                      bool full_spark, double tie_tol, std::size_t cap) {
    std::vector<double> coeff = analysis(frame, x);
    CorrelatedBasis result;

    if (full_spark) {
        std::vector<int> order(static_cast<std::size_t>(frame.m));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&coeff](int a, int b) {
            return coeff[static_cast<std::size_t>(a)] > coeff[static_cast<std::size_t>(b)];
        });
        result.indices.assign(order.begin(), order.begin() + frame.n);
        std::sort(result.indices.begin(), result.indices.end());
        if (frame.m > frame.n) {
            double nth = coeff[static_cast<std::size_t>(order[static_cast<std::size_t>(frame.n - 1)])];
            double next = coeff[static_cast<std::size_t>(order[static_cast<std::size_t>(frame.n)])];
            result.unique = (nth - next) > tie_tol;
        }
        return result;
    }

    if (binomial_capped(frame.m, frame.n, cap) > cap)
        throw infeasible_error(
            "most_correlated_basis: subset enumeration exceeds cap; "
            "only the full-spark shortcut is available at this size");

    double best = -std::numeric_limits<double>::infinity();
    double runner = -std::numeric_limits<double>::infinity();
    bool found = false;
    for_each_subset(frame.m, frame.n, [&](const IndexSet& idx) {
        double mn = std::numeric_limits<double>::infinity();
        for (int i : idx) mn = std::min(mn, coeff[static_cast<std::size_t>(i)]);
        if (mn <= runner) return true;  // cannot change best or runner-up
        if (!subset_has_rank_n(frame, idx, kRankTolScale)) return true;
        if (mn > best) {
            runner = best;
            best = mn;
            result.indices = idx;
            found = true;
        } else {
            runner = std::max(runner, mn);  // equal values from later subsets land here
        }
        return true;
    });
    if (!found) throw infeasible_error("most_correlated_basis: no basis subset found");
    result.unique = (best - runner) > tie_tol;
    return result;
}

namespace {

RectifyReport rectify_check_range(const Frame& frame, const Bias& bias, const Points& samples,
                                  double rank_tol, std::size_t begin, std::size_t end) {
    RectifyReport rep;
    rep.failing.n = frame.n;
    for (std::size_t s = begin; s < end; ++s) {
        auto x = samples.point(s);
        IndexSet act = active_set(frame, bias, x);
        ++rep.checked;
        if (!subset_has_rank_n(frame, act, rank_tol)) {
            rep.rectifying = false;
            ++rep.failures;
            if (rep.failing.count < kMaxWitnessPoints) rep.failing.push_back(x);
        }
    }
    return rep;
}

void merge_reports(RectifyReport& into, const RectifyReport& part) {
    into.checked += part.checked;
    into.failures += part.failures;
    into.rectifying = into.rectifying && part.rectifying;
    for (std::size_t i = 0; i < part.failing.count && into.failing.count < kMaxWitnessPoints; ++i)
        into.failing.push_back(part.failing.point(i));
}

}  // namespace

RectifyReport is_alpha_rectifying_on_samples(const Frame& frame, const Bias& bias,
                                             const Points& samples, double rank_tol) {
    RectifyReport rep;
    rep.failing.n = frame.n;
    const int threads = thread_count();
    if (threads <= 1 || samples.count < 256)
        return rectify_check_range(frame, bias, samples, rank_tol, 0, samples.count);

    std::vector<RectifyReport> parts(static_cast<std::size_t>(threads));
#pragma omp parallel for schedule(static) num_threads(threads)
    for (int t = 0; t < threads; ++t) {
        std::size_t chunk = (samples.count + threads - 1) / threads;
        std::size_t begin = static_cast<std::size_t>(t) * chunk;
        std::size_t end = std::min(samples.count, begin + chunk);
        if (begin < end)
            parts[static_cast<std::size_t>(t)] =
                rectify_check_range(frame, bias, samples, rank_tol, begin, end);
        else
            parts[static_cast<std::size_t>(t)].failing.n = frame.n;
    }
    for (const auto& part : parts) merge_reports(rep, part);
    return rep;
}

namespace serial {

RectifyReport is_alpha_rectifying_on_samples(const Frame& frame, const Bias& bias,
                                             const Points& samples, double rank_tol) {
    return rectify_check_range(frame, bias, samples, rank_tol, 0, samples.count);
}

}  // namespace serial

bool in_maximal_domain(const Frame& frame, const Bias& bias, std::span<const double> x,
                       double rank_tol) {
    return subset_has_rank_n(frame, active_set(frame, bias, x), rank_tol);
}

Normalized normalize(const Frame& frame, const Bias& bias) {
    if (static_cast<int>(bias.size()) != frame.m)
        throw parse_error("normalize: bias length mismatch");
    Normalized out;
    out.frame = frame;
    out.bias = bias;
    out.norms.resize(static_cast<std::size_t>(frame.m));
    for (int i = 0; i < frame.m; ++i) {
        double nrm = norm2(frame.row(i));
        if (nrm == 0.0) throw parse_error("normalize: zero vector present");
        out.norms[static_cast<std::size_t>(i)] = nrm;
        for (int j = 0; j < frame.n; ++j)
            out.frame.data[static_cast<std::size_t>(i) * frame.n + j] /= nrm;
        out.bias[static_cast<std::size_t>(i)] /= nrm;
    }
    return out;
}

bool is_full_spark(const Frame& frame, std::size_t cap, double rank_tol) {
    if (binomial_capped(frame.m, frame.n, cap) > cap)
        throw infeasible_error("spark check undecided: C(m,n) exceeds the enumeration cap");
    bool full = true;
    for_each_subset(frame.m, frame.n, [&](const IndexSet& idx) {
        if (!subset_has_rank_n(frame, idx, rank_tol)) {
            full = false;
            return false;
        }
        return true;
    });
    return full;
}

bool spark_rectifying_check(const Frame& frame, int spark, const Bias& bias,
                            const Points& samples) {
    for (std::size_t s = 0; s < samples.count; ++s) {
        IndexSet act = active_set(frame, bias, samples.point(s));
        if (static_cast<int>(act.size()) < spark - 1) return false;
    }
    return true;
}

Bias perturbed_bias(const Bias& bias, double epsilon, double big_m) {
    if (epsilon < 0.0 || big_m < 0.0)
        throw parse_error("perturbed_bias: epsilon and M must be non-negative");
    Bias out = bias;
    for (double& v : out) v -= epsilon * big_m;
    return out;
}

}  // namespace relucert
