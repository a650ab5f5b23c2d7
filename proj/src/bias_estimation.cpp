#include "relucert/bias_estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "relucert/errors.hpp"
#include "relucert/parallel.hpp"
#include "relucert/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace relucert {

const char* method_name(EstimateMethod m) {
    switch (m) {
        case EstimateMethod::sampling: return "sampling";
        case EstimateMethod::pbe_boundary: return "pbe_boundary";
        case EstimateMethod::pbe_sphere: return "pbe_sphere";
        case EstimateMethod::pbe_donut: return "pbe_donut";
        case EstimateMethod::pbe_nonneg: return "pbe_nonneg";
        case EstimateMethod::pbe_complement: return "pbe_complement";
        case EstimateMethod::constant: return "constant";
    }
    return "?";
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::injective: return "injective";
        case Verdict::not_injective: return "not_injective";
        case Verdict::unknown: return "unknown";
    }
    return "?";
}

namespace {

void require_normalized(const Frame& frame, const char* who) {
    for (int i = 0; i < frame.m; ++i)
        if (std::abs(norm2(frame.row(i)) - 1.0) > 1e-9)
            throw parse_error(std::string(who) + ": frame must be normalized (run normalize first)");
}

void require_omnidirectional(const FacetStructure& fs, const char* who) {
    for (const Facet& f : fs.facets)
        if (f.offset <= kFaceTol)
            throw infeasible_error(std::string(who) +
                                   ": frame is not omnidirectional (hint: make_omnidirectional)");
}

// Deterministic top-n selection: coefficient descending, index ascending.
struct Alg1Scratch {
    std::vector<double> coeff;
    std::vector<int> order;
};

void min_update_from_point(const Frame& frame, std::span<const double> x, Bias& alpha,
                           Alg1Scratch& scratch) {
    const int m = frame.m;
    const int n = frame.n;
    scratch.coeff.resize(static_cast<std::size_t>(m));
    scratch.order.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) scratch.coeff[static_cast<std::size_t>(i)] = dot(frame.row(i), x);
    std::iota(scratch.order.begin(), scratch.order.end(), 0);
    auto cmp = [&scratch](int a, int b) {
        double ca = scratch.coeff[static_cast<std::size_t>(a)];
        double cb = scratch.coeff[static_cast<std::size_t>(b)];
        if (ca != cb) return ca > cb;
        return a < b;
    };
    if (m > n)
        std::nth_element(scratch.order.begin(), scratch.order.begin() + (n - 1),
                         scratch.order.end(), cmp);
    for (int k = 0; k < n; ++k) {
        int i = scratch.order[static_cast<std::size_t>(k)];
        std::size_t ii = static_cast<std::size_t>(i);
        alpha[ii] = std::min(alpha[ii], scratch.coeff[ii]);
    }
}

void merge_min(Bias& into, const Bias& part) {
    for (std::size_t i = 0; i < into.size(); ++i) into[i] = std::min(into[i], part[i]);
}

// Processes samples [begin, end) of the stream into alpha (min-reduction).
void alg1_range(const Frame& frame, const DomainSpec& domain, std::uint64_t seed,
                std::size_t begin, std::size_t end, Bias& alpha, Alg1Scratch& scratch) {
    std::vector<double> x(static_cast<std::size_t>(frame.n));
    for (std::size_t j = begin; j < end; ++j) {
        sample_point_at(domain, seed, j, x);
        min_update_from_point(frame, x, alpha, scratch);
    }
}

void alg1_run(const Frame& frame, const DomainSpec& domain, std::uint64_t seed, std::size_t begin,
              std::size_t end, Bias& alpha) {
    const std::size_t count = end - begin;
    const int threads = thread_count();
    if (threads <= 1 || count < 1024) {
        Alg1Scratch scratch;
        alg1_range(frame, domain, seed, begin, end, alpha, scratch);
        return;
    }
    std::vector<Bias> partial(static_cast<std::size_t>(threads),
                              Bias(alpha.size(), kInf));
#pragma omp parallel num_threads(threads)
    {
        Alg1Scratch scratch;
#ifdef _OPENMP
        int tid = omp_get_thread_num();
#else
        int tid = 0;
#endif
        std::size_t chunk = (count + threads - 1) / static_cast<std::size_t>(threads);
        std::size_t b = begin + static_cast<std::size_t>(tid) * chunk;
        std::size_t e = std::min(end, b + chunk);
        if (b < e) alg1_range(frame, domain, seed, b, e, partial[static_cast<std::size_t>(tid)], scratch);
    }
    for (const Bias& part : partial) merge_min(alpha, part);
}

Bias initial_bias(const Frame& frame, const DomainSpec& domain, const SamplingOptions& opts) {
    if (opts.init) {
        if (opts.init->size() != static_cast<std::size_t>(frame.m))
            throw parse_error("sampling_bias_estimate: init bias length mismatch");
        return *opts.init;
    }
    // Auto-init: frame elements in the domain act as the first samples.
    Bias alpha(static_cast<std::size_t>(frame.m), kInf);
    Alg1Scratch scratch;
    for (int i = 0; i < frame.m; ++i) {
        auto phi = frame.row(i);
        if (contains(domain, phi)) min_update_from_point(frame, phi, alpha, scratch);
    }
    return alpha;
}

void check_sampling_preconditions(const Frame& frame, const DomainSpec& domain,
                                  const SamplingOptions& opts) {
    if (domain.n != frame.n)
        throw parse_error("sampling_bias_estimate: domain dimension mismatch");
    if (domain.kind == DomainKind::ball_complement)
        throw infeasible_error("sampling_bias_estimate: domain is unbounded (ball complement)");
    require_normalized(frame, "sampling_bias_estimate");
    if (!opts.assume_full_spark && !is_full_spark(frame))
        throw infeasible_error(
            "sampling_bias_estimate: frame is not full-spark (set assume_full_spark to override)");
}

}  // namespace

BiasEstimate sampling_bias_estimate(const Frame& frame, const DomainSpec& domain, std::size_t n,
                                    std::uint64_t seed, const SamplingOptions& opts) {
    check_sampling_preconditions(frame, domain, opts);
    BiasEstimate est;
    est.method = EstimateMethod::sampling;
    est.seed = seed;
    est.n_samples = n;
    est.iterations = n;
    est.domain = domain;
    est.values = initial_bias(frame, domain, opts);
    alg1_run(frame, domain, seed, 0, n, est.values);
    est.correction = n >= 2 ? covering_radius_proxy(frame.n, n, opts.correction_factor) : 0.0;
    return est;
}

BiasEstimate stopping_variant(const Frame& frame, const DomainSpec& domain, double epsilon,
                              std::size_t steps, std::uint64_t seed, std::size_t max_n,
                              const SamplingOptions& opts) {
    if (epsilon < 0.0 || steps == 0) throw parse_error("stopping_variant: epsilon >= 0, steps >= 1");
    check_sampling_preconditions(frame, domain, opts);

    Bias alpha = initial_bias(frame, domain, opts);
    std::size_t consumed = 0;
    while (consumed < max_n) {
        std::size_t block = std::min(steps, max_n - consumed);
        Bias before = alpha;
        alg1_run(frame, domain, seed, consumed, consumed + block, alpha);
        consumed += block;
        double change2 = 0.0;
        bool newly_finite = false;
        for (std::size_t i = 0; i < alpha.size(); ++i) {
            if (std::isinf(before[i])) {
                if (!std::isinf(alpha[i])) newly_finite = true;
                continue;
            }
            double d = alpha[i] - before[i];
            change2 += d * d;
        }
        double change = newly_finite ? kInf : std::sqrt(change2);
        // epsilon == 0 never stops early: the window norm is compared strictly.
        if (epsilon > 0.0 && change <= epsilon) break;
    }

    BiasEstimate est;
    est.method = EstimateMethod::sampling;
    est.seed = seed;
    est.n_samples = consumed;
    est.iterations = consumed;
    est.domain = domain;
    est.values = std::move(alpha);
    est.correction =
        consumed >= 2 ? covering_radius_proxy(frame.n, consumed, opts.correction_factor) : 0.0;
    return est;
}

namespace serial {

BiasEstimate sampling_bias_estimate(const Frame& frame, const DomainSpec& domain, std::size_t n,
                                    std::uint64_t seed, const SamplingOptions& opts) {
    check_sampling_preconditions(frame, domain, opts);
    BiasEstimate est;
    est.method = EstimateMethod::sampling;
    est.seed = seed;
    est.n_samples = n;
    est.iterations = n;
    est.domain = domain;
    est.values = initial_bias(frame, domain, opts);
    Alg1Scratch scratch;
    alg1_range(frame, domain, seed, 0, n, est.values, scratch);
    est.correction = n >= 2 ? covering_radius_proxy(frame.n, n, opts.correction_factor) : 0.0;
    return est;
}

}  // namespace serial

double constant_bias_estimate(const Frame& frame, const DomainSpec& domain, std::size_t n,
                              std::uint64_t seed, bool assume_full_spark) {
    if (domain.n != frame.n) throw parse_error("constant_bias_estimate: domain dimension mismatch");
    if (domain.kind == DomainKind::ball_complement)
        throw infeasible_error("constant_bias_estimate: domain is unbounded (ball complement)");
    require_normalized(frame, "constant_bias_estimate");
    bool full_spark = assume_full_spark || is_full_spark(frame);

    const int threads = thread_count();
    const std::size_t count = domain.kind == DomainKind::sample_cloud && n == 0
                                  ? domain.cloud->count
                                  : n;
    double result = kInf;
#pragma omp parallel num_threads(threads)
    {
        Alg1Scratch scratch;
        std::vector<double> x(static_cast<std::size_t>(frame.n));
        double local = kInf;
#ifdef _OPENMP
        int tid = omp_get_thread_num();
#else
        int tid = 0;
#endif
        std::size_t chunk = (count + static_cast<std::size_t>(threads) - 1) / threads;
        std::size_t b = static_cast<std::size_t>(tid) * chunk;
        std::size_t e = std::min(count, b + chunk);
        for (std::size_t j = b; j < e; ++j) {
            sample_point_at(domain, seed, j, x);
            double v;
            if (full_spark) {
                scratch.coeff.resize(static_cast<std::size_t>(frame.m));
                for (int i = 0; i < frame.m; ++i)
                    scratch.coeff[static_cast<std::size_t>(i)] = dot(frame.row(i), x);
                std::vector<double> tmp = scratch.coeff;
                std::nth_element(tmp.begin(), tmp.begin() + (frame.n - 1), tmp.end(),
                                 std::greater<double>());
                v = tmp[static_cast<std::size_t>(frame.n - 1)];
            } else {
                CorrelatedBasis basis = most_correlated_basis(frame, x, false);
                v = kInf;
                for (int i : basis.indices) v = std::min(v, dot(frame.row(i), x));
            }
            local = std::min(local, v);
        }
#pragma omp critical
        result = std::min(result, local);
    }
    return result;
}

namespace {

Matrix facet_rows(const Frame& frame, const IndexSet& verts) {
    Matrix s(static_cast<int>(verts.size()), frame.n);
    for (std::size_t r = 0; r < verts.size(); ++r) {
        auto row = frame.row(verts[r]);
        std::copy(row.begin(), row.end(), s.data.begin() + r * static_cast<std::size_t>(frame.n));
    }
    return s;
}

std::vector<double> boundary_values(const Frame& frame, const FacetStructure& fs) {
    std::vector<IndexSet> incidence = fs.vertex_to_facets(frame.m);
    std::vector<double> values(static_cast<std::size_t>(frame.m), kInf);
    for (int i = 0; i < frame.m; ++i) {
        if (incidence[static_cast<std::size_t>(i)].empty())
            throw numeric_error("pbe: frame element " + std::to_string(i) + " lies on no facet");
        double v = kInf;
        for (int j : incidence[static_cast<std::size_t>(i)])
            for (int l : fs.facets[static_cast<std::size_t>(j)].vertices)
                v = std::min(v, dot(frame.row(l), frame.row(i)));
        values[static_cast<std::size_t>(i)] = v;
    }
    return values;
}

struct CapSolution {
    double value = kInf;
    bool converged = false;
};

// min <D_F c, phi_i> over c >= 0, ||D_F c|| <= 1 by projected gradient with
// rescaling onto the ball constraint. The objective is linear with gradient
// g_l = <phi_l, phi_i>.
CapSolution solve_cap_program(const Matrix& facet, std::span<const double> g,
                              const PbeOptions& opts) {
    const int k = facet.rows;
    double l_const = spectral_norm(facet);
    double step = 1.0 / std::max(l_const * l_const, 1e-12);

    std::vector<double> c(static_cast<std::size_t>(k), 0.0);
    int start = 0;
    for (int i = 1; i < k; ++i)
        if (g[static_cast<std::size_t>(i)] < g[static_cast<std::size_t>(start)]) start = i;
    double vertex_norm = norm2(facet.row(start));
    c[static_cast<std::size_t>(start)] = vertex_norm > 0.0 ? 1.0 / vertex_norm : 1.0;

    auto synth_norm = [&](const std::vector<double>& cc) {
        double s2 = 0.0;
        for (int col = 0; col < facet.cols; ++col) {
            double v = 0.0;
            for (int row = 0; row < k; ++row)
                v += cc[static_cast<std::size_t>(row)] * facet.at(row, col);
            s2 += v * v;
        }
        return std::sqrt(s2);
    };

    CapSolution sol;
    double obj = dot(g, c);
    double reference = obj;
    std::size_t stable = 0;
    for (std::size_t it = 0; it < opts.solver_iterations; ++it) {
        for (int i = 0; i < k; ++i) {
            std::size_t ii = static_cast<std::size_t>(i);
            c[ii] = std::max(0.0, c[ii] - step * g[ii]);
        }
        double nd = synth_norm(c);
        if (nd > 1.0)
            for (double& v : c) v /= nd;
        obj = dot(g, c);
        if (std::abs(obj - reference) <= opts.solver_tol * std::max(1.0, std::abs(obj))) {
            if (++stable >= 10) {
                sol.converged = true;
                break;
            }
        } else {
            stable = 0;
            reference = obj;
        }
    }
    sol.value = obj;
    return sol;
}

// Dense sampling of the cap F^S: random non-negative combinations of the
// facet vertices, normalized onto the sphere. Upper bound of the cap minimum.
double sample_cap_minimum(const Matrix& facet, std::span<const double> g, std::uint64_t seed,
                          std::size_t count) {
    const int k = facet.rows;
    CounterRng rng(seed);
    std::vector<double> w(static_cast<std::size_t>(k));
    double best = kInf;
    for (std::size_t s = 0; s < count; ++s) {
        double total = 0.0;
        for (double& wi : w) {
            double u = std::max(rng.next_double(), 0x1.0p-53);
            wi = -std::log(u);
            total += wi;
        }
        double num = 0.0;
        for (int i = 0; i < k; ++i) num += w[static_cast<std::size_t>(i)] * g[static_cast<std::size_t>(i)];
        double den2 = 0.0;
        for (int col = 0; col < facet.cols; ++col) {
            double v = 0.0;
            for (int row = 0; row < k; ++row) v += w[static_cast<std::size_t>(row)] * facet.at(row, col);
            den2 += v * v;
        }
        double den = std::sqrt(den2);
        if (den > 1e-300) best = std::min(best, num / den);
    }
    return best;
}

}  // namespace

BiasEstimate pbe_boundary(const Frame& frame, const FacetStructure& fs) {
    require_normalized(frame, "pbe_boundary");
    require_omnidirectional(fs, "pbe_boundary");
    BiasEstimate est;
    est.method = EstimateMethod::pbe_boundary;
    est.values = boundary_values(frame, fs);
    return est;
}

BiasEstimate pbe_sphere(const Frame& frame, const FacetStructure& fs, const PbeOptions& opts) {
    require_normalized(frame, "pbe_sphere");
    require_omnidirectional(fs, "pbe_sphere");
    std::vector<double> base = boundary_values(frame, fs);
    std::vector<IndexSet> incidence = fs.vertex_to_facets(frame.m);

    BiasEstimate est;
    est.method = EstimateMethod::pbe_sphere;
    est.seed = opts.seed;
    est.domain = DomainSpec::sphere(frame.n);
    est.values.assign(static_cast<std::size_t>(frame.m), kInf);

    std::vector<char> flagged(static_cast<std::size_t>(frame.m), 0);
    const int threads = thread_count();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (int i = 0; i < frame.m; ++i) {
        std::size_t ii = static_cast<std::size_t>(i);
        if (base[ii] >= 0.0) {
            est.values[ii] = base[ii];
            continue;
        }
        double value = base[ii];
        for (int j : incidence[ii]) {
            const Facet& facet = fs.facets[static_cast<std::size_t>(j)];
            Matrix rows = facet_rows(frame, facet.vertices);
            std::vector<double> g(facet.vertices.size());
            for (std::size_t l = 0; l < facet.vertices.size(); ++l)
                g[l] = dot(frame.row(facet.vertices[l]), frame.row(i));
            CapSolution sol = solve_cap_program(rows, g, opts);
            std::uint64_t cap_seed = split_seed(
                opts.seed, static_cast<std::uint64_t>(i) * fs.facets.size() + static_cast<std::uint64_t>(j));
            double sampled = sample_cap_minimum(rows, g, cap_seed, opts.cross_check_samples);
            double cap_value = std::min(sol.value, sampled);
            if (!sol.converged) {
                flagged[ii] = 1;
                cap_value = std::min(cap_value, sampled - opts.solver_tol);
            }
            value = std::min(value, cap_value);
        }
        est.values[ii] = value;
    }
    for (int i = 0; i < frame.m; ++i)
        if (flagged[static_cast<std::size_t>(i)]) est.flagged.push_back(i);
    return est;
}

BiasEstimate pbe_donut(const Frame& frame, const FacetStructure& fs, double r, double s,
                       const PbeOptions& opts) {
    if (!(s >= 0.0 && s < r)) throw parse_error("pbe_donut: requires 0 <= s < r");
    BiasEstimate sphere = pbe_sphere(frame, fs, opts);
    BiasEstimate est;
    est.method = EstimateMethod::pbe_donut;
    est.seed = sphere.seed;
    est.flagged = sphere.flagged;
    est.domain = DomainSpec::donut(frame.n, r, s);
    est.values.resize(sphere.values.size());
    for (std::size_t i = 0; i < sphere.values.size(); ++i)
        est.values[i] = std::min(s, sphere.values[i]) / r;
    return est;
}

namespace {

// Projection onto the probability simplex (Euclidean), standard sort-based.
void project_simplex(std::vector<double>& v) {
    std::vector<double> u = v;
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cssv = 0.0;
    double rho_val = 0.0;
    int rho = -1;
    for (std::size_t i = 0; i < u.size(); ++i) {
        cssv += u[i];
        double t = (cssv - 1.0) / static_cast<double>(i + 1);
        if (u[i] - t > 0.0) {
            rho = static_cast<int>(i);
            rho_val = t;
        }
    }
    double theta = rho >= 0 ? rho_val : (cssv - 1.0) / static_cast<double>(u.size());
    for (double& x : v) x = std::max(0.0, x - theta);
}

// Decides whether the facet's convex hull meets the interior of the positive
// orthant: maximizes the smallest coordinate of D_F c over the simplex by
// projected subgradient ascent (multistart). A maximum of zero means the
// facet only touches the orthant boundary, which does not count.
bool facet_meets_positive_orthant(const Matrix& facet) {
    const int k = facet.rows;
    const int n = facet.cols;
    auto min_entry = [&](const std::vector<double>& c, int* argmin) {
        double best = kInf;
        for (int col = 0; col < n; ++col) {
            double v = 0.0;
            for (int row = 0; row < k; ++row) v += c[static_cast<std::size_t>(row)] * facet.at(row, col);
            if (v < best) {
                best = v;
                if (argmin != nullptr) *argmin = col;
            }
        }
        return best;
    };

    double best_overall = -kInf;
    for (int start = -1; start < k; ++start) {
        std::vector<double> c(static_cast<std::size_t>(k), 0.0);
        if (start < 0)
            std::fill(c.begin(), c.end(), 1.0 / k);
        else
            c[static_cast<std::size_t>(start)] = 1.0;
        double best = min_entry(c, nullptr);
        for (int it = 1; it <= 2000; ++it) {
            int arg = 0;
            min_entry(c, &arg);
            double step = 0.5 / std::sqrt(static_cast<double>(it));
            for (int row = 0; row < k; ++row)
                c[static_cast<std::size_t>(row)] += step * facet.at(row, arg);
            project_simplex(c);
            best = std::max(best, min_entry(c, nullptr));
        }
        best_overall = std::max(best_overall, best);
        if (best_overall > 1e-8) return true;
    }
    return best_overall > 1e-8;
}

}  // namespace

BiasEstimate pbe_nonneg_ball(const Frame& frame, const FacetStructure& fs, double r,
                             const PbeOptions& opts) {
    if (r <= 0.0) throw parse_error("pbe_nonneg_ball: radius must be positive");
    BiasEstimate sphere = pbe_sphere(frame, fs, opts);

    std::vector<char> in_plus(static_cast<std::size_t>(frame.m), 0);
    for (const Facet& facet : fs.facets) {
        Matrix rows = facet_rows(frame, facet.vertices);
        if (facet_meets_positive_orthant(rows))
            for (int v : facet.vertices) in_plus[static_cast<std::size_t>(v)] = 1;
    }

    BiasEstimate est;
    est.method = EstimateMethod::pbe_nonneg;
    est.seed = sphere.seed;
    est.flagged = sphere.flagged;
    est.domain = DomainSpec::nonneg_ball(frame.n, r);
    est.values.assign(static_cast<std::size_t>(frame.m), kInf);
    for (int i = 0; i < frame.m; ++i) {
        std::size_t ii = static_cast<std::size_t>(i);
        if (in_plus[ii]) {
            double ball = std::min(0.0, sphere.values[ii]);
            est.values[ii] = ball / r;
        } else {
            est.free_indices.push_back(i);
        }
    }
    return est;
}

BiasEstimate pbe_ball_complement(const Frame& frame, const FacetStructure& fs, double s) {
    if (s <= 0.0) throw parse_error("pbe_ball_complement: s must be positive");
    BiasEstimate boundary = pbe_boundary(frame, fs);
    for (double v : boundary.values)
        if (v < 0.0)
            throw infeasible_error(
                "pbe_ball_complement: boundary estimate has negative entries (hypothesis violated)");
    BiasEstimate est;
    est.method = EstimateMethod::pbe_complement;
    est.domain = DomainSpec::ball_complement(frame.n, s);
    est.frame_scale = s;
    est.values.resize(boundary.values.size());
    for (std::size_t i = 0; i < boundary.values.size(); ++i) est.values[i] = s * boundary.values[i];
    return est;
}

namespace {

struct WitnessPair {
    bool ok = false;
    std::vector<double> a;
    std::vector<double> b;
};

WitnessPair try_witness_at(const Frame& frame, const Bias& given, const DomainSpec& domain,
                           std::span<const double> x) {
    WitnessPair out;
    IndexSet act = active_set(frame, given, x);
    const int n = frame.n;

    std::vector<double> r(static_cast<std::size_t>(n), 0.0);
    if (act.empty()) {
        r[0] = 1.0;
    } else {
        Matrix sub(static_cast<int>(act.size()), n);
        for (std::size_t k = 0; k < act.size(); ++k) {
            auto row = frame.row(act[k]);
            std::copy(row.begin(), row.end(), sub.data.begin() + k * static_cast<std::size_t>(n));
        }
        EigenResult eig = jacobi_eigen(gram(sub));
        for (int i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] = eig.vectors.at(i, 0);
        double worst = 0.0;
        for (int i : act) worst = std::max(worst, std::abs(dot(frame.row(i), r)));
        if (worst > 1e-8) return out;  // active set numerically spans r
    }

    // Budget for epsilon from the strict inactivity slack.
    double eps = 0.1 * (1.0 + norm2(x));
    std::vector<double> coeff = analysis(frame, x);
    for (int i = 0; i < frame.m; ++i) {
        if (std::binary_search(act.begin(), act.end(), i)) continue;
        double slack = given[static_cast<std::size_t>(i)] - coeff[static_cast<std::size_t>(i)];
        double denom = std::abs(dot(frame.row(i), r));
        if (denom > 1e-14) eps = std::min(eps, 0.5 * slack / denom);
    }
    if (!(eps > 1e-12)) return out;

    const bool spherical = domain.kind == DomainKind::sphere;
    if (spherical && std::abs(dot(r, x)) > 1e-10) return out;  // rotation would leave the sphere

    for (int halving = 0; halving < 50; ++halving) {
        std::vector<double> a(x.begin(), x.end());
        std::vector<double> b(x.begin(), x.end());
        if (spherical) {
            double ct = std::cos(eps);
            double st = std::sin(eps);
            for (int i = 0; i < n; ++i) {
                std::size_t ii = static_cast<std::size_t>(i);
                a[ii] = ct * x[ii] + st * r[ii];
                b[ii] = ct * x[ii] - st * r[ii];
            }
        } else {
            for (int i = 0; i < n; ++i) {
                std::size_t ii = static_cast<std::size_t>(i);
                a[ii] += eps * r[ii];
                b[ii] -= eps * r[ii];
            }
        }
        if (contains(domain, a) && contains(domain, b)) {
            std::vector<double> za = relu_layer(frame, given, a);
            std::vector<double> zb = relu_layer(frame, given, b);
            double scale = 1.0;
            for (double v : za) scale = std::max(scale, std::abs(v));
            double diff = 0.0;
            for (std::size_t i = 0; i < za.size(); ++i) diff = std::max(diff, std::abs(za[i] - zb[i]));
            double sep = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) sep = std::max(sep, std::abs(a[i] - b[i]));
            if (diff <= 1e-10 * scale && sep > 1e-9) {
                out.ok = true;
                out.a = std::move(a);
                out.b = std::move(b);
                return out;
            }
        }
        eps *= 0.5;
        if (eps < 1e-12) break;
    }
    return out;
}

}  // namespace

Certificate certify(const Frame& frame, const Bias& given, const BiasEstimate& estimate,
                    const CertifyOptions& opts) {
    if (given.size() != estimate.values.size())
        throw parse_error("certify: bias and estimate sizes differ");

    Certificate cert;
    cert.method = estimate.method;
    cert.correction = estimate.correction;
    cert.seed = estimate.seed;
    cert.n_samples = estimate.n_samples;
    cert.domain_label = estimate.domain ? estimate.domain->label() : std::string("-");
    cert.witnesses.n = frame.n;

    cert.margin.resize(given.size());
    bool all_pass = true;
    double min_finite_margin = kInf;
    for (std::size_t i = 0; i < given.size(); ++i) {
        cert.margin[i] = estimate.values[i] - given[i];
        if (std::isinf(estimate.values[i])) continue;  // sentinel/free: always passes
        min_finite_margin = std::min(min_finite_margin, cert.margin[i]);
        if (cert.margin[i] < estimate.correction) all_pass = false;
    }

    if (all_pass) {
        cert.verdict = Verdict::injective;
        if (estimate.method == EstimateMethod::sampling && estimate.correction > 0.0 &&
            min_finite_margin < 2.0 * estimate.correction) {
            cert.verdict = Verdict::unknown;
            cert.note = "margin within the covering-radius band; increase N or lower the bias";
        }
        return cert;
    }

    cert.verdict = Verdict::unknown;
    cert.note = "given bias exceeds the estimate";
    if (!estimate.domain || !estimate.domain->bounded()) return cert;

    // Look for an actual collision pair: a domain point whose active set is
    // rank-deficient, moved along the orthogonal leftover direction.
    const DomainSpec& domain = *estimate.domain;
    SampleSequence scan;
    try {
        scan = sample(domain, opts.witness_scan_points, opts.witness_seed);
    } catch (const infeasible_error&) {
        return cert;
    }
    for (std::size_t j = 0; j < scan.points.count; ++j) {
        auto x = scan.points.point(j);
        if (in_maximal_domain(frame, given, x)) continue;
        WitnessPair pair = try_witness_at(frame, given, domain, x);
        if (pair.ok) {
            cert.verdict = Verdict::not_injective;
            cert.note = "collision pair found";
            cert.witnesses.push_back(pair.a);
            cert.witnesses.push_back(pair.b);
            return cert;
        }
    }
    return cert;
}

}  // namespace relucert
