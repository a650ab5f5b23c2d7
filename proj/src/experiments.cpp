#include "relucert/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "relucert/domain.hpp"
#include "relucert/errors.hpp"
#include "relucert/parallel.hpp"
#include "relucert/polytope.hpp"
#include "relucert/rng.hpp"

namespace relucert {

Frame triangle_frame() {
    double s3 = std::sqrt(3.0) / 2.0;
    return Frame::from_rows({{0.0, 1.0}, {-s3, -0.5}, {s3, -0.5}});
}

Frame square_frame() {
    return Frame::from_rows({{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}});
}

Frame tetrahedron_frame() {
    double c = 1.0 / std::sqrt(3.0);
    return Frame::from_rows(
        {{c, c, c}, {c, -c, -c}, {-c, c, -c}, {-c, -c, c}});
}

Frame octahedron_frame() {
    return Frame::from_rows({{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}});
}

Frame icosahedron_frame() {
    double g = (1.0 + std::sqrt(5.0)) / 2.0;
    double nrm = std::sqrt(1.0 + g * g);
    double a = 1.0 / nrm;
    double b = g / nrm;
    return Frame::from_rows({{0, a, b}, {0, a, -b}, {0, -a, b}, {0, -a, -b},
                             {a, b, 0}, {a, -b, 0}, {-a, b, 0}, {-a, -b, 0},
                             {b, 0, a}, {-b, 0, a}, {b, 0, -a}, {-b, 0, -a}});
}

Frame standard_basis(int n) {
    Frame f;
    f.m = n;
    f.n = n;
    f.data.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) f.data[static_cast<std::size_t>(i) * n + i] = 1.0;
    return f;
}

Frame builtin_frame(const std::string& name) {
    if (name == "triangle") return triangle_frame();
    if (name == "square") return square_frame();
    if (name == "tetrahedron") return tetrahedron_frame();
    if (name == "octahedron") return octahedron_frame();
    if (name == "icosahedron") return icosahedron_frame();
    if (name.rfind("basis", 0) == 0 && name.size() > 5)
        return standard_basis(std::stoi(name.substr(5)));
    throw parse_error("unknown builtin frame '" + name + "'");
}

Frame random_unit_frame(int m, int n, std::uint64_t seed) {
    CounterRng rng(seed);
    Frame f;
    f.m = m;
    f.n = n;
    f.data.resize(static_cast<std::size_t>(m) * n);
    for (int i = 0; i < m; ++i) {
        double nrm = 0.0;
        while (nrm < 1e-12) {
            for (int j = 0; j < n; ++j)
                f.data[static_cast<std::size_t>(i) * n + j] = rng.next_gaussian();
            nrm = norm2(f.row(i));
        }
        for (int j = 0; j < n; ++j) f.data[static_cast<std::size_t>(i) * n + j] /= nrm;
    }
    return f;
}

namespace {

std::vector<std::size_t> checkpoint_grid(std::size_t max_iterations, std::size_t count) {
    std::vector<std::size_t> grid{0};
    if (max_iterations == 0 || count < 2) return grid;
    double lo = 0.0;
    double hi = std::log10(static_cast<double>(max_iterations));
    for (std::size_t i = 0; i + 1 < count; ++i) {
        double t = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 2 == 0 ? 1 : count - 2);
        auto k = static_cast<std::size_t>(std::llround(std::pow(10.0, t)));
        k = std::min(k, max_iterations);
        if (k > grid.back()) grid.push_back(k);
    }
    if (grid.back() != max_iterations) grid.push_back(max_iterations);
    return grid;
}

// One evolution trial: returns the fraction of test points inside the
// maximal domain at every checkpoint.
std::vector<double> evolution_trial(const EvolutionConfig& config,
                                    const std::vector<std::size_t>& grid, std::uint64_t seed) {
    int n = config.n;
    int m = std::max(n, static_cast<int>(std::lround(config.q * n)));

    // Frame: i.i.d. uniform on the ball, then normalized.
    DomainSpec ball = DomainSpec::ball(n, 1.0);
    Points rows = sample_block(ball, split_seed(seed, 1), 0, static_cast<std::size_t>(m));
    Frame raw;
    raw.m = m;
    raw.n = n;
    raw.data = rows.data;
    Frame frame = normalize(raw, Bias(static_cast<std::size_t>(m), 0.0)).frame;

    Points test = sample_block(ball, split_seed(seed, 2), 0, config.test_points);

    std::uint64_t stream_seed = split_seed(seed, 3);
    Bias alpha(static_cast<std::size_t>(m), std::numeric_limits<double>::infinity());

    std::vector<double> coeff(static_cast<std::size_t>(m));
    std::vector<int> order(static_cast<std::size_t>(m));
    std::vector<double> x(static_cast<std::size_t>(n));

    std::vector<double> fractions;
    fractions.reserve(grid.size());
    std::size_t consumed = 0;
    for (std::size_t target : grid) {
        for (; consumed < target; ++consumed) {
            sample_point_at(ball, stream_seed, consumed, x);
            for (int i = 0; i < m; ++i) coeff[static_cast<std::size_t>(i)] = dot(frame.row(i), x);
            std::iota(order.begin(), order.end(), 0);
            std::nth_element(order.begin(), order.begin() + (n - 1), order.end(),
                             [&coeff](int a, int b) {
                                 double ca = coeff[static_cast<std::size_t>(a)];
                                 double cb = coeff[static_cast<std::size_t>(b)];
                                 if (ca != cb) return ca > cb;
                                 return a < b;
                             });
            for (int k = 0; k < n; ++k) {
                std::size_t i = static_cast<std::size_t>(order[static_cast<std::size_t>(k)]);
                alpha[i] = std::min(alpha[i], coeff[i]);
            }
        }
        std::size_t inside = 0;
        for (std::size_t t = 0; t < test.count; ++t)
            if (in_maximal_domain(frame, alpha, test.point(t))) ++inside;
        fractions.push_back(static_cast<double>(inside) / static_cast<double>(test.count));
    }
    return fractions;
}

}  // namespace

EvolutionResult experiment_evolution(const EvolutionConfig& config) {
    EvolutionResult result;
    result.iterations = checkpoint_grid(config.max_iterations, config.checkpoints);
    result.trial_fractions.assign(config.trials, {});
    const int threads = thread_count();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (long long t = 0; t < static_cast<long long>(config.trials); ++t) {
        result.trial_fractions[static_cast<std::size_t>(t)] =
            evolution_trial(config, result.iterations,
                            split_seed(config.seed, static_cast<std::uint64_t>(t)));
    }
    return result;
}

std::string evolution_csv(const EvolutionResult& result) {
    std::ostringstream os;
    os << "iteration,fraction_injective,mean,variance\n";
    std::size_t trials = result.trial_fractions.size();
    for (std::size_t c = 0; c < result.iterations.size(); ++c) {
        double mean = 0.0;
        double full = 0.0;
        for (std::size_t t = 0; t < trials; ++t) {
            double f = result.trial_fractions[t][c];
            mean += f;
            if (f >= 1.0) full += 1.0;
        }
        mean /= static_cast<double>(trials);
        full /= static_cast<double>(trials);
        double var = 0.0;
        for (std::size_t t = 0; t < trials; ++t) {
            double d = result.trial_fractions[t][c] - mean;
            var += d * d;
        }
        var /= static_cast<double>(trials);
        os << result.iterations[c] << "," << full << "," << mean << "," << var << "\n";
    }
    return os.str();
}

namespace {

double transition_cell_trial(int n, int m, double sigma2, std::size_t n_samples,
                             double correction_factor, std::uint64_t seed) {
    // Frame and samples i.i.d. standard normal; frame rows normalized and the
    // Gaussian bias rescaled by the same norms (rectifying is invariant).
    CounterRng frame_rng(split_seed(seed, 11));
    Frame raw;
    raw.m = m;
    raw.n = n;
    raw.data.resize(static_cast<std::size_t>(m) * n);
    for (double& v : raw.data) v = frame_rng.next_gaussian();
    for (int i = 0; i < m; ++i)
        if (norm2(raw.row(i)) < 1e-12) raw.data[static_cast<std::size_t>(i) * n] = 1.0;
    Normalized unit = normalize(raw, Bias(static_cast<std::size_t>(m), 0.0));

    DomainSpec gauss = DomainSpec::full_space(n);
    SamplingOptions opts;
    opts.assume_full_spark = true;  // Gaussian frames are full-spark a.s.
    opts.correction_factor = correction_factor;
    opts.init = Bias(static_cast<std::size_t>(m), std::numeric_limits<double>::infinity());
    BiasEstimate est = sampling_bias_estimate(unit.frame, gauss, n_samples, split_seed(seed, 13), opts);

    CounterRng bias_rng(split_seed(seed, 17));
    std::size_t pass = 0;
    for (int i = 0; i < m; ++i) {
        double given = sigma2 > 0.0 ? std::sqrt(sigma2) * bias_rng.next_gaussian() : 0.0;
        double given_unit = given / unit.norms[static_cast<std::size_t>(i)];
        if (given_unit <= est.values[static_cast<std::size_t>(i)] - est.correction) ++pass;
    }
    return static_cast<double>(pass) / static_cast<double>(m);
}

}  // namespace

std::vector<TransitionCell> experiment_transition(const TransitionConfig& config) {
    struct Job {
        double sigma2;
        int n;
        int m;
    };
    std::vector<Job> jobs;
    for (double s2 : config.sigma2) {
        for (int n : config.n_values) {
            int step = config.m_step > 0 ? config.m_step : std::max(1, n / 2);
            int m_max = static_cast<int>(std::lround(config.q_max * n));
            if (config.m_max_abs > 0) m_max = std::min(m_max, config.m_max_abs);
            for (int m = n; m <= m_max; m += step) jobs.push_back({s2, n, m});
        }
    }

    std::vector<TransitionCell> cells(jobs.size());
    const int threads = thread_count();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (long long j = 0; j < static_cast<long long>(jobs.size()); ++j) {
        const Job& job = jobs[static_cast<std::size_t>(j)];
        double acc = 0.0;
        for (std::size_t t = 0; t < config.trials; ++t) {
            std::uint64_t cell_seed =
                split_seed(config.seed, (static_cast<std::uint64_t>(job.n) << 40) ^
                                            (static_cast<std::uint64_t>(job.m) << 20) ^
                                            (static_cast<std::uint64_t>(job.sigma2 * 1000.0) << 8) ^
                                            static_cast<std::uint64_t>(t));
            acc += transition_cell_trial(job.n, job.m, job.sigma2, config.n_samples,
                                         config.correction_factor, cell_seed);
        }
        cells[static_cast<std::size_t>(j)] =
            TransitionCell{job.sigma2, job.n, job.m, acc / static_cast<double>(config.trials)};
    }
    return cells;
}

std::string transition_csv(const std::vector<TransitionCell>& cells) {
    std::ostringstream os;
    os << "sigma2,n,m,q,pass_fraction\n";
    for (const TransitionCell& c : cells)
        os << c.sigma2 << "," << c.n << "," << c.m << ","
           << static_cast<double>(c.m) / c.n << "," << c.pass_fraction << "\n";
    return os.str();
}

double transition_crossing(const std::vector<TransitionCell>& cells, double sigma2, int n) {
    std::vector<const TransitionCell*> slice;
    for (const auto& c : cells)
        if (c.n == n && c.sigma2 == sigma2) slice.push_back(&c);
    std::sort(slice.begin(), slice.end(),
              [](const TransitionCell* a, const TransitionCell* b) { return a->m < b->m; });
    for (std::size_t i = 1; i < slice.size(); ++i) {
        double f0 = slice[i - 1]->pass_fraction;
        double f1 = slice[i]->pass_fraction;
        if (f0 < 0.5 && f1 >= 0.5) {
            double m0 = slice[i - 1]->m;
            double m1 = slice[i]->m;
            double t = (0.5 - f0) / (f1 - f0);
            return (m0 + t * (m1 - m0)) / n;
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

MaxbiasResult experiment_maxbias(const MaxbiasConfig& config) {
    Frame tetra = tetrahedron_frame();
    FacetStructure fs = enumerate_facets(tetra);
    MaxbiasResult result;
    result.oracle = pbe_sphere(tetra, fs).values;

    DomainSpec sphere = DomainSpec::sphere(3);
    SamplingOptions opts;
    opts.assume_full_spark = true;

    // Auto-init with the frame elements, then stream one sample at a time,
    // logging the distance to the oracle after every update.
    Bias alpha(4, std::numeric_limits<double>::infinity());
    std::vector<double> coeff(4);
    std::vector<int> order(4);
    std::vector<double> x(3);
    auto update = [&](std::span<const double> pt) {
        for (int i = 0; i < 4; ++i) coeff[static_cast<std::size_t>(i)] = dot(tetra.row(i), pt);
        std::iota(order.begin(), order.end(), 0);
        std::nth_element(order.begin(), order.begin() + 2, order.end(), [&](int a, int b) {
            double ca = coeff[static_cast<std::size_t>(a)];
            double cb = coeff[static_cast<std::size_t>(b)];
            if (ca != cb) return ca > cb;
            return a < b;
        });
        for (int k = 0; k < 3; ++k) {
            std::size_t i = static_cast<std::size_t>(order[static_cast<std::size_t>(k)]);
            alpha[i] = std::min(alpha[i], coeff[i]);
        }
    };
    for (int i = 0; i < 4; ++i) update(tetra.row(i));

    result.distances.reserve(config.iterations);
    for (std::size_t k = 0; k < config.iterations; ++k) {
        sample_point_at(sphere, config.seed, k, x);
        update(x);
        double d2 = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
            double d = alpha[i] - result.oracle[i];
            d2 += d * d;
        }
        result.distances.push_back(std::sqrt(d2));
    }
    return result;
}

std::string maxbias_csv(const MaxbiasResult& result) {
    std::ostringstream os;
    os << "k,distance\n";
    for (std::size_t k = 0; k < result.distances.size(); ++k)
        os << (k + 1) << "," << result.distances[k] << "\n";
    return os.str();
}

}  // namespace relucert
