#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>

#include "relucert/experiments.hpp"
#include "relucert/polytope.hpp"

using namespace relucert;

namespace {

std::size_t iterations_to(const EvolutionResult& r, double level) {
    for (std::size_t c = 0; c < r.iterations.size(); ++c) {
        double mean = 0.0;
        for (const auto& t : r.trial_fractions) mean += t[c];
        mean /= static_cast<double>(r.trial_fractions.size());
        if (mean >= level) return r.iterations[c];
    }
    return static_cast<std::size_t>(-1);
}

}  // namespace

TEST_CASE("maxbias run: distances non-increasing, oracle exact and instant") {
    auto t0 = std::chrono::steady_clock::now();
    Frame tet = tetrahedron_frame();
    BiasEstimate oracle = pbe_sphere(tet, enumerate_facets(tet));
    auto t1 = std::chrono::steady_clock::now();
    // The PBE side is effectively instant compared to the sampling side.
    CHECK(std::chrono::duration<double>(t1 - t0).count() < 1.0);
    for (double v : oracle.values)
        CHECK(v == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-9));

    MaxbiasConfig cfg;
    cfg.iterations = 20000;
    MaxbiasResult res = experiment_maxbias(cfg);
    REQUIRE(res.distances.size() == cfg.iterations);
    for (std::size_t k = 1; k < res.distances.size(); ++k)
        CHECK(res.distances[k] <= res.distances[k - 1] + 1e-15);
    // Sampling still carries a visible gap after 2e4 iterations, in contrast
    // to the exact PBE value above.
    CHECK(res.distances.back() > 1e-4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(res.oracle[i] == oracle.values[i]);

    std::string csv = maxbias_csv(res);
    CHECK(csv.rfind("k,distance\n", 0) == 0);
}

TEST_CASE("evolution: zero fraction at k = 0 and monotone trials") {
    EvolutionConfig cfg;
    cfg.n = 3;
    cfg.q = 2.0;
    cfg.trials = 5;
    cfg.max_iterations = 2000;
    cfg.test_points = 300;
    cfg.seed = 4;
    EvolutionResult res = experiment_evolution(cfg);
    REQUIRE(res.iterations.front() == 0);
    for (const auto& trial : res.trial_fractions) {
        CHECK(trial.front() == 0.0);  // +inf init: nothing certified yet
        for (std::size_t c = 1; c < trial.size(); ++c) CHECK(trial[c] >= trial[c - 1]);
    }
    std::string csv = evolution_csv(res);
    CHECK(csv.rfind("iteration,fraction_injective,mean,variance\n", 0) == 0);
}

TEST_CASE("evolution: low dimension certifies faster at equal redundancy") {
    std::size_t to_level[2];
    int idx = 0;
    for (int n : {3, 12}) {
        EvolutionConfig cfg;
        cfg.n = n;
        cfg.q = 2.0;
        cfg.trials = 5;
        cfg.max_iterations = 30000;
        cfg.test_points = 500;
        cfg.seed = 21;
        to_level[idx++] = iterations_to(experiment_evolution(cfg), 0.9);
    }
    CHECK(to_level[0] < to_level[1]);
}

TEST_CASE("transition cells and crossing helper") {
    TransitionConfig cfg;
    cfg.n_values = {4};
    cfg.m_step = 4;
    cfg.q_max = 10.0;
    cfg.n_samples = 20000;
    cfg.trials = 2;
    cfg.seed = 6;
    auto cells = experiment_transition(cfg);
    REQUIRE_FALSE(cells.empty());
    // low redundancy fails, high redundancy passes
    for (const auto& c : cells) {
        double q = static_cast<double>(c.m) / c.n;
        if (q <= 2.0) CHECK(c.pass_fraction <= 0.05);
        if (q >= 9.0) CHECK(c.pass_fraction >= 0.95);
    }
    double q_star = transition_crossing(cells, 0.0, 4);
    CHECK(std::isfinite(q_star));
    CHECK(q_star > 1.0);
    CHECK(q_star < 9.0);
    std::string csv = transition_csv(cells);
    CHECK(csv.rfind("sigma2,n,m,q,pass_fraction\n", 0) == 0);
}

TEST_CASE("builtin frames") {
    CHECK(builtin_frame("triangle").m == 3);
    CHECK(builtin_frame("icosahedron").m == 12);
    CHECK(builtin_frame("basis5").m == 5);
    CHECK_THROWS(builtin_frame("dodecahedron"));
    // all builtins are unit-norm
    for (const char* name : {"triangle", "square", "tetrahedron", "octahedron", "icosahedron"}) {
        Frame f = builtin_frame(name);
        for (int i = 0; i < f.m; ++i) CHECK(norm2(f.row(i)) == doctest::Approx(1.0).epsilon(1e-12));
    }
}
