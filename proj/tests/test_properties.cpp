#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

// Randomized property suites over seeded instances (the spec's invariant
// batch): monotonicity of the min-updates, normalization equivalence,
// perturbation soundness, scaling relations, facet half-space invariants,
// redundancy necessity, and the brute-force optimality of the most
// correlated basis.

#include <cmath>

#include "relucert/bias_estimation.hpp"
#include "relucert/errors.hpp"
#include "relucert/domain.hpp"
#include "relucert/experiments.hpp"
#include "relucert/polytope.hpp"
#include "relucert/rng.hpp"

using namespace relucert;

namespace {

Frame random_frame_raw(int m, int n, std::uint64_t seed) {
    CounterRng rng(seed);
    Frame f;
    f.m = m;
    f.n = n;
    f.data.resize(static_cast<std::size_t>(m) * n);
    for (double& v : f.data) v = rng.next_gaussian();
    for (int i = 0; i < m; ++i)
        if (norm2(f.row(i)) < 1e-9) f.data[static_cast<std::size_t>(i) * n] = 1.0;
    return f;
}

}  // namespace

TEST_CASE("min-update monotonicity over 1000 cases") {
    CounterRng rng(1);
    int cases = 0;
    while (cases < 1000) {
        int n = 2 + static_cast<int>(rng.next_double() * 3);
        int m = n + 1 + static_cast<int>(rng.next_double() * 5);
        Frame frame = random_unit_frame(m, n, 10000 + cases);
        DomainSpec ball = DomainSpec::ball(n, 1.0);
        SamplingOptions opts;
        opts.assume_full_spark = true;
        BiasEstimate a = sampling_bias_estimate(frame, ball, 50, 20000 + cases, opts);
        BiasEstimate b = sampling_bias_estimate(frame, ball, 150, 20000 + cases, opts);
        for (int i = 0; i < m; ++i)
            REQUIRE(b.values[static_cast<std::size_t>(i)] <= a.values[static_cast<std::size_t>(i)]);
        ++cases;
    }
}

TEST_CASE("normalize preserves the rectifying verdict (1000 cases)") {
    CounterRng rng(2);
    for (int c = 0; c < 1000; ++c) {
        int n = 2 + c % 3;
        int m = n + 1 + c % 4;
        Frame raw = random_frame_raw(m, n, 30000 + c);
        Bias alpha(static_cast<std::size_t>(m));
        for (double& v : alpha) v = rng.next_gaussian() * 0.3 - 0.2;
        Points pts = sample_block(DomainSpec::ball(n, 1.0), 40000 + c, 0, 20);
        Normalized unit = normalize(raw, alpha);
        bool before = is_alpha_rectifying_on_samples(raw, alpha, pts).rectifying;
        bool after = is_alpha_rectifying_on_samples(unit.frame, unit.bias, pts).rectifying;
        REQUIRE(before == after);
    }
}

TEST_CASE("perturbation soundness (1000 cases)") {
    // If Phi is alpha-rectifying on samples with sup norm M and the rows move
    // by less than eps, the perturbed frame is (alpha - eps*M)-rectifying on
    // the same samples.
    CounterRng rng(3);
    int done = 0;
    for (int c = 0; done < 1000 && c < 4000; ++c) {
        int n = 2 + c % 3;
        int m = 2 * n + c % 3;
        Frame frame = random_unit_frame(m, n, 50000 + c);
        double radius = 0.5 + rng.next_double();
        Points pts = sample_block(DomainSpec::ball(n, radius), 60000 + c, 0, 30);
        Bias alpha(static_cast<std::size_t>(m), -radius * (0.8 + 0.2 * rng.next_double()));
        if (!is_alpha_rectifying_on_samples(frame, alpha, pts).rectifying) continue;

        double eps = 0.05 * rng.next_double() + 1e-4;
        Frame moved = frame;
        for (double& v : moved.data) v += (rng.next_double() - 0.5) * eps / std::sqrt(3.0 * n);
        // verify the actual row displacement stays below eps
        double max_shift = 0.0;
        for (int i = 0; i < m; ++i) {
            double d2 = 0.0;
            for (int j = 0; j < n; ++j) {
                double d = moved.row(i)[static_cast<std::size_t>(j)] - frame.row(i)[static_cast<std::size_t>(j)];
                d2 += d * d;
            }
            max_shift = std::max(max_shift, std::sqrt(d2));
        }
        REQUIRE(max_shift < eps);
        Bias shifted = perturbed_bias(alpha, eps, radius);
        REQUIRE(is_alpha_rectifying_on_samples(moved, shifted, pts).rectifying);
        ++done;
    }
    CHECK(done == 1000);
}

TEST_CASE("scaling relation: active sets are invariant under (r x, r alpha)") {
    CounterRng rng(4);
    for (int c = 0; c < 1000; ++c) {
        int n = 2 + c % 4;
        int m = n + 2;
        Frame frame = random_unit_frame(m, n, 70000 + c);
        Points pts = sample_block(DomainSpec::sphere(n), 80000 + c, 0, 1);
        auto x = pts.point(0);
        Bias alpha(static_cast<std::size_t>(m));
        for (double& v : alpha) v = rng.next_gaussian() * 0.4;
        double r = 0.1 + 3.0 * rng.next_double();
        std::vector<double> rx(x.begin(), x.end());
        for (double& v : rx) v *= r;
        Bias ralpha = alpha;
        for (double& v : ralpha) v *= r;
        REQUIRE(active_set(frame, alpha, x) == active_set(frame, ralpha, rx));
    }
}

TEST_CASE("rectifying scaling: r K with r alpha (100 cases)") {
    for (int c = 0; c < 100; ++c) {
        int n = 2 + c % 3;
        Frame frame = random_unit_frame(3 * n, n, 90000 + c);
        FacetStructure fs;
        try {
            fs = enumerate_facets(frame);
        } catch (const infeasible_error&) {
            continue;
        }
        bool omni = true;
        for (const auto& f : fs.facets)
            if (f.offset <= kFaceTol) omni = false;
        if (!omni) continue;
        BiasEstimate est = pbe_donut(frame, fs, 1.0, 0.0);
        double r = 2.5;
        Bias scaled = est.values;
        for (double& v : scaled) v *= r;
        Points pts = sample_block(DomainSpec::ball(n, r), 95000 + c, 0, 500);
        CHECK(is_alpha_rectifying_on_samples(frame, scaled, pts).rectifying);
    }
}

TEST_CASE("monotonicity in the bias: larger alpha shrinks active sets") {
    CounterRng rng(5);
    for (int c = 0; c < 1000; ++c) {
        int n = 2 + c % 3;
        int m = 2 * n;
        Frame frame = random_unit_frame(m, n, 110000 + c);
        Points pts = sample_block(DomainSpec::ball(n, 1.0), 120000 + c, 0, 1);
        auto x = pts.point(0);
        Bias lo(static_cast<std::size_t>(m)), hi(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) {
            lo[static_cast<std::size_t>(i)] = rng.next_gaussian() * 0.3;
            hi[static_cast<std::size_t>(i)] = lo[static_cast<std::size_t>(i)] + rng.next_double() * 0.2;
        }
        IndexSet a_hi = active_set(frame, hi, x);
        IndexSet a_lo = active_set(frame, lo, x);
        REQUIRE(std::includes(a_lo.begin(), a_lo.end(), a_hi.begin(), a_hi.end()));
    }
}

TEST_CASE("facet half-space invariant on random frames (1000 facet checks)") {
    std::size_t facet_checks = 0;
    for (int c = 0; facet_checks < 1000; ++c) {
        int n = 2 + c % 3;
        int m = 2 * n + c % 5;
        Frame frame = random_unit_frame(m, n, 130000 + c);
        FacetStructure fs = enumerate_facets(frame);
        for (const auto& f : fs.facets) {
            for (int i = 0; i < frame.m; ++i) {
                double d = dot(f.normal, frame.row(i)) - f.offset;
                bool on = std::find(f.vertices.begin(), f.vertices.end(), i) != f.vertices.end();
                if (on)
                    REQUIRE(std::abs(d) <= kFaceTol);
                else
                    REQUIRE(d < kFaceTol);
            }
            ++facet_checks;
        }
    }
    CHECK(facet_checks >= 1000);
}

TEST_CASE("redundancy below two is never rectifying on large spheres") {
    // Prop-style necessity: for m < 2n there are antipodal directions whose
    // active sets cannot both span; at radius beyond the bias scale the
    // failure shows up in a modest sample.
    for (int c = 0; c < 50; ++c) {
        int n = 2 + c % 4;
        int m = 2 * n - 1;
        Frame frame = random_unit_frame(m, n, 140000 + c);
        CounterRng rng(150000 + c);
        Bias alpha(static_cast<std::size_t>(m));
        for (double& v : alpha) v = rng.next_gaussian();
        double alpha_max = 0.0;
        for (double v : alpha) alpha_max = std::max(alpha_max, std::abs(v));
        double t = 50.0 * (alpha_max + 1.0);
        Points sph = sample_block(DomainSpec::sphere(n), 160000 + c, 0, 4000);
        Points scaled = sph;
        for (double& v : scaled.data) v *= t;
        CHECK_FALSE(is_alpha_rectifying_on_samples(frame, alpha, scaled).rectifying);
    }
}

TEST_CASE("most correlated basis is brute-force optimal (instances with C(m,n) <= 200)") {
    CounterRng rng(6);
    for (int c = 0; c < 300; ++c) {
        int n = 2 + c % 3;
        int m = n + 2 + c % 3;  // C(m,n) stays small
        if (binomial_capped(m, n, 200) > 200) continue;
        Frame frame = random_unit_frame(m, n, 170000 + c);
        Points pts = sample_block(DomainSpec::sphere(n), 180000 + c, 0, 1);
        auto x = pts.point(0);
        CorrelatedBasis best = most_correlated_basis(frame, x, false);
        auto coeff = analysis(frame, x);
        double best_min = std::numeric_limits<double>::infinity();
        for (int i : best.indices) best_min = std::min(best_min, coeff[static_cast<std::size_t>(i)]);
        // enumerate every basis subset: none may beat the winner
        for_each_subset(m, n, [&](const IndexSet& idx) {
            if (!is_subframe(frame, idx)) return true;
            double mn = std::numeric_limits<double>::infinity();
            for (int i : idx) mn = std::min(mn, coeff[static_cast<std::size_t>(i)]);
            REQUIRE(mn <= best_min + 1e-12);
            return true;
        });
        // the full-spark shortcut agrees when applicable
        if (is_full_spark(frame)) {
            CorrelatedBasis fast = most_correlated_basis(frame, x, true);
            double fast_min = std::numeric_limits<double>::infinity();
            for (int i : fast.indices) fast_min = std::min(fast_min, coeff[static_cast<std::size_t>(i)]);
            REQUIRE(fast_min == doctest::Approx(best_min).epsilon(1e-12));
        }
    }
}

TEST_CASE("in_maximal_domain is the subframe test of the active set") {
    CounterRng rng(7);
    for (int c = 0; c < 500; ++c) {
        int n = 2 + c % 3;
        int m = n + c % 4;
        if (m < n) m = n;
        Frame frame = random_unit_frame(m, n, 190000 + c);
        Points pts = sample_block(DomainSpec::ball(n, 1.5), 200000 + c, 0, 2);
        Bias alpha(static_cast<std::size_t>(m));
        for (double& v : alpha) v = rng.next_gaussian() * 0.5;
        for (std::size_t k = 0; k < 2; ++k) {
            auto x = pts.point(k);
            bool direct = in_maximal_domain(frame, alpha, x);
            bool via_subframe = is_subframe(frame, active_set(frame, alpha, x));
            REQUIRE(direct == via_subframe);
        }
    }
}

TEST_CASE("covering radius never increases when samples are added") {
    Points probes = sample_block(DomainSpec::sphere(3), 8, 0, 3000);
    Points samples = sample_block(DomainSpec::sphere(3), 9, 0, 50);
    double prev = covering_radius_empirical(samples, probes);
    for (int grow = 1; grow <= 5; ++grow) {
        Points bigger = sample_block(DomainSpec::sphere(3), 9, 0, 50 + 100 * grow);
        double next = covering_radius_empirical(bigger, probes);
        CHECK(next <= prev + 1e-15);
        prev = next;
    }
}
