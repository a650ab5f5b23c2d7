#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "relucert/domain.hpp"
#include "relucert/errors.hpp"
#include "relucert/experiments.hpp"

using namespace relucert;

TEST_CASE("membership examples") {
    CHECK(contains(DomainSpec::ball(2, 1.0), std::vector<double>{0.6, 0.8}));
    CHECK_FALSE(contains(DomainSpec::donut(2, 1.0, 0.5), std::vector<double>{0.3, 0.0}));
    CHECK_FALSE(contains(DomainSpec::nonneg_ball(2, 1.0), std::vector<double>{0.5, -0.1}));
    CHECK(contains(DomainSpec::sphere(2), std::vector<double>{0.0, -1.0}));
    CHECK(contains(DomainSpec::ball_complement(2, 2.0), std::vector<double>{0.0, 2.5}));
    CHECK_FALSE(contains(DomainSpec::ball_complement(2, 2.0), std::vector<double>{0.0, 1.5}));
    CHECK(contains(DomainSpec::full_space(2), std::vector<double>{1e9, -1e9}));
}

TEST_CASE("invalid domain parameters") {
    CHECK_THROWS_AS(DomainSpec::ball(2, 0.0), parse_error);
    CHECK_THROWS_AS(DomainSpec::donut(2, 1.0, 1.0), parse_error);
    CHECK_THROWS_AS(DomainSpec::sample_cloud(Points{}), parse_error);
}

TEST_CASE("every generated sample passes its membership test") {
    std::vector<DomainSpec> domains{
        DomainSpec::ball(3, 2.0),
        DomainSpec::sphere(4),
        DomainSpec::donut(3, 1.5, 0.5),
        DomainSpec::nonneg_ball(3, 1.0),
        DomainSpec::polytope_boundary(icosahedron_frame()),
    };
    for (const auto& domain : domains) {
        SampleSequence seq = sample(domain, 2000, 77);
        for (std::size_t i = 0; i < seq.points.count; ++i)
            REQUIRE(contains(domain, seq.points.point(i), 1e-9));
    }
}

TEST_CASE("sphere samples are unit within 1e-12") {
    SampleSequence seq = sample(DomainSpec::sphere(5), 5000, 3);
    for (std::size_t i = 0; i < seq.points.count; ++i)
        CHECK(std::abs(norm2(seq.points.point(i)) - 1.0) <= 1e-12);
}

TEST_CASE("seed repeatability is bitwise") {
    DomainSpec donut = DomainSpec::donut(4, 1.0, 0.3);
    SampleSequence a = sample(donut, 512, 12345);
    SampleSequence b = sample(donut, 512, 12345);
    CHECK(a.points.data == b.points.data);
    CHECK(a.generator_id == std::string(kGeneratorId));
    SampleSequence c = sample(donut, 512, 12346);
    CHECK(a.points.data != c.points.data);
}

TEST_CASE("ball radial moment matches the uniform law") {
    // E[||x||^n] = r^n / 2 for the uniform ball in R^n.
    for (int n : {2, 3, 5}) {
        double r = 1.3;
        DomainSpec ball = DomainSpec::ball(n, r);
        Points pts = sample_block(ball, 9, 0, 100000);
        double acc = 0.0;
        for (std::size_t i = 0; i < pts.count; ++i)
            acc += std::pow(norm2(pts.point(i)), n);
        acc /= static_cast<double>(pts.count);
        CHECK(acc == doctest::Approx(std::pow(r, n) / 2.0).epsilon(0.02));
    }
}

TEST_CASE("donut radial law") {
    // P(||x|| <= t) = (t^n - s^n) / (r^n - s^n)
    int n = 3;
    double r = 1.0, s = 0.4;
    Points pts = sample_block(DomainSpec::donut(n, r, s), 11, 0, 100000);
    double t = 0.7;
    std::size_t below = 0;
    for (std::size_t i = 0; i < pts.count; ++i)
        if (norm2(pts.point(i)) <= t) ++below;
    double expect = (std::pow(t, n) - std::pow(s, n)) / (std::pow(r, n) - std::pow(s, n));
    CHECK(static_cast<double>(below) / pts.count == doctest::Approx(expect).epsilon(0.02));
}

TEST_CASE("sphere isotropy") {
    Points pts = sample_block(DomainSpec::sphere(3), 13, 0, 1000000);
    double mean[3] = {0, 0, 0};
    for (std::size_t i = 0; i < pts.count; ++i) {
        auto p = pts.point(i);
        for (int j = 0; j < 3; ++j) mean[j] += p[j];
    }
    for (int j = 0; j < 3; ++j) CHECK(std::abs(mean[j] / pts.count) < 5e-3);
}

TEST_CASE("covering radius proxy") {
    CHECK(covering_radius_proxy(2, 10000) == doctest::Approx(1.5174e-3).epsilon(1e-3));
    CHECK(covering_radius_proxy(5, 1000, 0.0) == 0.0);
    double v = covering_radius_proxy(30, 500000);
    CHECK(v > 0.02);
    CHECK(v < 0.04);
    CHECK_THROWS_AS(covering_radius_proxy(2, 1), parse_error);
}

TEST_CASE("covering radius empirical") {
    DomainSpec circle = DomainSpec::sphere(2);
    Points probes = sample_block(circle, 3, 0, 20000);

    // samples == probes -> 0
    CHECK(covering_radius_empirical(probes, probes) == 0.0);

    // two antipodal samples on the circle: farthest points are (0, +-1)
    Points two;
    two.n = 2;
    two.push_back(std::vector<double>{1.0, 0.0});
    two.push_back(std::vector<double>{-1.0, 0.0});
    CHECK(covering_radius_empirical(two, probes) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-3));

    // adding samples never increases the value
    Points three = two;
    three.push_back(std::vector<double>{0.0, 1.0});
    CHECK(covering_radius_empirical(three, probes) <= covering_radius_empirical(two, probes));
}

TEST_CASE("covering radius follows the (log N / N)^(1/n) rate") {
    for (int n : {2, 3}) {
        DomainSpec sphere = DomainSpec::sphere(n);
        Points probes = sample_block(sphere, 1, 0, 20000);
        std::vector<double> log_n, log_rho;
        for (std::size_t count : {250ul, 1000ul, 4000ul, 16000ul}) {
            Points samples = sample_block(sphere, 2, 0, count);
            double rho = covering_radius_empirical(samples, probes);
            log_n.push_back(std::log(static_cast<double>(count)));
            log_rho.push_back(std::log(rho));
        }
        // least-squares slope of log rho vs log N
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < log_n.size(); ++i) {
            mx += log_n[i];
            my += log_rho[i];
        }
        mx /= log_n.size();
        my /= log_n.size();
        double sxy = 0, sxx = 0;
        for (std::size_t i = 0; i < log_n.size(); ++i) {
            sxy += (log_n[i] - mx) * (log_rho[i] - my);
            sxx += (log_n[i] - mx) * (log_n[i] - mx);
        }
        double slope = sxy / sxx;
        double target = -1.0 / n;
        CHECK(slope == doctest::Approx(target).epsilon(0.30));
    }
}

TEST_CASE("unbounded domains refuse to sample") {
    CHECK_THROWS_AS(sample(DomainSpec::ball_complement(3, 1.0), 10, 1), infeasible_error);
    // full space samples standard normal points
    Points pts = sample_block(DomainSpec::full_space(4), 5, 0, 50000);
    double m2 = 0.0;
    for (std::size_t i = 0; i < pts.count; ++i) m2 += dot(pts.point(i), pts.point(i));
    CHECK(m2 / pts.count == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("sample cloud draws cloud points") {
    Points cloud;
    cloud.n = 2;
    cloud.push_back(std::vector<double>{1.0, 2.0});
    cloud.push_back(std::vector<double>{-1.0, 0.5});
    DomainSpec dom = DomainSpec::sample_cloud(cloud);
    SampleSequence seq = sample(dom, 100, 4);
    for (std::size_t i = 0; i < seq.points.count; ++i) {
        auto p = seq.points.point(i);
        bool match = (p[0] == 1.0 && p[1] == 2.0) || (p[0] == -1.0 && p[1] == 0.5);
        CHECK(match);
    }
    CHECK(dom.sup_norm() == doctest::Approx(std::sqrt(5.0)));
}

TEST_CASE("sup norm") {
    CHECK(DomainSpec::ball(3, 2.5).sup_norm() == 2.5);
    CHECK(DomainSpec::sphere(3).sup_norm() == 1.0);
    CHECK(DomainSpec::donut(2, 0.9, 0.1).sup_norm() == 0.9);
    CHECK_THROWS_AS(DomainSpec::full_space(2).sup_norm(), infeasible_error);
}
