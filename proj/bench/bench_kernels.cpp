// Serial vs OpenMP timings for the sample-sweep kernels. Run with
// RELU_CERTIFY_THREADS to pin the parallel side.

#include <chrono>
#include <cstdio>
#include <string>

#include "relucert/bias_estimation.hpp"
#include "relucert/domain.hpp"
#include "relucert/experiments.hpp"
#include "relucert/frame.hpp"
#include "relucert/parallel.hpp"
#include "relucert/polytope.hpp"

using namespace relucert;

namespace {

template <typename F>
double time_of(F&& fn) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

void report(const std::string& name, double serial_s, double parallel_s) {
    std::printf("%-28s serial %8.3fs   parallel %8.3fs   speedup %5.2fx\n", name.c_str(),
                serial_s, parallel_s, parallel_s > 0 ? serial_s / parallel_s : 0.0);
}

}  // namespace

int main() {
    std::printf("threads: %d\n", thread_count());

    {
        Frame frame = random_unit_frame(60, 8, 7);
        DomainSpec ball = DomainSpec::ball(8, 1.0);
        SamplingOptions opts;
        opts.assume_full_spark = true;
        const std::size_t n = 400000;
        BiasEstimate a, b;
        double ts = time_of([&] { a = serial::sampling_bias_estimate(frame, ball, n, 5, opts); });
        double tp = time_of([&] { b = sampling_bias_estimate(frame, ball, n, 5, opts); });
        bool same = a.values == b.values;
        report("sampling_bias_estimate", ts, tp);
        if (!same) std::printf("  MISMATCH between serial and parallel results!\n");
    }

    {
        Frame frame = random_unit_frame(48, 6, 11);
        Bias alpha(48, -0.4);
        DomainSpec ball = DomainSpec::ball(6, 1.0);
        Points pts = sample_block(ball, 9, 0, 200000);
        RectifyReport ra, rb;
        double ts = time_of([&] { ra = serial::is_alpha_rectifying_on_samples(frame, alpha, pts); });
        double tp = time_of([&] { rb = is_alpha_rectifying_on_samples(frame, alpha, pts); });
        report("rectifying_check", ts, tp);
        if (ra.rectifying != rb.rectifying || ra.failures != rb.failures)
            std::printf("  MISMATCH between serial and parallel results!\n");
    }

    {
        DomainSpec sphere = DomainSpec::sphere(3);
        Points samples = sample_block(sphere, 21, 0, 4000);
        Points probes = sample_block(sphere, 22, 0, 40000);
        double va = 0, vb = 0;
        double ts = time_of([&] { va = serial::covering_radius_empirical(samples, probes); });
        double tp = time_of([&] { vb = covering_radius_empirical(samples, probes); });
        report("covering_radius", ts, tp);
        if (va != vb) std::printf("  MISMATCH between serial and parallel results!\n");
    }

    {
        Frame frame = random_unit_frame(40, 5, 13);
        FacetStructure fa, fb;
        double ts = time_of([&] { fa = serial::enumerate_facets(frame); });
        double tp = time_of([&] { fb = enumerate_facets(frame); });
        report("enumerate_facets", ts, tp);
        if (fa.facets.size() != fb.facets.size())
            std::printf("  MISMATCH between serial and parallel results!\n");
    }

    return 0;
}
