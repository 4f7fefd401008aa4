// Times the OpenMP likelihood kernels against the plain serial reference.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sicreg/likelihood.hpp"
#include "sicreg/rng.hpp"
#include "sicreg/solver.hpp"

using namespace sicreg;

namespace {

Dataset make_data(long n, int p, Rng& rng) {
    Eigen::MatrixXd raw(n, p);
    for (long i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) raw(i, j) = rng.normal();
    Eigen::VectorXd y(n);
    for (long i = 0; i < n; ++i)
        y[i] = 1.0 + raw(i, 0) + std::sqrt(std::exp(0.5 * raw(i, 1))) * rng.normal();
    return ingest(raw, y, true);
}

template <typename F>
double time_best_of(int iters, F&& f) {
    double best = 1e300;
    for (int k = 0; k < iters; ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        const double s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (s < best) best = s;
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    long n = 200000;
    int p = 12;
    int iters = 5;
    for (int a = 1; a + 1 < argc; a += 2) {
        const std::string flag = argv[a];
        if (flag == "--n")
            n = std::atol(argv[a + 1]);
        else if (flag == "--p")
            p = std::atoi(argv[a + 1]);
        else if (flag == "--iters")
            iters = std::atoi(argv[a + 1]);
        else {
            std::fprintf(stderr, "usage: bench_kernels [--n N] [--p P] [--iters K]\n");
            return 2;
        }
    }

    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    std::printf("n=%ld p=%d threads=%d (best of %d)\n", n, p, threads, iters);

    Rng rng(42);
    const Dataset data = make_data(n, p, rng);
    ParamVector theta = initialize(data);

    volatile double sink = 0.0;
    struct Row {
        const char* name;
        double serial;
        double parallel;
    };
    Row rows[3];

    rows[0] = {"log_likelihood",
               time_best_of(iters, [&] { sink = reference::log_likelihood(theta, data); }),
               time_best_of(iters, [&] { sink = log_likelihood(theta, data); })};
    rows[1] = {"score", time_best_of(iters, [&] { sink = reference::score(theta, data).first[0]; }),
               time_best_of(iters, [&] { sink = score(theta, data).first[0]; })};
    rows[2] = {"observed_information",
               time_best_of(iters, [&] { sink = reference::observed_information(theta, data)(0, 0); }),
               time_best_of(iters, [&] { sink = observed_information(theta, data)(0, 0); })};

    std::printf("%-22s %12s %12s %9s\n", "kernel", "serial (s)", "parallel (s)", "speedup");
    for (const Row& r : rows)
        std::printf("%-22s %12.6f %12.6f %8.2fx\n", r.name, r.serial, r.parallel,
                    r.serial / r.parallel);

    const auto schedule = make_schedule(10.0, 1e-5, 100);
    const SolverConfig cfg;
    const double fit_s = time_best_of(1, [&] { sink = telescope_fit(data, schedule, cfg).per_step.back().sic_value; });
    std::printf("%-22s %25.6f s\n", "telescope_fit", fit_s);
    (void)sink;
    return 0;
}
