#include "pdfp/linop.hpp"
#include "pdfp/precond.hpp"
#include "pdfp/problems.hpp"
#include "pdfp/prox.hpp"
#include "pdfp/solver.hpp"

#include <benchmark/benchmark.h>

#include <memory>
#include <random>

namespace {

pdfp::DenseVector random_vec(std::mt19937& g, std::size_t n)
{
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    pdfp::DenseVector v(n);
    for (auto& x : v)
        x = d(g);
    return v;
}

void BM_power_iteration(benchmark::State& state)
{
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    std::mt19937 g(1);
    pdfp::DenseMatrixMap K(n, n, random_vec(g, n * n));
    for (auto _ : state)
        benchmark::DoNotOptimize(pdfp::estimate_norm(K).value);
}
BENCHMARK(BM_power_iteration)->Arg(16)->Arg(64);

void BM_soft_threshold(benchmark::State& state)
{
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    std::mt19937 g(2);
    const pdfp::DenseVector u = random_vec(g, n);
    pdfp::L1Norm f(n, 0.5);
    const pdfp::StepSize lam(0.7);
    for (auto _ : state)
        benchmark::DoNotOptimize(f.prox(lam, u));
}
BENCHMARK(BM_soft_threshold)->Arg(256)->Arg(4096);

void BM_solver_step(benchmark::State& state)
{
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    std::mt19937 g(3);
    auto K = std::make_shared<pdfp::DenseMatrixMap>(n, n, random_vec(g, n * n));
    pdfp::QuadraticDistance H(random_vec(g, n), 1.0);
    pdfp::ConjugateProx fstar(std::make_shared<pdfp::L1Norm>(n, 0.5));
    pdfp::ConjugateProx gstar(std::make_shared<pdfp::L1Norm>(n, 0.1));
    const double nk = pdfp::estimate_norm(*K).value * pdfp::kNormSafety;
    const auto rep = pdfp::validate_scalar(0.3, 0.3, 0.6 / (nk * nk), nk);

    pdfp::IterTriple z{random_vec(g, n), random_vec(g, n), {random_vec(g, n)}};
    pdfp::IterTriple z_prev = z;
    for (auto _ : state) {
        auto out = pdfp::ipdfp_step(z, z_prev, *K, H, gstar, fstar, rep.metric, 0.2, 0.8,
                                    pdfp::DualRule::as_written);
        z_prev = z;
        z = out.next;
    }
}
BENCHMARK(BM_solver_step)->Arg(32)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
