#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "pdfp/oracle.hpp"
#include "pdfp/precond.hpp"
#include "pdfp/solver.hpp"

#include <cmath>
#include <memory>

using namespace pdfp;
using testutil::random_vec;

TEST_CASE("rho_upper_bound hand values")
{
    CHECK(rho_upper_bound(0.0, 0.01, 1.0) == doctest::Approx(1.0 / 1.01).epsilon(1e-15));
    CHECK(rho_upper_bound(0.0, 0.01, 1e-6) == doctest::Approx(1.0 / 1.01).epsilon(1e-15));

    const double b = rho_upper_bound(0.1, 0.01, 0.05);
    CHECK(b == doctest::Approx(0.0375 / 0.05625).epsilon(1e-15));
    CHECK(std::abs(b - 0.6667) < 5e-5);

    CHECK(rho_upper_bound(0.2, 0.01, 0.2) < rho_upper_bound(0.1, 0.01, 0.2));

    // delta_hat below its admissible floor is rejected with the floor reported
    try {
        rho_upper_bound(0.3, 0.01, 0.01);
        FAIL("expected throw");
    } catch (const std::invalid_argument& e) {
        const double lb = delta_hat_lower_bound(0.3, 0.01);
        CHECK(std::string(e.what()).find(std::to_string(lb).substr(0, 6)) != std::string::npos);
    }
    CHECK_THROWS_AS(rho_upper_bound(1.0, 0.01, 1.0), std::invalid_argument);
}

TEST_CASE("suggest_schedule")
{
    const auto s0 = suggest_schedule(0.0, 0.01);
    CHECK(s0.delta_hat == 1e-6);
    CHECK(s0.rho == doctest::Approx(0.99 / 1.01).epsilon(1e-15));
    CHECK_NOTHROW(s0.check());

    const auto s1 = suggest_schedule(0.1, 0.01);
    CHECK(s1.delta_hat == doctest::Approx(2.0 * 0.012 / 0.99).epsilon(1e-12));
    CHECK(s1.rho == doctest::Approx(0.99 * rho_upper_bound(0.1, 0.01, s1.delta_hat)).epsilon(1e-15));
    CHECK_NOTHROW(s1.check());

    for (double a : {0.0, 0.05, 0.3, 0.6, 0.9})
        CHECK_NOTHROW(suggest_schedule(a).check());

    CHECK_THROWS_AS(suggest_schedule(1.0), std::invalid_argument);

    InertialSchedule bad = s1;
    bad.rho = 1.5;
    CHECK_THROWS_AS(bad.check(), std::invalid_argument);
}

TEST_CASE("alpha sequence starts at zero")
{
    InertialSchedule s = suggest_schedule(0.3);
    CHECK(s.alpha_at(1) == 0.0);
    CHECK(s.alpha_at(2) == 0.3);
    CHECK(s.alpha_at(100) == 0.3);
}

TEST_CASE("ipdfp_step one-dimensional quadratic smoke test")
{
    const auto rep = validate_scalar(0.3, 0.3, 0.3, 1.0);
    REQUIRE(rep.accepted);
    IdentityMap K(1);
    QuadraticDistance H({0.0}, 1.0);
    ConjugateProx gstar(std::make_shared<ZeroFunction>(1));
    ConjugateProx fstar(std::make_shared<ZeroFunction>(1));

    IterTriple z{{1.0}, {0.0}, {{0.0}}};
    const auto out = ipdfp_step(z, z, K, H, gstar, fstar, rep.metric, 0.0, 1.0, DualRule::condat);
    CHECK(out.next.x[0] == doctest::Approx(1.0 / 1.3).epsilon(1e-15));
    CHECK(out.next.y[0] == 0.0);
    CHECK(out.next.v[0][0] == 0.0);
}

TEST_CASE("ipdfp_step preserves fixed points")
{
    // min H(x) = 1/2||x-b||^2 with F = 0, G = 0: the solution triple is
    // (b, 0, 0) and must be exactly stationary for any admissible step
    const DenseVector b{0.7, -1.1, 0.2};
    const auto rep = validate_scalar(0.4, 0.3, 0.5, 1.0);
    REQUIRE(rep.accepted);
    IdentityMap K(3);
    QuadraticDistance H(b, 1.0);
    ConjugateProx gstar(std::make_shared<ZeroFunction>(3));
    ConjugateProx fstar(std::make_shared<ZeroFunction>(3));

    IterTriple z{b, zeros(3), {zeros(3)}};
    for (DualRule rule : {DualRule::as_written, DualRule::condat}) {
        const auto out = ipdfp_step(z, z, K, H, gstar, fstar, rep.metric, 0.3, 0.7, rule);
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(out.next.x[i] == doctest::Approx(b[i]).epsilon(1e-15));
            CHECK(out.next.y[i] == 0.0);
            CHECK(out.next.v[0][i] == 0.0);
        }
    }
}

TEST_CASE("sipdfp with one block equals ipdfp with H = 0")
{
    auto g = testutil::rng(51);
    const std::size_t n = 4;
    auto K1 = std::make_shared<DenseMatrixMap>(3, n, testutil::random_dense(g, 3, n));
    auto F1 = std::make_shared<L1Norm>(3, 0.7);
    auto G = std::make_shared<L1Norm>(n, 0.2);

    const double nk = estimate_norm(*K1).value * kNormSafety;
    const auto rep = validate_scalar(0.3, 0.3, 0.4 / (nk * nk), nk);
    REQUIRE(rep.accepted);

    ConjugateProx gstar(G);
    auto fstar = std::make_shared<ConjugateProx>(F1);
    ZeroFunction H(n);

    IterTriple zs{random_vec(g, n), random_vec(g, n), {random_vec(g, 3)}};
    IterTriple zi = zs;
    IterTriple zs_prev = zs, zi_prev = zi;

    for (int k = 0; k < 50; ++k) {
        const double alpha = k == 0 ? 0.0 : 0.2;
        auto s = sipdfp_step(zs, zs_prev, {K1}, gstar, {fstar}, rep.metric, alpha, 0.8,
                             DualRule::as_written);
        auto i = ipdfp_step(zi, zi_prev, *K1, H, gstar, *fstar, rep.metric, alpha, 0.8,
                            DualRule::as_written);
        zs_prev = zs;
        zi_prev = zi;
        zs = s.next;
        zi = i.next;
        for (std::size_t j = 0; j < n; ++j)
            CHECK(std::abs(zs.x[j] - zi.x[j]) < 1e-12);
        for (std::size_t r = 0; r < 3; ++r)
            CHECK(std::abs(zs.v[0][r] - zi.v[0][r]) < 1e-12);
    }
}

TEST_CASE("sipdfp block permutation invariance")
{
    auto g = testutil::rng(52);
    const std::size_t n = 3;
    auto K1 = std::make_shared<DenseMatrixMap>(2, n, testutil::random_dense(g, 2, n));
    auto K2 = std::make_shared<DenseMatrixMap>(4, n, testutil::random_dense(g, 4, n));
    auto f1 = std::make_shared<ConjugateProx>(std::make_shared<L1Norm>(2, 0.5));
    auto f2 = std::make_shared<ConjugateProx>(std::make_shared<QuadraticDistance>(zeros(4), 1.0));
    ConjugateProx gstar(std::make_shared<L1Norm>(n, 0.1));

    const double n1 = estimate_norm(*K1).value * kNormSafety;
    const double n2 = estimate_norm(*K2).value * kNormSafety;
    const auto rep = validate_split(0.2, 0.2, 0.5 / (n1 * n1 + n2 * n2), {n1, n2});
    REQUIRE(rep.accepted);

    IterTriple a{random_vec(g, n), random_vec(g, n), {random_vec(g, 2), random_vec(g, 4)}};
    IterTriple b{a.x, a.y, {a.v[1], a.v[0]}};
    IterTriple ap = a, bp = b;

    for (int k = 0; k < 30; ++k) {
        const double alpha = k == 0 ? 0.0 : 0.15;
        auto sa = sipdfp_step(a, ap, {K1, K2}, gstar, {f1, f2}, rep.metric, alpha, 0.7,
                              DualRule::as_written);
        auto sb = sipdfp_step(b, bp, {K2, K1}, gstar, {f2, f1}, rep.metric, alpha, 0.7,
                              DualRule::as_written);
        ap = a;
        bp = b;
        a = sa.next;
        b = sb.next;
        for (std::size_t j = 0; j < n; ++j)
            CHECK(std::abs(a.x[j] - b.x[j]) < 1e-12);
        for (std::size_t r = 0; r < 2; ++r)
            CHECK(std::abs(a.v[0][r] - b.v[1][r]) < 1e-12);
        for (std::size_t r = 0; r < 4; ++r)
            CHECK(std::abs(a.v[1][r] - b.v[0][r]) < 1e-12);
    }
}

namespace {

CompositeProblem zero_problem(std::size_t n)
{
    CompositeProblem p;
    p.primal_dim = n;
    p.blocks.push_back({std::make_shared<IdentityMap>(n), std::make_shared<ZeroFunction>(n)});
    p.objective_fn = [](const DenseVector&) { return 0.0; };
    return p;
}

}  // namespace

TEST_CASE("run on the zero problem stops immediately")
{
    const auto rep = validate_scalar(0.5, 0.5, 0.4, 1.0);
    REQUIRE(rep.accepted);
    SolveOptions opt;
    opt.x0 = {1.0, -2.0, 3.0};
    const auto res = run(zero_problem(3), rep.metric, suggest_schedule(0.0), opt);
    CHECK(res.termination == "converged");
    CHECK(res.iterations == 1);
    CHECK(res.x == opt.x0);
    REQUIRE_FALSE(res.trace.empty());
    CHECK(res.trace.back().km_residual_P == 0.0);
}

TEST_CASE("run solves the l1 least-squares toy")
{
    const auto toy = testutil::make_l1ls_toy();
    const auto rep = validate_scalar(0.5, 0.5, 0.4, kNormSafety);  // ||I|| = 1
    REQUIRE(rep.accepted);

    SolveOptions opt;
    opt.max_iter = 10000;
    opt.tol = 1e-14;
    opt.record_every = 1;
    const auto res = run(toy.problem, rep.metric, suggest_schedule(0.1), opt);

    CHECK(toy.problem.objective(res.x) - toy.optimum < 1e-8);
    CHECK(toy.problem.objective(res.x) - toy.optimum > -1e-12);

    // squared-residual partial sums plateau and the tail residual is small
    double sum_sq = 0.0;
    for (const auto& r : res.trace)
        sum_sq += r.km_residual_P * r.km_residual_P;
    CHECK(std::isfinite(sum_sq));
    CHECK(res.trace.back().km_residual_P < 1e-6);

    const auto ref = pdfp::oracle::reference_solve(toy.problem, 200000);
    CHECK(std::abs(toy.problem.objective(res.x) - ref.objective) < 1e-8);
}

TEST_CASE("run is deterministic")
{
    const auto toy = testutil::make_l1ls_toy();
    const auto rep = validate_scalar(0.4, 0.4, 0.4, kNormSafety);
    REQUIRE(rep.accepted);
    SolveOptions opt;
    opt.max_iter = 500;
    opt.tol = 0.0;
    const auto a = run(toy.problem, rep.metric, suggest_schedule(0.2), opt);
    const auto b = run(toy.problem, rep.metric, suggest_schedule(0.2), opt);
    CHECK(a.x == b.x);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
        CHECK(a.trace[i].objective == b.trace[i].objective);
        CHECK(a.trace[i].km_residual_P == b.trace[i].km_residual_P);
    }
}

TEST_CASE("run refuses an unvalidated metric")
{
    const auto toy = testutil::make_l1ls_toy();
    CHECK_THROWS_AS(
        run(toy.problem, StepMetric::scalar(0.5, 0.5, 0.4), suggest_schedule(0.0), SolveOptions{}),
        std::invalid_argument);
}
