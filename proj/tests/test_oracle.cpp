#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "pdfp/oracle.hpp"
#include "pdfp/precond.hpp"
#include "pdfp/solver.hpp"

#include <cmath>
#include <memory>

using namespace pdfp;
using namespace pdfp::oracle;
using testutil::random_vec;

TEST_CASE("grid prox oracle basics")
{
    const GridSpec grid{-4.0, 4.0, 1e-4};
    const auto zero = [](const DenseVector&) { return 0.0; };
    const auto r0 = prox_oracle(zero, 1.0, {1.23456}, grid);
    CHECK(std::abs(r0.point[0] - 1.23456) <= 1e-4);
    CHECK_FALSE(r0.on_boundary);

    const auto l1 = [](const DenseVector& y) { return std::abs(y[0]); };
    const auto r1 = prox_oracle(l1, 1.0, {2.0}, grid);
    CHECK(std::abs(r1.point[0] - 1.0) <= 2e-4);

    const auto quad = [](const DenseVector& y) { return 0.5 * y[0] * y[0]; };
    const auto r2 = prox_oracle(quad, 1.0, {4.0}, grid);
    CHECK(std::abs(r2.point[0] - 2.0) <= 2e-4);

    // boundary flag when the window cannot bracket the minimizer
    const auto rb = prox_oracle(zero, 1.0, {10.0}, GridSpec{-1.0, 1.0, 1e-3});
    CHECK(rb.on_boundary);

    CHECK_THROWS_AS(prox_oracle(zero, 1.0, {1.0, 2.0, 3.0}, grid), std::invalid_argument);
    CHECK_THROWS_AS(prox_oracle(zero, 1.0, {1.0}, GridSpec{1.0, -1.0, 1e-3}),
                    std::invalid_argument);
}

TEST_CASE("grid prox oracle in two dimensions")
{
    const auto group = [](const DenseVector& y) { return std::hypot(y[0], y[1]); };
    const auto r = prox_oracle(group, 2.5, {3.0, 4.0}, GridSpec{-0.5, 4.5, 2.5e-3});
    CHECK(std::abs(r.point[0] - 1.5) <= 5e-3);
    CHECK(std::abs(r.point[1] - 2.0) <= 5e-3);
}

TEST_CASE("cp_reference_step hand values and fixed point")
{
    QuadraticDistance H({0.0}, 1.0);
    ConjugateProx fstar(std::make_shared<ZeroFunction>(1));
    IdentityMap K(1);

    DenseVector x{1.0}, v{0.0};
    cp_reference_step(x, v, K, H, fstar, 0.4, 0.4);
    CHECK(x[0] == doctest::Approx(1.0 / 1.4).epsilon(1e-15));
    CHECK(v[0] == 0.0);

    // fixed point of min 1/2||x-b||^2: x = b, v = 0
    QuadraticDistance Hb({2.5}, 1.0);
    DenseVector xf{2.5}, vf{0.0};
    cp_reference_step(xf, vf, K, Hb, fstar, 0.4, 0.4);
    CHECK(xf[0] == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(vf[0] == 0.0);
}

TEST_CASE("ipdfp reduces to Chambolle-Pock without G and inertia")
{
    auto g = testutil::rng(71);
    const std::size_t n = 5;
    auto K = std::make_shared<DenseMatrixMap>(n, n, testutil::random_dense(g, n, n));
    const DenseVector b = random_vec(g, n);
    QuadraticDistance H(b, 1.0);
    auto F = std::make_shared<L1Norm>(n, 0.7);
    ConjugateProx fstar(F);
    ConjugateProx gstar(std::make_shared<ZeroFunction>(n));

    const double nk = estimate_norm(*K).value * kNormSafety;
    const double sigma = 0.5 / nk, tau = 0.5 / nk;
    const auto rep = validate_scalar(sigma, sigma, tau, nk);
    REQUIRE(rep.accepted);

    DenseVector x_cp = random_vec(g, n), v_cp = random_vec(g, n);
    IterTriple z{x_cp, zeros(n), {v_cp}};
    IterTriple z_prev = z;

    for (int k = 0; k < 50; ++k) {
        cp_reference_step(x_cp, v_cp, *K, H, fstar, sigma, tau);
        const auto out =
            ipdfp_step(z, z_prev, *K, H, gstar, fstar, rep.metric, 0.0, 1.0, DualRule::condat);
        z_prev = z;
        z = out.next;
        for (std::size_t j = 0; j < n; ++j) {
            CHECK(std::abs(z.x[j] - x_cp[j]) < 1e-12);
            CHECK(std::abs(z.v[0][j] - v_cp[j]) < 1e-12);
        }
    }
}

TEST_CASE("reference_solve on the zero problem returns the start")
{
    CompositeProblem p;
    p.primal_dim = 2;
    p.blocks.push_back({std::make_shared<IdentityMap>(2), std::make_shared<ZeroFunction>(2)});
    p.objective_fn = [](const DenseVector&) { return 0.0; };
    const auto sol = reference_solve(p, 1000, {1.5, -0.5});
    CHECK(sol.x == DenseVector{1.5, -0.5});
    CHECK(sol.objective == 0.0);
    CHECK_FALSE(sol.low_confidence);
}

TEST_CASE("reference_solve matches the closed-form soft threshold")
{
    const auto toy = testutil::make_l1ls_toy();
    const auto sol = reference_solve(toy.problem, 200000);
    for (std::size_t i = 0; i < toy.solution.size(); ++i)
        CHECK(std::abs(sol.x[i] - toy.solution[i]) < 1e-8);
    CHECK(std::abs(sol.objective - toy.optimum) < 1e-10);
}

TEST_CASE("reference_solve agrees with proximal gradient on the logistic toy")
{
    const auto data = testutil::make_logreg_data();
    const double tau = 0.05;
    const auto p = build_logreg(data, tau, 2);
    const auto ref = reference_solve(p, 200000);
    const auto ista = logreg_prox_grad(data, tau, 200000);
    CHECK(std::abs(ref.objective - ista.objective) < 1e-7);
}

TEST_CASE("reference_solve refuses large problems")
{
    CompositeProblem p;
    p.primal_dim = 101;
    p.blocks.push_back({std::make_shared<IdentityMap>(101), std::make_shared<ZeroFunction>(101)});
    p.objective_fn = [](const DenseVector&) { return 0.0; };
    CHECK_THROWS_AS(reference_solve(p, 10), std::invalid_argument);
}
