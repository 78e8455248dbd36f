#pragma once

// Shared fixtures for the unit and acceptance suites: deterministic RNG
// wrappers and the two desk-scale toy problems.

#include "pdfp/linop.hpp"
#include "pdfp/problems.hpp"
#include "pdfp/prox.hpp"
#include "pdfp/vec.hpp"

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>

namespace testutil {

using pdfp::DenseVector;

inline std::mt19937 rng(std::uint32_t seed)
{
    return std::mt19937(seed);
}

inline DenseVector random_vec(std::mt19937& g, std::size_t n, double lo = -1.0, double hi = 1.0)
{
    std::uniform_real_distribution<double> d(lo, hi);
    DenseVector v(n);
    for (auto& x : v)
        x = d(g);
    return v;
}

inline std::vector<double> random_dense(std::mt19937& g, std::size_t rows, std::size_t cols,
                                        double lo = -1.0, double hi = 1.0)
{
    return random_vec(g, rows * cols, lo, hi);
}

/// Sparse random matrix with every row guaranteed a nonzero entry.
inline std::vector<double> random_sparse(std::mt19937& g, std::size_t rows, std::size_t cols,
                                         double density)
{
    std::uniform_real_distribution<double> val(-2.0, 2.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick(0, cols - 1);
    std::vector<double> a(rows * cols, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
        bool any = false;
        for (std::size_t j = 0; j < cols; ++j)
            if (coin(g) < density) {
                a[i * cols + j] = val(g);
                any = true;
            }
        if (!any)
            a[i * cols + pick(g)] = val(g);
    }
    return a;
}

/// 5-dim l1-regularized least squares: min (1/2)||x - b||^2 + tau ||x||_1.
/// The solver sees H = quadratic, one block (I, tau*l1); the minimizer is
/// the soft-threshold of b.
struct L1LSToy {
    pdfp::CompositeProblem problem;
    DenseVector b;
    double tau;
    DenseVector solution;
    double optimum;
};

inline L1LSToy make_l1ls_toy()
{
    L1LSToy toy;
    toy.b = {1.2, -0.3, 2.5, 0.0, -1.7};
    toy.tau = 0.5;
    const std::size_t n = toy.b.size();

    pdfp::CompositeProblem p;
    p.primal_dim = n;
    p.H = std::make_shared<pdfp::QuadraticDistance>(toy.b, 1.0);
    p.blocks.push_back({std::make_shared<pdfp::IdentityMap>(n),
                        std::make_shared<pdfp::L1Norm>(n, toy.tau)});
    const DenseVector b = toy.b;
    const double tau = toy.tau;
    p.objective_fn = [b, tau](const DenseVector& x) {
        double q = 0.0, l1 = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            q += 0.5 * (x[i] - b[i]) * (x[i] - b[i]);
            l1 += std::abs(x[i]);
        }
        return q + tau * l1;
    };
    toy.problem = std::move(p);

    toy.solution.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = toy.b[i];
        toy.solution[i] = u > toy.tau ? u - toy.tau : (u < -toy.tau ? u + toy.tau : 0.0);
    }
    toy.optimum = toy.problem.objective(toy.solution);
    return toy;
}

/// 4-sample, 2-feature linearly separable logistic dataset. Feature scale
/// ~10 keeps the l1-regularized minimizer at moderate norm even for tiny
/// regularization weights.
inline pdfp::LogRegDataset make_logreg_data()
{
    pdfp::LogRegDataset d;
    d.q = 2;
    d.features = {{10.0, 20.0}, {20.0, 10.0}, {-10.0, -15.0}, {-15.0, -5.0}};
    d.labels = {1.0, 1.0, -1.0, -1.0};
    return d;
}

}  // namespace testutil
