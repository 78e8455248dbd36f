#include "pdfp/oracle.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace pdfp {
namespace oracle {

namespace {

/// Inline Moreau identity, kept separate from the prox module's
/// ConjugateProx on purpose: the oracle must not share the audited path.
DenseVector moreau_conjugate(const ProxFunction& f, double lambda, const DenseVector& u)
{
    DenseVector scaled(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        scaled[i] = u[i] / lambda;
    DenseVector p = f.prox(StepSize(1.0 / lambda), scaled);
    DenseVector r(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        r[i] = u[i] - lambda * p[i];
    return r;
}

}  // namespace

GridProxResult prox_oracle(const std::function<double(const DenseVector&)>& f, double lambda,
                           const DenseVector& u, const GridSpec& grid)
{
    if (u.empty() || u.size() > 2)
        throw std::invalid_argument("prox_oracle: only dims 1 and 2 are supported");
    if (!(grid.lo < grid.hi))
        throw std::invalid_argument("prox_oracle: need lo < hi");
    if (!(grid.pitch > 0.0) || grid.pitch > grid.hi - grid.lo)
        throw std::invalid_argument("prox_oracle: invalid pitch");

    const std::size_t steps = static_cast<std::size_t>((grid.hi - grid.lo) / grid.pitch) + 1;
    const auto point = [&](std::size_t i) { return grid.lo + static_cast<double>(i) * grid.pitch; };

    GridProxResult best;
    double best_val = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> best_idx;

    DenseVector y(u.size());
    if (u.size() == 1) {
        for (std::size_t i = 0; i < steps; ++i) {
            y[0] = point(i);
            const double val = lambda * f(y) + 0.5 * (y[0] - u[0]) * (y[0] - u[0]);
            if (val < best_val) {
                best_val = val;
                best.point = y;
                best_idx = {i};
            }
        }
    } else {
        for (std::size_t i = 0; i < steps; ++i) {
            y[0] = point(i);
            for (std::size_t j = 0; j < steps; ++j) {
                y[1] = point(j);
                const double d0 = y[0] - u[0], d1 = y[1] - u[1];
                const double val = lambda * f(y) + 0.5 * (d0 * d0 + d1 * d1);
                if (val < best_val) {
                    best_val = val;
                    best.point = y;
                    best_idx = {i, j};
                }
            }
        }
    }
    if (!std::isfinite(best_val))
        throw std::runtime_error("prox_oracle: objective is +inf on the whole grid");
    for (std::size_t idx : best_idx)
        if (idx == 0 || idx == steps - 1)
            best.on_boundary = true;
    return best;
}

ReferenceSolution reference_solve(const CompositeProblem& problem, std::size_t budget,
                                  DenseVector x0)
{
    problem.check();
    if (problem.primal_dim > 100)
        throw std::invalid_argument("reference_solve: desk scale only (primal dim <= 100)");

    const std::size_t n = problem.primal_dim;
    const std::size_t m = problem.blocks.size();

    double norms_sq = 0.0;
    for (const auto& b : problem.blocks) {
        const double nb = estimate_norm(*b.K).value * kNormSafety;
        norms_sq += nb * nb;
    }
    // sigma = gamma = tau = s with s^2 (1 + sum||K_i||^2) = 0.5
    const double s = std::sqrt(0.5 / (1.0 + norms_sq));

    DenseVector x = x0.empty() ? zeros(n) : std::move(x0);
    if (x.size() != n)
        throw std::invalid_argument("reference_solve: x0 length mismatch");
    DenseVector y = zeros(n);
    std::vector<DenseVector> v;
    for (const auto& b : problem.blocks)
        v.push_back(zeros(b.K->out_dim()));

    ReferenceSolution sol;
    sol.objective = std::numeric_limits<double>::infinity();
    sol.x = x;

    double residual = std::numeric_limits<double>::infinity();
    std::size_t k = 0;
    for (k = 1; k <= budget; ++k) {
        // primal update
        DenseVector ksum = zeros(n);
        for (std::size_t i = 0; i < m; ++i) {
            DenseVector a = problem.blocks[i].K->adjoint_apply(v[i]);
            for (std::size_t j = 0; j < n; ++j)
                ksum[j] += a[j];
        }
        DenseVector x_new(n);
        if (problem.consensus) {
            for (std::size_t j = 0; j < n; ++j)
                x_new[j] = x[j] - s * y[j] - s / static_cast<double>(m) * ksum[j];
        } else {
            DenseVector arg(n);
            for (std::size_t j = 0; j < n; ++j)
                arg[j] = x[j] - s * y[j] - s * ksum[j];
            x_new = problem.H ? problem.H->prox(StepSize(s), arg) : arg;
        }

        // G-dual update
        DenseVector y_new;
        if (problem.G) {
            DenseVector arg(n);
            for (std::size_t j = 0; j < n; ++j)
                arg[j] = y[j] + s * x[j];
            y_new = moreau_conjugate(*problem.G, s, arg);
        } else {
            y_new = zeros(n);
        }

        // F-dual updates at the primal point (Condat rule)
        DenseVector probe(n);
        for (std::size_t j = 0; j < n; ++j)
            probe[j] = 2.0 * x_new[j] - x[j];
        double change_sq = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            DenseVector kp = problem.blocks[i].K->apply(probe);
            DenseVector arg(kp.size());
            for (std::size_t r = 0; r < kp.size(); ++r)
                arg[r] = v[i][r] + s * kp[r];
            DenseVector v_new = moreau_conjugate(*problem.blocks[i].F, s, arg);
            for (std::size_t r = 0; r < v_new.size(); ++r) {
                const double d = v_new[r] - v[i][r];
                change_sq += d * d;
            }
            v[i] = std::move(v_new);
        }
        for (std::size_t j = 0; j < n; ++j) {
            const double dx = x_new[j] - x[j], dy = y_new[j] - y[j];
            change_sq += dx * dx + dy * dy;
        }
        x = std::move(x_new);
        y = std::move(y_new);

        const double obj = problem.objective(x);
        if (obj < sol.objective) {
            sol.objective = obj;
            sol.x = x;
        }
        residual = std::sqrt(change_sq);
        if (residual <= 1e-15 * (1.0 + norm2(x)))
            break;
    }
    sol.iterations = std::min(k, budget);
    sol.low_confidence = residual > 1e-10;
    return sol;
}

void cp_reference_step(DenseVector& x, DenseVector& v, const LinearMap& K,
                       const ProxFunction& prox_h, const ProxFunction& prox_fstar, double sigma,
                       double tau)
{
    const std::size_t n = x.size();
    DenseVector kv = K.adjoint_apply(v);
    DenseVector arg_x(n);
    for (std::size_t j = 0; j < n; ++j)
        arg_x[j] = x[j] - sigma * kv[j];
    DenseVector x_new = prox_h.prox(StepSize(sigma), arg_x);

    DenseVector probe(n);
    for (std::size_t j = 0; j < n; ++j)
        probe[j] = 2.0 * x_new[j] - x[j];
    DenseVector kp = K.apply(probe);
    DenseVector arg_v(kp.size());
    for (std::size_t i = 0; i < kp.size(); ++i)
        arg_v[i] = v[i] + tau * kp[i];
    v = prox_fstar.prox(StepSize(tau), arg_v);
    x = std::move(x_new);
}

ReferenceSolution logreg_prox_grad(const LogRegDataset& data, double tau, std::size_t iters)
{
    data.check();
    const std::size_t m = data.m(), q = data.q;

    std::vector<double> flat;
    flat.reserve(m * q);
    for (const auto& row : data.features)
        flat.insert(flat.end(), row.begin(), row.end());
    const DenseMatrixMap A(m, q, std::move(flat));
    const double normA = estimate_norm(A).value * kNormSafety;
    const double L = normA * normA / (4.0 * static_cast<double>(m));
    const double step = 1.0 / std::max(L, 1e-12);

    DenseVector x = zeros(q);
    for (std::size_t k = 0; k < iters; ++k) {
        DenseVector grad = zeros(q);
        for (std::size_t i = 0; i < m; ++i) {
            const double yt = data.labels[i] * dot(data.features[i], x);
            double sig;  // 1/(1+e^{yt}), stable
            if (yt > 0.0) {
                const double e = std::exp(-yt);
                sig = e / (1.0 + e);
            } else {
                sig = 1.0 / (1.0 + std::exp(yt));
            }
            const double c = -data.labels[i] * sig / static_cast<double>(m);
            axpy(c, data.features[i], grad);
        }
        const double t = step * tau;
        for (std::size_t j = 0; j < q; ++j) {
            const double u = x[j] - step * grad[j];
            x[j] = u > t ? u - t : (u < -t ? u + t : 0.0);
        }
    }

    ReferenceSolution sol;
    sol.x = x;
    sol.iterations = iters;
    double loss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double yt = data.labels[i] * dot(data.features[i], x);
        loss += yt < 0.0 ? -yt + std::log1p(std::exp(yt)) : std::log1p(std::exp(-yt));
    }
    double l1 = 0.0;
    for (double xi : x)
        l1 += std::abs(xi);
    sol.objective = loss / static_cast<double>(m) + tau * l1;
    sol.low_confidence = false;
    return sol;
}

}  // namespace oracle
}  // namespace pdfp
